#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace fsmid {

// Ordered set of distinct single-character symbol names. The position of a
// name is its symbol id; all canonical enumeration orders depend on it, so
// the order is fixed for the lifetime of the value.
struct Alphabet {
    std::vector<char> symbols;

    Alphabet() = default;
    explicit Alphabet(std::vector<char> syms) : symbols(std::move(syms)) {
        if (symbols.empty())
            throw input_error("alphabet must be non-empty");
        std::set<char> seen;
        for (char c : symbols)
            if (!seen.insert(c).second)
                throw input_error(std::string("duplicate alphabet symbol '") + c + "'");
    }
    explicit Alphabet(const std::string& syms)
        : Alphabet(std::vector<char>(syms.begin(), syms.end())) {}

    int size() const { return static_cast<int>(symbols.size()); }

    char name(int id) const {
        if (id < 0 || id >= size())
            throw input_error("symbol id " + std::to_string(id) + " out of range");
        return symbols[static_cast<size_t>(id)];
    }

    std::optional<int> find(char c) const {
        for (int i = 0; i < size(); ++i)
            if (symbols[static_cast<size_t>(i)] == c) return i;
        return std::nullopt;
    }

    int id_of(char c) const {
        auto i = find(c);
        if (!i) throw input_error(std::string("symbol '") + c + "' not in alphabet");
        return *i;
    }

    bool operator==(const Alphabet&) const = default;
};

// Sequence of symbol ids; the empty sequence is epsilon.
using InputString = std::vector<int>;

// Length-then-lexicographic order, the canonical string order everywhere.
struct LengthLexLess {
    bool operator()(const InputString& a, const InputString& b) const {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    }
};

inline InputString parse_string(const std::string& text, const Alphabet& sigma) {
    InputString w;
    w.reserve(text.size());
    for (char c : text) w.push_back(sigma.id_of(c));
    return w;
}

inline std::string format_string(const InputString& w, const Alphabet& sigma) {
    std::string out;
    out.reserve(w.size());
    for (int id : w) out.push_back(sigma.name(id));
    return out;
}

// Deterministic finite-state machine with one output symbol per state.
// Behavior B(w) is the output of the state reached from `initial` by w,
// total over all strings including epsilon.
struct MooreMachine {
    Alphabet input_alphabet;
    Alphabet output_alphabet;
    int initial = 0;
    std::vector<std::vector<int>> delta; // delta[state][symbol] -> state
    std::vector<int> lambda;             // lambda[state] -> output id

    int states() const { return static_cast<int>(delta.size()); }

    void validate() const {
        int n = states();
        if (n < 1) throw input_error("machine needs at least one state");
        if (initial < 0 || initial >= n)
            throw input_error("initial state " + std::to_string(initial) + " out of range");
        if (static_cast<int>(lambda.size()) != n)
            throw input_error("lambda size does not match state count");
        for (int s = 0; s < n; ++s) {
            const auto& row = delta[static_cast<size_t>(s)];
            if (static_cast<int>(row.size()) != input_alphabet.size())
                throw input_error("delta row " + std::to_string(s) + " has wrong arity");
            for (int a = 0; a < input_alphabet.size(); ++a) {
                int t = row[static_cast<size_t>(a)];
                if (t < 0 || t >= n)
                    throw input_error("delta[" + std::to_string(s) + "][" +
                                      std::to_string(a) + "] = " + std::to_string(t) +
                                      " out of range");
            }
            int o = lambda[static_cast<size_t>(s)];
            if (o < 0 || o >= output_alphabet.size())
                throw input_error("lambda[" + std::to_string(s) + "] = " +
                                  std::to_string(o) + " out of range");
        }
    }

    bool operator==(const MooreMachine&) const = default;
};

inline int step(const MooreMachine& m, int state, int symbol) {
    if (symbol < 0 || symbol >= m.input_alphabet.size())
        throw input_error("symbol id " + std::to_string(symbol) + " out of range");
    return m.delta[static_cast<size_t>(state)][static_cast<size_t>(symbol)];
}

inline int end_state(const MooreMachine& m, const InputString& w) {
    int s = m.initial;
    for (int a : w) s = step(m, s, a);
    return s;
}

// B(w): output id of the state reached by w.
inline int run(const MooreMachine& m, const InputString& w) {
    return m.lambda[static_cast<size_t>(end_state(m, w))];
}

// All strings of length <= max_len in length-lex order, with the state each
// one reaches. Shared helper for behaviors() and the exhaustive drivers.
template <typename Fn>
void for_each_string(const MooreMachine& m, int max_len, Fn&& fn) {
    std::deque<std::pair<InputString, int>> frontier;
    frontier.emplace_back(InputString{}, m.initial);
    while (!frontier.empty()) {
        auto [w, s] = std::move(frontier.front());
        frontier.pop_front();
        fn(w, s);
        if (static_cast<int>(w.size()) < max_len) {
            for (int a = 0; a < m.input_alphabet.size(); ++a) {
                InputString next = w;
                next.push_back(a);
                frontier.emplace_back(std::move(next), step(m, s, a));
            }
        }
    }
}

// Drops unreachable states and relabels the rest in breadth-first discovery
// order, exploring symbols in alphabet order. Behavior-preserving;
// isomorphic reachable parts map to identical encodings.
inline MooreMachine canonicalize(const MooreMachine& m) {
    std::vector<int> relabel(static_cast<size_t>(m.states()), -1);
    std::vector<int> order;
    relabel[static_cast<size_t>(m.initial)] = 0;
    order.push_back(m.initial);
    for (size_t i = 0; i < order.size(); ++i) {
        int s = order[i];
        for (int a = 0; a < m.input_alphabet.size(); ++a) {
            int t = step(m, s, a);
            if (relabel[static_cast<size_t>(t)] < 0) {
                relabel[static_cast<size_t>(t)] = static_cast<int>(order.size());
                order.push_back(t);
            }
        }
    }
    MooreMachine out;
    out.input_alphabet = m.input_alphabet;
    out.output_alphabet = m.output_alphabet;
    out.initial = 0;
    out.delta.resize(order.size());
    out.lambda.resize(order.size());
    for (size_t i = 0; i < order.size(); ++i) {
        int s = order[i];
        out.lambda[i] = m.lambda[static_cast<size_t>(s)];
        out.delta[i].resize(static_cast<size_t>(m.input_alphabet.size()));
        for (int a = 0; a < m.input_alphabet.size(); ++a)
            out.delta[i][static_cast<size_t>(a)] =
                relabel[static_cast<size_t>(step(m, s, a))];
    }
    return out;
}

// Partition refinement over output classes on the reachable part. Returns
// the unique (up to isomorphism) minimum-state machine with the same
// behavior, in canonical labeling.
inline MooreMachine minimize(const MooreMachine& m) {
    MooreMachine r = canonicalize(m);
    int n = r.states();
    std::vector<int> block(static_cast<size_t>(n));
    for (int s = 0; s < n; ++s) block[static_cast<size_t>(s)] = r.lambda[static_cast<size_t>(s)];
    for (;;) {
        // signature = (block, successor blocks)
        std::map<std::vector<int>, int> sig_to_block;
        std::vector<int> next(static_cast<size_t>(n));
        for (int s = 0; s < n; ++s) {
            std::vector<int> sig;
            sig.push_back(block[static_cast<size_t>(s)]);
            for (int a = 0; a < r.input_alphabet.size(); ++a)
                sig.push_back(block[static_cast<size_t>(step(r, s, a))]);
            auto [it, inserted] =
                sig_to_block.emplace(std::move(sig), static_cast<int>(sig_to_block.size()));
            next[static_cast<size_t>(s)] = it->second;
        }
        if (next == block) break;
        block = std::move(next);
    }
    int n_blocks = *std::max_element(block.begin(), block.end()) + 1;
    MooreMachine q;
    q.input_alphabet = r.input_alphabet;
    q.output_alphabet = r.output_alphabet;
    q.initial = block[static_cast<size_t>(r.initial)];
    q.delta.assign(static_cast<size_t>(n_blocks),
                   std::vector<int>(static_cast<size_t>(r.input_alphabet.size()), -1));
    q.lambda.assign(static_cast<size_t>(n_blocks), -1);
    for (int s = 0; s < n; ++s) {
        int b = block[static_cast<size_t>(s)];
        q.lambda[static_cast<size_t>(b)] = r.lambda[static_cast<size_t>(s)];
        for (int a = 0; a < r.input_alphabet.size(); ++a)
            q.delta[static_cast<size_t>(b)][static_cast<size_t>(a)] =
                block[static_cast<size_t>(step(r, s, a))];
    }
    return canonicalize(q);
}

// Breadth-first product traversal. Returns a shortest-in-discovery-order
// string on which the behaviors differ, or nullopt when equivalent.
inline std::optional<InputString> equivalence_witness(const MooreMachine& a,
                                                      const MooreMachine& b) {
    if (a.input_alphabet != b.input_alphabet || a.output_alphabet != b.output_alphabet)
        throw input_error("equivalence requires identical alphabets");
    std::set<std::pair<int, int>> seen;
    std::deque<std::pair<std::pair<int, int>, InputString>> frontier;
    frontier.push_back({{a.initial, b.initial}, {}});
    seen.insert({a.initial, b.initial});
    while (!frontier.empty()) {
        auto [pair, w] = std::move(frontier.front());
        frontier.pop_front();
        auto [sa, sb] = pair;
        if (a.lambda[static_cast<size_t>(sa)] != b.lambda[static_cast<size_t>(sb)])
            return w;
        for (int sym = 0; sym < a.input_alphabet.size(); ++sym) {
            std::pair<int, int> next{step(a, sa, sym), step(b, sb, sym)};
            if (seen.insert(next).second) {
                InputString nw = w;
                nw.push_back(sym);
                frontier.push_back({next, std::move(nw)});
            }
        }
    }
    return std::nullopt;
}

inline bool equivalent(const MooreMachine& a, const MooreMachine& b) {
    return !equivalence_witness(a, b).has_value();
}

} // namespace fsmid
