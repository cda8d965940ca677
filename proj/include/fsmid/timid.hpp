#pragma once

#include <deque>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "automata.hpp"
#include "errors.hpp"
#include "observations.hpp"

namespace fsmid {

struct TimidStats {
    long attempts = 0; // candidate unifications tried (incl. rolled-back ones)
    long unions = 0;   // class merges actually performed
};

namespace detail {

// Prefix tree of dom(d) with class-level union-find. Class attributes
// (observed output, per-symbol child class) live at the root; merges are
// congruence-closed through a worklist and fully journaled so a failed
// unification rolls back to the exact prior state.
struct MergeForest {
    int sigma;
    std::vector<int> parent;
    std::vector<int> out;       // -1 = unobserved
    std::vector<int> child;     // node * sigma, -1 = absent
    std::vector<char> promoted; // roots that are hypothesis states
    std::vector<std::pair<int*, int>> journal;

    MergeForest(int n_nodes, int sigma_size)
        : sigma(sigma_size), parent(static_cast<size_t>(n_nodes)),
          out(static_cast<size_t>(n_nodes), -1),
          child(static_cast<size_t>(n_nodes) * static_cast<size_t>(sigma_size), -1),
          promoted(static_cast<size_t>(n_nodes), 0) {
        for (int i = 0; i < n_nodes; ++i) parent[static_cast<size_t>(i)] = i;
    }

    int find(int x) const {
        while (parent[static_cast<size_t>(x)] != x) x = parent[static_cast<size_t>(x)];
        return x;
    }

    int& child_slot(int node, int a) {
        return child[static_cast<size_t>(node) * static_cast<size_t>(sigma) +
                     static_cast<size_t>(a)];
    }

    void set(int* slot, int value) {
        journal.emplace_back(slot, *slot);
        *slot = value;
    }

    size_t mark() const { return journal.size(); }

    void rollback(size_t to) {
        while (journal.size() > to) {
            auto [slot, old] = journal.back();
            journal.pop_back();
            *slot = old;
        }
    }

    // Merge the classes of x and y and everything congruence demands.
    // Returns false on an output clash, leaving partial changes in the
    // journal for the caller to roll back.
    bool unify(int x, int y, TimidStats& stats) {
        std::deque<std::pair<int, int>> pending{{x, y}};
        while (!pending.empty()) {
            auto [px, py] = pending.front();
            pending.pop_front();
            int rx = find(px), ry = find(py);
            if (rx == ry) continue;
            // A promoted state root must survive the merge; otherwise the
            // closure could silently orphan a hypothesis state.
            if (promoted[static_cast<size_t>(ry)] && !promoted[static_cast<size_t>(rx)])
                std::swap(rx, ry);
            ++stats.unions;
            set(&parent[static_cast<size_t>(ry)], rx);
            if (out[static_cast<size_t>(ry)] >= 0) {
                if (out[static_cast<size_t>(rx)] < 0)
                    set(&out[static_cast<size_t>(rx)], out[static_cast<size_t>(ry)]);
                else if (out[static_cast<size_t>(rx)] != out[static_cast<size_t>(ry)])
                    return false;
            }
            for (int a = 0; a < sigma; ++a) {
                int cy = child_slot(ry, a);
                if (cy < 0) continue;
                int& cx = child_slot(rx, a);
                if (cx < 0)
                    set(&cx, cy);
                else
                    pending.emplace_back(cx, cy);
            }
        }
        return true;
    }
};

} // namespace detail

// State-merging identification: fold the prefix tree of the data greedily.
// Nodes are visited in length-lex order; each one not already absorbed into
// a state is unified with the earliest-promoted state it fits (congruence
// closure included), or promoted to a new state. Transitions the data never
// exercises become self-loops; a state with no observed output emits output
// 0. Always consistent with the data; minimal only when the data is rich
// enough.
inline MooreMachine hypothesis(const ObservationSet& d, TimidStats* stats = nullptr) {
    int sigma = d.input_alphabet.size();
    // Length-lex node ids for every prefix of dom(d).
    std::map<InputString, int, LengthLexLess> node_id;
    std::set<InputString, LengthLexLess> prefixes;
    for (const auto& [w, o] : d.entries)
        for (size_t len = 0; len <= w.size(); ++len)
            prefixes.insert(InputString(w.begin(), w.begin() + static_cast<long>(len)));
    prefixes.insert(InputString{});
    std::vector<InputString> nodes(prefixes.begin(), prefixes.end());
    int n_nodes = static_cast<int>(nodes.size());
    for (int i = 0; i < n_nodes; ++i) node_id.emplace(nodes[static_cast<size_t>(i)], i);

    detail::MergeForest forest(n_nodes, sigma);
    for (int i = 1; i < n_nodes; ++i) {
        const auto& w = nodes[static_cast<size_t>(i)];
        InputString p(w.begin(), w.end() - 1);
        forest.child_slot(node_id.at(p), w.back()) = i;
    }
    for (const auto& [w, o] : d.entries)
        forest.out[static_cast<size_t>(node_id.at(w))] = o;

    TimidStats local;
    TimidStats& st = stats ? *stats : local;
    std::vector<int> state_roots; // promotion order
    for (int n = 0; n < n_nodes; ++n) {
        int r = forest.find(n);
        if (forest.promoted[static_cast<size_t>(r)]) continue; // absorbed already
        bool merged = false;
        for (int s : state_roots) {
            ++st.attempts;
            size_t checkpoint = forest.mark();
            if (forest.unify(s, r, st)) {
                merged = true;
                break;
            }
            forest.rollback(checkpoint);
        }
        if (!merged) {
            state_roots.push_back(r);
            forest.promoted[static_cast<size_t>(r)] = 1;
        }
    }

    std::map<int, int> state_index;
    for (size_t q = 0; q < state_roots.size(); ++q)
        state_index.emplace(state_roots[q], static_cast<int>(q));
    MooreMachine m;
    m.input_alphabet = d.input_alphabet;
    m.output_alphabet = d.output_alphabet;
    m.initial = state_index.at(forest.find(0));
    m.delta.resize(state_roots.size());
    m.lambda.resize(state_roots.size());
    for (size_t q = 0; q < state_roots.size(); ++q) {
        int r = state_roots[q];
        int o = forest.out[static_cast<size_t>(r)];
        m.lambda[q] = o < 0 ? 0 : o;
        m.delta[q].resize(static_cast<size_t>(sigma));
        for (int a = 0; a < sigma; ++a) {
            int c = forest.child_slot(r, a);
            m.delta[q][static_cast<size_t>(a)] =
                c < 0 ? static_cast<int>(q) : state_index.at(forest.find(c));
        }
    }
    return m;
}

// Every string up to twice the canonical state count: enough data for
// hypothesis() to recover the minimized target exactly.
inline ObservationSet characteristic_sample(const MooreMachine& m) {
    return behaviors(m, 2 * minimize(m).states());
}

struct ConvergenceRow {
    long data_size = 0;
    int hypothesis_states = 0;
    bool is_equivalent = false;
};

struct ConvergenceLog {
    std::vector<ConvergenceRow> rows; // one per data depth, starting at 0
};

// In-the-limit identification trace: feed behaviors(m, len) for each len up
// to max_len and record the learner's progress after each batch.
inline ConvergenceLog identify_incremental(const MooreMachine& m, int max_len) {
    if (max_len < 0) throw input_error("length bound must be >= 0");
    ConvergenceLog log;
    for (int len = 0; len <= max_len; ++len) {
        ObservationSet d = behaviors(m, len);
        MooreMachine h = hypothesis(d);
        log.rows.push_back({static_cast<long>(d.size()), h.states(), equivalent(h, m)});
    }
    return log;
}

inline std::string emit_convergence_csv(const ConvergenceLog& log) {
    std::ostringstream out;
    out << "data_size,hypothesis_states,equivalent\n";
    for (const auto& row : log.rows)
        out << row.data_size << ',' << row.hypothesis_states << ','
            << (row.is_equivalent ? 1 : 0) << '\n';
    return out.str();
}

} // namespace fsmid
