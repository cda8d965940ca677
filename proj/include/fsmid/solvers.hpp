#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "automata.hpp"
#include "charmatrix.hpp"
#include "errors.hpp"
#include "observations.hpp"
#include "sat.hpp"

namespace fsmid {

// The transition-assignment decision problem: is there a machine with k
// states that agrees with d?
struct IdentificationInstance {
    ObservationSet d;
    int k = 1;
};

namespace detail {

// Deterministic backtracking search for a k-state machine consistent with
// the observations. Observations are replayed in lexicographic order
// (prefixes first), so long runs of a single symbol are settled before
// the strings that branch off them; an
// undefined transition entry is branched over ascending state values, with
// fresh states introduced in first-use order (initial is 0, a new entry may
// name at most one state beyond the highest used so far — sound because
// consistency is invariant under relabeling). Outputs are never branched:
// the first observation that completes at a state pins its output.
struct ConsistencySearch {
    const std::vector<std::pair<InputString, int>>& obs;
    int k;
    int sigma;
    std::vector<int> delta;  // k * sigma, -1 = unassigned
    std::vector<int> lambda; // k, -1 = unassigned
    std::vector<int> lambda_trail; // states assigned, for backtracking
    int max_used = 0;

    ConsistencySearch(const std::vector<std::pair<InputString, int>>& observations,
                      int k_states, int sigma_size)
        : obs(observations), k(k_states), sigma(sigma_size),
          delta(static_cast<size_t>(k) * static_cast<size_t>(sigma), -1),
          lambda(static_cast<size_t>(k), -1) {}

    void undo_lambda(size_t to) {
        while (lambda_trail.size() > to) {
            lambda[static_cast<size_t>(lambda_trail.back())] = -1;
            lambda_trail.pop_back();
        }
    }

    // Forward checking: replay every observation under the current partial
    // tables; a fully determined path must end in a state whose output can
    // still take the observed value. Forced outputs are assigned (and
    // journaled) on the spot, to fixpoint. False means the current partial
    // assignment already contradicts the data.
    bool propagate() {
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& [w, out] : obs) {
                int s = 0;
                bool complete = true;
                for (int a : w) {
                    int t = delta[static_cast<size_t>(s) * static_cast<size_t>(sigma) +
                                  static_cast<size_t>(a)];
                    if (t < 0) {
                        complete = false;
                        break;
                    }
                    s = t;
                }
                if (!complete) continue;
                int& l = lambda[static_cast<size_t>(s)];
                if (l < 0) {
                    l = out;
                    lambda_trail.push_back(s);
                    changed = true;
                } else if (l != out) {
                    return false;
                }
            }
        }
        return true;
    }

    bool solve(size_t oi) {
        if (oi == obs.size()) return true;
        const auto& [w, out] = obs[oi];
        int s = 0;
        for (int a : w) {
            int& t = delta[static_cast<size_t>(s) * static_cast<size_t>(sigma) +
                           static_cast<size_t>(a)];
            if (t < 0) {
                int hi = std::min(max_used + 1, k - 1);
                int saved = max_used;
                for (int v = 0; v <= hi; ++v) {
                    t = v;
                    max_used = std::max(saved, v);
                    size_t mark = lambda_trail.size();
                    if (propagate() && solve(oi)) return true;
                    undo_lambda(mark);
                }
                max_used = saved;
                t = -1;
                return false;
            }
            s = t;
        }
        int& l = lambda[static_cast<size_t>(s)];
        if (l >= 0) return l == out && solve(oi + 1);
        size_t mark = lambda_trail.size();
        l = out;
        lambda_trail.push_back(s);
        if (solve(oi + 1)) return true;
        undo_lambda(mark);
        return false;
    }
};

inline MooreMachine machine_from_tables(const ObservationSet& d, int k,
                                        const std::vector<int>& delta,
                                        const std::vector<int>& lambda) {
    MooreMachine m;
    m.input_alphabet = d.input_alphabet;
    m.output_alphabet = d.output_alphabet;
    m.initial = 0;
    int sigma = d.input_alphabet.size();
    m.delta.resize(static_cast<size_t>(k));
    for (int s = 0; s < k; ++s) {
        m.delta[static_cast<size_t>(s)].resize(static_cast<size_t>(sigma));
        for (int a = 0; a < sigma; ++a) {
            int t = delta[static_cast<size_t>(s) * static_cast<size_t>(sigma) +
                          static_cast<size_t>(a)];
            m.delta[static_cast<size_t>(s)][static_cast<size_t>(a)] = t < 0 ? 0 : t;
        }
    }
    m.lambda.resize(static_cast<size_t>(k));
    for (int s = 0; s < k; ++s) {
        int o = lambda[static_cast<size_t>(s)];
        m.lambda[static_cast<size_t>(s)] = o < 0 ? 0 : o;
    }
    return m;
}

} // namespace detail

inline bool consistent_with(const MooreMachine& m, const ObservationSet& d) {
    for (const auto& [w, o] : d.entries)
        if (run(m, w) != o) return false;
    return true;
}

// Enumeration-side oracle for the transition-assignment problem. Returns
// the first consistent k-state machine in the deterministic search order,
// or nullopt. Unconstrained entries default to state 0 / output 0.
inline std::optional<MooreMachine> brute_force_exists(const ObservationSet& d, int k) {
    if (k < 1) throw input_error("state budget must be >= 1");
    std::vector<std::pair<InputString, int>> obs(d.entries.begin(), d.entries.end());
    std::sort(obs.begin(), obs.end()); // lexicographic, prefixes first
    detail::ConsistencySearch search(obs, k, d.input_alphabet.size());
    if (!search.solve(0)) return std::nullopt;
    return detail::machine_from_tables(d, k, search.delta, search.lambda);
}

// ---------------------------------------------------------------------------
// SAT encoding of the transition-assignment problem over the prefix tree of
// dom(d): reach(node,q), trans(q,a,q'), out(q,w) variables, all functional,
// with reach propagated along tree edges and observed nodes forcing the
// output of whichever state they reach.
// ---------------------------------------------------------------------------

struct VarMap {
    int k = 0;
    int n_nodes = 0;
    Alphabet input_alphabet;
    Alphabet output_alphabet;
    std::vector<InputString> nodes; // length-lex; node 0 is the root

    int sigma() const { return input_alphabet.size(); }
    int omega() const { return output_alphabet.size(); }

    int reach_var(int node, int q) const { return 1 + node * k + q; }
    int trans_var(int q, int a, int q2) const {
        return 1 + n_nodes * k + (q * sigma() + a) * k + q2;
    }
    int out_var(int q, int o) const {
        return 1 + n_nodes * k + k * sigma() * k + q * omega() + o;
    }
    int n_vars() const { return n_nodes * k + k * sigma() * k + k * omega(); }
};

inline std::pair<CnfFormula, VarMap> encode(const ObservationSet& d, int k) {
    if (k < 1) throw input_error("state budget must be >= 1");
    VarMap vm;
    vm.k = k;
    vm.input_alphabet = d.input_alphabet;
    vm.output_alphabet = d.output_alphabet;
    StringSet prefixes;
    for (const auto& [w, o] : d.entries)
        for (size_t len = 0; len <= w.size(); ++len)
            prefixes.insert(InputString(w.begin(), w.begin() + static_cast<long>(len)));
    prefixes.insert(InputString{});
    vm.nodes.assign(prefixes.begin(), prefixes.end());
    vm.n_nodes = static_cast<int>(vm.nodes.size());
    std::map<InputString, int, LengthLexLess> node_id;
    for (int i = 0; i < vm.n_nodes; ++i) node_id.emplace(vm.nodes[static_cast<size_t>(i)], i);

    CnfFormula phi;
    phi.n_vars = vm.n_vars();
    auto exactly_one = [&](auto var_of, int count) {
        Clause at_least;
        for (int i = 0; i < count; ++i) at_least.push_back(var_of(i));
        phi.clauses.push_back(std::move(at_least));
        for (int i = 0; i < count; ++i)
            for (int j = i + 1; j < count; ++j)
                phi.clauses.push_back({-var_of(i), -var_of(j)});
    };

    phi.clauses.push_back({vm.reach_var(0, 0)}); // root reached at state 0
    for (int n = 0; n < vm.n_nodes; ++n)
        exactly_one([&](int q) { return vm.reach_var(n, q); }, k);
    for (int q = 0; q < k; ++q)
        for (int a = 0; a < vm.sigma(); ++a)
            exactly_one([&](int q2) { return vm.trans_var(q, a, q2); }, k);
    for (int q = 0; q < k; ++q)
        exactly_one([&](int o) { return vm.out_var(q, o); }, vm.omega());
    // reach(n,q) & trans(q,a,q') -> reach(n·a,q')
    for (int n = 0; n < vm.n_nodes; ++n) {
        const auto& w = vm.nodes[static_cast<size_t>(n)];
        if (w.empty()) continue;
        InputString parent(w.begin(), w.end() - 1);
        int pn = node_id.at(parent);
        int a = w.back();
        for (int q = 0; q < k; ++q)
            for (int q2 = 0; q2 < k; ++q2)
                phi.clauses.push_back(
                    {-vm.reach_var(pn, q), -vm.trans_var(q, a, q2), vm.reach_var(n, q2)});
    }
    // reach(n,q) -> out(q, d(n)) for observed n
    for (const auto& [w, o] : d.entries) {
        int n = node_id.at(w);
        for (int q = 0; q < k; ++q)
            phi.clauses.push_back({-vm.reach_var(n, q), vm.out_var(q, o)});
    }
    return {std::move(phi), std::move(vm)};
}

// Reads the trans/out atoms of a model back into a machine. Entries left
// unconstrained by the assignment default to state 0 / output 0; an
// assignment with two true atoms in one functional group is rejected.
inline MooreMachine decode(const Assignment& a, const VarMap& vm) {
    MooreMachine m;
    m.input_alphabet = vm.input_alphabet;
    m.output_alphabet = vm.output_alphabet;
    m.initial = 0;
    m.delta.assign(static_cast<size_t>(vm.k),
                   std::vector<int>(static_cast<size_t>(vm.sigma()), 0));
    m.lambda.assign(static_cast<size_t>(vm.k), 0);
    for (int q = 0; q < vm.k; ++q) {
        for (int s = 0; s < vm.sigma(); ++s) {
            int found = -1;
            for (int q2 = 0; q2 < vm.k; ++q2)
                if (a.value(vm.trans_var(q, s, q2))) {
                    if (found >= 0)
                        throw decode_error("trans(" + std::to_string(q) + "," +
                                           std::to_string(s) + ",·) is not functional");
                    found = q2;
                }
            m.delta[static_cast<size_t>(q)][static_cast<size_t>(s)] = found < 0 ? 0 : found;
        }
        int out = -1;
        for (int o = 0; o < vm.omega(); ++o)
            if (a.value(vm.out_var(q, o))) {
                if (out >= 0)
                    throw decode_error("out(" + std::to_string(q) + ",·) is not functional");
                out = o;
            }
        m.lambda[static_cast<size_t>(q)] = out < 0 ? 0 : out;
    }
    return m;
}

// SAT-side route: encode, solve, decode.
inline std::optional<MooreMachine> sat_exists(const ObservationSet& d, int k) {
    auto [phi, vm] = encode(d, k);
    auto model = solve(phi);
    if (!model) return std::nullopt;
    return decode(*model, vm);
}

enum class Method { Brute, Sat };

struct MinKResult {
    int k_min = 0;
    MooreMachine machine;
};

// Smallest k <= k_max with a consistent machine. Both methods return the
// same k_min on every input; witnesses may differ.
inline std::optional<MinKResult> min_k(const ObservationSet& d, int k_max, Method method) {
    if (k_max < 1) throw input_error("state budget must be >= 1");
    for (int k = 1; k <= k_max; ++k) {
        auto m = method == Method::Brute ? brute_force_exists(d, k) : sat_exists(d, k);
        if (m) return MinKResult{k, std::move(*m)};
    }
    return std::nullopt;
}

// Number of isomorphism classes (canonical forms of the reachable part) of
// machines with <= k states consistent with d: the ambiguity left by the
// holes. Full enumeration over k-state tables; the caller bounds k and the
// alphabets.
inline long count_consistent(const ObservationSet& d, int k) {
    if (k < 1) throw input_error("state budget must be >= 1");
    int sigma = d.input_alphabet.size();
    int omega = d.output_alphabet.size();
    // Prefix tree of dom(d): per node parent, symbol, observed output.
    StringSet prefixes;
    for (const auto& [w, o] : d.entries)
        for (size_t len = 0; len <= w.size(); ++len)
            prefixes.insert(InputString(w.begin(), w.begin() + static_cast<long>(len)));
    prefixes.insert(InputString{});
    std::vector<InputString> nodes(prefixes.begin(), prefixes.end());
    std::map<InputString, int, LengthLexLess> node_id;
    for (size_t i = 0; i < nodes.size(); ++i) node_id.emplace(nodes[i], static_cast<int>(i));
    std::vector<int> parent(nodes.size(), -1), sym(nodes.size(), -1),
        observed(nodes.size(), -1);
    for (size_t i = 1; i < nodes.size(); ++i) {
        InputString p(nodes[i].begin(), nodes[i].end() - 1);
        parent[i] = node_id.at(p);
        sym[i] = nodes[i].back();
    }
    for (const auto& [w, o] : d.entries) observed[static_cast<size_t>(node_id.at(w))] = o;

    std::set<std::vector<int>> canonical_forms;
    std::vector<int> delta(static_cast<size_t>(k) * static_cast<size_t>(sigma), 0);
    std::vector<int> node_state(nodes.size());
    std::vector<int> required(static_cast<size_t>(k));
    std::vector<int> free_states;
    for (;;) {
        // Map every tree node to its state under this delta (parents precede
        // children in length-lex order).
        node_state[0] = 0;
        for (size_t i = 1; i < nodes.size(); ++i)
            node_state[i] = delta[static_cast<size_t>(node_state[static_cast<size_t>(parent[i])]) *
                                      static_cast<size_t>(sigma) +
                                  static_cast<size_t>(sym[i])];
        std::fill(required.begin(), required.end(), -1);
        bool feasible = true;
        for (size_t i = 0; i < nodes.size() && feasible; ++i) {
            if (observed[i] < 0) continue;
            int& req = required[static_cast<size_t>(node_state[i])];
            if (req < 0)
                req = observed[i];
            else if (req != observed[i])
                feasible = false;
        }
        if (feasible) {
            // Reachable states; only their outputs matter for the canonical form.
            std::vector<bool> reachable(static_cast<size_t>(k), false);
            std::vector<int> stack{0};
            reachable[0] = true;
            while (!stack.empty()) {
                int s = stack.back();
                stack.pop_back();
                for (int a = 0; a < sigma; ++a) {
                    int t = delta[static_cast<size_t>(s) * static_cast<size_t>(sigma) +
                                  static_cast<size_t>(a)];
                    if (!reachable[static_cast<size_t>(t)]) {
                        reachable[static_cast<size_t>(t)] = true;
                        stack.push_back(t);
                    }
                }
            }
            free_states.clear();
            for (int s = 0; s < k; ++s)
                if (reachable[static_cast<size_t>(s)] && required[static_cast<size_t>(s)] < 0)
                    free_states.push_back(s);
            std::vector<int> lambda(static_cast<size_t>(k), 0);
            for (int s = 0; s < k; ++s)
                if (required[static_cast<size_t>(s)] >= 0)
                    lambda[static_cast<size_t>(s)] = required[static_cast<size_t>(s)];
            std::vector<int> choice(free_states.size(), 0);
            for (;;) {
                for (size_t i = 0; i < free_states.size(); ++i)
                    lambda[static_cast<size_t>(free_states[i])] = choice[i];
                MooreMachine m = canonicalize(
                    detail::machine_from_tables(d, k, delta, lambda));
                std::vector<int> key{m.states()};
                for (const auto& row : m.delta)
                    key.insert(key.end(), row.begin(), row.end());
                key.insert(key.end(), m.lambda.begin(), m.lambda.end());
                canonical_forms.insert(std::move(key));
                // Advance the lambda odometer.
                size_t pos = 0;
                while (pos < choice.size() && ++choice[pos] == omega) choice[pos++] = 0;
                if (pos == choice.size()) break;
            }
        }
        // Advance the delta odometer.
        size_t pos = 0;
        while (pos < delta.size() && ++delta[pos] == k) delta[pos++] = 0;
        if (pos == delta.size()) break;
    }
    return static_cast<long>(canonical_forms.size());
}

// ---------------------------------------------------------------------------
// CNF -> identification instance. The instance pins a cycle of 5v+1 states
// (v = variable count) over {a,b}: a advances along the cycle, b jumps to
// either end of it. The only freedom a consistent machine has left is, per
// variable, whether b from its designated cycle position jumps high or low
// -- one Boolean per variable -- and one observation per clause checks that
// some literal of the clause took the satisfying jump. See the repo docs
// for the size bounds.
// ---------------------------------------------------------------------------

inline IdentificationInstance reduce_cnf(const CnfFormula& phi) {
    Alphabet sigma("ab");
    Alphabet omega("01");
    auto unsolvable = [&] {
        IdentificationInstance inst;
        inst.d = ObservationSet(sigma, omega);
        insert(inst.d, {}, 0);
        insert(inst.d, {0}, 1);
        inst.k = 1;
        return inst;
    };
    // An empty clause is unsatisfiable outright; map it before validate()
    // (which rejects empty clauses) so every formula gets an instance.
    for (const auto& cl : phi.clauses)
        if (cl.empty()) return unsolvable();
    phi.validate();
    if (phi.n_vars == 0) {
        IdentificationInstance inst;
        inst.d = ObservationSet(sigma, omega);
        insert(inst.d, {}, 0);
        inst.k = 1;
        return inst;
    }

    int v = phi.n_vars;
    int N = 5 * v;
    // Cycle positions per variable i (1-based): a block of five.
    auto one_lo = [&](int i) { return 5 * i - 4; }; // pinned jump-high
    auto pos = [&](int i) { return 5 * i - 3; };    // free: the variable bit
    auto one_hi = [&](int i) { return 5 * i - 2; }; // pinned jump-high
    auto neg = [&](int i) { return 5 * i - 1; };    // free: forced complement
    auto zero = [&](int i) { return 5 * i; };       // pinned jump-low

    IdentificationInstance inst;
    inst.d = ObservationSet(sigma, omega);
    inst.k = N + 1;
    auto a_run = [](int t) { return InputString(static_cast<size_t>(t), 0); };
    auto append = [](InputString w, const InputString& tail) {
        w.insert(w.end(), tail.begin(), tail.end());
        return w;
    };
    const InputString b{1};

    // The cycle itself: output 1 exactly at position N, pinned two laps deep
    // so the N+1 positions are pairwise distinguished.
    for (int t = 0; t <= 2 * N; ++t)
        insert(inst.d, a_run(t), t == N ? 1 : 0);
    // b never lands strictly inside the cycle.
    for (int t = 0; t <= N; ++t)
        for (int j = 1; j <= N - 1; ++j)
            insert(inst.d, append(append(a_run(t), b), a_run(j)), 0);
    // Pinned jump directions.
    insert(inst.d, b, 0);
    for (int i = 1; i <= v; ++i) {
        insert(inst.d, append(a_run(one_lo(i)), b), 1);
        insert(inst.d, append(a_run(one_hi(i)), b), 1);
        insert(inst.d, append(a_run(zero(i)), b), 0);
    }
    // Complement coupling: pos and neg jumps disagree.
    for (int i = 1; i <= v; ++i) {
        // at least one jumps high
        InputString w_or = append(append(a_run(pos(i)), b), append(a_run(neg(i)), b));
        insert(inst.d, w_or, 1);
        // not both jump high
        InputString w_nand =
            append(append(append(a_run(pos(i)), b), append(a_run(zero(i)), b)), a_run(N));
        insert(inst.d, w_nand, 1);
    }
    // One observation per clause: the literal probes chain through the
    // cycle so that a satisfying jump is absorbing.
    for (const auto& cl : phi.clauses) {
        InputString w;
        for (int lit : cl) {
            int i = lit < 0 ? -lit : lit;
            w = append(w, append(a_run(lit > 0 ? pos(i) : neg(i)), b));
        }
        insert(inst.d, w, 1);
    }
    return inst;
}

// ---------------------------------------------------------------------------
// Test-state selection. A set T is adequate when build(d,T,E) passes all
// status flags and the extracted machine agrees with every entry of d.
// ---------------------------------------------------------------------------

enum class Selection { Greedy, Exact };

namespace detail {

inline std::vector<InputString> all_prefixes(const ObservationSet& d) {
    StringSet out;
    for (const auto& [w, o] : d.entries)
        for (size_t len = 0; len <= w.size(); ++len)
            out.insert(InputString(w.begin(), w.begin() + static_cast<long>(len)));
    out.insert(InputString{});
    return {out.begin(), out.end()};
}

inline bool adequate(const ObservationSet& d, const TestStateSet& T,
                     const ExperimentSet& E) {
    CharMatrix mx = build(d, T, E);
    if (!status(mx).all()) return false;
    try {
        return consistent_with(extract(mx), d);
    } catch (const extraction_error&) {
        return false;
    }
}

// Level greedy: grow T a whole prefix-tree depth at a time and stop at the
// first adequate set. Sufficient whenever anything is, but deliberately
// coarse -- a level usually drags in strings an exhaustive search can do
// without, so the result is not minimum in general.
inline TestStateSet select_greedy(const ObservationSet& d, const ExperimentSet& E) {
    auto prefixes = all_prefixes(d); // length-lex
    size_t max_len = prefixes.back().size();
    for (size_t level = 0;; ++level) {
        std::vector<InputString> chosen;
        for (const auto& p : prefixes)
            if (p.size() <= level) chosen.push_back(p);
        TestStateSet T{std::move(chosen)};
        if (adequate(d, T, E)) return T;
        if (level >= max_len)
            throw inadequacy_error("no prefix level of the data is adequate");
    }
}

inline TestStateSet select_exact(const ObservationSet& d, const ExperimentSet& E) {
    auto prefixes = all_prefixes(d); // length-lex; index 0 is epsilon
    int n = static_cast<int>(prefixes.size());
    if (n > 22)
        throw input_error("exact selection is exhaustive; " + std::to_string(n) +
                          " candidate prefixes is beyond desk scale");
    std::map<InputString, int, LengthLexLess> index;
    for (int i = 0; i < n; ++i) index.emplace(prefixes[static_cast<size_t>(i)], i);
    // Subsets in cardinality order, combinations in index-lex order within a
    // cardinality; only prefix-closed subsets containing epsilon qualify.
    for (int size = 1; size <= n; ++size) {
        std::vector<int> combo(static_cast<size_t>(size));
        for (int i = 0; i < size; ++i) combo[static_cast<size_t>(i)] = i;
        for (;;) {
            if (combo[0] == 0) { // epsilon required
                std::set<int> members(combo.begin(), combo.end());
                bool closed_down = true;
                for (int i : combo) {
                    const auto& w = prefixes[static_cast<size_t>(i)];
                    if (w.empty()) continue;
                    InputString parent(w.begin(), w.end() - 1);
                    if (!members.contains(index.at(parent))) {
                        closed_down = false;
                        break;
                    }
                }
                if (closed_down) {
                    TestStateSet T;
                    for (int i : combo) T.strings.push_back(prefixes[static_cast<size_t>(i)]);
                    if (adequate(d, T, E)) return T;
                }
            }
            // next combination
            int i = size - 1;
            while (i >= 0 && combo[static_cast<size_t>(i)] == n - size + i) --i;
            if (i < 0) break;
            ++combo[static_cast<size_t>(i)];
            for (int j = i + 1; j < size; ++j)
                combo[static_cast<size_t>(j)] = combo[static_cast<size_t>(j - 1)] + 1;
        }
    }
    throw inadequacy_error("no adequate test set within the prefixes of the data");
}

} // namespace detail

// Prefix-complete adequate test-state set. Greedy grows whole prefix-tree
// levels until the matrix becomes adequate; exact searches prefix-closed
// subsets in size order and returns the smallest adequate one.
inline TestStateSet select_test_states(const ObservationSet& d, const ExperimentSet& E,
                                       Selection method) {
    if (auto w = suffix_completeness_defect(E))
        throw closure_error("experiments not suffix-complete: \"" +
                            format_string(*w, d.input_alphabet) +
                            "\" lacks its immediate suffix");
    return method == Selection::Greedy ? detail::select_greedy(d, E)
                                       : detail::select_exact(d, E);
}

} // namespace fsmid
