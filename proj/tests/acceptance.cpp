// Acceptance gate: ten end-to-end criteria, one PASS/FAIL line each, with
// pinned size caps and wall-clock budgets. Exits nonzero if any criterion
// fails. argv[1] must be the path to the fsmid binary (used by the bench
// criterion).

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include <fsmid/charmatrix.hpp>
#include <fsmid/io.hpp>
#include <fsmid/observations.hpp>
#include <fsmid/rng.hpp>
#include <fsmid/sat.hpp>
#include <fsmid/solvers.hpp>
#include <fsmid/timid.hpp>

using namespace fsmid;
using Clock = std::chrono::steady_clock;

namespace {

bool g_all_pass = true;

struct Criterion {
    int id;
    double budget_seconds;
    Clock::time_point start = Clock::now();

    Criterion(int id_, double budget) : id(id_), budget_seconds(budget) {}

    void report(bool ok, const std::string& detail) const {
        double secs = std::chrono::duration<double>(Clock::now() - start).count();
        bool in_budget = secs <= budget_seconds;
        bool pass = ok && in_budget;
        if (!pass) g_all_pass = false;
        std::printf("criterion %2d: %s  (%.2fs / %.0fs budget)  %s%s\n", id,
                    pass ? "PASS" : "FAIL", secs, budget_seconds, detail.c_str(),
                    !in_budget ? "  [over budget]" : "");
        std::fflush(stdout);
    }
};

// All strings of length <= n over the alphabet, length-lex.
std::vector<InputString> strings_up_to(const Alphabet& sigma, int n) {
    std::vector<InputString> out{{}};
    size_t lo = 0;
    for (int len = 1; len <= n; ++len) {
        size_t hi = out.size();
        for (size_t i = lo; i < hi; ++i)
            for (int a = 0; a < sigma.size(); ++a) {
                InputString w = out[i];
                w.push_back(a);
                out.push_back(std::move(w));
            }
        lo = hi;
    }
    return out;
}

Alphabet sized_alphabet(const std::string& pool, int n) {
    return Alphabet(pool.substr(0, static_cast<size_t>(n)));
}

bool truth_table_sat(const CnfFormula& phi) {
    for (uint32_t bits = 0; bits < (1u << phi.n_vars); ++bits) {
        Assignment a;
        a.values.resize(static_cast<size_t>(phi.n_vars));
        for (int v = 1; v <= phi.n_vars; ++v)
            a.values[static_cast<size_t>(v - 1)] = (bits >> (v - 1)) & 1u;
        if (satisfies(a, phi)) return true;
    }
    return false;
}

// Every clause over exactly-distinct variables from {1,2,3}: 6 of width 1,
// 12 of width 2, 8 of width 3.
std::vector<Clause> clause_templates() {
    std::vector<Clause> out;
    for (int v = 1; v <= 3; ++v)
        for (int s : {1, -1}) out.push_back({s * v});
    for (int v1 = 1; v1 <= 3; ++v1)
        for (int v2 = v1 + 1; v2 <= 3; ++v2)
            for (int s1 : {1, -1})
                for (int s2 : {1, -1}) out.push_back({s1 * v1, s2 * v2});
    for (int s1 : {1, -1})
        for (int s2 : {1, -1})
            for (int s3 : {1, -1}) out.push_back({s1 * 1, s2 * 2, s3 * 3});
    return out;
}

CnfFormula random_formula(SplitMix64& rng, int max_vars, int max_clauses) {
    CnfFormula phi;
    phi.n_vars = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(max_vars)));
    int m = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(max_clauses)));
    for (int c = 0; c < m; ++c) {
        Clause cl;
        int width = 1 + static_cast<int>(rng.below(3));
        for (int l = 0; l < width; ++l) {
            int v = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(phi.n_vars)));
            cl.push_back(rng.below(2) ? v : -v);
        }
        phi.clauses.push_back(std::move(cl));
    }
    return phi;
}

// --- criterion 1: matrix extraction on complete data -----------------------

void criterion_1() {
    Criterion c(1, 60);
    SplitMix64 rng(101);
    int checked = 0;
    bool ok = true;
    std::string detail;
    for (int trial = 0; trial < 200 && ok; ++trial) {
        int n = 1 + static_cast<int>(rng.below(5));
        Alphabet sigma = sized_alphabet("abc", 1 + static_cast<int>(rng.below(3)));
        Alphabet omega = sized_alphabet("012", 1 + static_cast<int>(rng.below(3)));
        MooreMachine m = gen_random_target(n, sigma, omega, rng.next());
        ObservationSet d = behaviors(m, 2 * n + 1);
        auto all = strings_up_to(sigma, n);
        TestStateSet T{all};
        ExperimentSet E{all};
        CharMatrix mx = build(d, T, E);
        if (!status(mx).all()) {
            ok = false;
            detail = "matrix not hole-free/closed/consistent at trial " +
                     std::to_string(trial);
            break;
        }
        MooreMachine h = extract(mx);
        for (const auto& row : mx.rows) {
            for (const auto& e : E.strings) {
                InputString key = row;
                key.insert(key.end(), e.begin(), e.end());
                if (run(h, key) != *d.lookup(key)) {
                    ok = false;
                    detail = "extracted machine disagrees with a cell at trial " +
                             std::to_string(trial);
                    break;
                }
            }
            if (!ok) break;
        }
        if (ok && !equivalent(h, m)) {
            ok = false;
            detail = "extracted machine not equivalent to target at trial " +
                     std::to_string(trial);
        }
        ++checked;
    }
    if (ok) detail = std::to_string(checked) + " targets extracted and replayed";
    c.report(ok, detail);
}

// --- criterion 2: enumeration and SAT agree ---------------------------------

void criterion_2() {
    Criterion c(2, 120);
    SplitMix64 rng(202);
    Alphabet sigma("ab"), omega("01");
    bool ok = true;
    std::string detail;
    int checked = 0;
    for (int trial = 0; trial < 200 && ok; ++trial) {
        int n = 1 + static_cast<int>(rng.below(3));
        MooreMachine m = gen_random_target(n, sized_alphabet("ab", 1 + static_cast<int>(rng.below(2))),
                                           omega, rng.next());
        ObservationSet full;
        switch (rng.below(3)) {
        case 0:
            full = sample_observational(m, 6, 5, 0.4, rng.next());
            break;
        case 1:
            full = sample_crash_retrieval(m, 3);
            break;
        default: {
            std::vector<InputString> traces;
            for (int t = 0; t < 6; ++t) {
                InputString w;
                int len = static_cast<int>(rng.below(5));
                for (int i = 0; i < len; ++i)
                    w.push_back(static_cast<int>(rng.below(
                        static_cast<uint64_t>(m.input_alphabet.size()))));
                traces.push_back(std::move(w));
            }
            full = sample_flight_show(m, traces, 1);
        }
        }
        // cap |dom| at 12: keep the length-lex smallest entries
        ObservationSet d(full.input_alphabet, full.output_alphabet);
        for (const auto& [w, o] : full.entries) {
            if (d.size() == 12) break;
            insert(d, w, o);
        }
        for (int k = 1; k <= 3 && ok; ++k) {
            auto b = brute_force_exists(d, k);
            auto s = sat_exists(d, k);
            if (b.has_value() != s.has_value()) {
                ok = false;
                detail = "existence mismatch at trial " + std::to_string(trial) +
                         ", k=" + std::to_string(k);
            }
            if (b && !consistent_with(*b, d)) ok = false;
            if (s && !consistent_with(*s, d)) ok = false;
        }
        if (ok) {
            auto kb = min_k(d, 3, Method::Brute);
            auto ks = min_k(d, 3, Method::Sat);
            bool same = kb.has_value() == ks.has_value() &&
                        (!kb || kb->k_min == ks->k_min);
            if (!same) {
                ok = false;
                detail = "min_k mismatch at trial " + std::to_string(trial);
            }
        }
        ++checked;
    }
    if (ok) detail = std::to_string(checked) + " instances, both routes agree";
    c.report(ok, detail);
}

// --- criterion 3: CNF reduction is faithful (enumeration side) --------------

void criterion_3() {
    Criterion c(3, 300);
    bool ok = true;
    std::string detail;
    int checked = 0;
    auto check = [&](const CnfFormula& phi, const char* family) {
        IdentificationInstance inst = reduce_cnf(phi);
        bool solvable = brute_force_exists(inst.d, inst.k).has_value();
        if (solvable != truth_table_sat(phi)) {
            ok = false;
            detail = std::string("reduction mismatch in ") + family + " formula " +
                     std::to_string(checked);
        }
        ++checked;
    };
    auto templates = clause_templates();
    for (size_t i = 0; i < templates.size() && ok; ++i)
        check(CnfFormula{3, {templates[i]}}, "singleton");
    for (size_t i = 0; i < templates.size() && ok; ++i)
        for (size_t j = i + 1; j < templates.size() && ok; ++j)
            check(CnfFormula{3, {templates[i], templates[j]}}, "pair");
    SplitMix64 rng(303);
    for (int trial = 0; trial < 100 && ok; ++trial)
        check(random_formula(rng, 6, 10), "random");
    if (ok) detail = std::to_string(checked) + " formulas, 100% agreement";
    c.report(ok, detail);
}

// --- criterion 4: frozen probe-matrix fixture -------------------------------

void criterion_4() {
    Criterion c(4, 60);
    Alphabet sig("abxyz"), om("01");
    ObservationSet d(sig, om);
    auto add = [&](const std::string& w, char o) {
        insert(d, parse_string(w, sig), om.id_of(o));
    };
    add("ax", '1'); add("ay", '0'); add("az", '1');
    add("aax", '1'); add("aay", '0'); add("aaz", '1');
    add("bx", '0'); add("by", '1'); add("bz", '0');
    TestStateSet T = prefix_closure({parse_string("a", sig), parse_string("aa", sig),
                                     parse_string("b", sig)});
    ExperimentSet E = suffix_closure({parse_string("x", sig), parse_string("y", sig),
                                      parse_string("z", sig)});
    CharMatrix mx = build(d, T, E);
    HoleReport hr = holes(mx);
    auto kb = min_k(d, 4, Method::Brute);
    auto ks = min_k(d, 4, Method::Sat);
    bool ok = mx.n_rows() == 21 && mx.n_test_rows == 4 && mx.n_cols() == 4 &&
              hr.count == 66 && exactly_tied(mx, 1, 3) && !exactly_tied(mx, 1, 2) &&
              kb.has_value() && kb->k_min == 2 && ks.has_value() && ks->k_min == 2;
    std::ostringstream detail;
    detail << "rows=" << mx.n_rows() << " cols=" << mx.n_cols() << " holes=" << hr.count
           << " k_min=" << (kb ? kb->k_min : -1);
    c.report(ok, detail.str());
}

// --- criterion 5: exhaustive selection beats the level heuristic ------------

void criterion_5() {
    Criterion c(5, 120);
    bool ok = true;
    int witnesses = 0, compared = 0;
    std::string detail;
    Alphabet sigma("ab"), omega("01");
    for (uint64_t seed = 1; seed <= 40 && ok; ++seed) {
        int n = 1 + static_cast<int>(seed % 3);
        MooreMachine m = gen_random_target(n, sigma, omega, seed);
        ObservationSet d = behaviors(m, std::min(n + 1, 3));
        ExperimentSet E = suffix_closure({InputString{}});
        try {
            TestStateSet g = select_test_states(d, E, Selection::Greedy);
            TestStateSet x = select_test_states(d, E, Selection::Exact);
            ++compared;
            if (x.strings.size() > g.strings.size()) {
                ok = false;
                detail = "exhaustive larger than heuristic at seed " + std::to_string(seed);
            }
            if (x.strings.size() < g.strings.size()) ++witnesses;
        } catch (const inadequacy_error&) {
            // a bare-epsilon experiment set cannot always separate states
        }
    }
    if (ok && witnesses == 0) {
        ok = false;
        detail = "no instance where exhaustive selection is strictly smaller";
    }
    if (ok)
        detail = std::to_string(compared) + " comparisons, " + std::to_string(witnesses) +
                 " strict wins for exhaustive";
    c.report(ok, detail);
}

// --- criterion 6: merge learner converges in the limit ----------------------

void criterion_6() {
    Criterion c(6, 90);
    SplitMix64 rng(606);
    bool ok = true;
    std::string detail;
    int checked = 0;
    for (int trial = 0; trial < 50 && ok; ++trial) {
        int n = 1 + static_cast<int>(rng.below(4));
        Alphabet sigma = sized_alphabet("ab", 1 + static_cast<int>(rng.below(2)));
        MooreMachine m = gen_random_target(n, sigma, Alphabet("01"), rng.next());
        int n_min = minimize(m).states();
        int max_len = 2 * n_min + 2;
        for (int len = 0; len <= max_len && ok; ++len) {
            ObservationSet d = behaviors(m, len);
            MooreMachine h = hypothesis(d);
            if (!consistent_with(h, d)) {
                ok = false;
                detail = "hypothesis inconsistent with its data at trial " +
                         std::to_string(trial);
            }
            if (len >= 2 * n_min && !equivalent(h, m)) {
                ok = false;
                detail = "not converged at depth " + std::to_string(len) + " (trial " +
                         std::to_string(trial) + ")";
            }
        }
        ++checked;
    }
    if (ok) detail = std::to_string(checked) + " targets converged and stayed consistent";
    c.report(ok, detail);
}

// --- criterion 7: demonstration repetitions are invisible -------------------

void criterion_7() {
    Criterion c(7, 60);
    MooreMachine m = gen_random_target(3, Alphabet("ab"), Alphabet("01"), 707);
    std::vector<InputString> traces = {{}, {0}, {0, 1}, {1, 1, 0}, {0, 0, 1, 1}};
    auto solve_text = [&](const ObservationSet& d) {
        auto r = min_k(d, 4, Method::Brute);
        return r ? "k_min=" + std::to_string(r->k_min) + "\n" + emit_machine(r->machine)
                 : std::string("k_min=none\n");
    };
    ObservationSet d1 = sample_flight_show(m, traces, 1);
    std::string obs1 = emit_observations(d1), ans1 = solve_text(d1);
    bool ok = true;
    for (int r : {10, 100}) {
        ObservationSet dr = sample_flight_show(m, traces, r);
        if (emit_observations(dr) != obs1 || solve_text(dr) != ans1) ok = false;
    }
    c.report(ok, ok ? "observation files and solver answers byte-identical for r=1,10,100"
                    : "repetition count leaked into the output");
}

// --- criterion 8: more data never widens the possibilities ------------------

void criterion_8() {
    Criterion c(8, 120);
    SplitMix64 rng(808);
    bool ok = true;
    std::string detail;
    int checked = 0;
    for (int trial = 0; trial < 20 && ok; ++trial) {
        int n = 1 + static_cast<int>(rng.below(3));
        MooreMachine m = gen_random_target(n, Alphabet("ab"), Alphabet("01"), rng.next());
        ObservationSet d3 = behaviors(m, 3);
        std::vector<std::pair<InputString, int>> all(d3.entries.begin(), d3.entries.end());
        ObservationSet d1(d3.input_alphabet, d3.output_alphabet),
            d2(d3.input_alphabet, d3.output_alphabet);
        for (size_t i = 0; i < all.size(); ++i) {
            if (i < all.size() / 3) insert(d1, all[i].first, all[i].second);
            if (i < 2 * all.size() / 3) insert(d2, all[i].first, all[i].second);
        }
        for (int k = 1; k <= 3 && ok; ++k) {
            long c1 = count_consistent(d1, k), c2 = count_consistent(d2, k),
                 c3 = count_consistent(d3, k);
            if (!(c1 >= c2 && c2 >= c3)) {
                ok = false;
                detail = "ambiguity grew with data at trial " + std::to_string(trial) +
                         ", k=" + std::to_string(k);
            }
        }
        if (ok) {
            auto k1 = min_k(d1, 4, Method::Brute), k2 = min_k(d2, 4, Method::Brute),
                 k3 = min_k(d3, 4, Method::Brute);
            if (!k1 || !k2 || !k3 || k1->k_min > k2->k_min || k2->k_min > k3->k_min) {
                ok = false;
                detail = "minimal size dropped with more data at trial " +
                         std::to_string(trial);
            }
        }
        ++checked;
    }
    if (ok) detail = std::to_string(checked) + " nested chains, both monotonicities hold";
    c.report(ok, detail);
}

// --- criterion 9: the SAT engine itself -------------------------------------

void criterion_9() {
    Criterion c(9, 120);
    bool ok = true;
    std::string detail;
    int checked = 0;
    auto check = [&](const CnfFormula& phi) {
        auto model = solve(phi);
        bool expected = truth_table_sat(phi);
        if (model.has_value() != expected || (model && !satisfies(*model, phi))) {
            ok = false;
            detail = "engine disagreed with the truth table at formula " +
                     std::to_string(checked);
        }
        ++checked;
    };
    auto templates = clause_templates();
    for (size_t i = 0; i < templates.size() && ok; ++i)
        check(CnfFormula{3, {templates[i]}});
    for (size_t i = 0; i < templates.size() && ok; ++i)
        for (size_t j = i + 1; j < templates.size() && ok; ++j)
            check(CnfFormula{3, {templates[i], templates[j]}});
    SplitMix64 rng(909);
    for (int trial = 0; trial < 500 && ok; ++trial)
        check(random_formula(rng, 8, 12));
    if (ok) detail = std::to_string(checked) + " formulas, 100% agreement, models verified";
    c.report(ok, detail);
}

// --- criterion 10: scaling benchmark runs end to end ------------------------

void criterion_10(const std::string& binary) {
    Criterion c(10, 300);
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() /
                   ("fsmid-acceptance-" + std::to_string(::getpid()));
    fs::create_directories(dir);
    fs::path csv_path = dir / "bench.csv";
    std::string cmd = binary + " bench --suite blowup --k-max 4 -o " + csv_path.string();
    int status = std::system(cmd.c_str());
    bool ok = WIFEXITED(status) && WEXITSTATUS(status) == 0;
    std::string detail = ok ? "" : "bench command failed";
    int rows = 0;
    std::vector<double> brute_seconds_by_k(5, 0.0);
    if (ok) {
        std::ifstream in(csv_path);
        std::string line;
        if (!std::getline(in, line) || line != "k,method,seconds,consistent_count,hole_density") {
            ok = false;
            detail = "bad CSV header";
        }
        int prev_k = 0;
        while (ok && std::getline(in, line)) {
            std::istringstream cells(line);
            std::string k_s, method, secs, count, density;
            if (!std::getline(cells, k_s, ',') || !std::getline(cells, method, ',') ||
                !std::getline(cells, secs, ',') || !std::getline(cells, count, ',') ||
                !std::getline(cells, density, ',')) {
                ok = false;
                detail = "short CSV row";
                break;
            }
            int k = std::stoi(k_s);
            if (k < prev_k) {
                ok = false;
                detail = "rows not sorted by state budget";
                break;
            }
            prev_k = k;
            if (method == "brute") brute_seconds_by_k[static_cast<size_t>(k)] += std::stod(secs);
            ++rows;
        }
        if (ok && rows != 4 * 2 * 3) {
            ok = false;
            detail = "expected 24 rows, found " + std::to_string(rows);
        }
    }
    if (ok) {
        std::ostringstream msg;
        msg << rows << " rows; enumeration seconds by k:";
        for (int k = 1; k <= 4; ++k) msg << " " << brute_seconds_by_k[static_cast<size_t>(k)];
        detail = msg.str();
    }
    fs::remove_all(dir);
    c.report(ok, detail);
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: acceptance <path-to-fsmid-binary>\n");
        return 1;
    }
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10(argv[1]);
    std::printf("%s\n", g_all_pass ? "ALL CRITERIA PASS" : "SOME CRITERIA FAILED");
    return g_all_pass ? 0 : 1;
}
