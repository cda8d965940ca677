// Command-line front end: generation, sampling, matrix inspection, solving,
// CNF reduction, merge-based identification, benchmarks, DOT export.
//
// Exit codes: 0 success (including a reported unsolvable/exhausted result),
// 2 usage error, 3 file/format error, 4 conflict/inadequacy. Diagnostics go
// to stderr; data goes to stdout or to -o files.

#include <chrono>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <fsmid/charmatrix.hpp>
#include <fsmid/io.hpp>
#include <fsmid/observations.hpp>
#include <fsmid/sat.hpp>
#include <fsmid/solvers.hpp>
#include <fsmid/timid.hpp>

namespace {

using namespace fsmid;

void write_output(const std::string& path, const std::string& content) {
    if (path == "-")
        std::cout << content;
    else
        write_file(path, content);
}

// T for matrix inspection when no file is given: all prefixes of the data,
// truncated to the length budget (negative budget = no truncation).
TestStateSet auto_test_states(const ObservationSet& d, int budget) {
    StringSet basis;
    for (const auto& [w, o] : d.entries)
        if (budget < 0 || static_cast<int>(w.size()) <= budget) basis.insert(w);
    basis.insert(InputString{});
    return prefix_closure(basis);
}

ExperimentSet auto_experiments(const ObservationSet& d, int budget) {
    StringSet basis;
    for (const auto& [w, o] : d.entries)
        if (budget < 0 || static_cast<int>(w.size()) <= budget) basis.insert(w);
    basis.insert(InputString{});
    return suffix_closure(basis);
}

int run_gen(int states, const std::string& sigma, const std::string& omega,
            uint64_t seed, const std::string& out) {
    MooreMachine m = gen_random_target(states, Alphabet(sigma), Alphabet(omega), seed);
    write_output(out, emit_machine(m));
    return 0;
}

int run_sample(const std::string& machine_path, const std::string& mode, int walks,
               int max_len, double dropout, uint64_t seed, int depth,
               const std::string& traces_path, int repetitions, const std::string& out) {
    MooreMachine m = parse_machine(read_file(machine_path));
    m.validate();
    ObservationSet d;
    if (mode == "observational") {
        d = sample_observational(m, walks, max_len, dropout, seed);
    } else if (mode == "crash") {
        d = sample_crash_retrieval(m, depth);
    } else if (mode == "flightshow") {
        if (traces_path.empty())
            throw CLI::ValidationError("--traces is required for --mode flightshow");
        auto traces = parse_traces(read_file(traces_path), m.input_alphabet);
        d = sample_flight_show(m, traces, repetitions);
    }
    write_output(out, emit_observations(d));
    return 0;
}

int run_matrix(const std::string& data_path, const std::string& t_spec,
               const std::string& e_spec, int budget) {
    ObservationSet d = parse_observations(read_file(data_path));
    TestStateSet T = t_spec == "auto"
                         ? auto_test_states(d, budget)
                         : prefix_closure([&] {
                               auto ws = parse_traces(read_file(t_spec), d.input_alphabet);
                               return StringSet(ws.begin(), ws.end());
                           }());
    ExperimentSet E = e_spec == "auto"
                          ? auto_experiments(d, budget)
                          : suffix_closure([&] {
                                auto ws = parse_traces(read_file(e_spec), d.input_alphabet);
                                return StringSet(ws.begin(), ws.end());
                            }());
    CharMatrix mx = build(d, T, E);
    std::cout << format_matrix(mx);
    HoleReport hr = holes(mx);
    std::cout << "holes=" << hr.count << " density=" << hr.density << "\n";
    auto classes = tie_classes(mx);
    std::cout << "tie_classes=" << classes.size() << "\n";
    for (size_t c = 0; c < classes.size(); ++c) {
        std::cout << "class " << c << ":";
        for (int r : classes[c])
            std::cout << " "
                      << (mx.rows[static_cast<size_t>(r)].empty()
                              ? std::string(kEpsilonToken)
                              : format_string(mx.rows[static_cast<size_t>(r)],
                                              d.input_alphabet));
        std::cout << "\n";
    }
    MatrixStatus st = status(mx);
    std::cout << "hole_free=" << (st.hole_free ? 1 : 0) << " closed=" << (st.closed ? 1 : 0)
              << " consistent=" << (st.consistent ? 1 : 0) << "\n";
    return 0;
}

int run_solve(const std::string& data_path, const std::string& instance_path,
              const std::string& method_name, int k_max, bool count,
              const std::string& out) {
    ObservationSet d;
    if (!instance_path.empty()) {
        IdentificationInstance inst = parse_instance(read_file(instance_path));
        d = std::move(inst.d);
        if (k_max <= 0) k_max = inst.k;
    } else if (!data_path.empty()) {
        d = parse_observations(read_file(data_path));
    } else {
        throw CLI::ValidationError("one of -d or --instance is required");
    }
    if (k_max <= 0) throw CLI::ValidationError("--k-max must be >= 1");
    Method method = method_name == "brute" ? Method::Brute : Method::Sat;
    if (count) {
        std::ostringstream report;
        for (int k = 1; k <= k_max; ++k)
            report << "k=" << k << " consistent_count=" << count_consistent(d, k) << "\n";
        write_output(out, report.str());
        return 0;
    }
    auto result = min_k(d, k_max, method);
    if (!result) {
        write_output(out, "k_min=none\n");
        return 0;
    }
    write_output(out, "k_min=" + std::to_string(result->k_min) + "\n" +
                          emit_machine(result->machine));
    return 0;
}

int run_reduce(const std::string& formula_path, const std::string& out) {
    CnfFormula phi = parse_dimacs(read_file(formula_path));
    write_output(out, emit_instance(reduce_cnf(phi)));
    return 0;
}

int run_timid(const std::string& machine_path, const std::string& data_path,
              int max_len, const std::string& out) {
    if (!machine_path.empty()) {
        MooreMachine m = parse_machine(read_file(machine_path));
        m.validate();
        write_output(out, emit_convergence_csv(identify_incremental(m, max_len)));
        return 0;
    }
    if (data_path.empty())
        throw CLI::ValidationError("one of -m or -d is required");
    ObservationSet d = parse_observations(read_file(data_path));
    write_output(out, emit_machine(hypothesis(d)));
    return 0;
}

int run_bench(const std::string& suite, int k_max, const std::string& out) {
    if (suite != "blowup") throw CLI::ValidationError("unknown suite: " + suite);
    // Shipped fixture: one seeded hidden system, three nested data slices
    // (length-lex prefixes of one sample) giving three hole densities.
    MooreMachine m = gen_random_target(4, Alphabet("ab"), Alphabet("01"), 20240817);
    ObservationSet full = sample_observational(m, 40, 6, 0.2, 987654321);
    std::vector<ObservationSet> slices;
    for (size_t portion : {full.size() / 3, (2 * full.size()) / 3, full.size()}) {
        ObservationSet s(full.input_alphabet, full.output_alphabet);
        size_t i = 0;
        for (const auto& [w, o] : full.entries) {
            if (i++ == portion) break;
            s.entries.emplace(w, o);
        }
        slices.push_back(std::move(s));
    }
    struct Row {
        int k;
        std::string method;
        double seconds;
        long count;
        double hole_density;
    };
    std::vector<Row> rows;
    for (int k = 1; k <= k_max; ++k) {
        for (const auto& d : slices) {
            double density = holes(build(d, auto_test_states(d, -1),
                                         auto_experiments(d, -1)))
                                 .density;
            auto t0 = std::chrono::steady_clock::now();
            long count = count_consistent(d, k);
            double brute_secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                    .count();
            t0 = std::chrono::steady_clock::now();
            (void)sat_exists(d, k);
            double sat_secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                    .count();
            rows.push_back({k, "brute", brute_secs, count, density});
            rows.push_back({k, "sat", sat_secs, count, density});
        }
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.k != b.k) return a.k < b.k;
        if (a.method != b.method) return a.method < b.method;
        return a.hole_density < b.hole_density;
    });
    std::ostringstream csv;
    csv << "k,method,seconds,consistent_count,hole_density\n";
    for (const auto& r : rows)
        csv << r.k << ',' << r.method << ',' << r.seconds << ',' << r.count << ','
            << r.hole_density << '\n';
    write_output(out, csv.str());
    return 0;
}

int run_export_dot(const std::string& machine_path, const std::string& out) {
    MooreMachine m = parse_machine(read_file(machine_path));
    m.validate();
    write_output(out, emit_dot(m));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-state machine identification toolkit"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a random hidden system");
    int gen_states = 0;
    std::string gen_sigma = "ab", gen_omega = "01", gen_out = "-";
    uint64_t gen_seed = 0;
    gen->add_option("--states", gen_states, "state count")->required();
    gen->add_option("--sigma", gen_sigma, "input alphabet characters");
    gen->add_option("--omega", gen_omega, "output alphabet characters");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("-o,--output", gen_out, "output path (- = stdout)");

    // sample
    auto* sample = app.add_subcommand("sample", "draw observations from a machine");
    std::string sm_machine, sm_mode, sm_traces, sm_out = "-";
    int sm_walks = 10, sm_max_len = 5, sm_depth = 3, sm_reps = 1;
    double sm_dropout = 0.0;
    uint64_t sm_seed = 0;
    sample->add_option("-m,--machine", sm_machine, "machine JSON path")->required();
    sample->add_option("--mode", sm_mode, "observational|crash|flightshow")
        ->required()
        ->check(CLI::IsMember({"observational", "crash", "flightshow"}));
    sample->add_option("--walks", sm_walks, "random walks (observational)");
    sample->add_option("--max-len", sm_max_len, "max walk length (observational)");
    sample->add_option("--dropout", sm_dropout, "per-prefix dropout probability");
    sample->add_option("--seed", sm_seed, "sampler seed");
    sample->add_option("--depth", sm_depth, "snapshot depth (crash)");
    sample->add_option("--traces", sm_traces, "trace file (flightshow)");
    sample->add_option("--repetitions", sm_reps, "demonstration repetitions (flightshow)");
    sample->add_option("-o,--output", sm_out, "output path (- = stdout)");

    // matrix
    auto* matrix = app.add_subcommand("matrix", "inspect the characterization matrix");
    std::string mx_data, mx_t = "auto", mx_e = "auto";
    int mx_budget = -1;
    matrix->add_option("-d,--data", mx_data, "observation file")->required();
    matrix->add_option("--T", mx_t, "test states: auto or a trace file");
    matrix->add_option("--E", mx_e, "experiments: auto or a trace file");
    matrix->add_option("--budget", mx_budget, "auto length budget (-1 = unbounded)");

    // solve
    auto* solve_cmd = app.add_subcommand("solve", "find the smallest consistent machine");
    std::string sv_data, sv_instance, sv_method, sv_out = "-";
    int sv_k_max = 0;
    bool sv_count = false;
    solve_cmd->add_option("-d,--data", sv_data, "observation file");
    solve_cmd->add_option("--instance", sv_instance, "instance bundle JSON");
    solve_cmd->add_option("--method", sv_method, "brute|sat")
        ->required()
        ->check(CLI::IsMember({"brute", "sat"}));
    solve_cmd->add_option("--k-max", sv_k_max, "state budget ceiling");
    solve_cmd->add_flag("--count", sv_count, "report ambiguity counts instead");
    solve_cmd->add_option("-o,--output", sv_out, "output path (- = stdout)");

    // reduce
    auto* reduce = app.add_subcommand("reduce", "turn a DIMACS CNF into an instance");
    std::string rd_formula, rd_out = "-";
    reduce->add_option("-f,--formula", rd_formula, "DIMACS CNF path")->required();
    reduce->add_option("-o,--output", rd_out, "output path (- = stdout)");

    // timid
    auto* timid = app.add_subcommand("timid", "merge-based identification");
    std::string tm_machine, tm_data, tm_out = "-";
    int tm_max_len = 6;
    timid->add_option("-m,--machine", tm_machine,
                      "target machine JSON (incremental convergence log)");
    timid->add_option("-d,--data", tm_data, "observation file (one-shot hypothesis)");
    timid->add_option("--max-len", tm_max_len, "max data depth for -m");
    timid->add_option("-o,--output", tm_out, "output path (- = stdout)");

    // bench
    auto* bench = app.add_subcommand("bench", "scaling measurements");
    std::string bn_suite, bn_out = "-";
    int bn_k_max = 4;
    bench->add_option("--suite", bn_suite, "suite name (blowup)")->required();
    bench->add_option("--k-max", bn_k_max, "largest state budget");
    bench->add_option("-o,--output", bn_out, "output path (- = stdout)");

    // export-dot
    auto* dot = app.add_subcommand("export-dot", "emit a DOT graph of a machine");
    std::string dt_machine, dt_out = "-";
    dot->add_option("-m,--machine", dt_machine, "machine JSON path")->required();
    dot->add_option("-o,--output", dt_out, "output path (- = stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (gen->parsed())
            return run_gen(gen_states, gen_sigma, gen_omega, gen_seed, gen_out);
        if (sample->parsed())
            return run_sample(sm_machine, sm_mode, sm_walks, sm_max_len, sm_dropout,
                              sm_seed, sm_depth, sm_traces, sm_reps, sm_out);
        if (matrix->parsed()) return run_matrix(mx_data, mx_t, mx_e, mx_budget);
        if (solve_cmd->parsed())
            return run_solve(sv_data, sv_instance, sv_method, sv_k_max, sv_count, sv_out);
        if (reduce->parsed()) return run_reduce(rd_formula, rd_out);
        if (timid->parsed()) return run_timid(tm_machine, tm_data, tm_max_len, tm_out);
        if (bench->parsed()) return run_bench(bn_suite, bn_k_max, bn_out);
        if (dot->parsed()) return run_export_dot(dt_machine, dt_out);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const fsmid::observation_conflict& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const fsmid::inadequacy_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const fsmid::closure_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const fsmid::extraction_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const fsmid::format_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const fsmid::decode_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const fsmid::input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
