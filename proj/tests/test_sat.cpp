#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fsmid/rng.hpp>
#include <fsmid/sat.hpp>

using namespace fsmid;

namespace {

// Ground truth by exhaustive truth-table enumeration (n_vars <= 20).
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

} // namespace

TEST_CASE("hand-checked formulas") {
    // (x1 | x2) & (!x1 | x2) & (!x2 | x3)
    CnfFormula sat{3, {{1, 2}, {-1, 2}, {-2, 3}}};
    auto model = solve(sat);
    REQUIRE(model.has_value());
    CHECK(satisfies(*model, sat));
    CHECK(model->value(2));
    CHECK(model->value(3));

    // x1 & !x1
    CnfFormula unsat{1, {{1}, {-1}}};
    CHECK(!solve(unsat).has_value());

    // empty formula is trivially satisfiable; unassigned defaults to true
    CnfFormula empty{2, {}};
    auto m2 = solve(empty);
    REQUIRE(m2.has_value());
    CHECK(m2->value(1));
    CHECK(m2->value(2));

    // pigeonhole: 3 pigeons, 2 holes (vars p_ij = 2*(i-1)+j)
    CnfFormula php{6, {{1, 2}, {3, 4}, {5, 6},
                       {-1, -3}, {-1, -5}, {-3, -5},
                       {-2, -4}, {-2, -6}, {-4, -6}}};
    CHECK(!solve(php).has_value());
}

TEST_CASE("solve is deterministic") {
    CnfFormula phi{4, {{1, -2}, {-1, 3}, {2, 4}, {-3, -4, 2}}};
    auto a = solve(phi);
    auto b = solve(phi);
    REQUIRE(a.has_value());
    CHECK(a->values == b->values);
}

TEST_CASE("validate rejects malformed formulas") {
    CHECK_THROWS_AS(solve(CnfFormula{2, {{3}}}), input_error);
    CHECK_THROWS_AS(solve(CnfFormula{2, {{0}}}), input_error);
    CHECK_THROWS_AS(solve(CnfFormula{2, {{}}}), input_error);
    CHECK_THROWS_AS(solve(CnfFormula{-1, {}}), input_error);
}

TEST_CASE("random formulas agree with the truth table") {
    SplitMix64 rng(20240817);
    int sat_count = 0, unsat_count = 0;
    for (int trial = 0; trial < 300; ++trial) {
        int n = 1 + static_cast<int>(rng.below(8));
        int m = 1 + static_cast<int>(rng.below(12));
        CnfFormula phi;
        phi.n_vars = n;
        for (int c = 0; c < m; ++c) {
            Clause cl;
            int width = 1 + static_cast<int>(rng.below(3));
            for (int l = 0; l < width; ++l) {
                int v = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(n)));
                cl.push_back(rng.below(2) ? v : -v);
            }
            phi.clauses.push_back(std::move(cl));
        }
        auto model = solve(phi);
        bool expected = truth_table_sat(phi);
        CHECK(model.has_value() == expected);
        if (model) {
            CHECK(satisfies(*model, phi));
            ++sat_count;
        } else {
            ++unsat_count;
        }
    }
    // the generator should exercise both outcomes
    CHECK(sat_count > 20);
    CHECK(unsat_count > 20);
}

TEST_CASE("DIMACS round-trip") {
    CnfFormula phi{3, {{1, -2}, {2, 3}, {-1, -3}}};
    std::string text = emit_dimacs(phi);
    CHECK(text == "p cnf 3 3\n1 -2 0\n2 3 0\n-1 -3 0\n");
    CHECK(parse_dimacs(text) == phi);
    // comments and blank lines are skipped
    CHECK(parse_dimacs("c hi\n\np cnf 1 1\nc mid\n1 0\n") == CnfFormula{1, {{1}}});
    // multiple clauses per line
    CHECK(parse_dimacs("p cnf 2 2\n1 0 -2 0\n") == CnfFormula{2, {{1}, {-2}}});
}

TEST_CASE("DIMACS errors carry line numbers") {
    auto expect_line = [](const std::string& text, int line) {
        try {
            parse_dimacs(text);
            FAIL("expected format_error for: ", text);
        } catch (const format_error& e) {
            CHECK(e.line == line);
        }
    };
    expect_line("p cnf oops 1\n", 1);
    expect_line("1 0\n", 1);                      // clause before header
    expect_line("p cnf 1 1\np cnf 1 1\n", 2);     // duplicate header
    expect_line("p cnf 1 1\n2 0\n", 2);           // literal out of range
    expect_line("p cnf 1 1\nx 0\n", 2);           // non-integer token
    expect_line("p cnf 1 1\n0\n", 2);             // empty clause
    CHECK_THROWS_AS(parse_dimacs(""), format_error);
    CHECK_THROWS_AS(parse_dimacs("p cnf 1 2\n1 0\n"), format_error); // count mismatch
    CHECK_THROWS_AS(parse_dimacs("p cnf 1 1\n1\n"), format_error);   // missing 0
}

TEST_CASE("model emit/parse round-trip") {
    Assignment a;
    a.values = {true, false, true};
    std::string text = emit_model(a);
    CHECK(text == "1 -2 3 0\n");
    Assignment b = parse_model(text, 3);
    CHECK(b.values == a.values);
    CHECK_THROWS_AS(parse_model("1 4 0\n", 3), format_error);
    CHECK_THROWS_AS(parse_model("1 2 0\n", 3), format_error); // var 3 unassigned
}
