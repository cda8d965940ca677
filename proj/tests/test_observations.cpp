#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fsmid/io.hpp>
#include <fsmid/observations.hpp>

using namespace fsmid;

namespace {

MooreMachine toggle() {
    MooreMachine m;
    m.input_alphabet = Alphabet("ab");
    m.output_alphabet = Alphabet("01");
    m.initial = 0;
    m.delta = {{1, 0}, {0, 1}};
    m.lambda = {0, 1};
    return m;
}

} // namespace

TEST_CASE("insert is idempotent, conflicts are hard errors") {
    ObservationSet d(Alphabet("ab"), Alphabet("01"));
    insert(d, {0, 1}, 1);
    insert(d, {0, 1}, 1); // same fact again: fine
    CHECK(d.size() == 1);
    CHECK(d.lookup({0, 1}) == 1);
    CHECK(!d.lookup({1}).has_value());
    CHECK_THROWS_AS(insert(d, {0, 1}, 0), observation_conflict);
    CHECK_THROWS_AS(insert(d, {5}, 0), input_error);
    CHECK_THROWS_AS(insert(d, {0}, 9), input_error);
}

TEST_CASE("behaviors covers every string up to the depth") {
    MooreMachine m = toggle();
    ObservationSet d = behaviors(m, 3);
    CHECK(d.size() == 15); // 1 + 2 + 4 + 8
    for (const auto& [w, o] : d.entries) CHECK(o == run(m, w));
    CHECK(behaviors(m, 0).size() == 1);
    CHECK_THROWS_AS(behaviors(m, -1), input_error);
}

TEST_CASE("gen_random_target is a pure function of its arguments") {
    Alphabet sig("ab"), om("012");
    MooreMachine a = gen_random_target(4, sig, om, 99);
    MooreMachine b = gen_random_target(4, sig, om, 99);
    CHECK(a == b);
    a.validate();
    CHECK(a.states() == 4);
    CHECK(a.initial == 0);
    CHECK(gen_random_target(4, sig, om, 100) != a); // different stream
    CHECK_THROWS_AS(gen_random_target(0, sig, om, 1), input_error);
}

TEST_CASE("observational sampler: dropout extremes") {
    MooreMachine m = toggle();
    // dropout 1: every prefix is dropped
    CHECK(sample_observational(m, 10, 4, 1.0, 7).size() == 0);
    // dropout 0: every prefix of every walk is recorded
    ObservationSet d = sample_observational(m, 10, 4, 0.0, 7);
    CHECK(d.size() > 0);
    CHECK(d.lookup({}).has_value()); // epsilon is a prefix of every walk
    for (const auto& [w, o] : d.entries) {
        CHECK(o == run(m, w));
        if (!w.empty()) // prefix-complete under zero dropout
            CHECK(d.lookup(InputString(w.begin(), w.end() - 1)).has_value());
    }
    CHECK_THROWS_AS(sample_observational(m, 1, 1, 1.5, 0), input_error);
}

TEST_CASE("observational sampler is seed-deterministic") {
    MooreMachine m = toggle();
    CHECK(sample_observational(m, 8, 5, 0.3, 11) == sample_observational(m, 8, 5, 0.3, 11));
    CHECK(sample_observational(m, 8, 5, 0.3, 11) != sample_observational(m, 8, 5, 0.3, 12));
}

TEST_CASE("crash-retrieval snapshot equals complete behaviors") {
    MooreMachine m = toggle();
    CHECK(sample_crash_retrieval(m, 3) == behaviors(m, 3));
}

TEST_CASE("flight-show repetition count never changes the data") {
    MooreMachine m = toggle();
    std::vector<InputString> traces = {{}, {0}, {0, 0, 1}, {1, 1}};
    ObservationSet once = sample_flight_show(m, traces, 1);
    CHECK(once.size() == 4);
    CHECK(sample_flight_show(m, traces, 10) == once);
    CHECK(sample_flight_show(m, traces, 100) == once);
    CHECK_THROWS_AS(sample_flight_show(m, traces, 0), input_error);
}

TEST_CASE("from_target records the machine's own behavior") {
    MooreMachine m = toggle();
    ObservationSet d = from_target(m, {{0}, {0, 0}});
    CHECK(d.size() == 2);
    CHECK(d.lookup({0}) == 1);
    CHECK(d.lookup({0, 0}) == 0);
}

TEST_CASE("observation file round-trip preserves the set exactly") {
    MooreMachine m = toggle();
    ObservationSet d = sample_observational(m, 10, 4, 0.2, 3);
    std::string text = emit_observations(d);
    CHECK(parse_observations(text) == d);
    CHECK(emit_observations(parse_observations(text)) == text);
}

TEST_CASE("observation file: epsilon token, comments, alphabet headers") {
    ObservationSet d = parse_observations("# comment\nEPS\t0\nab\t1\n");
    CHECK(d.size() == 2);
    CHECK(d.lookup({}) == 0);
    CHECK(d.input_alphabet == Alphabet("ab")); // inferred, byte order
    // declared alphabets win over inference
    ObservationSet d2 =
        parse_observations("# input-alphabet: bax\n# output-alphabet: 10\nab\t1\n");
    CHECK(d2.input_alphabet == Alphabet("bax"));
    CHECK(d2.output_alphabet == Alphabet("10"));
    CHECK(d2.lookup({2, 1}) == std::nullopt);
    CHECK(d2.lookup({1, 0}) == 0); // 'a'=1, 'b'=0, output '1'=0 under declared order
}

TEST_CASE("observation file errors carry line numbers") {
    try {
        parse_observations("a\t0\nbroken line\n");
        FAIL("expected format_error");
    } catch (const format_error& e) {
        CHECK(e.line == 2);
    }
    try {
        parse_observations("a\t0\na\t1\n");
        FAIL("expected format_error");
    } catch (const format_error& e) {
        CHECK(e.line == 2); // conflict surfaces at the second entry's line
    }
}

TEST_CASE("machine JSON round-trip") {
    MooreMachine m = toggle();
    CHECK(parse_machine(emit_machine(m)) == m);
    CHECK_THROWS_AS(parse_machine("{"), format_error);
    CHECK_THROWS_AS(parse_machine("{\"input_alphabet\": [\"a\"]}"), format_error);
    // out-of-range transition is named in the message
    try {
        parse_machine(R"({"input_alphabet":["a"],"output_alphabet":["0"],
                          "initial":0,"delta":[[3]],"lambda":[0]})");
        FAIL("expected format_error");
    } catch (const format_error& e) {
        CHECK(std::string(e.what()).find("delta[0][0]") != std::string::npos);
    }
}

TEST_CASE("trace file parsing") {
    auto ws = parse_traces("# two traces\nEPS\nab\n", Alphabet("ab"));
    REQUIRE(ws.size() == 2);
    CHECK(ws[0].empty());
    CHECK(ws[1] == InputString{0, 1});
    CHECK_THROWS_AS(parse_traces("xq\n", Alphabet("ab")), format_error);
}
