#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "automata.hpp"
#include "errors.hpp"
#include "rng.hpp"

namespace fsmid {

// A finite partial function from input strings to output symbols: the data
// the identification problem starts from. Entries are noise-free by
// construction; a second, different output for the same string is a hard
// error, never a soft weight.
struct ObservationSet {
    Alphabet input_alphabet;
    Alphabet output_alphabet;
    std::map<InputString, int, LengthLexLess> entries;

    ObservationSet() = default;
    ObservationSet(Alphabet in, Alphabet out)
        : input_alphabet(std::move(in)), output_alphabet(std::move(out)) {}

    size_t size() const { return entries.size(); }

    std::optional<int> lookup(const InputString& w) const {
        auto it = entries.find(w);
        if (it == entries.end()) return std::nullopt;
        return it->second;
    }

    bool operator==(const ObservationSet&) const = default;
};

inline void insert(ObservationSet& d, const InputString& w, int output) {
    for (int a : w)
        if (a < 0 || a >= d.input_alphabet.size())
            throw input_error("symbol id " + std::to_string(a) + " out of range");
    if (output < 0 || output >= d.output_alphabet.size())
        throw input_error("output id " + std::to_string(output) + " out of range");
    auto [it, inserted] = d.entries.emplace(w, output);
    if (!inserted && it->second != output)
        throw observation_conflict(
            "conflicting outputs for \"" + format_string(w, d.input_alphabet) + "\": '" +
            std::string(1, d.output_alphabet.name(it->second)) + "' vs '" +
            std::string(1, d.output_alphabet.name(output)) + "'");
}

inline ObservationSet from_target(const MooreMachine& m,
                                  const std::vector<InputString>& ws) {
    ObservationSet d(m.input_alphabet, m.output_alphabet);
    for (const auto& w : ws) insert(d, w, run(m, w));
    return d;
}

// Complete sample: every string of length <= max_len with its output.
inline ObservationSet behaviors(const MooreMachine& m, int max_len) {
    if (max_len < 0) throw input_error("length bound must be >= 0");
    ObservationSet d(m.input_alphabet, m.output_alphabet);
    for_each_string(m, max_len, [&](const InputString& w, int state) {
        d.entries.emplace(w, m.lambda[static_cast<size_t>(state)]);
    });
    return d;
}

// Uniformly random hidden system: every delta and lambda entry drawn from
// one SplitMix64 stream, delta row-major first, then lambda; initial is 0.
inline MooreMachine gen_random_target(int n_states, const Alphabet& sigma,
                                      const Alphabet& omega, uint64_t seed) {
    if (n_states < 1) throw input_error("state count must be >= 1");
    SplitMix64 rng(seed);
    MooreMachine m;
    m.input_alphabet = sigma;
    m.output_alphabet = omega;
    m.initial = 0;
    m.delta.assign(static_cast<size_t>(n_states),
                   std::vector<int>(static_cast<size_t>(sigma.size())));
    for (auto& row : m.delta)
        for (auto& cell : row)
            cell = static_cast<int>(rng.below(static_cast<uint64_t>(n_states)));
    m.lambda.resize(static_cast<size_t>(n_states));
    for (auto& out : m.lambda)
        out = static_cast<int>(rng.below(static_cast<uint64_t>(omega.size())));
    return m;
}

// Fragmentary observational data: `walks` independent uniform random walks
// of length uniform in {0..max_len}; every prefix of every walk (including
// epsilon) is recorded with probability 1-dropout.
inline ObservationSet sample_observational(const MooreMachine& m, int walks,
                                           int max_len, double dropout,
                                           uint64_t seed) {
    if (dropout < 0.0 || dropout > 1.0)
        throw input_error("dropout must be in [0,1]");
    if (walks < 0 || max_len < 0) throw input_error("walks and max_len must be >= 0");
    SplitMix64 rng(seed);
    ObservationSet d(m.input_alphabet, m.output_alphabet);
    for (int i = 0; i < walks; ++i) {
        int len = static_cast<int>(rng.below(static_cast<uint64_t>(max_len) + 1));
        InputString w;
        int state = m.initial;
        // Record each prefix as the walk is extended, epsilon first.
        for (int pos = 0;; ++pos) {
            if (rng.unit() >= dropout)
                insert(d, w, m.lambda[static_cast<size_t>(state)]);
            if (pos == len) break;
            int a = static_cast<int>(rng.below(static_cast<uint64_t>(m.input_alphabet.size())));
            w.push_back(a);
            state = step(m, state, a);
        }
    }
    return d;
}

// Static snapshot: complete but shallow, everything up to the given depth
// and nothing beyond.
inline ObservationSet sample_crash_retrieval(const MooreMachine& m, int depth) {
    return behaviors(m, depth);
}

// Repeated demonstration of a fixed trace set. The loop really runs
// `repetitions` times; insert idempotence is what makes the result
// independent of the count.
inline ObservationSet sample_flight_show(const MooreMachine& m,
                                         const std::vector<InputString>& traces,
                                         int repetitions) {
    if (repetitions < 1) throw input_error("repetitions must be >= 1");
    ObservationSet d(m.input_alphabet, m.output_alphabet);
    for (int r = 0; r < repetitions; ++r)
        for (const auto& w : traces) insert(d, w, run(m, w));
    return d;
}

} // namespace fsmid
