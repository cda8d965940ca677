#pragma once

#include <stdexcept>
#include <string>

namespace fsmid {

// Bad arguments at an API boundary (symbol id out of range, alphabet
// mismatch, ...).
struct input_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Malformed file content. `line` is 1-based, 0 when not applicable.
struct format_error : std::runtime_error {
    int line = 0;
    explicit format_error(const std::string& msg, int line_no = 0)
        : std::runtime_error(line_no > 0 ? "line " + std::to_string(line_no) + ": " + msg
                                         : msg),
          line(line_no) {}
};

// Two observations assign different outputs to the same input string.
struct observation_conflict : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A test-state or experiment set fails its closure requirement.
struct closure_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A characterization matrix does not meet the extraction preconditions.
struct extraction_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// No adequate test-state set exists within the prefixes of the data.
struct inadequacy_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A SAT model violates the functionality constraints of an encoding.
struct decode_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace fsmid
