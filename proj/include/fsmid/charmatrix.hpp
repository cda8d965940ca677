#pragma once

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "automata.hpp"
#include "errors.hpp"
#include "observations.hpp"

namespace fsmid {

using StringSet = std::set<InputString, LengthLexLess>;

// Prefix-complete ordered set of test strings (rows of the matrix).
struct TestStateSet {
    std::vector<InputString> strings; // length-lex order

    bool contains(const InputString& w) const {
        return std::binary_search(strings.begin(), strings.end(), w, LengthLexLess{});
    }
};

// Suffix-complete ordered set of experiment strings (columns).
struct ExperimentSet {
    std::vector<InputString> strings; // length-lex order

    bool contains(const InputString& w) const {
        return std::binary_search(strings.begin(), strings.end(), w, LengthLexLess{});
    }
};

// Smallest prefix-complete superset; nonempty results always contain epsilon.
inline TestStateSet prefix_closure(const StringSet& ws) {
    StringSet closed;
    for (const auto& w : ws)
        for (size_t len = 0; len <= w.size(); ++len)
            closed.insert(InputString(w.begin(), w.begin() + static_cast<long>(len)));
    return TestStateSet{{closed.begin(), closed.end()}};
}

// Smallest suffix-complete superset.
inline ExperimentSet suffix_closure(const StringSet& ws) {
    StringSet closed;
    for (const auto& w : ws)
        for (size_t from = 0; from <= w.size(); ++from)
            closed.insert(InputString(w.begin() + static_cast<long>(from), w.end()));
    return ExperimentSet{{closed.begin(), closed.end()}};
}

// Returns a member whose immediate prefix is missing, or nullopt if
// prefix-complete.
inline std::optional<InputString> prefix_completeness_defect(const TestStateSet& t) {
    for (const auto& w : t.strings) {
        if (w.empty()) continue;
        InputString parent(w.begin(), w.end() - 1);
        if (!t.contains(parent)) return w;
    }
    return std::nullopt;
}

inline std::optional<InputString> suffix_completeness_defect(const ExperimentSet& e) {
    for (const auto& w : e.strings) {
        if (w.empty()) continue;
        InputString tail(w.begin() + 1, w.end());
        if (!e.contains(tail)) return w;
    }
    return std::nullopt;
}

// M(D,T,E): rows indexed by T followed by the one-symbol extensions
// T·Sigma \ T, columns by E; a cell holds d(t·e) or a hole.
struct CharMatrix {
    Alphabet input_alphabet;
    Alphabet output_alphabet;
    TestStateSet T;
    ExperimentSet E;
    std::vector<InputString> rows;                     // T first, then T·Sigma \ T
    int n_test_rows = 0;                               // prefix of `rows` that is T
    std::vector<std::vector<std::optional<int>>> cells; // row x column

    int n_rows() const { return static_cast<int>(rows.size()); }
    int n_cols() const { return static_cast<int>(E.strings.size()); }

    const std::optional<int>& cell(int row, int col) const {
        return cells[static_cast<size_t>(row)][static_cast<size_t>(col)];
    }

    std::optional<int> row_index(const InputString& w) const {
        for (int i = 0; i < n_rows(); ++i)
            if (rows[static_cast<size_t>(i)] == w) return i;
        return std::nullopt;
    }
};

inline CharMatrix build(const ObservationSet& d, const TestStateSet& T,
                        const ExperimentSet& E) {
    if (auto w = prefix_completeness_defect(T))
        throw closure_error("test states not prefix-complete: \"" +
                            format_string(*w, d.input_alphabet) +
                            "\" lacks its immediate prefix");
    if (auto w = suffix_completeness_defect(E))
        throw closure_error("experiments not suffix-complete: \"" +
                            format_string(*w, d.input_alphabet) +
                            "\" lacks its immediate suffix");
    CharMatrix mx;
    mx.input_alphabet = d.input_alphabet;
    mx.output_alphabet = d.output_alphabet;
    mx.T = T;
    mx.E = E;
    mx.rows = T.strings;
    mx.n_test_rows = static_cast<int>(T.strings.size());
    StringSet extensions;
    for (const auto& t : T.strings)
        for (int a = 0; a < d.input_alphabet.size(); ++a) {
            InputString ext = t;
            ext.push_back(a);
            if (!T.contains(ext)) extensions.insert(std::move(ext));
        }
    mx.rows.insert(mx.rows.end(), extensions.begin(), extensions.end());
    mx.cells.resize(mx.rows.size());
    for (size_t r = 0; r < mx.rows.size(); ++r) {
        mx.cells[r].resize(E.strings.size());
        for (size_t c = 0; c < E.strings.size(); ++c) {
            InputString key = mx.rows[r];
            key.insert(key.end(), E.strings[c].begin(), E.strings[c].end());
            mx.cells[r][c] = d.lookup(key);
        }
    }
    return mx;
}

struct HoleReport {
    int count = 0;
    double density = 0.0;
    std::vector<std::pair<int, int>> cells; // row-major (row, col)
};

inline HoleReport holes(const CharMatrix& mx) {
    HoleReport report;
    for (int r = 0; r < mx.n_rows(); ++r)
        for (int c = 0; c < mx.n_cols(); ++c)
            if (!mx.cell(r, c)) {
                ++report.count;
                report.cells.emplace_back(r, c);
            }
    int total = mx.n_rows() * mx.n_cols();
    report.density = total == 0 ? 0.0 : static_cast<double>(report.count) / total;
    return report;
}

// Exact tie: identical cell vectors, hole positions included. Two rows with
// the same observed values but different hole patterns are not tied.
inline bool exactly_tied(const CharMatrix& mx, int r1, int r2) {
    return mx.cells[static_cast<size_t>(r1)] == mx.cells[static_cast<size_t>(r2)];
}

// Compatibility: agreement on every column where both rows are observed.
// Hole-tolerant; used for diagnostics and solver pruning, never extraction.
inline bool compatible(const CharMatrix& mx, int r1, int r2) {
    for (int c = 0; c < mx.n_cols(); ++c) {
        const auto& a = mx.cell(r1, c);
        const auto& b = mx.cell(r2, c);
        if (a && b && *a != *b) return false;
    }
    return true;
}

// Exact-tie partition over all rows, classes ordered by first member.
inline std::vector<std::vector<int>> tie_classes(const CharMatrix& mx) {
    std::map<std::vector<std::optional<int>>, int> index;
    std::vector<std::vector<int>> classes;
    for (int r = 0; r < mx.n_rows(); ++r) {
        auto [it, inserted] =
            index.emplace(mx.cells[static_cast<size_t>(r)], static_cast<int>(classes.size()));
        if (inserted) classes.emplace_back();
        classes[static_cast<size_t>(it->second)].push_back(r);
    }
    return classes;
}

struct MatrixStatus {
    bool hole_free = true;
    bool closed = true;
    bool consistent = true;
    std::optional<std::pair<int, int>> hole_witness;           // (row, col)
    std::optional<InputString> closed_witness;                 // untied extension row
    std::optional<std::pair<InputString, InputString>> consistent_witness;

    bool all() const { return hole_free && closed && consistent; }
};

inline MatrixStatus status(const CharMatrix& mx) {
    MatrixStatus st;
    auto hr = holes(mx);
    if (hr.count > 0) {
        st.hole_free = false;
        st.hole_witness = hr.cells.front();
    }
    // closed: every one-symbol extension row is exactly tied to a T-row.
    for (int i = 0; i < mx.n_test_rows && st.closed; ++i) {
        for (int a = 0; a < mx.input_alphabet.size() && st.closed; ++a) {
            InputString ext = mx.rows[static_cast<size_t>(i)];
            ext.push_back(a);
            int er = *mx.row_index(ext);
            bool tied = false;
            for (int t = 0; t < mx.n_test_rows && !tied; ++t)
                tied = exactly_tied(mx, er, t);
            if (!tied) {
                st.closed = false;
                st.closed_witness = ext;
            }
        }
    }
    // consistent: tied test rows have tied extensions for every symbol.
    for (int i = 0; i < mx.n_test_rows && st.consistent; ++i) {
        for (int j = i + 1; j < mx.n_test_rows && st.consistent; ++j) {
            if (!exactly_tied(mx, i, j)) continue;
            for (int a = 0; a < mx.input_alphabet.size(); ++a) {
                InputString e1 = mx.rows[static_cast<size_t>(i)];
                e1.push_back(a);
                InputString e2 = mx.rows[static_cast<size_t>(j)];
                e2.push_back(a);
                if (!exactly_tied(mx, *mx.row_index(e1), *mx.row_index(e2))) {
                    st.consistent = false;
                    st.consistent_witness = {mx.rows[static_cast<size_t>(i)],
                                             mx.rows[static_cast<size_t>(j)]};
                    break;
                }
            }
        }
    }
    return st;
}

// Machine extraction: states are the exact-tie classes of the test rows,
// the initial state is the class of epsilon, transitions follow one-symbol
// extensions, outputs come from the epsilon column.
inline MooreMachine extract(const CharMatrix& mx) {
    MatrixStatus st = status(mx);
    if (!st.hole_free)
        throw extraction_error("matrix has holes; first at row " +
                               std::to_string(st.hole_witness->first) + ", column " +
                               std::to_string(st.hole_witness->second));
    if (!st.closed)
        throw extraction_error("matrix not closed: row \"" +
                               format_string(*st.closed_witness, mx.input_alphabet) +
                               "\" is tied to no test row");
    if (!st.consistent)
        throw extraction_error(
            "matrix not consistent: tied rows \"" +
            format_string(st.consistent_witness->first, mx.input_alphabet) + "\" and \"" +
            format_string(st.consistent_witness->second, mx.input_alphabet) +
            "\" have untied extensions");
    if (mx.n_test_rows == 0 || !mx.rows[0].empty())
        throw extraction_error("epsilon must be a test state");
    if (mx.E.strings.empty() || !mx.E.strings[0].empty())
        throw extraction_error("epsilon must be an experiment");

    // Class id per test row, classes ordered by first (length-lex smallest)
    // member so the labeling is canonical.
    std::map<std::vector<std::optional<int>>, int> class_of_vector;
    std::vector<int> row_class(static_cast<size_t>(mx.n_test_rows));
    std::vector<int> class_rep;
    for (int i = 0; i < mx.n_test_rows; ++i) {
        auto [it, inserted] = class_of_vector.emplace(mx.cells[static_cast<size_t>(i)],
                                                      static_cast<int>(class_rep.size()));
        if (inserted) class_rep.push_back(i);
        row_class[static_cast<size_t>(i)] = it->second;
    }
    int n = static_cast<int>(class_rep.size());
    MooreMachine m;
    m.input_alphabet = mx.input_alphabet;
    m.output_alphabet = mx.output_alphabet;
    m.initial = row_class[0]; // epsilon is row 0
    m.delta.assign(static_cast<size_t>(n),
                   std::vector<int>(static_cast<size_t>(mx.input_alphabet.size())));
    m.lambda.resize(static_cast<size_t>(n));
    for (int q = 0; q < n; ++q) {
        int rep = class_rep[static_cast<size_t>(q)];
        m.lambda[static_cast<size_t>(q)] = *mx.cell(rep, 0);
        for (int a = 0; a < mx.input_alphabet.size(); ++a) {
            InputString ext = mx.rows[static_cast<size_t>(rep)];
            ext.push_back(a);
            int er = *mx.row_index(ext);
            int target = -1;
            for (int t = 0; t < mx.n_test_rows && target < 0; ++t)
                if (exactly_tied(mx, er, t)) target = row_class[static_cast<size_t>(t)];
            m.delta[static_cast<size_t>(q)][static_cast<size_t>(a)] = target;
        }
    }
    return m;
}

// Byte-stable text rendering: tab-separated, epsilon printed as EPS, holes
// as a middle dot.
inline std::string format_matrix(const CharMatrix& mx) {
    std::ostringstream out;
    auto name = [&](const InputString& w) {
        return w.empty() ? std::string("EPS") : format_string(w, mx.input_alphabet);
    };
    for (const auto& e : mx.E.strings) out << '\t' << name(e);
    out << '\n';
    for (int r = 0; r < mx.n_rows(); ++r) {
        out << name(mx.rows[static_cast<size_t>(r)]);
        for (int c = 0; c < mx.n_cols(); ++c) {
            out << '\t';
            if (mx.cell(r, c))
                out << mx.output_alphabet.name(*mx.cell(r, c));
            else
                out << "·";
        }
        out << '\n';
    }
    return out.str();
}

} // namespace fsmid
