#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "automata.hpp"
#include "errors.hpp"
#include "observations.hpp"
#include "solvers.hpp"

namespace fsmid {

inline constexpr const char* kEpsilonToken = "EPS";

// ---------------------------------------------------------------------------
// Whole-file helpers.
// ---------------------------------------------------------------------------

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw format_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw format_error("cannot write " + path);
    out << content;
}

// ---------------------------------------------------------------------------
// Machine JSON format: {"input_alphabet": ["a",...], "output_alphabet": [...],
// "initial": int, "delta": [[...],...], "lambda": [...]}.
// ---------------------------------------------------------------------------

inline nlohmann::json machine_to_json(const MooreMachine& m) {
    nlohmann::json j;
    auto chars = [](const Alphabet& a) {
        std::vector<std::string> out;
        for (char c : a.symbols) out.emplace_back(1, c);
        return out;
    };
    j["input_alphabet"] = chars(m.input_alphabet);
    j["output_alphabet"] = chars(m.output_alphabet);
    j["initial"] = m.initial;
    j["delta"] = m.delta;
    j["lambda"] = m.lambda;
    return j;
}

inline MooreMachine machine_from_json(const nlohmann::json& j) {
    auto alphabet_of = [&](const char* key) {
        if (!j.contains(key) || !j[key].is_array())
            throw format_error(std::string("missing or non-array \"") + key + "\"");
        std::vector<char> syms;
        for (size_t i = 0; i < j[key].size(); ++i) {
            const auto& e = j[key][i];
            if (!e.is_string() || e.get<std::string>().size() != 1)
                throw format_error(std::string(key) + "[" + std::to_string(i) +
                                   "] is not a single-character string");
            syms.push_back(e.get<std::string>()[0]);
        }
        try {
            return Alphabet(syms);
        } catch (const input_error& e) {
            throw format_error(std::string(key) + ": " + e.what());
        }
    };
    MooreMachine m;
    m.input_alphabet = alphabet_of("input_alphabet");
    m.output_alphabet = alphabet_of("output_alphabet");
    if (!j.contains("delta") || !j["delta"].is_array() || j["delta"].empty())
        throw format_error("missing or empty \"delta\"");
    int n = static_cast<int>(j["delta"].size());
    for (int s = 0; s < n; ++s) {
        const auto& row = j["delta"][static_cast<size_t>(s)];
        if (!row.is_array() || static_cast<int>(row.size()) != m.input_alphabet.size())
            throw format_error("delta[" + std::to_string(s) + "] must have " +
                               std::to_string(m.input_alphabet.size()) + " entries");
        std::vector<int> r;
        for (int a = 0; a < m.input_alphabet.size(); ++a) {
            const auto& cell = row[static_cast<size_t>(a)];
            if (!cell.is_number_integer())
                throw format_error("delta[" + std::to_string(s) + "][" +
                                   std::to_string(a) + "] is not an integer");
            int t = cell.get<int>();
            if (t < 0 || t >= n)
                throw format_error("delta[" + std::to_string(s) + "][" +
                                   std::to_string(a) + "] = " + std::to_string(t) +
                                   " out of range [0," + std::to_string(n - 1) + "]");
            r.push_back(t);
        }
        m.delta.push_back(std::move(r));
    }
    if (!j.contains("lambda") || !j["lambda"].is_array() ||
        static_cast<int>(j["lambda"].size()) != n)
        throw format_error("\"lambda\" must be an array of " + std::to_string(n) +
                           " integers");
    for (int s = 0; s < n; ++s) {
        const auto& cell = j["lambda"][static_cast<size_t>(s)];
        if (!cell.is_number_integer())
            throw format_error("lambda[" + std::to_string(s) + "] is not an integer");
        int o = cell.get<int>();
        if (o < 0 || o >= m.output_alphabet.size())
            throw format_error("lambda[" + std::to_string(s) + "] = " + std::to_string(o) +
                               " out of range [0," +
                               std::to_string(m.output_alphabet.size() - 1) + "]");
        m.lambda.push_back(o);
    }
    if (!j.contains("initial") || !j["initial"].is_number_integer())
        throw format_error("missing integer \"initial\"");
    m.initial = j["initial"].get<int>();
    if (m.initial < 0 || m.initial >= n)
        throw format_error("initial = " + std::to_string(m.initial) + " out of range [0," +
                           std::to_string(n - 1) + "]");
    return m;
}

inline std::string emit_machine(const MooreMachine& m) {
    return machine_to_json(m).dump(2) + "\n";
}

inline MooreMachine parse_machine(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw format_error(std::string("invalid JSON: ") + e.what());
    }
    return machine_from_json(j);
}

// ---------------------------------------------------------------------------
// Observation file format: UTF-8 text, one `<string>\t<output-char>` entry
// per line, epsilon written as the token EPS, `#` comment lines. The writer
// prepends alphabet declarations as comments; the reader honors them and
// otherwise infers alphabets from the content in byte order.
// ---------------------------------------------------------------------------

inline std::string emit_observations(const ObservationSet& d) {
    std::ostringstream out;
    out << "# input-alphabet: ";
    for (char c : d.input_alphabet.symbols) out << c;
    out << "\n# output-alphabet: ";
    for (char c : d.output_alphabet.symbols) out << c;
    out << "\n";
    for (const auto& [w, o] : d.entries) {
        if (w.empty())
            out << kEpsilonToken;
        else
            out << format_string(w, d.input_alphabet);
        out << '\t' << d.output_alphabet.name(o) << '\n';
    }
    return out.str();
}

inline ObservationSet parse_observations(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    std::optional<Alphabet> sigma, omega;
    std::vector<std::pair<std::pair<std::string, char>, int>> raw; // (string, out), line
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string in_key = "# input-alphabet: ";
            const std::string out_key = "# output-alphabet: ";
            try {
                if (line.rfind(in_key, 0) == 0)
                    sigma = Alphabet(line.substr(in_key.size()));
                else if (line.rfind(out_key, 0) == 0)
                    omega = Alphabet(line.substr(out_key.size()));
            } catch (const input_error& e) {
                throw format_error(e.what(), line_no);
            }
            continue;
        }
        auto tab = line.find('\t');
        if (tab == std::string::npos || tab + 2 != line.size())
            throw format_error("expected `<string>\\t<output-char>`", line_no);
        std::string word = line.substr(0, tab);
        if (word == kEpsilonToken) word.clear();
        raw.push_back({{word, line[tab + 1]}, line_no});
    }
    if (!sigma || !omega) {
        // No declarations: infer from content in byte order.
        std::set<char> in_syms, out_syms;
        for (const auto& [entry, ln] : raw) {
            for (char c : entry.first) in_syms.insert(c);
            out_syms.insert(entry.second);
        }
        if (!sigma) {
            if (in_syms.empty())
                throw format_error("cannot infer input alphabet from empty data");
            sigma = Alphabet(std::vector<char>(in_syms.begin(), in_syms.end()));
        }
        if (!omega) {
            if (out_syms.empty())
                throw format_error("cannot infer output alphabet from empty data");
            omega = Alphabet(std::vector<char>(out_syms.begin(), out_syms.end()));
        }
    }
    ObservationSet d(*sigma, *omega);
    for (const auto& [entry, ln] : raw) {
        InputString w;
        for (char c : entry.first) {
            auto id = d.input_alphabet.find(c);
            if (!id)
                throw format_error(std::string("symbol '") + c + "' not in input alphabet",
                                   ln);
            w.push_back(*id);
        }
        auto out = d.output_alphabet.find(entry.second);
        if (!out)
            throw format_error(std::string("output '") + entry.second +
                               "' not in output alphabet", ln);
        try {
            insert(d, w, *out);
        } catch (const observation_conflict& e) {
            throw format_error(e.what(), ln);
        }
    }
    return d;
}

// Trace file: one input string per line, EPS for epsilon, `#` comments.
inline std::vector<InputString> parse_traces(const std::string& text,
                                             const Alphabet& sigma) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    std::vector<InputString> out;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (line == kEpsilonToken) {
            out.push_back({});
            continue;
        }
        InputString w;
        for (char c : line) {
            auto id = sigma.find(c);
            if (!id)
                throw format_error(std::string("symbol '") + c + "' not in input alphabet",
                                   line_no);
            w.push_back(*id);
        }
        out.push_back(std::move(w));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Instance bundle JSON: {"input_alphabet": [...], "output_alphabet": [...],
// "k": int, "observations": <inline [[string, output-char], ...] or a path
// to an observation file>}. The writer always emits inline entries.
// ---------------------------------------------------------------------------

inline nlohmann::json instance_to_json(const IdentificationInstance& inst) {
    nlohmann::json j;
    auto chars = [](const Alphabet& a) {
        std::vector<std::string> out;
        for (char c : a.symbols) out.emplace_back(1, c);
        return out;
    };
    j["input_alphabet"] = chars(inst.d.input_alphabet);
    j["output_alphabet"] = chars(inst.d.output_alphabet);
    j["k"] = inst.k;
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& [w, o] : inst.d.entries)
        entries.push_back({w.empty() ? kEpsilonToken
                                     : format_string(w, inst.d.input_alphabet),
                           std::string(1, inst.d.output_alphabet.name(o))});
    j["observations"] = std::move(entries);
    return j;
}

inline std::string emit_instance(const IdentificationInstance& inst) {
    return instance_to_json(inst).dump(2) + "\n";
}

inline IdentificationInstance instance_from_json(const nlohmann::json& j) {
    if (!j.contains("k") || !j["k"].is_number_integer() || j["k"].get<int>() < 1)
        throw format_error("\"k\" must be a positive integer");
    IdentificationInstance inst;
    inst.k = j["k"].get<int>();
    if (!j.contains("observations"))
        throw format_error("missing \"observations\"");
    if (j["observations"].is_string()) {
        inst.d = parse_observations(read_file(j["observations"].get<std::string>()));
        return inst;
    }
    if (!j["observations"].is_array())
        throw format_error("\"observations\" must be an array or a file path");
    auto alphabet_of = [&](const char* key) {
        if (!j.contains(key) || !j[key].is_array())
            throw format_error(std::string("inline observations need \"") + key + "\"");
        std::vector<char> syms;
        for (const auto& e : j[key]) {
            if (!e.is_string() || e.get<std::string>().size() != 1)
                throw format_error(std::string(key) +
                                   " entries must be single-character strings");
            syms.push_back(e.get<std::string>()[0]);
        }
        try {
            return Alphabet(syms);
        } catch (const input_error& e) {
            throw format_error(std::string(key) + ": " + e.what());
        }
    };
    inst.d = ObservationSet(alphabet_of("input_alphabet"), alphabet_of("output_alphabet"));
    for (size_t i = 0; i < j["observations"].size(); ++i) {
        const auto& e = j["observations"][i];
        if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string() ||
            e[1].get<std::string>().size() != 1)
            throw format_error("observations[" + std::to_string(i) +
                               "] must be [string, output-char]");
        std::string word = e[0].get<std::string>();
        if (word == kEpsilonToken) word.clear();
        try {
            insert(inst.d, parse_string(word, inst.d.input_alphabet),
                   inst.d.output_alphabet.id_of(e[1].get<std::string>()[0]));
        } catch (const input_error& err) {
            throw format_error("observations[" + std::to_string(i) + "]: " + err.what());
        }
    }
    return inst;
}

inline IdentificationInstance parse_instance(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw format_error(std::string("invalid JSON: ") + e.what());
    }
    return instance_from_json(j);
}

// ---------------------------------------------------------------------------
// DOT export: one node per state labeled q<i>/<output-char>, the initial
// state marked by an arrow from a point-shaped pseudo-node.
// ---------------------------------------------------------------------------

inline std::string emit_dot(const MooreMachine& m) {
    std::ostringstream out;
    out << "digraph machine {\n  rankdir=LR;\n"
        << "  __start [shape=point];\n";
    for (int s = 0; s < m.states(); ++s)
        out << "  q" << s << " [label=\"q" << s << "/"
            << m.output_alphabet.name(m.lambda[static_cast<size_t>(s)]) << "\"];\n";
    out << "  __start -> q" << m.initial << ";\n";
    for (int s = 0; s < m.states(); ++s)
        for (int a = 0; a < m.input_alphabet.size(); ++a)
            out << "  q" << s << " -> q" << step(m, s, a) << " [label=\""
                << m.input_alphabet.name(a) << "\"];\n";
    out << "}\n";
    return out.str();
}

} // namespace fsmid
