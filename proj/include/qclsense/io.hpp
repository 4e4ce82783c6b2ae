// io.hpp
// On-disk formats: model and parameter JSON, dataset/response/log/delta CSV,
// run manifests. Writers are hand-rolled with fixed key order and %.17g
// floats so identical runs produce byte-identical files; readers use the
// vendored nlohmann parser.

#pragma once

#include "qclsense/ansatz.hpp"
#include "qclsense/sensing.hpp"
#include "qclsense/training.hpp"
#include "qclsense/version.hpp"

#include "json.hpp"

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace qclsense {

inline std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

inline bool try_parse_double(const std::string& text, double& out) {
    if (text.empty()) return false;
    const char* begin = text.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    return end == begin + text.size();
}

inline double parse_double(const std::string& text) {
    double v;
    if (!try_parse_double(text, v))
        throw std::runtime_error("not a number: '" + text + "'");
    return v;
}

inline std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (!in.good() && !in.eof()) throw std::runtime_error("failed reading " + path);
    return buf.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << content;
    out.flush();
    if (!out.good()) throw std::runtime_error("failed writing " + path);
}

inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string digest_hex(std::string_view data) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx", static_cast<unsigned long long>(fnv1a64(data)));
    return buf;
}

inline std::string file_digest(const std::string& path) { return digest_hex(read_text_file(path)); }

// ---- model file ------------------------------------------------------------

inline std::string model_to_json(const SensingModel& m) {
    m.validate();
    std::ostringstream out;
    out << "{\n";
    out << "  \"L\": " << m.L << ",\n";
    out << "  \"t_sense\": " << format_double(m.t_sense) << ",\n";
    out << "  \"seed\": " << m.seed << ",\n";
    out << "  \"h\": [";
    for (int j = 0; j < m.L; ++j) out << (j ? ", " : "") << format_double(m.h(j));
    out << "],\n";
    out << "  \"J\": [\n";
    for (int i = 0; i < m.L; ++i) {
        out << "    [";
        for (int j = 0; j < m.L; ++j) out << (j ? ", " : "") << format_double(m.J(i, j));
        out << (i + 1 < m.L ? "],\n" : "]\n");
    }
    out << "  ]\n";
    out << "}\n";
    return out.str();
}

inline SensingModel model_from_json(const std::string& text) {
    SensingModel m;
    try {
        const nlohmann::json j = nlohmann::json::parse(text);
        m.L = j.at("L").get<int>();
        m.t_sense = j.at("t_sense").get<double>();
        m.seed = j.at("seed").get<std::uint64_t>();
        const auto& h = j.at("h");
        m.h.resize(Eigen::Index(h.size()));
        for (std::size_t k = 0; k < h.size(); ++k) m.h(Eigen::Index(k)) = h.at(k).get<double>();
        const auto& jm = j.at("J");
        m.J.resize(Eigen::Index(jm.size()), Eigen::Index(jm.size()));
        for (std::size_t r = 0; r < jm.size(); ++r) {
            const auto& row = jm.at(r);
            if (row.size() != jm.size()) throw std::runtime_error("J must be square");
            for (std::size_t c = 0; c < row.size(); ++c)
                m.J(Eigen::Index(r), Eigen::Index(c)) = row.at(c).get<double>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("invalid model JSON: ") + e.what());
    }
    m.validate();
    return m;
}

inline void write_model(const std::string& path, const SensingModel& m) {
    write_text_file(path, model_to_json(m));
}

inline SensingModel read_model(const std::string& path) {
    return model_from_json(read_text_file(path));
}

// ---- parameter file --------------------------------------------------------

// Circuit parameters plus the ansatz settings needed to reuse them; the qubit
// count comes from the model the parameters are applied to.
struct ParamsFile {
    int depth = 20;
    Sharing sharing = Sharing::shared;
    double t_gate = 1.0;
    double B0 = 1.0;
    Eigen::VectorXd theta;
};

inline AnsatzConfig ansatz_config(const ParamsFile& p) {
    AnsatzConfig config;
    config.depth = p.depth;
    config.sharing = p.sharing;
    config.t_gate = p.t_gate;
    config.grad.B0 = p.B0;
    config.validate();
    return config;
}

inline ParameterVector parameter_vector(const ParamsFile& p, int L) {
    ParameterVector v{p.sharing, p.depth, L, p.theta};
    v.validate();
    return v;
}

inline ParamsFile make_params_file(const AnsatzConfig& config, const ParameterVector& params) {
    params.validate();
    return ParamsFile{config.depth, config.sharing, config.t_gate, config.grad.B0, params.values};
}

inline std::string params_to_json(const ParamsFile& p) {
    std::ostringstream out;
    out << "{\n";
    out << "  \"D\": " << p.depth << ",\n";
    out << "  \"sharing\": \"" << sharing_name(p.sharing) << "\",\n";
    out << "  \"t_gate\": " << format_double(p.t_gate) << ",\n";
    out << "  \"B0\": " << format_double(p.B0) << ",\n";
    out << "  \"theta\": [";
    for (Eigen::Index k = 0; k < p.theta.size(); ++k)
        out << (k ? ", " : "") << format_double(p.theta(k));
    out << "]\n";
    out << "}\n";
    return out.str();
}

inline ParamsFile params_from_json(const std::string& text) {
    ParamsFile p;
    try {
        const nlohmann::json j = nlohmann::json::parse(text);
        p.depth = j.at("D").get<int>();
        p.sharing = parse_sharing(j.at("sharing").get<std::string>());
        p.t_gate = j.at("t_gate").get<double>();
        p.B0 = j.at("B0").get<double>();
        const auto& theta = j.at("theta");
        p.theta.resize(Eigen::Index(theta.size()));
        for (std::size_t k = 0; k < theta.size(); ++k)
            p.theta(Eigen::Index(k)) = theta.at(k).get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("invalid parameter JSON: ") + e.what());
    }
    return p;
}

inline void write_params(const std::string& path, const ParamsFile& p) {
    write_text_file(path, params_to_json(p));
}

inline ParamsFile read_params(const std::string& path) {
    return params_from_json(read_text_file(path));
}

// ---- CSV -------------------------------------------------------------------

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    fields.push_back(field);
    return fields;
}

inline CsvTable parse_csv(const std::string& text) {
    CsvTable table;
    std::istringstream in(text);
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        std::vector<std::string> fields = split_csv_line(line);
        if (table.header.empty()) {
            table.header = std::move(fields);
            continue;
        }
        if (fields.size() != table.header.size())
            throw std::runtime_error("CSV line " + std::to_string(line_number) + ": expected " +
                                     std::to_string(table.header.size()) + " fields, got " +
                                     std::to_string(fields.size()));
        table.rows.push_back(std::move(fields));
    }
    if (table.header.empty()) throw std::runtime_error("CSV has no header row");
    return table;
}

inline CsvTable read_csv(const std::string& path) { return parse_csv(read_text_file(path)); }

inline std::string dataset_to_csv(const TrainingSet& ts) {
    ts.validate();
    std::ostringstream out;
    out << "I,target\n";
    for (Eigen::Index i = 0; i < ts.size(); ++i)
        out << format_double(ts.currents(i)) << "," << format_double(ts.targets(i)) << "\n";
    return out.str();
}

inline TrainingSet dataset_from_csv(const std::string& text) {
    const CsvTable table = parse_csv(text);
    if (table.header != std::vector<std::string>{"I", "target"})
        throw std::runtime_error("dataset CSV must have header 'I,target'");
    TrainingSet ts;
    ts.currents.resize(Eigen::Index(table.rows.size()));
    ts.targets.resize(Eigen::Index(table.rows.size()));
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        ts.currents(Eigen::Index(i)) = parse_double(table.rows[i][0]);
        ts.targets(Eigen::Index(i)) = parse_double(table.rows[i][1]);
    }
    ts.validate();
    return ts;
}

inline void write_dataset(const std::string& path, const TrainingSet& ts) {
    write_text_file(path, dataset_to_csv(ts));
}

inline TrainingSet read_dataset(const std::string& path) {
    return dataset_from_csv(read_text_file(path));
}

inline std::string table_to_csv(const std::vector<std::string>& header,
                                const std::vector<std::vector<std::string>>& rows) {
    std::ostringstream out;
    for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
        out << "\n";
    }
    return out.str();
}

// ---- run manifest ----------------------------------------------------------

struct RunManifest {
    std::vector<std::string> command;             // argv, verbatim
    std::map<std::string, std::string> settings;  // resolved values as raw JSON
    std::map<std::string, std::string> inputs;    // path -> content digest
    std::map<std::string, std::string> outputs;   // path -> content digest
    std::string timestamp;                        // ISO 8601 UTC
    double wall_time_s = 0.0;

    void set(const std::string& key, const std::string& value) {
        settings[key] = "\"" + json_escape(value) + "\"";
    }
    // keeps string literals off the bool overload
    void set(const std::string& key, const char* value) { set(key, std::string(value)); }
    void set(const std::string& key, double value) { settings[key] = format_double(value); }
    void set(const std::string& key, int value) { settings[key] = std::to_string(value); }
    void set(const std::string& key, std::uint64_t value) { settings[key] = std::to_string(value); }
    void set(const std::string& key, bool value) { settings[key] = value ? "true" : "false"; }
};

inline std::string utc_timestamp() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline std::string manifest_to_json(const RunManifest& m) {
    std::ostringstream out;
    out << "{\n";
    out << "  \"tool\": \"qclsense\",\n";
    out << "  \"version\": \"" << kVersion << "\",\n";
    out << "  \"command\": [";
    for (std::size_t k = 0; k < m.command.size(); ++k)
        out << (k ? ", " : "") << "\"" << json_escape(m.command[k]) << "\"";
    out << "],\n";
    auto emit_map = [&out](const char* name, const std::map<std::string, std::string>& map,
                           bool quoted_values) {
        out << "  \"" << name << "\": {";
        bool first = true;
        for (const auto& [key, value] : map) {
            out << (first ? "\n" : ",\n") << "    \"" << json_escape(key) << "\": ";
            if (quoted_values)
                out << "\"" << json_escape(value) << "\"";
            else
                out << value;
            first = false;
        }
        out << (first ? "}" : "\n  }");
    };
    emit_map("settings", m.settings, false);
    out << ",\n";
    emit_map("inputs", m.inputs, true);
    out << ",\n";
    emit_map("outputs", m.outputs, true);
    out << ",\n";
    out << "  \"timestamp\": \"" << json_escape(m.timestamp) << "\",\n";
    out << "  \"wall_time_s\": " << format_double(m.wall_time_s) << "\n";
    out << "}\n";
    return out.str();
}

inline void write_manifest(const std::string& path, const RunManifest& m) {
    write_text_file(path, manifest_to_json(m));
}

}  // namespace qclsense
