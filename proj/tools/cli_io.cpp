#include "cli_io.hpp"

#include "logscar/error.hpp"
#include "logscar/propagation.hpp"
#include "logscar/version.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace logscar::cli {

json to_json(const RunConfig& c) {
    return json{{"command", c.command},       {"output_dir", c.output_dir}, {"seed", c.seed},
                {"hbar", c.hbar},             {"hbar_list", c.hbar_list},   {"epsilon1", c.epsilon1},
                {"epsilon2", c.epsilon2},     {"epsilon3", c.epsilon3},     {"degree_cap", c.degree_cap},
                {"dyson_order", c.dyson_order}, {"t_grid", c.t_grid},       {"f_slope", c.f_slope},
                {"length", c.length},         {"mode_k", c.mode_k},         {"n_s", c.n_s},
                {"n_x", c.n_x},               {"dump_fields", c.dump_fields}, {"input", c.input},
                {"other", c.other},           {"op", c.op},                 {"truncate", c.truncate},
                {"transverse", c.transverse}, {"E0", c.E0},                 {"taylor_cap", c.taylor_cap},
                {"random_degree", c.random_degree}, {"classical", c.classical}, {"target", c.target},
                {"workers", c.workers}};
}

RunConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    static const std::vector<std::string> known = {
        "command", "output_dir", "seed", "hbar", "hbar_list", "epsilon1", "epsilon2", "epsilon3", "degree_cap",
        "dyson_order", "t_grid", "f_slope", "length", "mode_k", "n_s", "n_x", "dump_fields", "input", "other", "op",
        "truncate", "transverse", "E0", "taylor_cap", "random_degree", "classical", "target", "workers"};
    for (const auto& [k, v] : j.items())
        if (std::find(known.begin(), known.end(), k) == known.end()) throw ConfigError("unknown config key: " + k);
    RunConfig c;
    try {
        c.command = j.value("command", c.command);
        c.output_dir = j.value("output_dir", c.output_dir);
        c.seed = j.value("seed", c.seed);
        c.hbar = j.value("hbar", c.hbar);
        c.hbar_list = j.value("hbar_list", c.hbar_list);
        c.epsilon1 = j.value("epsilon1", c.epsilon1);
        c.epsilon2 = j.value("epsilon2", c.epsilon2);
        c.epsilon3 = j.value("epsilon3", c.epsilon3);
        c.degree_cap = j.value("degree_cap", c.degree_cap);
        c.dyson_order = j.value("dyson_order", c.dyson_order);
        c.t_grid = j.value("t_grid", c.t_grid);
        c.f_slope = j.value("f_slope", c.f_slope);
        c.length = j.value("length", c.length);
        c.mode_k = j.value("mode_k", c.mode_k);
        c.n_s = j.value("n_s", c.n_s);
        c.n_x = j.value("n_x", c.n_x);
        c.dump_fields = j.value("dump_fields", c.dump_fields);
        c.input = j.value("input", c.input);
        c.other = j.value("other", c.other);
        c.op = j.value("op", c.op);
        c.truncate = j.value("truncate", c.truncate);
        c.transverse = j.value("transverse", c.transverse);
        c.E0 = j.value("E0", c.E0);
        c.taylor_cap = j.value("taylor_cap", c.taylor_cap);
        c.random_degree = j.value("random_degree", c.random_degree);
        c.classical = j.value("classical", c.classical);
        c.target = j.value("target", c.target);
        c.workers = j.value("workers", c.workers);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
    return c;
}

int default_degree_cap(double epsilon2) {
    if (!(epsilon2 > 0.0)) throw ConfigError("epsilon2 must be positive");
    int n = static_cast<int>(std::floor(3.0 / epsilon2));
    while ((n + 1) * epsilon2 / 3.0 <= 1.0) ++n;
    while (n > 1 && n * epsilon2 / 3.0 > 1.0) --n;
    return n;
}

int effective_degree_cap(const RunConfig& c) { return c.degree_cap > 0 ? c.degree_cap : default_degree_cap(c.epsilon2); }

void validate_model(const RunConfig& c) {
    if (!(c.epsilon2 > 0.0 && c.epsilon2 < 0.5)) throw ConfigError("epsilon2 must lie in (0, 1/2)");
    const int n = effective_degree_cap(c);
    if (!((n + 1) * c.epsilon2 / 3.0 > 1.0))
        throw ConfigError("parameter order: degree cap N = " + std::to_string(n) + " violates (N+1) epsilon2 / 3 > 1 for epsilon2 = " +
                          fmt(c.epsilon2) + "; the smallest admissible N is " + std::to_string(default_degree_cap(c.epsilon2)));
    if (c.dyson_order < 2) throw ConfigError("parameter order: Dyson order l must be >= 2");
    if (!(c.hbar > 0.0 && c.hbar <= 0.5)) throw ConfigError("hbar must lie in (0, 1/2]");
}

void validate_cylinder(const RunConfig& c, double hbar) {
    try {
        validate_parameter_order(c.epsilon1, c.epsilon2, effective_degree_cap(c), c.dyson_order, hbar);
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("parameter order: ") + e.what());
    }
    if (!(c.length > 0.0)) throw ConfigError("length must be positive");
}

json to_json(const SqueezedHermiteState& s) {
    json coeffs = json::array();
    for (const auto& [m, v] : s.coeffs()) coeffs.push_back(json::array({m.entries(), v.real(), v.imag()}));
    return json{{"hbar", s.hbar()}, {"squeeze", s.squeeze()}, {"coeffs", coeffs},
                {"phase", {s.phase().real(), s.phase().imag()}}};
}

SqueezedHermiteState state_from_json(const json& j) {
    try {
        SqueezedHermiteState::Coeffs c;
        for (const auto& e : j.at("coeffs"))
            c[MultiIndex(e.at(0).get<std::vector<int>>())] = Complex{e.at(1).get<double>(), e.at(2).get<double>()};
        const auto ph = j.at("phase");
        return SqueezedHermiteState(j.at("hbar").get<double>(), j.at("squeeze").get<std::vector<double>>(), std::move(c),
                                    Complex{ph.at(0).get<double>(), ph.at(1).get<double>()});
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad state record: ") + e.what());
    }
}

std::string symbol_to_jsonl(const PolySymbol& p) {
    std::string out;
    for (const auto& [k, v] : p.terms()) {
        out += json{{"alpha", k.alpha.entries()}, {"beta", k.beta.entries()}, {"k", k.k}, {"re", v.real()},
                    {"im", v.imag()}}
                   .dump();
        out += '\n';
    }
    return out;
}

PolySymbol symbol_from_jsonl(std::istream& in) {
    std::string line;
    int r = -1, lineno = 0;
    PolySymbol::Terms terms;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json j = json::parse(line);
            if (j.contains("config")) continue;  // metadata line
            SymbolKey key{MultiIndex(j.at("alpha").get<std::vector<int>>()),
                          MultiIndex(j.at("beta").get<std::vector<int>>()), j.value("k", 0)};
            if (key.alpha.size() != key.beta.size()) throw ConfigError("alpha and beta lengths differ");
            if (r < 0) r = key.alpha.size();
            if (key.alpha.size() != r) throw ConfigError("mixed dimensions");
            terms[key] += Complex{j.value("re", 0.0), j.value("im", 0.0)};
        } catch (const json::exception& e) {
            throw ConfigError("symbol line " + std::to_string(lineno) + ": " + e.what());
        } catch (const std::exception& e) {
            throw ConfigError("symbol line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (r < 0) throw ConfigError("symbol input is empty");
    return PolySymbol(r, std::move(terms));
}

PolySymbol read_symbol_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open symbol file " + path);
    return symbol_from_jsonl(in);
}

json to_json(const PolySymbol& p) {
    json a = json::array();
    for (const auto& [k, v] : p.terms())
        a.push_back({{"alpha", k.alpha.entries()}, {"beta", k.beta.entries()}, {"k", k.k}, {"re", v.real()}, {"im", v.imag()}});
    return a;
}

json to_json(const NormalFormResult& nf) {
    json gens = json::array();
    for (std::size_t i = 0; i < nf.generators.size(); ++i)
        gens.push_back({{"level", nf.generator_levels[i]}, {"terms", to_json(nf.generators[i])}});
    json S = json::array();
    for (Eigen::Index i = 0; i < nf.linear_map.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < nf.linear_map.cols(); ++j) row.push_back(nf.linear_map(i, j));
        S.push_back(row);
    }
    return json{{"lambda", nf.lambda},
                {"degree_cap", nf.degree_cap},
                {"quantum", nf.quantum},
                {"linear_map", S},
                {"resonant", to_json(nf.resonant)},
                {"generators", gens},
                {"remainder", to_json(nf.remainder)},
                {"remainder_level_cap", nf.remainder_level_cap}};
}

json to_json(const QuasimodeReport& r) {
    return json{{"hbar", r.hbar},
                {"T", r.T},
                {"central_energy", r.central_energy},
                {"measured_width", r.measured_width},
                {"predicted_width", r.predicted_width},
                {"width_bound", r.width_bound},
                {"norm_sq", r.norm_sq},
                {"predicted_norm_sq", r.predicted_norm_sq},
                {"norm_ratio", r.norm_sq / r.predicted_norm_sq},
                {"mass_outside", r.mass_outside},
                {"S_value", r.S_value},
                {"cutoff_ratio", r.cutoff_ratio},
                {"window_half_width", r.window_half_width},
                {"retained_mass", r.retained_mass},
                {"expansion_cap", r.expansion_cap}};
}

json to_json(const PartialLocalization& p) {
    return json{{"center", p.center},           {"half_width", p.half_width}, {"retained_mass", p.retained_mass},
                {"lower_bound", p.lower_bound}, {"eigen_count", p.eigen_count}};
}

std::string resonant_table(const NormalFormResult& nf) {
    std::map<int, std::vector<std::pair<SymbolKey, Complex>>> by_weight;
    for (const auto& [k, v] : nf.resonant.terms()) by_weight[weight(k)].push_back({k, v});
    std::ostringstream os;
    os << "weight  alpha  beta  hbar^k  coefficient\n";
    for (const auto& [w, list] : by_weight)
        for (const auto& [k, v] : list) {
            os << w << "  " << k.alpha.str() << "  " << k.beta.str() << "  " << k.k << "  " << fmt(v.real());
            if (v.imag() != 0.0) os << (v.imag() < 0 ? " - " : " + ") << fmt(std::abs(v.imag())) << "i";
            os << '\n';
        }
    return os.str();
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

CsvWriter::CsvWriter(std::vector<std::string> columns, const json& config)
    : columns_(std::move(columns)), config_(config) {}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_.size()) throw std::logic_error("CSV row width does not match the header");
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) line += (i ? "," : "") + csv_quote(cells[i]);
    rows_.push_back(line);
}

namespace {

std::string csv_preamble(const std::vector<std::string>& columns, const json& config) {
    std::string out = "#schema=1\n#version=" + std::string(kVersion) + "\n#config=" + config.dump() + "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
    return out + "\n";
}

} // namespace

std::string CsvWriter::str() const {
    std::string out = csv_preamble(columns_, config_);
    for (const auto& r : rows_) out += r + "\n";
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << content;
}

void append_csv(const std::string& path, const CsvWriter& csv) {
    if (!std::filesystem::exists(path)) {
        write_file(path, csv.str());
        return;
    }
    std::ofstream out(path, std::ios::app | std::ios::binary);
    if (!out) throw ConfigError("cannot append to " + path);
    for (const auto& r : csv.rows()) out << r << '\n';
}

json artifact(const RunConfig& c, json payload) {
    json out{{"version", kVersion}, {"config", to_json(c)}};
    for (auto& [k, v] : payload.items()) out[k] = v;
    return out;
}

} // namespace logscar::cli
