#pragma once

#include "logscar/birkhoff.hpp"
#include "logscar/fermi.hpp"
#include "logscar/hermite.hpp"
#include "logscar/quasimode.hpp"
#include "logscar/symbol.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace logscar::cli {

using nlohmann::json;

// Union of the subcommand parameters. Negative sentinels mean "derive a default".
struct RunConfig {
    std::string command;
    std::string output_dir = ".";
    unsigned long long seed = 0;

    double hbar = -1.0;
    std::vector<double> hbar_list;
    double epsilon1 = 0.5;
    double epsilon2 = 0.3;
    double epsilon3 = -1.0;  // width_constant / 4
    int degree_cap = -1;     // smallest N with (N+1) epsilon2 / 3 > 1
    int dyson_order = 2;
    int t_grid = 9;
    double f_slope = 0.0;

    double length = 1.0;
    int mode_k = 0;
    int n_s = 512;
    int n_x = 512;
    bool dump_fields = false;

    // symbol / bnf inputs
    std::string input;
    std::string other;
    std::string op = "none";  // none, moyal, poisson, bracket, quantize
    int truncate = -1;
    bool transverse = false;
    double E0 = 1.0;
    int taylor_cap = 6;
    int random_degree = -1;
    bool classical = false;

    // sweep
    std::string target = "quasimode";
    int workers = 1;

    bool operator==(const RunConfig&) const = default;
};

json to_json(const RunConfig& c);
RunConfig config_from_json(const json& j);

// smallest N with (N + 1) epsilon2 / 3 > 1
int default_degree_cap(double epsilon2);
int effective_degree_cap(const RunConfig& c);

// Parameter-order checks. The hbar0 threshold involves the collar size epsilon1 and
// is only enforced by commands that build a collar.
void validate_model(const RunConfig& c);
void validate_cylinder(const RunConfig& c, double hbar);

json to_json(const SqueezedHermiteState& s);
SqueezedHermiteState state_from_json(const json& j);

// One JSON object per line: {alpha, beta, k, re, im}.
std::string symbol_to_jsonl(const PolySymbol& p);
PolySymbol symbol_from_jsonl(std::istream& in);
PolySymbol read_symbol_file(const std::string& path);

json to_json(const PolySymbol& p);
json to_json(const NormalFormResult& nf);
json to_json(const QuasimodeReport& r);
json to_json(const PartialLocalization& p);

// Resonant coefficients grouped by weight (hbar counted once).
std::string resonant_table(const NormalFormResult& nf);

// Round-trip exact formatting for CSV and text.
std::string fmt(double v);

// CSV artifact: "#schema=1", "#version=...", "#config=<json>", header, rows.
class CsvWriter {
public:
    CsvWriter(std::vector<std::string> columns, const json& config);
    void row(const std::vector<std::string>& cells);
    std::string str() const;
    const std::vector<std::string>& rows() const { return rows_; }

private:
    std::vector<std::string> columns_;
    json config_;
    std::vector<std::string> rows_;
};

std::string csv_quote(const std::string& s);

void write_file(const std::string& path, const std::string& content);
// Appends rows; writes the comment lines and header first when the file is new.
void append_csv(const std::string& path, const CsvWriter& csv);

// {"version", "config", ...payload}
json artifact(const RunConfig& c, json payload);

} // namespace logscar::cli
