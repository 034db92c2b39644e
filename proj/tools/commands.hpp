#pragma once

#include "cli_io.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace logscar::cli {

// Rows of one run, before they are written anywhere.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    json payload;  // JSON report body
};

std::vector<std::string> columns_for(const std::string& command);

// Pure computations; no files are touched.
Table evolve_table(const RunConfig& c);
Table quasimode_table(const RunConfig& c);
Table cylinder_table(const RunConfig& c, bool dump_fields);

// Runs independent configs on `workers` threads and returns results in input order.
// The first failure (in input order) is rethrown after all workers finish.
std::vector<Table> run_pool(const std::vector<RunConfig>& configs, int workers);

// Executes a fully merged config, writes artifacts under output_dir and prints
// a summary to `out`. Throws ConfigError / NumericalError.
void run(const RunConfig& c, std::ostream& out);

} // namespace logscar::cli
