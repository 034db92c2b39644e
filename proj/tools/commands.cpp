#include "commands.hpp"

#include "logscar/error.hpp"
#include "logscar/version.hpp"

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <thread>

namespace logscar::cli {

namespace {

std::string path_in(const RunConfig& c, const std::string& name) {
    return c.output_dir.empty() || c.output_dir == "." ? name : c.output_dir + "/" + name;
}

PolySymbol random_symbol(int degree, unsigned long long seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    PolySymbol p(1);
    for (int a = 0; a <= degree; ++a)
        for (int b = 0; a + b <= degree; ++b) p.add_term({MultiIndex{a}, MultiIndex{b}, 0}, u(rng));
    return p;
}

PolySymbol symbol_source(const RunConfig& c) {
    const int sources = int(c.transverse) + int(!c.input.empty()) + int(c.random_degree >= 0);
    if (sources != 1) throw ConfigError("give exactly one of --input, --transverse, --random-degree");
    if (c.transverse) return transverse_symbol(c.E0, 1, c.taylor_cap);
    if (c.random_degree >= 0) return random_symbol(c.random_degree, c.seed);
    return read_symbol_file(c.input);
}

NormalFormResult model_normal_form(int degree_cap) {
    const PolySymbol ts = transverse_symbol(1.0, 1, 2 * degree_cap + 2);
    return quantum_bnf_symbols(ts, {2.0}, degree_cap);
}

void require_hbar(const RunConfig& c) {
    if (!(c.hbar > 0.0)) throw ConfigError("missing required flag --hbar");
}

// little-endian float32 pairs, row-major (s, x)
void dump_field(const std::string& stem, const CollarField& f, const RunConfig& c, int k, double hbar) {
    std::string bytes;
    bytes.reserve(static_cast<std::size_t>(f.values.size()) * 8);
    auto put = [&](float v) {
        std::uint32_t u;
        std::memcpy(&u, &v, 4);
        for (int b = 0; b < 4; ++b) bytes.push_back(static_cast<char>((u >> (8 * b)) & 0xff));
    };
    for (Eigen::Index i = 0; i < f.values.rows(); ++i)
        for (Eigen::Index j = 0; j < f.values.cols(); ++j) {
            put(static_cast<float>(f.values(i, j).real()));
            put(static_cast<float>(f.values(i, j).imag()));
        }
    write_file(stem + ".bin", bytes);
    const json side = artifact(c, {{"file", std::filesystem::path(stem + ".bin").filename().string()},
                                   {"dtype", "complex64-le"},
                                   {"layout", "row-major (s, x)"},
                                   {"shape", {f.values.rows(), f.values.cols()}},
                                   {"spacing", {f.grid.ds(), f.grid.transverse().dx()}},
                                   {"origin", {0.0, -f.grid.epsilon1}},
                                   {"k", k},
                                   {"hbar", hbar}});
    write_file(stem + ".json", side.dump(2) + "\n");
}

} // namespace

std::vector<std::string> columns_for(const std::string& command) {
    if (command == "evolve") return {"t", "norm", "dyson_error", "mass_outside"};
    if (command == "quasimode")
        return {"hbar", "T", "measured_width", "predicted_width", "norm_ratio", "mass_outside", "retained_mass"};
    if (command == "cylinder") return {"hbar", "k", "E0", "residual", "bound", "ratio", "husimi_mass", "retained_mass"};
    throw ConfigError("no table for command " + command);
}

Table evolve_table(const RunConfig& c) {
    require_hbar(c);
    validate_model(c);
    if (c.t_grid < 2) throw ConfigError("--t-grid needs at least 2 points");
    const int n = effective_degree_cap(c);
    const EvolutionPlan plan = make_plan(model_normal_form(n), c.dyson_order, c.epsilon2, c.hbar);
    const double T = ehrenfest_time(plan);
    const double radius = std::pow(c.hbar, c.epsilon2 / 3.0);
    Table t{columns_for("evolve"), {}, json::object()};
    FullPropagator prop(plan, T);
    for (int j = 0; j < c.t_grid; ++j) {
        const double time = T * j / (c.t_grid - 1);
        const SqueezedHermiteState s = prop.at(time);
        t.rows.push_back({fmt(time), fmt(s.norm()), fmt(dyson_error(plan, time)),
                          fmt(microlocal_mass_outside(s, radius))});
    }
    t.payload = {{"T", T}, {"degree_cap", n}, {"truncation_error", prop.truncation_error()}};
    return t;
}

Table quasimode_table(const RunConfig& c) {
    require_hbar(c);
    validate_model(c);
    const int n = effective_degree_cap(c);
    const EvolutionPlan plan = make_plan(model_normal_form(n), c.dyson_order, c.epsilon2, c.hbar);
    const QuasimodeReport r = quasimode_report(plan, make_cutoff(c.epsilon2), 1.0, c.f_slope, c.epsilon3);
    Table t{columns_for("quasimode"), {}, to_json(r)};
    t.payload["degree_cap"] = n;
    t.rows.push_back({fmt(r.hbar), fmt(r.T), fmt(r.measured_width), fmt(r.predicted_width),
                      fmt(r.norm_sq / r.predicted_norm_sq), fmt(r.mass_outside), fmt(r.retained_mass)});
    return t;
}

Table cylinder_table(const RunConfig& c, bool dump_fields) {
    std::vector<double> hbars;
    if (c.mode_k > 0) hbars.push_back(exact_hbar(c.length, c.mode_k));
    else if (!c.hbar_list.empty()) hbars = c.hbar_list;
    else if (c.hbar > 0.0) hbars.push_back(c.hbar);
    else throw ConfigError("missing required flag: one of --hbar-list, --hbar, --mode-k");
    Table t{columns_for("cylinder"), {}, json::array()};
    for (double h : hbars) {
        validate_cylinder(c, h);
        CylinderConfig cc;
        cc.L = c.length;
        cc.epsilon1 = c.epsilon1;
        cc.epsilon2 = c.epsilon2;
        cc.epsilon3 = c.epsilon3;
        cc.degree_cap = effective_degree_cap(c);
        cc.l = c.dyson_order;
        cc.hbar = h;
        cc.f_over_hbar = c.f_slope;
        cc.n_s = c.n_s;
        cc.n_x = c.n_x;
        const CylinderResult r = run_cylinder(cc);
        const PartialLocalization p = partial_localization(r, cc);
        t.rows.push_back({fmt(r.hbar), std::to_string(r.k), fmt(r.E0), fmt(r.residual), fmt(r.bound),
                          fmt(r.residual / r.bound), fmt(r.husimi_mass), fmt(p.retained_mass)});
        t.payload.push_back({{"hbar", r.hbar},
                             {"k", r.k},
                             {"T", r.T},
                             {"residual", r.residual},
                             {"transverse_residual", r.transverse_residual},
                             {"normal_form_width", r.nf_width},
                             {"bound", r.bound},
                             {"husimi_mass", r.husimi_mass},
                             {"cutoff_loss", r.cutoff_loss},
                             {"transport_error", r.transport_error},
                             {"expansion_cap", r.expansion_cap},
                             {"n_s", r.n_s},
                             {"n_x", r.n_x},
                             {"report", to_json(r.report)},
                             {"partial_localization", to_json(p)}});
        if (dump_fields) {
            CollarGrid g{c.length, c.epsilon1, r.n_s, r.n_x, 1, 1};
            const CollarField f = build_ansatz(r.k, r.psi, g, r.hbar, false);
            dump_field(path_in(c, "cylinder_k" + std::to_string(r.k)), f, c, r.k, r.hbar);
        }
    }
    return t;
}

std::vector<Table> run_pool(const std::vector<RunConfig>& configs, int workers) {
    std::vector<Table> out(configs.size());
    std::vector<std::exception_ptr> errors(configs.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < configs.size();) {
            try {
                const RunConfig& c = configs[i];
                if (c.command == "evolve") out[i] = evolve_table(c);
                else if (c.command == "quasimode") out[i] = quasimode_table(c);
                else if (c.command == "cylinder") out[i] = cylinder_table(c, false);
                else throw ConfigError("sweep target must be evolve, quasimode or cylinder");
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int n = std::max(1, std::min<int>(workers, static_cast<int>(configs.size())));
    std::vector<std::thread> pool;
    for (int w = 1; w < n; ++w) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

void run(const RunConfig& c, std::ostream& out) {
    const json cfg = to_json(c);
    if (c.command == "symbol") {
        PolySymbol p = symbol_source(c);
        if (c.op != "none") {
            if (c.other.empty()) throw ConfigError("--op " + c.op + " needs --other");
            const PolySymbol q = read_symbol_file(c.other);
            if (q.dim() != p.dim()) throw ConfigError("symbol dimensions differ");
            if (c.op == "moyal") p = moyal_product(p, q);
            else if (c.op == "poisson") p = poisson_bracket(p, q);
            else if (c.op == "bracket") p = moyal_bracket(p, q);
            else throw ConfigError("--op must be none, moyal, poisson or bracket");
        }
        if (c.truncate >= 0) p = p.truncated(c.truncate);
        const std::string body = symbol_to_jsonl(p.chopped(0.0));
        write_file(path_in(c, "symbol.jsonl"), json{{"version", kVersion}, {"config", cfg}}.dump() + "\n" + body);
        out << body;
    } else if (c.command == "bnf") {
        PolySymbol p(1);
        if (!c.input.empty() || c.random_degree >= 0) p = symbol_source(c);
        else p = transverse_symbol(c.E0, 1, 2 * effective_degree_cap(c) + 2);
        const int n = effective_degree_cap(c);
        const std::vector<double> lambda = normalize_quadratic(p).lambda;
        const NormalFormResult nf = c.classical ? classical_bnf(p, lambda, n) : quantum_bnf_symbols(p, lambda, n);
        write_file(path_in(c, "bnf.json"), artifact(c, {{"normal_form", to_json(nf)}}).dump(2) + "\n");
        out << "lambda";
        for (double l : lambda) out << ' ' << fmt(l);
        out << "\nresonant coefficients\n" << resonant_table(nf) << "generators\n";
        for (std::size_t i = 0; i < nf.generators.size(); ++i)
            out << "level " << nf.generator_levels[i] << ": " << nf.generators[i].str(12) << '\n';
    } else if (c.command == "evolve" || c.command == "quasimode" || c.command == "cylinder") {
        const Table t = c.command == "evolve" ? evolve_table(c)
                        : c.command == "quasimode" ? quasimode_table(c)
                                                   : cylinder_table(c, c.dump_fields);
        if (c.command == "quasimode") {
            // one appended row per run; the config travels with the row
            std::vector<std::string> cols = t.columns;
            cols.push_back("config");
            CsvWriter csv(cols, cfg);
            std::vector<std::string> row = t.rows.front();
            row.push_back(cfg.dump());
            csv.row(row);
            append_csv(path_in(c, "quasimode.csv"), csv);
            const std::string report = artifact(c, {{"report", t.payload}}).dump(2);
            write_file(path_in(c, "quasimode.json"), report + "\n");
            out << report << '\n';
        } else {
            CsvWriter csv(t.columns, cfg);
            for (const auto& r : t.rows) csv.row(r);
            write_file(path_in(c, c.command + ".csv"), csv.str());
            write_file(path_in(c, c.command + ".json"), artifact(c, {{"runs", t.payload}}).dump(2) + "\n");
            out << csv.str();
        }
    } else if (c.command == "sweep") {
        if (c.hbar_list.empty()) throw ConfigError("missing required flag --hbar-list");
        if (c.workers < 1) throw ConfigError("--workers must be >= 1");
        std::vector<RunConfig> runs;
        for (double h : c.hbar_list) {
            RunConfig r = c;
            r.command = c.target;
            r.hbar = h;
            r.hbar_list = {h};
            r.dump_fields = false;
            runs.push_back(r);
        }
        const std::vector<Table> tables = run_pool(runs, c.workers);
        std::vector<std::string> cols = columns_for(c.target);
        if (c.target == "evolve") cols.insert(cols.begin(), "hbar");
        CsvWriter csv(cols, cfg);
        for (std::size_t i = 0; i < tables.size(); ++i)
            for (auto row : tables[i].rows) {
                if (c.target == "evolve") row.insert(row.begin(), fmt(c.hbar_list[i]));
                csv.row(row);
            }
        write_file(path_in(c, "sweep_" + c.target + ".csv"), csv.str());
        out << csv.str();
    } else {
        throw ConfigError("unknown command '" + c.command + "'");
    }
}

} // namespace logscar::cli
