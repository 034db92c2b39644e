#include "commands.hpp"

#include "logscar/error.hpp"
#include "logscar/version.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>

using namespace logscar;
using namespace logscar::cli;

namespace {

// Flags are bound to `flags`; only the ones actually given override the config file.
struct Binder {
    RunConfig flags;
    std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> setters;

    template <class T>
    void opt(CLI::App* app, const std::string& name, T RunConfig::*field, const std::string& desc) {
        CLI::Option* o = app->add_option(name, flags.*field, desc);
        if constexpr (std::is_same_v<T, std::vector<double>>) o->delimiter(',');
        setters.push_back({o, [this, field](RunConfig& dst) { dst.*field = flags.*field; }});
    }
    void flag(CLI::App* app, const std::string& name, bool RunConfig::*field, const std::string& desc) {
        CLI::Option* o = app->add_flag(name, flags.*field, desc);
        setters.push_back({o, [this, field](RunConfig& dst) { dst.*field = flags.*field; }});
    }
};

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    try {
        return config_from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw ConfigError("config file " + path + ": " + e.what());
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Log-scale quasimodes near hyperbolic fixed points: normal forms, propagation, quasimodes"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(logscar::kVersion));

    Binder b;
    std::string config_path;
    std::vector<CLI::App*> subs;

    auto common = [&](CLI::App* s) {
        s->add_option("--config", config_path, "JSON config file; flags override its values");
        b.opt(s, "--output-dir", &RunConfig::output_dir, "directory for artifacts");
        b.opt(s, "--seed", &RunConfig::seed, "seed for randomized inputs");
        subs.push_back(s);
    };
    auto model = [&](CLI::App* s) {
        b.opt(s, "--hbar", &RunConfig::hbar, "semiclassical parameter");
        b.opt(s, "--epsilon2", &RunConfig::epsilon2, "Ehrenfest-time margin in (0, 1/2)");
        b.opt(s, "--degree-cap", &RunConfig::degree_cap, "normal-form degree cap N (default: smallest admissible)");
        b.opt(s, "--dyson-order", &RunConfig::dyson_order, "Dyson order l >= 2");
        b.opt(s, "--f-slope", &RunConfig::f_slope, "energy offset f / hbar");
    };

    CLI::App* sym = app.add_subcommand("symbol", "build, combine and print polynomial symbols (JSON lines)");
    common(sym);
    b.opt(sym, "--input", &RunConfig::input, "symbol file (JSON lines)");
    b.flag(sym, "--transverse", &RunConfig::transverse, "Taylor jet of the transverse model symbol");
    b.opt(sym, "--E0", &RunConfig::E0, "energy of the transverse model");
    b.opt(sym, "--taylor-cap", &RunConfig::taylor_cap, "Taylor cap of the transverse jet");
    b.opt(sym, "--random-degree", &RunConfig::random_degree, "random real symbol of this degree (uses --seed)");
    b.opt(sym, "--op", &RunConfig::op, "none, moyal, poisson or bracket with --other");
    b.opt(sym, "--other", &RunConfig::other, "second operand (JSON lines)");
    b.opt(sym, "--truncate", &RunConfig::truncate, "drop terms above this weight");

    CLI::App* bnf = app.add_subcommand("bnf", "Birkhoff normal form of a symbol near a hyperbolic fixed point");
    common(bnf);
    b.opt(bnf, "--input", &RunConfig::input, "symbol file (JSON lines); default is the transverse model");
    b.opt(bnf, "--E0", &RunConfig::E0, "energy of the transverse model");
    b.opt(bnf, "--degree-cap", &RunConfig::degree_cap, "degree cap N");
    b.opt(bnf, "--epsilon2", &RunConfig::epsilon2, "used to pick N when --degree-cap is absent");
    b.flag(bnf, "--classical", &RunConfig::classical, "Poisson brackets instead of Moyal brackets");

    CLI::App* ev = app.add_subcommand("evolve", "evolve the ground state to the Ehrenfest time");
    common(ev);
    model(ev);
    b.opt(ev, "--t-grid", &RunConfig::t_grid, "number of equally spaced times in [0, T]");

    CLI::App* qm = app.add_subcommand("quasimode", "time-averaged quasimode of the normal form");
    common(qm);
    model(qm);
    b.opt(qm, "--epsilon3", &RunConfig::epsilon3, "projection window factor (default C / 4)");

    CLI::App* cyl = app.add_subcommand("cylinder", "quasimodes on a hyperbolic cylinder collar");
    common(cyl);
    b.opt(cyl, "--length", &RunConfig::length, "length L of the closed geodesic");
    b.opt(cyl, "--epsilon1", &RunConfig::epsilon1, "collar half-width");
    b.opt(cyl, "--mode-k", &RunConfig::mode_k, "circle mode k; sets hbar = L / (2 pi k)");
    b.opt(cyl, "--hbar-list", &RunConfig::hbar_list, "comma separated hbar values");
    b.opt(cyl, "--hbar", &RunConfig::hbar, "single hbar value");
    b.opt(cyl, "--epsilon2", &RunConfig::epsilon2, "Ehrenfest-time margin");
    b.opt(cyl, "--epsilon3", &RunConfig::epsilon3, "projection window factor (default C / 4)");
    b.opt(cyl, "--degree-cap", &RunConfig::degree_cap, "normal-form degree cap N");
    b.opt(cyl, "--dyson-order", &RunConfig::dyson_order, "Dyson order l >= 2");
    b.opt(cyl, "--n-s", &RunConfig::n_s, "minimum grid points along the geodesic");
    b.opt(cyl, "--n-x", &RunConfig::n_x, "starting transverse grid points");
    b.flag(cyl, "--dump-fields", &RunConfig::dump_fields, "write the ansatz as complex64 binary with a JSON sidecar");

    CLI::App* sw = app.add_subcommand("sweep", "run evolve, quasimode or cylinder over an hbar list on a worker pool");
    common(sw);
    model(sw);
    b.opt(sw, "--target", &RunConfig::target, "evolve, quasimode or cylinder");
    b.opt(sw, "--hbar-list", &RunConfig::hbar_list, "comma separated hbar values");
    b.opt(sw, "--workers", &RunConfig::workers, "worker threads");
    b.opt(sw, "--epsilon1", &RunConfig::epsilon1, "collar half-width (cylinder)");
    b.opt(sw, "--epsilon3", &RunConfig::epsilon3, "projection window factor");
    b.opt(sw, "--length", &RunConfig::length, "geodesic length (cylinder)");
    b.opt(sw, "--t-grid", &RunConfig::t_grid, "times per run (evolve)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    CLI::App* chosen = nullptr;
    for (CLI::App* s : subs)
        if (s->parsed()) chosen = s;

    try {
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
        for (auto& [o, set] : b.setters)
            if (o->count() > 0) set(cfg);
        cfg.command = chosen->get_name();
        run(cfg, std::cout);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n\n" << chosen->help();
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
