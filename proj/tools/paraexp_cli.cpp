// Command-line front end for the two bundled experiments: the driven RLC
// circuit and the PEC cavity wave problem. Emits CSV files plus a short
// summary on stdout. Exit codes: 0 success, 1 numerical failure, 2 bad
// configuration.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "paraexp/experiments.hpp"

namespace {

using paraexp::ConfigError;

/// Plain key=value file ('#' comments). Keys mirror the long flag names.
std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r\n");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r\n");
        line = line.substr(first, last - first + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t");
            const auto b = s.find_last_not_of(" \t");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
        kv[key] = value;
    }
    return kv;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw ConfigError("");
        return v;
    } catch (...) {
        throw ConfigError("config key '" + key + "': not a number: " + value);
    }
}

long parse_long(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(value, &pos);
        if (pos != value.size()) throw ConfigError("");
        return v;
    } catch (...) {
        throw ConfigError("config key '" + key + "': not an integer: " + value);
    }
}

paraexp::ExperimentKind parse_experiment(const std::string& v) {
    if (v == "rlc") return paraexp::ExperimentKind::Rlc;
    if (v == "wave") return paraexp::ExperimentKind::Wave;
    throw ConfigError("experiment must be 'rlc' or 'wave', got '" + v + "'");
}

paraexp::StepperKind parse_stepper(const std::string& v) {
    if (v == "rk4") return paraexp::StepperKind::RK4;
    if (v == "leapfrog") return paraexp::StepperKind::Leapfrog;
    throw ConfigError("stepper must be 'rk4' or 'leapfrog', got '" + v + "'");
}

paraexp::ExpmMode parse_expm(const std::string& v) {
    if (v == "dense") return paraexp::ExpmMode::Dense;
    if (v == "taylor") return paraexp::ExpmMode::TaylorAction;
    throw ConfigError("expm must be 'dense' or 'taylor', got '" + v + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ParaExp experiments: parallel-in-time integration of linear "
                 "time-domain problems"};
    app.get_formatter()->column_width(30);

    std::string experiment;
    long workers = -1;
    double dt = 0.0, t_end = 0.0, snapshot_time = -1.0;
    std::string stepper, expm, out_dir, config_path;
    long taylor_m = 0, taylor_s = 0;

    app.add_option("--experiment", experiment, "Which experiment to run: rlc | wave");
    app.add_option("--workers", workers, "Number of parallel time sub-intervals (default 3)");
    app.add_option("--dt", dt, "Time step in seconds (default: 1e-5 rlc, 2e-9 wave)");
    app.add_option("--t-end", t_end, "Horizon in seconds (default: 3e-3 rlc, 6e-8 wave)");
    app.add_option("--stepper", stepper, "Particular-solution stepper: rk4 | leapfrog");
    app.add_option("--expm", expm, "Homogeneous propagator: dense | taylor");
    app.add_option("--taylor-m", taylor_m, "Fixed Taylor order (disables automatic selection)");
    app.add_option("--taylor-s", taylor_s, "Fixed Taylor substep count (disables automatic selection)");
    app.add_option("--out", out_dir, "Output directory for CSV files (default '.')");
    app.add_option("--snapshot-time", snapshot_time, "Wave only: e_z snapshot time in seconds");
    app.add_option("--config", config_path, "key=value config file; explicit flags win");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        std::map<std::string, std::string> file_kv;
        if (!config_path.empty()) file_kv = parse_config_file(config_path);

        // Flags win over the file; the file wins over built-in defaults.
        auto from_file = [&](const char* flag, const std::string& key) -> const std::string* {
            if (app.count(flag) > 0) return nullptr;
            auto it = file_kv.find(key);
            return it == file_kv.end() ? nullptr : &it->second;
        };
        if (const auto* v = from_file("--experiment", "experiment")) experiment = *v;
        if (const auto* v = from_file("--workers", "workers")) workers = parse_long("workers", *v);
        if (const auto* v = from_file("--dt", "dt")) dt = parse_double("dt", *v);
        if (const auto* v = from_file("--t-end", "t_end")) t_end = parse_double("t_end", *v);
        if (const auto* v = from_file("--stepper", "stepper")) stepper = *v;
        if (const auto* v = from_file("--expm", "expm")) expm = *v;
        if (const auto* v = from_file("--taylor-m", "taylor_m"))
            taylor_m = parse_long("taylor_m", *v);
        if (const auto* v = from_file("--taylor-s", "taylor_s"))
            taylor_s = parse_long("taylor_s", *v);
        if (const auto* v = from_file("--out", "out")) out_dir = *v;
        if (const auto* v = from_file("--snapshot-time", "snapshot_time"))
            snapshot_time = parse_double("snapshot_time", *v);
        static const std::set<std::string> known{"experiment", "workers",  "dt",
                                                 "t_end",      "stepper",  "expm",
                                                 "taylor_m",   "taylor_s", "out",
                                                 "snapshot_time"};
        for (const auto& entry : file_kv)
            if (!known.count(entry.first)) throw ConfigError("unknown config key: " + entry.first);

        if (experiment.empty())
            throw ConfigError("--experiment is required (rlc or wave); see --help");

        paraexp::RunConfig cfg;
        cfg.experiment = parse_experiment(experiment);
        if (workers < 0) {
            if (const char* env = std::getenv("PARAEXP_WORKERS"))
                workers = parse_long("PARAEXP_WORKERS", env);
            else
                workers = 3;
        }
        if (workers < 1) throw ConfigError("workers must be >= 1");
        cfg.workers = static_cast<std::size_t>(workers);
        cfg.dt = dt;
        cfg.t_end = t_end;
        if (!stepper.empty()) cfg.stepper = parse_stepper(stepper);
        if (!expm.empty()) cfg.expm_mode = parse_expm(expm);
        if (taylor_m < 0 || taylor_s < 0) throw ConfigError("taylor m/s must be >= 1");
        cfg.taylor_m = static_cast<int>(taylor_m);
        cfg.taylor_s = static_cast<int>(taylor_s);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (app.count("--snapshot-time") > 0 || file_kv.count("snapshot_time"))
            cfg.snapshot_time = snapshot_time;

        if (cfg.experiment == paraexp::ExperimentKind::Rlc) {
            const auto res = paraexp::run_rlc(cfg);
            std::printf("paraexp/rk4 max-error ratio = %.6g  (paraexp %.6g A, %s %.6g A)\n",
                        res.error_ratio, res.err_paraexp.max_abs,
                        paraexp::to_string(cfg.stepper).c_str(), res.err_rk4.max_abs);
            for (const auto& w : res.paraexp.metadata.warnings)
                std::printf("warning: %s\n", w.c_str());
            for (const auto& f : res.files) std::printf("wrote %s\n", f.c_str());
        } else {
            const auto res = paraexp::run_wave(cfg);
            double max_after_t1 = 0.0;
            bool paraexp_wins = true;
            for (std::size_t k = 0; k < res.err_paraexp.times.size(); ++k) {
                if (res.err_paraexp.times[k] <= res.t1) continue;
                max_after_t1 = std::max(max_after_t1, res.err_paraexp.rel_error[k]);
                if (res.err_paraexp.rel_error[k] > res.err_rk4.rel_error[k]) paraexp_wins = false;
            }
            std::printf("max relative energy error: paraexp %.6g, %s %.6g\n",
                        res.err_paraexp.max_rel, paraexp::to_string(cfg.stepper).c_str(),
                        res.err_rk4.max_rel);
            std::printf("paraexp error <= %s error at every sample after T1: %s\n",
                        paraexp::to_string(cfg.stepper).c_str(), paraexp_wins ? "yes" : "no");
            for (const auto& w : res.paraexp.metadata.warnings)
                std::printf("warning: %s\n", w.c_str());
            for (const auto& f : res.files) std::printf("wrote %s\n", f.c_str());
        }
        return 0;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 1;
    }
}
