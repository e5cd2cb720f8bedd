#include "paraexp/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "paraexp/reference.hpp"

namespace paraexp {

namespace {

std::string g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string expm_name(const ExpmConfig& cfg) {
    if (cfg.mode == ExpmMode::Dense) return "dense";
    if (cfg.auto_params) return "taylor(auto)";
    return "taylor(m=" + std::to_string(cfg.m) + ",s=" + std::to_string(cfg.s) + ")";
}

/// Deterministic self-description prepended to every CSV ('#' lines).
std::vector<std::string> metadata_header(const RunConfig& cfg, const ExpmConfig& expm,
                                         const RunMetadata& meta) {
    std::vector<std::string> lines;
    lines.push_back("# experiment=" +
                    std::string(cfg.experiment == ExperimentKind::Rlc ? "rlc" : "wave") +
                    " workers=" + std::to_string(cfg.workers) + " dt=" + g17(cfg.dt) +
                    " t_end=" + g17(cfg.t_end) + " stepper=" + to_string(cfg.stepper) +
                    " expm=" + expm_name(expm));
    lines.push_back("# cfl: omega_max=" + g17(meta.cfl.omega_max) + " rad/s, dt_limit_leapfrog=" +
                    g17(meta.cfl.leapfrog_limit) + " s, dt_limit_rk4=" + g17(meta.cfl.rk4_limit) +
                    " s");
    for (const auto& w : meta.warnings) lines.push_back("# warning: " + w);
    lines.push_back("# rel_error normalization: max |reference| over the output grid");
    return lines;
}

std::string write_csv(const std::string& dir, const std::string& name,
                      const std::vector<std::string>& header_lines,
                      const std::vector<std::string>& columns,
                      const std::vector<std::vector<std::string>>& rows) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const std::string path = (fs::path(dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + path);
    for (const auto& line : header_lines) out << line << '\n';
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
        out << '\n';
    }
    if (!out) throw ConfigError("write failed: " + path);
    return path;
}

/// Wall-clock notes live outside the CSVs so those stay bitwise reproducible.
std::string write_timing(const std::string& dir, const RunMetadata& meta) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const std::string path = (fs::path(dir) / "timing.txt").string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + path);
    for (std::size_t w = 0; w < meta.worker_seconds.size(); ++w)
        out << "worker " << (w + 1) << ": " << meta.worker_seconds[w] << " s\n";
    return path;
}

ExpmConfig make_expm_config(const RunConfig& cfg) {
    ExpmConfig expm;
    expm.mode = *cfg.expm_mode;
    if (cfg.taylor_m > 0 || cfg.taylor_s > 0) {
        expm.auto_params = false;
        expm.m = cfg.taylor_m > 0 ? cfg.taylor_m : 20;
        expm.s = cfg.taylor_s > 0 ? cfg.taylor_s : 1;
    }
    return expm;
}

}  // namespace

RunConfig resolve_config(RunConfig cfg) {
    const bool rlc = cfg.experiment == ExperimentKind::Rlc;
    if (cfg.dt == 0.0) cfg.dt = rlc ? 1e-5 : 2e-9;
    if (cfg.t_end == 0.0) cfg.t_end = rlc ? 3e-3 : 6e-8;
    if (!cfg.expm_mode) cfg.expm_mode = rlc ? ExpmMode::Dense : ExpmMode::TaylorAction;
    if (!rlc && !cfg.snapshot_time && 4.4e-8 <= cfg.t_end) cfg.snapshot_time = 4.4e-8;

    if (cfg.workers == 0) throw ConfigError("workers must be >= 1");
    if (!(cfg.dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(cfg.t_end > 0.0)) throw ConfigError("t_end must be positive");
    if (cfg.taylor_m < 0 || cfg.taylor_s < 0) throw ConfigError("taylor m/s must be positive");
    if (rlc && cfg.stepper == StepperKind::Leapfrog)
        throw ConfigError("the leapfrog stepper needs the staggered wave system; use rk4 for rlc");
    if (rlc && cfg.snapshot_time) throw ConfigError("snapshot-time only applies to the wave experiment");
    if (cfg.snapshot_time && (*cfg.snapshot_time < 0.0 || *cfg.snapshot_time > cfg.t_end))
        throw ConfigError("snapshot-time outside [0, t_end]");
    return cfg;
}

ErrorReport compute_errors(const SampledSolution& sol, const SampledSolution& ref,
                           const ScalarDiagnostic& q) {
    if (sol.times.size() != ref.times.size())
        throw std::invalid_argument("compute_errors: time grids differ in length");
    for (std::size_t k = 0; k < sol.times.size(); ++k)
        if (sol.times[k] != ref.times[k])
            throw std::invalid_argument("compute_errors: time grids differ");

    ErrorReport rep;
    rep.times = sol.times;
    rep.abs_error.resize(sol.times.size());
    rep.rel_error.resize(sol.times.size());

    double ref_max = 0.0;
    for (const auto& s : ref.states) ref_max = std::max(ref_max, std::abs(q(s)));

    double l2sq = 0.0;
    for (std::size_t k = 0; k < sol.times.size(); ++k) {
        const double abs_err = std::abs(q(sol.states[k]) - q(ref.states[k]));
        rep.abs_error[k] = abs_err;
        rep.rel_error[k] = ref_max > 0.0 ? abs_err / ref_max : abs_err;
        rep.max_abs = std::max(rep.max_abs, abs_err);
        rep.max_rel = std::max(rep.max_rel, rep.rel_error[k]);
        l2sq += abs_err * abs_err;
    }
    rep.l2 = std::sqrt(l2sq);
    return rep;
}

RlcResults run_rlc(const RunConfig& raw) {
    RunConfig cfg = resolve_config(raw);
    if (cfg.experiment != ExperimentKind::Rlc) throw ConfigError("run_rlc: wrong experiment");
    const RlcParams params = cfg.rlc_params.value_or(RlcParams{});
    const ExpmConfig expm = make_expm_config(cfg);

    LinearOdeSystem sys = rlc_system(params);

    RlcResults res;
    res.paraexp = paraexp_solve(sys, cfg.t_end, cfg.workers, cfg.dt, cfg.stepper, expm);
    res.rk4 = integrate_on_grid(sys, res.paraexp.total.times, cfg.stepper);

    res.exact.times = res.paraexp.total.times;
    res.exact.states.reserve(res.exact.times.size());
    for (double t : res.exact.times)
        res.exact.states.push_back(
            {rlc_closed_form(params, t), rlc_closed_form_derivative(params, t)});

    const ScalarDiagnostic current = [](const StateVector& u) { return u[0]; };
    res.err_rk4 = compute_errors(res.rk4, res.exact, current);
    res.err_paraexp = compute_errors(res.paraexp.total, res.exact, current);
    res.error_ratio = res.err_rk4.max_abs > 0.0 ? res.err_paraexp.max_abs / res.err_rk4.max_abs
                                                : (res.err_paraexp.max_abs > 0.0 ? HUGE_VAL : 1.0);

    const auto header = metadata_header(cfg, expm, res.paraexp.metadata);
    const std::string seq = to_string(cfg.stepper);
    const std::size_t n = res.exact.times.size();

    std::vector<std::vector<std::string>> rows(n);
    for (std::size_t k = 0; k < n; ++k)
        rows[k] = {g17(res.exact.times[k]),        g17(res.rk4.states[k][0]),
                   g17(res.rk4.states[k][1]),      g17(res.paraexp.total.states[k][0]),
                   g17(res.paraexp.total.states[k][1]), g17(res.exact.states[k][0])};
    res.files.push_back(write_csv(cfg.output_dir, "rlc_trajectory.csv", header,
                                  {"time_s", "i_" + seq + "_a", "didt_" + seq + "_a_per_s",
                                   "i_paraexp_a", "didt_paraexp_a_per_s", "i_exact_a"},
                                  rows));

    for (std::size_t k = 0; k < n; ++k)
        rows[k] = {g17(res.exact.times[k]), g17(res.err_rk4.abs_error[k]),
                   g17(res.err_rk4.rel_error[k]), g17(res.err_paraexp.abs_error[k]),
                   g17(res.err_paraexp.rel_error[k])};
    res.files.push_back(write_csv(cfg.output_dir, "rlc_errors.csv", header,
                                  {"time_s", "abs_err_" + seq + "_a", "rel_err_" + seq,
                                   "abs_err_paraexp_a", "rel_err_paraexp"},
                                  rows));

    // Decomposition of the total into the v_j / w_i currents (empty cells
    // outside a part's domain).
    const std::size_t p = cfg.workers;
    std::vector<std::string> cols{"time_s"};
    for (std::size_t j = 1; j <= p; ++j) cols.push_back("v" + std::to_string(j) + "_i_a");
    for (std::size_t i = 1; i <= p; ++i) cols.push_back("w" + std::to_string(i) + "_i_a");
    for (std::size_t k = 0; k < n; ++k) {
        rows[k].assign(cols.size(), "");
        rows[k][0] = g17(res.exact.times[k]);
    }
    const auto& part = res.paraexp;
    std::vector<std::size_t> offset(p + 1, 0);
    for (std::size_t j = 0; j < p; ++j)
        offset[j + 1] = offset[j] + part.particular[j].times.size() - 1;
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = 0; k < part.particular[j].times.size(); ++k)
            rows[offset[j] + k][1 + j] = g17(part.particular[j].states[k][0]);
    for (std::size_t i = 0; i < p; ++i) {
        const std::size_t first = i == 0 ? 0 : offset[i] + 1;
        for (std::size_t k = 0; k < part.homogeneous[i].times.size(); ++k)
            rows[first + k][1 + p + i] = g17(part.homogeneous[i].states[k][0]);
    }
    res.files.push_back(
        write_csv(cfg.output_dir, "rlc_decomposition.csv", header, cols, rows));
    res.files.push_back(write_timing(cfg.output_dir, res.paraexp.metadata));
    return res;
}

WaveResults run_wave(const RunConfig& raw) {
    RunConfig cfg = resolve_config(raw);
    if (cfg.experiment != ExperimentKind::Wave) throw ConfigError("run_wave: wrong experiment");
    const ExpmConfig expm = make_expm_config(cfg);

    FitGrid grid;
    grid.nx = grid.ny = 21;
    grid.nz = 2;
    grid.dx = grid.dy = grid.dz = 1.0;
    const WaveSourceConfig source = centered_line_source(grid, 1.0, 2e-8);
    LinearOdeSystem sys =
        build_wave_system(grid, source, kVacuumPermittivity, kVacuumPermeability);
    const FitOperators& ops = sys.fit->ops;

    WaveResults res;
    res.paraexp = paraexp_solve(sys, cfg.t_end, cfg.workers, cfg.dt, cfg.stepper, expm);
    res.rk4 = integrate_on_grid(sys, res.paraexp.total.times, cfg.stepper);
    res.t1 = res.paraexp.partition.boundaries.size() > 1 ? res.paraexp.partition.boundaries[1]
                                                         : cfg.t_end;

    SampledSolution ref = reference_solution(sys, cfg.t_end, res.paraexp.total.times);

    const std::size_t n = res.paraexp.total.times.size();
    res.energy_rk4.resize(n);
    res.energy_paraexp.resize(n);
    res.energy_ref.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        res.energy_rk4[k] = energy_of_state(res.rk4.states[k], ops);
        res.energy_paraexp[k] = energy_of_state(res.paraexp.total.states[k], ops);
        res.energy_ref[k] = energy_of_state(ref.states[k], ops);
    }

    const FitOperators* ops_ptr = &ops;
    const ScalarDiagnostic w_diag = [ops_ptr](const StateVector& u) {
        return energy_of_state(u, *ops_ptr);
    };
    res.err_rk4 = compute_errors(res.rk4, ref, w_diag);
    res.err_paraexp = compute_errors(res.paraexp.total, ref, w_diag);

    const auto header = metadata_header(cfg, expm, res.paraexp.metadata);
    const std::string seq = to_string(cfg.stepper);

    std::vector<std::vector<std::string>> rows(n);
    for (std::size_t k = 0; k < n; ++k)
        rows[k] = {g17(res.paraexp.total.times[k]), g17(res.energy_rk4[k]),
                   g17(res.energy_paraexp[k]),      g17(res.energy_ref[k]),
                   g17(res.err_rk4.rel_error[k]),   g17(res.err_paraexp.rel_error[k])};
    res.files.push_back(write_csv(cfg.output_dir, "wave_energy.csv", header,
                                  {"time_s", "w_" + seq + "_j", "w_paraexp_j", "w_ref_j",
                                   "rel_err_" + seq, "rel_err_paraexp"},
                                  rows));

    if (cfg.snapshot_time) {
        // Snapshot at the nearest sample of the ParaExp total.
        std::size_t best = 0;
        for (std::size_t k = 1; k < n; ++k)
            if (std::abs(res.paraexp.total.times[k] - *cfg.snapshot_time) <
                std::abs(res.paraexp.total.times[best] - *cfg.snapshot_time))
                best = k;
        const auto samples = ez_snapshot(res.paraexp.total.states[best], grid, ops);
        std::vector<std::vector<std::string>> snap(samples.size());
        for (std::size_t k = 0; k < samples.size(); ++k)
            snap[k] = {std::to_string(samples[k].ix), std::to_string(samples[k].iy),
                       std::to_string(samples[k].iz), g17(samples[k].ez)};
        auto snap_header = header;
        snap_header.push_back("# snapshot_time=" + g17(res.paraexp.total.times[best]) + " s");
        res.files.push_back(write_csv(cfg.output_dir, "wave_snapshot_ez.csv", snap_header,
                                      {"ix", "iy", "iz", "ez_volts_per_m"}, snap));
    }
    res.files.push_back(write_timing(cfg.output_dir, res.paraexp.metadata));
    return res;
}

}  // namespace paraexp
