#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "paraexp/expm.hpp"
#include "paraexp/fitwave.hpp"
#include "paraexp/paraexp.hpp"
#include "paraexp/rlc.hpp"
#include "paraexp/steppers.hpp"

namespace paraexp {

/// Invalid experiment configuration (distinct from numerical failure so the
/// CLI can map the two to different exit codes).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ExperimentKind { Rlc, Wave };

/// One experiment run. Zero/empty fields mean "use the experiment default":
/// RLC: dt=1e-5 s, t_end=3e-3 s, dense exponential;
/// wave: dt=2e-9 s, t_end=6e-8 s, Taylor action, snapshot at 4.4e-8 s.
struct RunConfig {
    ExperimentKind experiment = ExperimentKind::Rlc;
    std::size_t workers = 3;
    double dt = 0.0;
    double t_end = 0.0;
    StepperKind stepper = StepperKind::RK4;
    std::optional<ExpmMode> expm_mode;  // default depends on the experiment
    int taylor_m = 0;                   // >0 disables automatic (m, s) selection
    int taylor_s = 0;
    std::string output_dir = ".";
    std::optional<double> snapshot_time;  // wave only
    std::optional<RlcParams> rlc_params;  // override for tests; default = study circuit
};

struct ErrorReport {
    std::vector<double> times;
    std::vector<double> abs_error;
    std::vector<double> rel_error;
    double max_abs = 0.0;
    double max_rel = 0.0;
    double l2 = 0.0;
};

/// Pointwise error of a scalar diagnostic (current, energy, ...) between two
/// trajectories on the identical time grid. Relative errors are normalized by
/// the maximum of the reference series (falls back to absolute errors when
/// the reference is identically zero).
using ScalarDiagnostic = std::function<double(const StateVector&)>;
ErrorReport compute_errors(const SampledSolution& sol, const SampledSolution& ref,
                           const ScalarDiagnostic& q);

struct RlcResults {
    ParaexpRun paraexp;
    SampledSolution rk4;
    SampledSolution exact;  // closed form sampled on the same grid
    ErrorReport err_rk4;
    ErrorReport err_paraexp;
    double error_ratio = 0.0;  // max-abs-error(ParaExp) / max-abs-error(RK4)
    std::vector<std::string> files;
};

/// Sequential stepper and ParaExp on the same grid, compared against the
/// closed-form current. Writes rlc_trajectory.csv, rlc_errors.csv,
/// rlc_decomposition.csv and timing.txt under cfg.output_dir.
RlcResults run_rlc(const RunConfig& cfg);

struct WaveResults {
    ParaexpRun paraexp;
    SampledSolution rk4;
    std::vector<double> energy_rk4;
    std::vector<double> energy_paraexp;
    std::vector<double> energy_ref;
    ErrorReport err_rk4;      // relative energy error vs the adaptive reference
    ErrorReport err_paraexp;
    double t1 = 0.0;          // first interior partition boundary
    std::vector<std::string> files;
};

/// The 21x21x2 vacuum cavity with PEC walls and the centered Gaussian line
/// current. Writes wave_energy.csv, optionally wave_snapshot_ez.csv, and
/// timing.txt under cfg.output_dir.
WaveResults run_wave(const RunConfig& cfg);

/// Fills in experiment defaults and validates; throws ConfigError.
RunConfig resolve_config(RunConfig cfg);

}  // namespace paraexp
