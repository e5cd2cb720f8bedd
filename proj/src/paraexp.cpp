#include "paraexp/paraexp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>
#include <utility>

namespace paraexp {

void TimePartition::validate() const {
    if (boundaries.size() < 2) throw std::invalid_argument("partition: need at least T0, T1");
    for (std::size_t k = 1; k < boundaries.size(); ++k)
        if (!(boundaries[k] > boundaries[k - 1]))
            throw std::invalid_argument("partition: boundaries not strictly increasing");
}

TimePartition partition_uniform(double t0, double t_end, std::size_t p) {
    if (p == 0) throw std::invalid_argument("partition_uniform: p must be >= 1");
    if (!(t_end > t0)) throw std::invalid_argument("partition_uniform: need t_end > t0");
    TimePartition part;
    part.boundaries.resize(p + 1);
    const double span = t_end - t0;
    for (std::size_t j = 0; j <= p; ++j)
        part.boundaries[j] = t0 + static_cast<double>(j) * span / static_cast<double>(p);
    part.boundaries.front() = t0;
    part.boundaries.back() = t_end;
    return part;
}

SampledSolution solve_particular(const LinearOdeSystem& sys, double t_a, double t_b, double dt,
                                 StepperKind kind) {
    LinearOdeSystem local = sys;
    local.u0.assign(sys.dim(), 0.0);
    local.t0 = t_a;
    return integrate(local, t_a, t_b, dt, kind);
}

SampledSolution propagate_homogeneous(const SparseMatrix& a, const StateVector& w0,
                                      double t_start, const std::vector<double>& out_times,
                                      const ExpmConfig& cfg) {
    if (a.nrows != a.ncols) throw std::invalid_argument("propagate_homogeneous: matrix not square");
    if (w0.size() != a.nrows) throw std::invalid_argument("propagate_homogeneous: size mismatch");
    double prev = t_start;
    for (double t : out_times) {
        if (!(t > prev))
            throw std::invalid_argument("propagate_homogeneous: output times must be sorted and > t_start");
        prev = t;
    }

    SampledSolution sol;
    sol.times = out_times;
    sol.states.reserve(out_times.size());

    StateVector w = w0;
    prev = t_start;
    DenseMatrix cached_e;
    double cached_gap = 0.0;
    bool have_cache = false;
    for (double t : out_times) {
        const double gap = t - prev;
        if (cfg.mode == ExpmMode::Dense) {
            if (!have_cache || gap != cached_gap) {
                cached_e = expm_dense(a, gap);
                cached_gap = gap;
                have_cache = true;
            }
            w = paraexp::apply(cached_e, w);
        } else {
            int m = cfg.m, s = cfg.s;
            if (cfg.auto_params) {
                auto ms = select_taylor_params(a, gap, 1e-12);
                m = ms.first;
                s = ms.second;
            }
            w = expm_action_taylor(a, w, gap, m, s);
        }
        if (!vec::all_finite(w))
            throw NumericalError("propagate_homogeneous: non-finite state at t = " +
                                 std::to_string(t));
        sol.states.push_back(w);
        prev = t;
    }
    return sol;
}

namespace {

// Index of the grid point nearest to t; the grid must be (close to) uniform.
std::size_t snap_index(const std::vector<double>& grid, double t) {
    if (grid.size() < 2) return 0;
    const double step = (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
    const double guess = (t - grid.front()) / step;
    std::size_t k = guess <= 0.0 ? 0
                                 : std::min(grid.size() - 1,
                                            static_cast<std::size_t>(std::llround(guess)));
    // llround on a nearly-exact ratio can land one off; fix locally.
    while (k + 1 < grid.size() &&
           std::abs(grid[k + 1] - t) < std::abs(grid[k] - t))
        ++k;
    while (k > 0 && std::abs(grid[k - 1] - t) < std::abs(grid[k] - t)) --k;
    return k;
}

}  // namespace

SampledSolution superpose(const ParaexpRun& run) {
    run.partition.validate();
    const std::size_t p = run.partition.intervals();
    if (run.particular.size() != p || run.homogeneous.size() != p)
        throw std::invalid_argument("superpose: expected p particular and p homogeneous parts");

    // The global grid is the concatenation of the particular grids (each
    // covers [T_{j-1}, T_j]; interior boundaries appear in both neighbours).
    std::vector<double> global = run.particular[0].times;
    for (std::size_t j = 1; j < p; ++j) {
        const auto& t = run.particular[j].times;
        if (t.empty() || t.front() != global.back())
            throw std::invalid_argument("superpose: particular grids do not abut");
        global.insert(global.end(), t.begin() + 1, t.end());
    }

    // Interval boundary sample offsets within the global grid.
    std::vector<std::size_t> bound(p + 1);
    bound[0] = 0;
    for (std::size_t j = 0; j < p; ++j)
        bound[j + 1] = bound[j] + run.particular[j].times.size() - 1;
    if (bound[p] + 1 != global.size())
        throw std::invalid_argument("superpose: inconsistent grids");

    // Verify every sub-solution sits on its exact slice of the global grid.
    for (std::size_t j = 0; j < p; ++j) {
        run.particular[j].validate();
        for (std::size_t k = 0; k < run.particular[j].times.size(); ++k)
            if (run.particular[j].times[k] != global[bound[j] + k])
                throw std::invalid_argument("superpose: particular grid mismatch");
    }
    for (std::size_t i = 0; i < p; ++i) {
        run.homogeneous[i].validate();
        const std::size_t first = i == 0 ? 0 : bound[i] + 1;  // w_1 includes T_0
        if (run.homogeneous[i].times.size() != global.size() - first)
            throw std::invalid_argument("superpose: homogeneous grid mismatch");
        for (std::size_t k = 0; k < run.homogeneous[i].times.size(); ++k)
            if (run.homogeneous[i].times[k] != global[first + k])
                throw std::invalid_argument("superpose: homogeneous grid mismatch");
    }

    const std::size_t dim = run.particular[0].states.empty()
                                ? 0
                                : run.particular[0].states[0].size();
    SampledSolution total;
    total.times = global;
    total.states.reserve(global.size());
    for (std::size_t k = 0; k < global.size(); ++k) {
        // Owning interval: boundaries belong to the interval they terminate.
        std::size_t j = 0;
        while (j + 1 < p && k > bound[j + 1]) ++j;

        StateVector u = run.particular[j].states[k - bound[j]];
        if (u.size() != dim) throw std::invalid_argument("superpose: state dimension mismatch");
        for (std::size_t i = 0; i <= j; ++i) {
            const std::size_t first = i == 0 ? 0 : bound[i] + 1;
            if (k < first) continue;  // k == bound[i] == T_{i-1}: w_i not defined there
            vec::axpy(1.0, run.homogeneous[i].states[k - first], u);
        }
        total.states.push_back(std::move(u));
    }
    return total;
}

ParaexpRun paraexp_solve_partitioned(const LinearOdeSystem& sys, const TimePartition& partition,
                                     double dt, StepperKind kind, const ExpmConfig& cfg) {
    sys.validate();
    partition.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("paraexp_solve: dt must be positive");
    if (partition.boundaries.front() != sys.t0)
        throw std::invalid_argument("paraexp_solve: partition must start at sys.t0");
    const std::size_t p = partition.intervals();
    const double t_end = partition.boundaries.back();

    // One global grid; all worker trajectories live on exact slices of it so
    // the superposition is bitwise independent of how work is scheduled.
    std::vector<double> global = sample_grid(sys.t0, t_end, dt);
    if (global.back() < t_end) global.push_back(t_end);

    std::vector<std::size_t> bound(p + 1);
    for (std::size_t j = 0; j <= p; ++j)
        bound[j] = snap_index(global, partition.boundaries[j]);
    bound[0] = 0;
    bound[p] = global.size() - 1;
    for (std::size_t j = 0; j < p; ++j)
        if (bound[j] >= bound[j + 1])
            throw std::invalid_argument(
                "paraexp_solve: partition boundaries collapse on the sample grid (dt too coarse "
                "for this worker count)");

    ParaexpRun run;
    run.partition.boundaries.resize(p + 1);
    for (std::size_t j = 0; j <= p; ++j) run.partition.boundaries[j] = global[bound[j]];
    run.metadata.stepper = kind;
    run.metadata.dt = dt;
    run.metadata.expm = cfg;
    run.metadata.worker_seconds.assign(p, 0.0);
    run.metadata.particular_worker.assign(p, -1);
    run.metadata.homogeneous_worker.assign(p, -1);
    run.particular.resize(p);
    run.homogeneous.resize(p);

    run.metadata.cfl = estimate_cfl(sys.a);
    if (auto warn = cfl_warning(run.metadata.cfl, dt, kind)) run.metadata.warnings.push_back(*warn);

    // Worker w (0-based) handles interval j = w+1 (1-based): v_j, then w_{j+1}
    // on the same worker; the last worker propagates w_1 from u0 instead.
    std::vector<std::exception_ptr> failures(p);
    auto worker_body = [&](std::size_t w) {
        const auto started = std::chrono::steady_clock::now();
        try {
            LinearOdeSystem local = sys;
            local.u0.assign(sys.dim(), 0.0);
            local.t0 = global[bound[w]];
            std::vector<double> slice(global.begin() + static_cast<std::ptrdiff_t>(bound[w]),
                                      global.begin() + static_cast<std::ptrdiff_t>(bound[w + 1]) + 1);
            run.particular[w] = integrate_on_grid(local, slice, kind);
            run.metadata.particular_worker[w] = static_cast<int>(w);

            if (w + 1 < p) {
                std::vector<double> tail(global.begin() + static_cast<std::ptrdiff_t>(bound[w + 1]) + 1,
                                         global.end());
                run.homogeneous[w + 1] = propagate_homogeneous(
                    sys.a, run.particular[w].states.back(), global[bound[w + 1]], tail, cfg);
                run.metadata.homogeneous_worker[w + 1] = static_cast<int>(w);
            } else {
                std::vector<double> tail(global.begin() + 1, global.end());
                SampledSolution w1 =
                    propagate_homogeneous(sys.a, sys.u0, global[0], tail, cfg);
                w1.times.insert(w1.times.begin(), global[0]);
                w1.states.insert(w1.states.begin(), sys.u0);
                run.homogeneous[0] = std::move(w1);
                run.metadata.homogeneous_worker[0] = static_cast<int>(w);
            }
        } catch (...) {
            failures[w] = std::current_exception();
        }
        run.metadata.worker_seconds[w] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    };

    if (p == 1) {
        worker_body(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(p);
        for (std::size_t w = 0; w < p; ++w) pool.emplace_back(worker_body, w);
        for (auto& th : pool) th.join();
    }

    for (std::size_t w = 0; w < p; ++w) {
        if (!failures[w]) continue;
        try {
            std::rethrow_exception(failures[w]);
        } catch (const std::exception& ex) {
            throw NumericalError("paraexp worker " + std::to_string(w + 1) +
                                 " failed: " + ex.what());
        }
    }

    run.total = superpose(run);
    return run;
}

ParaexpRun paraexp_solve(const LinearOdeSystem& sys, double t_end, std::size_t p, double dt,
                         StepperKind kind, const ExpmConfig& cfg) {
    return paraexp_solve_partitioned(sys, partition_uniform(sys.t0, t_end, p), dt, kind, cfg);
}

}  // namespace paraexp
