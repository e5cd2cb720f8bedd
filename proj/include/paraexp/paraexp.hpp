#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "paraexp/expm.hpp"
#include "paraexp/linode.hpp"
#include "paraexp/steppers.hpp"

namespace paraexp {

/// Sub-interval boundaries T_0 < T_1 < ... < T_p covering (t0, t_end].
struct TimePartition {
    std::vector<double> boundaries;

    std::size_t intervals() const { return boundaries.empty() ? 0 : boundaries.size() - 1; }
    void validate() const;
};

TimePartition partition_uniform(double t0, double t_end, std::size_t p);

struct RunMetadata {
    StepperKind stepper = StepperKind::RK4;
    double dt = 0.0;
    ExpmConfig expm;
    std::vector<double> worker_seconds;       // wall clock per worker
    std::vector<int> particular_worker;       // worker that computed v_j, j = 1..p
    std::vector<int> homogeneous_worker;      // worker that computed w_i, i = 1..p
    std::vector<std::string> warnings;        // e.g. CFL
    CflEstimate cfl;                          // omega_max = 0 when not estimated
};

/// Everything one solve produces: the decomposition and its superposition.
/// total.times is the global uniform grid; particular[j] starts from the zero
/// vector at T_j; homogeneous[0] starts from u0 at T_0, homogeneous[i>0]
/// covers the samples strictly after T_i.
struct ParaexpRun {
    TimePartition partition;
    std::vector<SampledSolution> particular;
    std::vector<SampledSolution> homogeneous;
    SampledSolution total;
    RunMetadata metadata;
};

/// Particular solution on one sub-interval: zero initial data, same stepper
/// and step as the sequential baseline. The final sample lands exactly on t_b.
SampledSolution solve_particular(const LinearOdeSystem& sys, double t_a, double t_b, double dt,
                                 StepperKind kind);

/// Homogeneous propagation w(t_k) = exp((t_k - t_start) A) w0 for every
/// requested output time (all strictly after t_start, sorted). Advances
/// sample to sample; Dense mode caches the gap exponential and reuses it
/// while the gap stays bitwise constant, TaylorAction applies the scaled
/// recurrence per gap.
SampledSolution propagate_homogeneous(const SparseMatrix& a, const StateVector& w0,
                                      double t_start, const std::vector<double>& out_times,
                                      const ExpmConfig& cfg);

/// u(t) = v_j(t) + sum_{i<=j} w_i(t) on each sample of interval I_j (interval
/// boundaries belong to the left-closed-at-t0 interval ending there). All
/// sub-solutions must sit on exact slices of one global grid.
SampledSolution superpose(const ParaexpRun& run);

/// Full algorithm: uniform partition into p sub-intervals, worker j solves
/// v_j on I_j and then propagates w_{j+1} from v_j(T_j) over (T_j, T_p];
/// worker p instead propagates w_1 from u0 over (T_0, T_p]. A full barrier
/// precedes the superposition. Results are bitwise independent of scheduling.
ParaexpRun paraexp_solve(const LinearOdeSystem& sys, double t_end, std::size_t p, double dt,
                         StepperKind kind, const ExpmConfig& cfg);

/// Expert entry point accepting a custom (possibly non-uniform) partition.
/// Boundaries are snapped to the nearest global sample so that every worker
/// operates on exact slices of the same grid; the snapped partition is the
/// one reported in the result.
ParaexpRun paraexp_solve_partitioned(const LinearOdeSystem& sys, const TimePartition& partition,
                                     double dt, StepperKind kind, const ExpmConfig& cfg);

}  // namespace paraexp
