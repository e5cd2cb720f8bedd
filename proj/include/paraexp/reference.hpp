#pragma once

#include <vector>

#include "paraexp/linode.hpp"

namespace paraexp {

/// High-accuracy reference trajectory: adaptive embedded Runge-Kutta of order
/// 4(5) (Dormand-Prince) with local extrapolation, controlled by rtol/atol,
/// interpolated onto `out_times` with the scheme's dense output. When
/// out_times is empty the accepted steps themselves are returned (the final
/// one landing exactly on t_end). Throws NumericalError on step-size
/// underflow.
SampledSolution reference_solution(const LinearOdeSystem& sys, double t_end,
                                   std::vector<double> out_times = {}, double rtol = 1e-10,
                                   double atol = 1e-14);

}  // namespace paraexp
