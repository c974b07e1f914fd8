#pragma once

#include <vector>

#include "homodyne/grid.hpp"
#include "homodyne/simulator.hpp"

namespace homodyne {

/// Sharp-cutoff ramp filter for back-projection.
struct FbpConfig {
  double cutoff = 6.0;  // k_c, inverse quadrature units
};

/// K(z) = int_0^{k_c} k cos(kz) dk = (cos(k_c z) - 1)/z^2 + k_c sin(k_c z)/z, K(0) = k_c^2/2.
double fbp_kernel(double z, double k_c);

/// Event-driven filtered back-projection
///   W(q,p) = 1/(2 pi N) sum_i K(q cos theta_i + p sin theta_i - x_i)
/// for phases spread uniformly over [0, pi). On lossy data this estimates the blurred,
/// rescaled s-ordered function rather than the Wigner function. Partial sums run over
/// fixed event blocks combined pairwise, so the result is independent of `threads`.
double fbp_point(const Dataset& data, double q, double p, const FbpConfig& cfg, int threads = 0);

std::vector<double> fbp_grid(const Dataset& data, const GridSpec& grid, const FbpConfig& cfg, int threads = 0);

}  // namespace homodyne
