#include "homodyne/fbp.hpp"

#include <cmath>
#include <numbers>

#include "homodyne/error.hpp"
#include "homodyne/parallel.hpp"

namespace homodyne {
namespace {

constexpr std::size_t kEventBlock = 4096;

void check_cutoff(double k_c) {
  if (!(k_c > 0.0) || !std::isfinite(k_c)) throw ConfigError("FBP cutoff must be positive and finite");
}

double pairwise_sum(std::vector<double>& v) {
  if (v.empty()) return 0.0;
  for (std::size_t stride = 1; stride < v.size(); stride *= 2) {
    for (std::size_t i = 0; i + stride < v.size(); i += 2 * stride) v[i] += v[i + stride];
  }
  return v[0];
}

}  // namespace

double fbp_kernel(double z, double k_c) {
  check_cutoff(k_c);
  const double u = k_c * z;
  const double u2 = u * u;
  if (std::abs(u) < 1e-4) return k_c * k_c * (0.5 - u2 / 8.0 + u2 * u2 / 144.0);
  const double half_sin = std::sin(0.5 * u);
  // cos u - 1 = -2 sin^2(u/2) avoids cancellation for small u.
  return k_c * k_c * (-2.0 * half_sin * half_sin / u2 + std::sin(u) / u);
}

double fbp_point(const Dataset& data, double q, double p, const FbpConfig& cfg, int threads) {
  check_cutoff(cfg.cutoff);
  if (data.records.empty()) throw EstimationError("FBP needs a non-empty dataset");
  const std::size_t n = data.records.size();
  const std::size_t blocks = (n + kEventBlock - 1) / kEventBlock;
  std::vector<double> partial(blocks, 0.0);
  const auto block_count = static_cast<std::ptrdiff_t>(blocks);
#pragma omp parallel for schedule(static) num_threads(resolve_threads(threads))
  for (std::ptrdiff_t b = 0; b < block_count; ++b) {
    const std::size_t begin = static_cast<std::size_t>(b) * kEventBlock;
    const std::size_t end = std::min(n, begin + kEventBlock);
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const auto& r = data.records[i];
      acc += fbp_kernel(q * std::cos(r.theta) + p * std::sin(r.theta) - r.x, cfg.cutoff);
    }
    partial[static_cast<std::size_t>(b)] = acc;
  }
  return pairwise_sum(partial) / (2.0 * std::numbers::pi * static_cast<double>(n));
}

std::vector<double> fbp_grid(const Dataset& data, const GridSpec& grid, const FbpConfig& cfg, int threads) {
  std::vector<double> out;
  out.reserve(grid.size());
  for (const auto& pt : grid.points()) out.push_back(fbp_point(data, pt.q, pt.p, cfg, threads));
  return out;
}

}  // namespace homodyne
