#include "homodyne/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "homodyne/error.hpp"
#include "homodyne/kernels.hpp"
#include "homodyne/log.hpp"
#include "homodyne/parallel.hpp"

namespace homodyne {

RandomStream phase_substream(std::uint64_t seed, int phase, StreamPurpose purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(phase), static_cast<std::uint32_t>(purpose)};
  return RandomStream(seq);
}

IdealQuadratureSampler::IdealQuadratureSampler(const StateSpec& spec, double theta) {
  const QuadratureDistribution dist(spec, theta);
  const double half = dist.support_half_width();
  const auto cells = static_cast<std::size_t>(std::ceil(2.0 * half / kMaxPitch));
  lower_ = -half;
  pitch_ = 2.0 * half / static_cast<double>(cells);
  cdf_.resize(cells + 1);
  cdf_[0] = 0.0;
  double left = dist.ideal(lower_);
  for (std::size_t j = 1; j <= cells; ++j) {
    const double right = dist.ideal(lower_ + static_cast<double>(j) * pitch_);
    cdf_[j] = cdf_[j - 1] + 0.5 * (left + right) * pitch_;
    left = right;
  }
  const double total = cdf_.back();
  for (auto& c : cdf_) c /= total;
  cdf_.back() = 1.0;
}

double IdealQuadratureSampler::operator()(RandomStream& rng) const {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double u = uniform(rng);
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const auto cell = static_cast<std::size_t>(
      std::clamp<std::ptrdiff_t>(std::distance(cdf_.begin(), it) - 1, 0, static_cast<std::ptrdiff_t>(cdf_.size()) - 2));
  const double width = cdf_[cell + 1] - cdf_[cell];
  const double frac = width > 0.0 ? (u - cdf_[cell]) / width : 0.0;
  return lower_ + (static_cast<double>(cell) + frac) * pitch_;
}

double sample_ideal(const StateSpec& spec, double theta, RandomStream& rng) {
  return IdealQuadratureSampler(spec, theta)(rng);
}

double apply_efficiency(double x_ideal, double eta, RandomStream& rng) {
  detail::check_efficiency(eta);
  if (eta == 1.0) return x_ideal;
  std::normal_distribution<double> normal(0.0, 1.0);
  return std::sqrt(eta) * x_ideal + normal(rng) * std::sqrt((1.0 - eta) / 2.0);
}

Dataset simulate(const StateSpec& spec, double eta, int phases, int per_phase, std::uint64_t seed, int threads) {
  detail::check_efficiency(eta);
  if (phases < 1) throw ConfigError("phases must be at least 1");
  if (per_phase < 1) throw ConfigError("per_phase must be at least 1");

  Dataset data;
  data.eta = eta;
  data.state_desc = spec.to_string();
  data.seed = seed;
  data.phases = phases;
  data.per_phase = per_phase;
  data.records.resize(static_cast<std::size_t>(phases) * static_cast<std::size_t>(per_phase));

#pragma omp parallel for schedule(dynamic, 1) num_threads(resolve_threads(threads))
  for (int j = 0; j < phases; ++j) {
    const double theta = j * std::numbers::pi / phases;
    const IdealQuadratureSampler sampler(spec, theta);
    RandomStream ideal_rng = phase_substream(seed, j, StreamPurpose::ideal);
    RandomStream noise_rng = phase_substream(seed, j, StreamPurpose::detector_noise);
    auto* out = data.records.data() + static_cast<std::size_t>(j) * static_cast<std::size_t>(per_phase);
    for (int i = 0; i < per_phase; ++i) {
      out[i].theta = theta;
      out[i].x = apply_efficiency(sampler(ideal_rng), eta, noise_rng);
    }
  }
  return data;
}

Histogram histogram(const Dataset& data, double theta_select, double tol, int bins, double lower, double upper) {
  if (bins < 1) throw ConfigError("histogram needs at least one bin");
  if (!(upper > lower)) throw ConfigError("histogram range must have upper > lower");
  if (!(tol >= 0.0)) throw ConfigError("phase tolerance must be nonnegative");

  Histogram h;
  h.lower = lower;
  h.upper = upper;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  const double width = (upper - lower) / bins;
  const bool select_all = std::isinf(theta_select);
  for (const auto& r : data.records) {
    if (!select_all && !(std::abs(r.theta - theta_select) <= tol)) continue;
    ++h.selected;
    if (r.x < lower) {
      ++h.underflow;
    } else if (r.x > upper) {
      ++h.overflow;
    } else {
      const auto cell = std::min(static_cast<std::size_t>((r.x - lower) / width), h.counts.size() - 1);
      ++h.counts[cell];
    }
  }
  if (h.selected == 0) {
    h.empty_selection = true;
    warn("histogram selection is empty");
  }
  return h;
}

double fringe_visibility(const std::vector<double>& profile) {
  if (profile.size() < 3) return 0.0;
  const double peak = *std::max_element(profile.begin(), profile.end());
  if (!(peak > 0.0)) return 0.0;
  std::size_t first = profile.size();
  std::size_t last = 0;
  for (std::size_t i = 1; i + 1 < profile.size(); ++i) {
    const bool local_max = profile[i] >= profile[i - 1] && profile[i] >= profile[i + 1];
    if (local_max && profile[i] >= 0.5 * peak) {
      first = std::min(first, i);
      last = std::max(last, i);
    }
  }
  if (first >= last) return 0.0;
  const auto [lo, hi] = std::minmax_element(profile.begin() + static_cast<std::ptrdiff_t>(first),
                                            profile.begin() + static_cast<std::ptrdiff_t>(last) + 1);
  return (*hi - *lo) / (*hi + *lo);
}

}  // namespace homodyne
