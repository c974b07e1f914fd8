#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "homodyne/states.hpp"

namespace homodyne {

/// One homodyne event: local-oscillator phase (radians) and quadrature outcome.
struct HomodyneRecord {
  double theta = 0.0;
  double x = 0.0;

  friend bool operator==(const HomodyneRecord&, const HomodyneRecord&) = default;
};

struct Dataset {
  std::vector<HomodyneRecord> records;
  double eta = 1.0;
  std::string state_desc;
  std::uint64_t seed = 0;
  int phases = 0;
  int per_phase = 0;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

using RandomStream = std::mt19937_64;

/// Purpose tag mixed into substream derivation; ideal draws and detector noise use
/// separate streams so an eta = 1 and an eta < 1 run share their ideal draws.
enum class StreamPurpose : std::uint32_t { ideal = 1, detector_noise = 2 };

/// Substream for phase index `phase` of a run seeded with `seed`. The derivation rule
/// seed_seq{seed_lo, seed_hi, phase, purpose} is fixed and independent of threading.
RandomStream phase_substream(std::uint64_t seed, int phase, StreamPurpose purpose);

/// Inverse-CDF sampler for the perfect-detection quadrature density at one phase,
/// tabulated over [-x_max, x_max] with pitch <= 0.005 and linear interpolation of the
/// CDF within cells.
class IdealQuadratureSampler {
 public:
  static constexpr double kMaxPitch = 0.005;

  IdealQuadratureSampler(const StateSpec& spec, double theta);

  double operator()(RandomStream& rng) const;

  [[nodiscard]] double lower() const { return lower_; }
  [[nodiscard]] double pitch() const { return pitch_; }

 private:
  double lower_ = 0.0;
  double pitch_ = 0.0;
  std::vector<double> cdf_;
};

/// Single ideal draw. Builds the tabulation on every call; hold an
/// IdealQuadratureSampler when drawing repeatedly.
double sample_ideal(const StateSpec& spec, double theta, RandomStream& rng);

/// Detector loss: sqrt(eta) x + g sqrt((1-eta)/2) with g standard normal; eta = 1
/// returns x untouched and consumes no randomness.
double apply_efficiency(double x_ideal, double eta, RandomStream& rng);

/// Phases theta_j = j pi / phases, per_phase events each, phase-major order.
/// `threads` caps the worker count (0 = runtime default); output does not depend on it.
Dataset simulate(const StateSpec& spec, double eta, int phases, int per_phase, std::uint64_t seed,
                 int threads = 0);

struct Histogram {
  double lower = 0.0;
  double upper = 0.0;
  std::vector<std::int64_t> counts;
  std::int64_t underflow = 0;
  std::int64_t overflow = 0;
  std::int64_t selected = 0;
  bool empty_selection = false;

  [[nodiscard]] double bin_width() const { return (upper - lower) / static_cast<double>(counts.size()); }
  [[nodiscard]] double bin_center(std::size_t i) const { return lower + (static_cast<double>(i) + 0.5) * bin_width(); }
};

inline constexpr double kSelectAllPhases = std::numeric_limits<double>::infinity();

/// Counts outcomes of records with |theta - theta_select| <= tol (every record for
/// kSelectAllPhases) in `bins` equal cells over [lower, upper]; x == upper falls in the last cell.
Histogram histogram(const Dataset& data, double theta_select, double tol, int bins, double lower, double upper);

/// (max - min) / (max + min) over the stretch between the outermost local maxima that
/// reach half of the global maximum. Returns 0 when no such stretch exists.
double fringe_visibility(const std::vector<double>& profile);

}  // namespace homodyne
