#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "homodyne/grid.hpp"
#include "homodyne/kernels.hpp"
#include "homodyne/simulator.hpp"

namespace homodyne {

inline constexpr double kSimplexTolerance = 1e-12;

/// Estimated populations rho_0..rho_{n_max-1} of displaced Fock states at one
/// phase-space point. Always nonnegative and summing to one within kSimplexTolerance.
class FockWeights {
 public:
  /// 1/n_max in every component.
  static FockWeights flat(int n_max);
  /// Unit vector e_m.
  static FockWeights unit(int n_max, int m);
  /// Throws ConfigError unless `values` lies on the probability simplex.
  static FockWeights from_values(Eigen::VectorXd values);

  [[nodiscard]] const Eigen::VectorXd& values() const { return w_; }
  [[nodiscard]] int size() const { return static_cast<int>(w_.size()); }
  [[nodiscard]] double operator[](int n) const { return w_[n]; }

 private:
  explicit FockWeights(Eigen::VectorXd w) : w_(std::move(w)) {}
  Eigen::VectorXd w_;
};

struct ReconstructionConfig {
  int n_max = 40;
  int max_iters = 10000;
  /// Stop once the log-likelihood gains less than this over a 50-iteration window;
  /// 0 disables the check and runs the full budget.
  double loglik_tol = 0.0;
  /// Flat start when empty.
  std::optional<FockWeights> init;
  /// Record the log-likelihood every `trace_stride` iterations.
  int trace_stride = 50;
};

struct EstimateDiagnostics {
  int iterations_run = 0;
  double final_loglik = 0.0;
  std::vector<double> loglik_trace;
  std::int64_t excluded_events = 0;
};

struct Estimate {
  FockWeights weights;
  EstimateDiagnostics diagnostics;
};

/// y_i = x_i - sqrt(eta) (q cos theta_i + p sin theta_i), in record order.
Eigen::VectorXd shift_outcomes(const Dataset& data, double q, double p);

/// sum_i ln(sum_n A_n(y_i) rho_n) - N sum_n rho_n over the non-excluded rows.
/// Throws EvaluationError when a non-excluded row has a non-positive mixture.
template <typename Scalar>
double log_likelihood(const FockWeights& w, const CoefficientTable<Scalar>& table);

/// One expectation-maximization update
///   rho_m <- (1/N) sum_i A_m(y_i) rho_m / sum_n A_n(y_i) rho_n.
template <typename Scalar>
FockWeights em_step(const FockWeights& w, const CoefficientTable<Scalar>& table);

double log_likelihood(const FockWeights& w, const FactorizedCoefficientTable& table);
FockWeights em_step(const FockWeights& w, const FactorizedCoefficientTable& table);
Estimate estimate_weights(const FactorizedCoefficientTable& table, const ReconstructionConfig& cfg);

/// Shifts the outcomes to (q, p) and runs EM per `cfg` on the factorized coefficient
/// table of the shifted outcomes.
Estimate estimate_weights(const Dataset& data, double q, double p, const ReconstructionConfig& cfg);

/// Runs EM on a prepared table.
template <typename Scalar>
Estimate estimate_weights(const CoefficientTable<Scalar>& table, const ReconstructionConfig& cfg);

/// W = (1/pi) sum_n (-1)^n rho_n, always within [-1/pi, 1/pi].
double wigner_from_weights(const FockWeights& w);

/// Per-point outcome of a grid reconstruction. A failed point keeps its error text and
/// a NaN value instead of aborting the grid.
struct PointResult {
  PhasePoint point;
  double wigner = 0.0;
  std::optional<Estimate> estimate;
  std::string error;

  [[nodiscard]] bool ok() const { return error.empty(); }
};

/// Independent estimate_weights + wigner_from_weights at every grid point, in grid
/// order. `threads` caps the worker count (0 = runtime default).
std::vector<PointResult> reconstruct_grid(const Dataset& data, const GridSpec& grid, const ReconstructionConfig& cfg,
                                          int threads = 0);

extern template double log_likelihood<double>(const FockWeights&, const CoefficientTable<double>&);
extern template double log_likelihood<float>(const FockWeights&, const CoefficientTable<float>&);
extern template FockWeights em_step<double>(const FockWeights&, const CoefficientTable<double>&);
extern template FockWeights em_step<float>(const FockWeights&, const CoefficientTable<float>&);
extern template Estimate estimate_weights<double>(const CoefficientTable<double>&, const ReconstructionConfig&);
extern template Estimate estimate_weights<float>(const CoefficientTable<float>&, const ReconstructionConfig&);

}  // namespace homodyne
