#include "homodyne/em.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "homodyne/error.hpp"
#include "homodyne/parallel.hpp"

namespace homodyne {
namespace {

// Rows per block: a block of the table stays cache resident between the forward
// (mixture) and backward (responsibility) products. Fixed so results never depend on
// anything but the inputs.
constexpr Eigen::Index kBlockRows = 512;
constexpr int kToleranceWindow = 50;

struct Sweep {
  Eigen::VectorXd accum;  // sum_i A_i / (A_i . w)
  double log_mixture = 0.0;
};

template <typename Scalar>
Sweep sweep(const CoefficientTable<Scalar>& table, const Eigen::VectorXd& w, bool with_loglik) {
  const Eigen::Index rows = table.values.rows();
  const Eigen::Index cols = table.values.cols();
  const Vector<Scalar> ws = w.template cast<Scalar>();
  Sweep out;
  out.accum = Eigen::VectorXd::Zero(cols);
  Vector<Scalar> mixture(kBlockRows);
  Vector<Scalar> inverse(kBlockRows);
  Vector<Scalar> partial(cols);
  for (Eigen::Index start = 0; start < rows; start += kBlockRows) {
    const Eigen::Index len = std::min(kBlockRows, rows - start);
    const auto block = table.values.middleRows(start, len);
    mixture.head(len).noalias() = block * ws;
    for (Eigen::Index i = 0; i < len; ++i) {
      if (table.excluded[static_cast<std::size_t>(start + i)]) {
        inverse[i] = Scalar(0);
        continue;
      }
      const Scalar d = mixture[i];
      if (!(d > Scalar(0))) {
        throw EvaluationError("mixture density is non-positive for event " + std::to_string(start + i));
      }
      inverse[i] = Scalar(1) / d;
      if (with_loglik) out.log_mixture += std::log(static_cast<double>(d));
    }
    partial.noalias() = block.transpose() * inverse.head(len);
    out.accum += partial.template cast<double>();
  }
  return out;
}

Sweep sweep(const FactorizedCoefficientTable& table, const Eigen::VectorXd& w, bool with_loglik) {
  // d_i = sum_n A_in w_n = sum_k P_ik (B^T w)_k and sum_i A_in / d_i = (B P^T d^-1)_n, with
  // P_ik = psi_k(y_i)^2 regenerated per block. The mixture is accumulated inside the
  // recurrence so each block of P is written once and read once.
  constexpr Eigen::Index kRows = FactorizedCoefficientTable::kBlockRows;
  const int n_max = table.n_max();
  const Eigen::VectorXd projected = table.lossless() ? w : Eigen::VectorXd(table.mixing().transpose() * w);
  const auto& excluded = table.excluded();
  const double* y_all = table.outcomes().data();
  const double* psi0_all = table.ground_amplitudes().data();
  const Eigen::Index rows = table.events();

  std::vector<double> grow(static_cast<std::size_t>(n_max));
  std::vector<double> keep(static_cast<std::size_t>(n_max));
  for (int k = 1; k < n_max; ++k) {
    grow[static_cast<std::size_t>(k)] = std::sqrt(2.0 / k);
    keep[static_cast<std::size_t>(k)] = std::sqrt((k - 1.0) / k);
  }

  Eigen::MatrixXd block(kRows, n_max);
  alignas(64) double prev[kRows];
  alignas(64) double cur[kRows];
  alignas(64) double mixture[kRows];
  Eigen::VectorXd inverse(kRows);
  Eigen::VectorXd accum_psi = Eigen::VectorXd::Zero(n_max);
  double log_mixture = 0.0;

  for (Eigen::Index start = 0; start < rows; start += kRows) {
    const Eigen::Index len = std::min(kRows, rows - start);
    const double* y = y_all + start;
    for (Eigen::Index r = 0; r < len; ++r) {
      cur[r] = psi0_all[start + r];
      prev[r] = 0.0;
      mixture[r] = 0.0;
    }
    for (int k = 0; k < n_max; ++k) {
      double* col = block.col(k).data();
      const double v = projected[k];
      if (k + 1 == n_max) {
#pragma omp simd
        for (Eigen::Index r = 0; r < len; ++r) {
          const double sq = cur[r] * cur[r];
          col[r] = sq;
          mixture[r] += v * sq;
        }
        break;
      }
      const double a = grow[static_cast<std::size_t>(k + 1)];
      const double b = keep[static_cast<std::size_t>(k + 1)];
#pragma omp simd
      for (Eigen::Index r = 0; r < len; ++r) {
        const double c = cur[r];
        const double sq = c * c;
        col[r] = sq;
        mixture[r] += v * sq;
        cur[r] = a * y[r] * c - b * prev[r];
        prev[r] = c;
      }
    }
    for (Eigen::Index i = 0; i < len; ++i) {
      if (excluded[static_cast<std::size_t>(start + i)]) {
        inverse[i] = 0.0;
        continue;
      }
      const double d = mixture[i];
      if (!(d > 0.0)) throw EvaluationError("mixture density is non-positive for event " + std::to_string(start + i));
      inverse[i] = 1.0 / d;
      if (with_loglik) log_mixture += std::log(d);
    }
    accum_psi.noalias() += block.topRows(len).transpose() * inverse.head(len);
  }
  Sweep out;
  out.accum = table.lossless() ? accum_psi : Eigen::VectorXd(table.mixing() * accum_psi);
  out.log_mixture = log_mixture;
  return out;
}

template <typename Scalar>
std::int64_t active_events(const CoefficientTable<Scalar>& t) { return t.active_events(); }
std::int64_t active_events(const FactorizedCoefficientTable& t) { return t.active_events(); }
template <typename Scalar>
int table_n_max(const CoefficientTable<Scalar>& t) { return t.n_max; }
int table_n_max(const FactorizedCoefficientTable& t) { return t.n_max(); }
template <typename Scalar>
std::int64_t excluded_events(const CoefficientTable<Scalar>& t) { return t.excluded_count; }
std::int64_t excluded_events(const FactorizedCoefficientTable& t) { return t.excluded_count(); }

void check_table(const FockWeights& w, std::int64_t n_max, std::int64_t active) {
  if (w.size() != n_max) throw ConfigError("weight vector length does not match the table's n_max");
  if (active <= 0) throw EstimationError("every event is excluded from the likelihood");
}

FockWeights update(const FockWeights& w, const Sweep& s, std::int64_t active) {
  Eigen::VectorXd next = w.values().cwiseProduct(s.accum) / static_cast<double>(active);
  // Exact arithmetic keeps the sum at one; rounding (notably with a single-precision
  // table) is projected back here.
  next /= next.sum();
  return FockWeights::from_values(std::move(next));
}

}  // namespace

FockWeights FockWeights::flat(int n_max) {
  if (n_max < 1) throw ConfigError("n_max must be at least 1");
  return FockWeights(Eigen::VectorXd::Constant(n_max, 1.0 / n_max));
}

FockWeights FockWeights::unit(int n_max, int m) {
  if (n_max < 1 || m < 0 || m >= n_max) throw ConfigError("unit weight index out of range");
  return FockWeights(Eigen::VectorXd::Unit(n_max, m));
}

FockWeights FockWeights::from_values(Eigen::VectorXd values) {
  if (values.size() < 1) throw ConfigError("weight vector is empty");
  if (!values.allFinite() || values.minCoeff() < 0.0) throw ConfigError("weights must be finite and nonnegative");
  if (std::abs(values.sum() - 1.0) > kSimplexTolerance) throw ConfigError("weights must sum to one");
  return FockWeights(std::move(values));
}

Eigen::VectorXd shift_outcomes(const Dataset& data, double q, double p) {
  const double root_eta = std::sqrt(data.eta);
  Eigen::VectorXd y(static_cast<Eigen::Index>(data.records.size()));
  for (std::size_t i = 0; i < data.records.size(); ++i) {
    const auto& r = data.records[i];
    y[static_cast<Eigen::Index>(i)] = r.x - root_eta * (q * std::cos(r.theta) + p * std::sin(r.theta));
  }
  return y;
}

namespace {

template <typename Table>
double log_likelihood_impl(const FockWeights& w, const Table& table) {
  check_table(w, table_n_max(table), active_events(table));
  const Sweep s = sweep(table, w.values(), true);
  return s.log_mixture - static_cast<double>(active_events(table)) * w.values().sum();
}

template <typename Table>
FockWeights em_step_impl(const FockWeights& w, const Table& table) {
  check_table(w, table_n_max(table), active_events(table));
  return update(w, sweep(table, w.values(), false), active_events(table));
}

template <typename Table>
Estimate estimate_weights_impl(const Table& table, const ReconstructionConfig& cfg) {
  if (cfg.max_iters < 1) throw ConfigError("max_iters must be at least 1");
  if (cfg.trace_stride < 1) throw ConfigError("trace_stride must be at least 1");
  if (cfg.n_max != table_n_max(table)) throw ConfigError("config n_max does not match the coefficient table");
  const std::int64_t active = active_events(table);
  FockWeights w = cfg.init ? *cfg.init : FockWeights::flat(cfg.n_max);
  check_table(w, cfg.n_max, active);
  const double lagrange = static_cast<double>(active);

  Estimate est{w, {}};
  est.diagnostics.excluded_events = excluded_events(table);
  double window_start = 0.0;
  int it = 0;
  for (; it < cfg.max_iters; ++it) {
    const bool trace = it % cfg.trace_stride == 0;
    const bool tol_check = cfg.loglik_tol > 0.0 && it % kToleranceWindow == 0;
    const Sweep s = sweep(table, w.values(), trace || tol_check);
    const double loglik = s.log_mixture - lagrange * w.values().sum();
    if (trace) est.diagnostics.loglik_trace.push_back(loglik);
    if (tol_check) {
      if (it > 0 && loglik - window_start < cfg.loglik_tol) break;
      window_start = loglik;
    }
    w = update(w, s, active);
  }
  est.diagnostics.iterations_run = it;
  est.diagnostics.final_loglik = log_likelihood_impl(w, table);
  est.weights = std::move(w);
  return est;
}

}  // namespace

template <typename Scalar>
double log_likelihood(const FockWeights& w, const CoefficientTable<Scalar>& table) {
  return log_likelihood_impl(w, table);
}

double log_likelihood(const FockWeights& w, const FactorizedCoefficientTable& table) {
  return log_likelihood_impl(w, table);
}

template <typename Scalar>
FockWeights em_step(const FockWeights& w, const CoefficientTable<Scalar>& table) {
  return em_step_impl(w, table);
}

FockWeights em_step(const FockWeights& w, const FactorizedCoefficientTable& table) { return em_step_impl(w, table); }

template <typename Scalar>
Estimate estimate_weights(const CoefficientTable<Scalar>& table, const ReconstructionConfig& cfg) {
  return estimate_weights_impl(table, cfg);
}

Estimate estimate_weights(const FactorizedCoefficientTable& table, const ReconstructionConfig& cfg) {
  return estimate_weights_impl(table, cfg);
}

Estimate estimate_weights(const Dataset& data, double q, double p, const ReconstructionConfig& cfg) {
  if (data.records.empty()) throw EstimationError("dataset is empty");
  const Eigen::VectorXd y = shift_outcomes(data, q, p);
  const FactorizedCoefficientTable table(y, cfg.n_max, data.eta);
  return estimate_weights(table, cfg);
}

double wigner_from_weights(const FockWeights& w) {
  double even = 0.0;
  double odd = 0.0;
  for (int n = 0; n < w.size(); ++n) (n % 2 == 0 ? even : odd) += w[n];
  // Normalizing by even + odd keeps |W| <= 1/pi exactly under rounding.
  return std::numbers::inv_pi * ((even - odd) / (even + odd));
}

std::vector<PointResult> reconstruct_grid(const Dataset& data, const GridSpec& grid, const ReconstructionConfig& cfg,
                                          int threads) {
  const auto& points = grid.points();
  std::vector<PointResult> results(points.size());
  const auto count = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(resolve_threads(threads))
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    auto& r = results[static_cast<std::size_t>(i)];
    r.point = points[static_cast<std::size_t>(i)];
    try {
      r.estimate = estimate_weights(data, r.point.q, r.point.p, cfg);
      r.wigner = wigner_from_weights(r.estimate->weights);
    } catch (const std::exception& e) {
      r.wigner = std::numeric_limits<double>::quiet_NaN();
      r.error = e.what();
    }
  }
  return results;
}

template double log_likelihood<double>(const FockWeights&, const CoefficientTable<double>&);
template double log_likelihood<float>(const FockWeights&, const CoefficientTable<float>&);
template FockWeights em_step<double>(const FockWeights&, const CoefficientTable<double>&);
template FockWeights em_step<float>(const FockWeights&, const CoefficientTable<float>&);
template Estimate estimate_weights<double>(const CoefficientTable<double>&, const ReconstructionConfig&);
template Estimate estimate_weights<float>(const CoefficientTable<float>&, const ReconstructionConfig&);

}  // namespace homodyne
