#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "homodyne/error.hpp"

namespace homodyne {

/// Largest Fock index accepted by the kernels unless a caller passes its own cap.
inline constexpr int kFockIndexCap = 256;

/// Above this Fock index the binomial loss weights are accumulated in log space.
inline constexpr int kLogSpaceMixingThreshold = 30;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using RowMajorMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

namespace detail {

inline void check_fock_index(int k, int cap) {
  if (k < 0) throw ConfigError("Fock index must be nonnegative, got " + std::to_string(k));
  if (k > cap) {
    throw ConfigError("Fock index " + std::to_string(k) + " exceeds the configured cap " +
                      std::to_string(cap));
  }
}

template <typename Scalar>
void check_efficiency(Scalar eta) {
  if (!(eta > Scalar(0) && eta <= Scalar(1))) {
    throw DomainError("detector efficiency must lie in (0, 1], got " +
                      std::to_string(static_cast<double>(eta)));
  }
}

// Sum_k weights[k] * psi2[k], ascending k. Shared by the scalar and table paths so
// both produce bit-identical values.
template <typename Scalar>
Scalar mix(const Scalar* weights, const Scalar* psi2, int count) {
  Scalar acc(0);
  for (int k = 0; k < count; ++k) acc += weights[k] * psi2[k];
  return acc;
}

}  // namespace detail

/// Writes psi_0(y) .. psi_{out.size()-1}(y), the normalized oscillator eigenfunctions
/// with vacuum variance 1/2, using the three-term recurrence
///   psi_k = sqrt(2/k) y psi_{k-1} - sqrt((k-1)/k) psi_{k-2}.
template <typename Scalar>
void fock_wavefunctions(Scalar y, std::span<Scalar> out) {
  if (out.empty()) return;
  using std::exp;
  using std::sqrt;
  const Scalar psi0 = Scalar(1) / sqrt(sqrt(std::numbers::pi_v<Scalar>)) * exp(-y * y / Scalar(2));
  out[0] = psi0;
  if (out.size() == 1) return;
  out[1] = sqrt(Scalar(2)) * y * psi0;
  for (std::size_t k = 2; k < out.size(); ++k) {
    const Scalar kk = static_cast<Scalar>(k);
    out[k] = sqrt(Scalar(2) / kk) * y * out[k - 1] - sqrt((kk - Scalar(1)) / kk) * out[k - 2];
  }
}

/// psi_k(y). Throws ConfigError when k exceeds `cap`.
template <typename Scalar>
Scalar fock_wavefunction(int k, Scalar y, int cap = kFockIndexCap) {
  detail::check_fock_index(k, cap);
  std::vector<Scalar> psi(static_cast<std::size_t>(k) + 1);
  fock_wavefunctions<Scalar>(y, psi);
  return psi.back();
}

/// Binomial loss weights C(n,k) (1-eta)^(n-k) eta^k for k = 0..n.
/// At eta = 1 the row is the unit vector e_n (no 0^0 is evaluated).
template <typename Scalar>
Vector<Scalar> loss_mixing_row(int n, Scalar eta) {
  detail::check_efficiency(eta);
  Vector<Scalar> row = Vector<Scalar>::Zero(n + 1);
  if (eta == Scalar(1)) {
    row[n] = Scalar(1);
    return row;
  }
  using std::exp;
  using std::log;
  using std::pow;
  if (n > kLogSpaceMixingThreshold) {
    const Scalar log_loss = std::log1p(-eta);
    const Scalar log_eta = log(eta);
    const Scalar log_nfact = std::lgamma(Scalar(n + 1));
    for (int k = 0; k <= n; ++k) {
      row[k] = exp(log_nfact - std::lgamma(Scalar(k + 1)) - std::lgamma(Scalar(n - k + 1)) +
                   Scalar(n - k) * log_loss + Scalar(k) * log_eta);
    }
    return row;
  }
  Scalar binom(1);
  for (int k = 0; k <= n; ++k) {
    row[k] = binom * pow(Scalar(1) - eta, n - k) * pow(eta, k);
    binom = binom * Scalar(n - k) / Scalar(k + 1);
  }
  return row;
}

/// Lower-triangular matrix whose row n is loss_mixing_row(n, eta).
template <typename Scalar>
RowMajorMatrix<Scalar> loss_mixing_matrix(int n_max, Scalar eta) {
  RowMajorMatrix<Scalar> mixing = RowMajorMatrix<Scalar>::Zero(n_max, n_max);
  for (int n = 0; n < n_max; ++n) mixing.row(n).head(n + 1) = loss_mixing_row<Scalar>(n, eta).transpose();
  return mixing;
}

/// Loss-convolved mixture kernel
///   A_n(y) = sum_k C(n,k) (1-eta)^(n-k) eta^k psi_k(y)^2,
/// the density of phase-averaged outcomes y produced by Fock state n seen through a
/// detector of efficiency eta. At eta = 1 it is exactly psi_n(y)^2.
template <typename Scalar>
Scalar coefficient_A(int n, Scalar y, Scalar eta, int cap = kFockIndexCap) {
  detail::check_efficiency(eta);
  detail::check_fock_index(n, cap);
  std::vector<Scalar> psi(static_cast<std::size_t>(n) + 1);
  fock_wavefunctions<Scalar>(y, psi);
  if (eta == Scalar(1)) return psi.back() * psi.back();
  for (auto& v : psi) v = v * v;
  const Vector<Scalar> weights = loss_mixing_row<Scalar>(n, eta);
  return detail::mix(weights.data(), psi.data(), n + 1);
}

/// Matrix of A_n(y_i) for one phase-space point: rows are events, columns Fock indices
/// 0..n_max-1. Rows whose total sum_n A_n(y_i) underflows to zero can never carry
/// likelihood and are flagged as excluded.
template <typename Scalar>
struct CoefficientTable {
  int n_max = 0;
  Scalar eta = Scalar(1);
  RowMajorMatrix<Scalar> values;
  std::vector<std::uint8_t> excluded;
  std::int64_t excluded_count = 0;

  [[nodiscard]] std::int64_t events() const { return values.rows(); }
  [[nodiscard]] std::int64_t active_events() const { return events() - excluded_count; }
};

template <typename Scalar>
CoefficientTable<Scalar> coefficient_table(std::span<const Scalar> outcomes, int n_max, Scalar eta,
                                           int cap = kFockIndexCap);

extern template CoefficientTable<double> coefficient_table<double>(std::span<const double>, int, double,
                                                                   int);
extern template CoefficientTable<float> coefficient_table<float>(std::span<const float>, int, float, int);

/// The same coefficients held in factorized form A = P B^T, where P(i,k) = psi_k(y_i)^2
/// and B is loss_mixing_matrix(n_max, eta). Only y_i and psi_0(y_i) are stored; P is
/// regenerated by the wavefunction recurrence one cache-sized block of rows at a time,
/// which reads ~n_max/2 times less memory per pass than the dense table.
class FactorizedCoefficientTable {
 public:
  static constexpr Eigen::Index kBlockRows = 256;

  FactorizedCoefficientTable(std::span<const double> outcomes, int n_max, double eta, int cap = kFockIndexCap);
  FactorizedCoefficientTable(const Eigen::VectorXd& outcomes, int n_max, double eta, int cap = kFockIndexCap)
      : FactorizedCoefficientTable(std::span<const double>(outcomes.data(), outcomes.size()), n_max, eta, cap) {}

  [[nodiscard]] int n_max() const { return n_max_; }
  [[nodiscard]] double eta() const { return eta_; }
  [[nodiscard]] bool lossless() const { return eta_ == 1.0; }
  [[nodiscard]] std::int64_t events() const { return y_.size(); }
  [[nodiscard]] std::int64_t excluded_count() const { return excluded_count_; }
  [[nodiscard]] std::int64_t active_events() const { return events() - excluded_count_; }
  [[nodiscard]] const std::vector<std::uint8_t>& excluded() const { return excluded_; }
  /// Empty when lossless (B is the identity).
  [[nodiscard]] const RowMajorMatrix<double>& mixing() const { return mixing_; }

  /// Calls visit(start, len, P) for consecutive row blocks, P being a column-major
  /// block whose first `len` rows hold psi_k(y_{start+r})^2.
  template <typename Visitor>
  void for_each_block(Visitor&& visit) const {
    const Eigen::Index rows = y_.size();
    Eigen::ArrayXXd block(kBlockRows, n_max_);
    Eigen::ArrayXd prev(kBlockRows);
    Eigen::ArrayXd cur(kBlockRows);
    Eigen::ArrayXd next(kBlockRows);
    for (Eigen::Index start = 0; start < rows; start += kBlockRows) {
      const Eigen::Index len = std::min(kBlockRows, rows - start);
      const auto y = y_.segment(start, len);
      cur.head(len) = psi0_.segment(start, len);
      prev.head(len).setZero();
      for (int k = 0; k < n_max_; ++k) {
        block.col(k).head(len) = cur.head(len).square();
        if (k + 1 == n_max_) break;
        const double kk = k + 1.0;
        next.head(len) = std::sqrt(2.0 / kk) * y * cur.head(len) - std::sqrt((kk - 1.0) / kk) * prev.head(len);
        prev.swap(cur);
        cur.swap(next);
      }
      visit(start, len, block);
    }
  }

  [[nodiscard]] const Eigen::ArrayXd& outcomes() const { return y_; }
  /// psi_0(y_i), the seed of the recurrence.
  [[nodiscard]] const Eigen::ArrayXd& ground_amplitudes() const { return psi0_; }

  /// Dense equivalent, for cross-checks.
  [[nodiscard]] CoefficientTable<double> materialize() const;

 private:
  int n_max_ = 0;
  double eta_ = 1.0;
  Eigen::ArrayXd y_;
  Eigen::ArrayXd psi0_;
  RowMajorMatrix<double> mixing_;
  std::vector<std::uint8_t> excluded_;
  std::int64_t excluded_count_ = 0;
};

inline CoefficientTable<double> coefficient_table(const Eigen::VectorXd& outcomes, int n_max, double eta,
                                                  int cap = kFockIndexCap) {
  return coefficient_table<double>(std::span<const double>(outcomes.data(), outcomes.size()), n_max,
                                   eta, cap);
}

}  // namespace homodyne
