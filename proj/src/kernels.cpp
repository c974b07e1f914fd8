#include "homodyne/kernels.hpp"

#include <cmath>

#include "homodyne/log.hpp"

namespace homodyne {

template <typename Scalar>
CoefficientTable<Scalar> coefficient_table(std::span<const Scalar> outcomes, int n_max, Scalar eta, int cap) {
  detail::check_efficiency(eta);
  if (n_max < 1) throw ConfigError("n_max must be at least 1");
  detail::check_fock_index(n_max - 1, cap);
  if (outcomes.empty()) throw DomainError("coefficient table needs at least one outcome");
  for (Scalar y : outcomes) {
    if (!std::isfinite(y)) throw DomainError("coefficient table outcomes must be finite");
  }

  CoefficientTable<Scalar> table;
  table.n_max = n_max;
  table.eta = eta;
  const auto rows = static_cast<Eigen::Index>(outcomes.size());
  table.values.resize(rows, n_max);
  table.excluded.assign(outcomes.size(), 0);

  const bool lossless = eta == Scalar(1);
  const RowMajorMatrix<Scalar> mixing = lossless ? RowMajorMatrix<Scalar>() : loss_mixing_matrix<Scalar>(n_max, eta);

#pragma omp parallel
  {
    std::vector<Scalar> psi(static_cast<std::size_t>(n_max));
#pragma omp for schedule(static)
    for (Eigen::Index i = 0; i < rows; ++i) {
      fock_wavefunctions<Scalar>(outcomes[static_cast<std::size_t>(i)], psi);
      for (auto& v : psi) v = v * v;
      Scalar* row = table.values.row(i).data();
      if (lossless) {
        for (int n = 0; n < n_max; ++n) row[n] = psi[static_cast<std::size_t>(n)];
      } else {
        for (int n = 0; n < n_max; ++n) row[n] = detail::mix(mixing.row(n).data(), psi.data(), n + 1);
      }
    }
  }

  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!(table.values.row(i).sum() > Scalar(0))) {
      table.excluded[static_cast<std::size_t>(i)] = 1;
      ++table.excluded_count;
    }
  }
  if (table.excluded_count > 0) {
    warn(std::to_string(table.excluded_count) +
         " event(s) have an underflowing mixture kernel and are excluded from the likelihood");
  }
  return table;
}

FactorizedCoefficientTable::FactorizedCoefficientTable(std::span<const double> outcomes, int n_max, double eta,
                                                       int cap)
    : n_max_(n_max), eta_(eta) {
  detail::check_efficiency(eta);
  if (n_max < 1) throw ConfigError("n_max must be at least 1");
  detail::check_fock_index(n_max - 1, cap);
  if (outcomes.empty()) throw DomainError("coefficient table needs at least one outcome");
  y_.resize(static_cast<Eigen::Index>(outcomes.size()));
  psi0_.resize(y_.size());
  double psi0_only = 0.0;
  for (Eigen::Index i = 0; i < y_.size(); ++i) {
    const double y = outcomes[static_cast<std::size_t>(i)];
    if (!std::isfinite(y)) throw DomainError("coefficient table outcomes must be finite");
    y_[i] = y;
    fock_wavefunctions<double>(y, std::span<double>(&psi0_only, 1));
    psi0_[i] = psi0_only;
  }
  if (!lossless()) mixing_ = loss_mixing_matrix<double>(n_max, eta);

  // A row is excluded when sum_n A_n(y_i) = sum_k colsum(B)_k psi_k^2 vanishes.
  const Eigen::VectorXd column_weight =
      lossless() ? Eigen::VectorXd::Ones(n_max) : Eigen::VectorXd(mixing_.colwise().sum().transpose());
  excluded_.assign(outcomes.size(), 0);
  for_each_block([&](Eigen::Index start, Eigen::Index len, const Eigen::ArrayXXd& block) {
    const Eigen::VectorXd totals = block.topRows(len).matrix() * column_weight;
    for (Eigen::Index r = 0; r < len; ++r) {
      if (!(totals[r] > 0.0)) {
        excluded_[static_cast<std::size_t>(start + r)] = 1;
        ++excluded_count_;
      }
    }
  });
  if (excluded_count_ > 0) {
    warn(std::to_string(excluded_count_) +
         " event(s) have an underflowing mixture kernel and are excluded from the likelihood");
  }
}

CoefficientTable<double> FactorizedCoefficientTable::materialize() const {
  CoefficientTable<double> table;
  table.n_max = n_max_;
  table.eta = eta_;
  table.values.resize(y_.size(), n_max_);
  table.excluded = excluded_;
  table.excluded_count = excluded_count_;
  for_each_block([&](Eigen::Index start, Eigen::Index len, const Eigen::ArrayXXd& block) {
    if (lossless()) {
      table.values.middleRows(start, len) = block.topRows(len).matrix();
    } else {
      table.values.middleRows(start, len).noalias() = block.topRows(len).matrix() * mixing_.transpose();
    }
  });
  return table;
}

template CoefficientTable<double> coefficient_table<double>(std::span<const double>, int, double, int);
template CoefficientTable<float> coefficient_table<float>(std::span<const float>, int, float, int);

}  // namespace homodyne
