#pragma once

#include <complex>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace homodyne {

enum class StateKind { vacuum, fock, coherent, cat };
enum class CatParity { odd, even };

/// Analytic test state. Amplitudes are dimensionless; a coherent state |alpha> is
/// centered at (sqrt2 Re alpha, sqrt2 Im alpha) in (q, p).
class StateSpec {
 public:
  static StateSpec vacuum();
  static StateSpec fock(int n);
  static StateSpec coherent(double re, double im);
  /// (|alpha> -+ |-alpha>) normalized; odd uses the minus sign.
  static StateSpec cat(double re, double im, CatParity parity = CatParity::odd);

  /// Parses `vacuum`, `fock:n`, `coherent:re,im` or `cat:re,im,odd|even`.
  static StateSpec parse(std::string_view text);

  [[nodiscard]] StateKind kind() const { return kind_; }
  [[nodiscard]] int fock_number() const { return fock_n_; }
  [[nodiscard]] std::complex<double> alpha() const { return alpha_; }
  [[nodiscard]] CatParity parity() const { return parity_; }

  /// Inverse of parse(); amplitudes are printed with round-trip precision.
  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const StateSpec&, const StateSpec&) = default;

 private:
  StateKind kind_ = StateKind::vacuum;
  int fock_n_ = 0;
  std::complex<double> alpha_{0.0, 0.0};
  CatParity parity_ = CatParity::odd;
};

/// Truncated Fock-basis amplitudes c_0..c_{n_max-1}.
struct FockExpansion {
  Eigen::VectorXcd coeffs;
  int n_max = 0;
  double truncation_tail = 0.0;  // 1 - sum |c_n|^2, clamped at 0
};

inline constexpr double kTruncationTailThreshold = 1e-10;

FockExpansion fock_coefficients(const StateSpec& spec, int n_max);

/// A truncation comfortably holding the state (tail below double precision), used by
/// all analytic oracles.
int oracle_truncation(const StateSpec& spec);

/// Quadrature statistics of a state at a fixed local-oscillator phase.
/// The ideal amplitude is sum_n c_n e^{-i n theta} psi_n(x).
class QuadratureDistribution {
 public:
  QuadratureDistribution(const StateSpec& spec, double theta);

  /// Perfect-detection density |<x_theta|psi>|^2.
  [[nodiscard]] double ideal(double x) const;

  /// Density seen through a detector of efficiency eta: the ideal density smeared by a
  /// Gaussian in x with mean sqrt(eta) x' and variance (1-eta)/2.
  [[nodiscard]] double lossy(double x, double eta) const;

  /// Classical support half-width used for tabulation: largest of sqrt2 |alpha| and the
  /// outermost Fock turning point, plus 6.
  [[nodiscard]] double support_half_width() const { return x_max_; }

 private:
  Eigen::VectorXcd rotated_;
  double x_max_ = 0.0;
  double min_wavelength_ = 0.0;
};

double quadrature_pdf(const StateSpec& spec, double theta, double x, double eta);

/// Exact Wigner function normalized to unit integral.
double wigner_true(const StateSpec& spec, double q, double p);

/// Populations <rho_k(q,p)> = |<k| D^dagger(q,p) |psi>|^2 of displaced Fock states,
/// k = 0..count-1.
Eigen::VectorXd displaced_fock_populations(const StateSpec& spec, double q, double p, int count);

/// Wigner function through the displaced-parity sum (1/pi) sum_k (-1)^k <rho_k(q,p)>.
double wigner_displaced_fock(const StateSpec& spec, double q, double p);

/// s-ordered quasidistribution for s <= 0: the Wigner function convolved with an
/// isotropic Gaussian of per-axis variance -s/2. s > 0 throws DomainError.
double squasi_true(const StateSpec& spec, double q, double p, double s);

/// s-ordered function via the displaced-Fock series
///   1/(pi(1-s)) sum_k ((s+1)/(s-1))^k <rho_k(q,p)>.
double squasi_displaced_fock(const StateSpec& spec, double q, double p, double s);

/// Infinite-data limit of linear back-projection applied to statistics recorded with
/// efficiency eta: eta^-1 W(eta^-1/2 q, eta^-1/2 p; -(1-eta)/eta).
double fbp_expected_limit(const StateSpec& spec, double q, double p, double eta);

}  // namespace homodyne
