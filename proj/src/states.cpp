#include "homodyne/states.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "homodyne/error.hpp"
#include "homodyne/format.hpp"
#include "homodyne/kernels.hpp"

namespace homodyne {
namespace {

using std::numbers::pi;
using cd = std::complex<double>;

double parse_double(std::string_view token, std::string_view context) {
  const auto value = parse_real(token);
  if (!value || !std::isfinite(*value)) {
    throw ConfigError("bad number '" + std::string(token) + "' in state '" + std::string(context) + "'");
  }
  return *value;
}

double cat_norm_squared(const StateSpec& spec) {
  const double a2 = std::norm(spec.alpha());
  const double overlap = std::exp(-2.0 * a2);
  return spec.parity() == CatParity::odd ? 1.0 / (2.0 - 2.0 * overlap) : 1.0 / (2.0 + 2.0 * overlap);
}

double laguerre(int n, double x) {
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = 1.0 - x;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

// Gaussian phase-space blob of a coherent state centered at (q0, p0), smoothed to
// ordering s through t = 1 - s.
double coherent_blob(double q, double p, double q0, double p0, double t) {
  const double dq = q - q0;
  const double dp = p - p0;
  return std::exp(-(dq * dq + dp * dp) / t) / (pi * t);
}

// Interference term of |alpha><-alpha| + h.c. centered at the origin, smoothed likewise.
double cat_interference(double q, double p, double q0, double p0, double t) {
  const double kq = -2.0 * p0;
  const double kp = 2.0 * q0;
  const double k2 = kq * kq + kp * kp;
  return std::exp(-(q * q + p * p) / t - k2 * (t - 1.0) / (4.0 * t)) * std::cos((kq * q + kp * p) / t) /
         (pi * t);
}

double gaussian_family_squasi(const StateSpec& spec, double q, double p, double t) {
  const double q0 = std::numbers::sqrt2 * spec.alpha().real();
  const double p0 = std::numbers::sqrt2 * spec.alpha().imag();
  switch (spec.kind()) {
    case StateKind::vacuum:
      return coherent_blob(q, p, 0.0, 0.0, t);
    case StateKind::coherent:
      return coherent_blob(q, p, q0, p0, t);
    case StateKind::cat: {
      const double sign = spec.parity() == CatParity::odd ? -1.0 : 1.0;
      return cat_norm_squared(spec) * (coherent_blob(q, p, q0, p0, t) + coherent_blob(q, p, -q0, -p0, t) +
                                       sign * 2.0 * cat_interference(q, p, q0, p0, t));
    }
    case StateKind::fock:
      break;
  }
  throw ConfigError("no Gaussian closed form for this state");
}

int displaced_support(const FockExpansion& psi, double q, double p) {
  const double beta = std::sqrt(0.5 * (q * q + p * p));
  return psi.n_max + static_cast<int>(std::ceil(beta * beta + 12.0 * beta + 40.0));
}

}  // namespace

StateSpec StateSpec::vacuum() { return {}; }

StateSpec StateSpec::fock(int n) {
  if (n < 0) throw ConfigError("Fock state index must be nonnegative");
  StateSpec s;
  s.kind_ = StateKind::fock;
  s.fock_n_ = n;
  return s;
}

StateSpec StateSpec::coherent(double re, double im) {
  if (!std::isfinite(re) || !std::isfinite(im)) throw ConfigError("coherent amplitude must be finite");
  StateSpec s;
  s.kind_ = StateKind::coherent;
  s.alpha_ = {re, im};
  return s;
}

StateSpec StateSpec::cat(double re, double im, CatParity parity) {
  if (!std::isfinite(re) || !std::isfinite(im)) throw ConfigError("cat amplitude must be finite");
  if (re == 0.0 && im == 0.0) throw ConfigError("cat state requires |alpha| > 0");
  StateSpec s;
  s.kind_ = StateKind::cat;
  s.alpha_ = {re, im};
  s.parity_ = parity;
  return s;
}

StateSpec StateSpec::parse(std::string_view text) {
  if (text == "vacuum") return vacuum();
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw ConfigError("unknown state '" + std::string(text) + "'");
  const auto head = text.substr(0, colon);
  const auto args = split_view(text.substr(colon + 1), ',');
  if (head == "fock" && args.size() == 1) {
    const auto n = parse_integer<int>(args[0]);
    if (!n || *n < 0) throw ConfigError("bad Fock index in state '" + std::string(text) + "'");
    return fock(*n);
  }
  if (head == "coherent" && args.size() == 2) {
    return coherent(parse_double(args[0], text), parse_double(args[1], text));
  }
  if (head == "cat" && args.size() == 3) {
    CatParity parity;
    if (args[2] == "odd") {
      parity = CatParity::odd;
    } else if (args[2] == "even") {
      parity = CatParity::even;
    } else {
      throw ConfigError("cat parity must be odd or even in '" + std::string(text) + "'");
    }
    return cat(parse_double(args[0], text), parse_double(args[1], text), parity);
  }
  throw ConfigError("malformed state '" + std::string(text) + "'");
}

std::string StateSpec::to_string() const {
  switch (kind_) {
    case StateKind::vacuum:
      return "vacuum";
    case StateKind::fock:
      return "fock:" + std::to_string(fock_n_);
    case StateKind::coherent:
      return "coherent:" + format_real(alpha_.real()) + "," + format_real(alpha_.imag());
    case StateKind::cat:
      return "cat:" + format_real(alpha_.real()) + "," + format_real(alpha_.imag()) + "," +
             (parity_ == CatParity::odd ? "odd" : "even");
  }
  return {};
}

FockExpansion fock_coefficients(const StateSpec& spec, int n_max) {
  if (n_max < 1) throw ConfigError("n_max must be at least 1");
  FockExpansion out;
  out.n_max = n_max;
  out.coeffs = Eigen::VectorXcd::Zero(n_max);
  switch (spec.kind()) {
    case StateKind::vacuum:
      out.coeffs[0] = 1.0;
      break;
    case StateKind::fock:
      if (spec.fock_number() >= n_max) {
        throw TruncationError("fock:" + std::to_string(spec.fock_number()) + " does not fit in n_max=" +
                              std::to_string(n_max));
      }
      out.coeffs[spec.fock_number()] = 1.0;
      break;
    case StateKind::coherent:
    case StateKind::cat: {
      const cd alpha = spec.alpha();
      const double envelope = std::exp(-0.5 * std::norm(alpha));
      const bool is_cat = spec.kind() == StateKind::cat;
      const double norm = is_cat ? 2.0 * std::sqrt(cat_norm_squared(spec)) : 1.0;
      const int keep = is_cat ? (spec.parity() == CatParity::odd ? 1 : 0) : -1;
      cd power = 1.0;  // alpha^n / sqrt(n!)
      for (int n = 0; n < n_max; ++n) {
        if (n > 0) power *= alpha / std::sqrt(static_cast<double>(n));
        if (keep < 0 || n % 2 == keep) out.coeffs[n] = norm * envelope * power;
      }
      break;
    }
  }
  out.truncation_tail = std::max(0.0, 1.0 - out.coeffs.squaredNorm());
  return out;
}

int oracle_truncation(const StateSpec& spec) {
  switch (spec.kind()) {
    case StateKind::vacuum:
      return 1;
    case StateKind::fock:
      return spec.fock_number() + 1;
    case StateKind::coherent:
    case StateKind::cat: {
      const double a = std::abs(spec.alpha());
      const int n = static_cast<int>(std::ceil(a * a + 12.0 * a + 30.0));
      if (n > kFockIndexCap + 1) throw ConfigError("state amplitude too large for the Fock index cap");
      return n;
    }
  }
  return 1;
}

QuadratureDistribution::QuadratureDistribution(const StateSpec& spec, double theta) {
  const FockExpansion psi = fock_coefficients(spec, oracle_truncation(spec));
  rotated_.resize(psi.n_max);
  for (int n = 0; n < psi.n_max; ++n) rotated_[n] = psi.coeffs[n] * std::polar(1.0, -n * theta);
  const int top = spec.kind() == StateKind::fock ? spec.fock_number() : 0;
  const double reach = std::max(std::numbers::sqrt2 * std::abs(spec.alpha()), std::sqrt(2.0 * top + 1.0));
  x_max_ = reach + 6.0;
  min_wavelength_ = pi / std::sqrt(2.0 * psi.n_max + 1.0);
}

double QuadratureDistribution::ideal(double x) const {
  const double psi0 = std::exp(-0.5 * x * x) / std::sqrt(std::sqrt(pi));
  cd amp = rotated_[0] * psi0;
  double prev = 0.0;
  double cur = psi0;
  for (Eigen::Index k = 1; k < rotated_.size(); ++k) {
    const double kk = static_cast<double>(k);
    const double next = std::sqrt(2.0 / kk) * x * cur - std::sqrt((kk - 1.0) / kk) * prev;
    prev = cur;
    cur = next;
    amp += rotated_[k] * cur;
  }
  return std::norm(amp);
}

double QuadratureDistribution::lossy(double x, double eta) const {
  detail::check_efficiency(eta);
  if (eta == 1.0) return ideal(x);
  // Substituting x' = x/sqrt(eta) + v, the smearing kernel becomes a Gaussian in v with
  // variance (1-eta)/(2 eta) and total weight 1/sqrt(eta).
  const double sigma = std::sqrt((1.0 - eta) / (2.0 * eta));
  const double center = x / std::sqrt(eta);
  const double half = 12.0 * sigma;
  const double step_target = std::min(sigma, min_wavelength_) / 16.0;
  int intervals = static_cast<int>(std::ceil(2.0 * half / step_target));
  intervals += intervals % 2;
  const double h = 2.0 * half / intervals;
  const double norm = 1.0 / std::sqrt(pi * (1.0 - eta));
  double acc = 0.0;
  for (int j = 0; j <= intervals; ++j) {
    const double v = -half + j * h;
    const double weight = (j == 0 || j == intervals) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    acc += weight * ideal(center + v) * std::exp(-v * v / (2.0 * sigma * sigma));
  }
  return norm * acc * h / 3.0;
}

double quadrature_pdf(const StateSpec& spec, double theta, double x, double eta) {
  detail::check_efficiency(eta);
  return QuadratureDistribution(spec, theta).lossy(x, eta);
}

double wigner_true(const StateSpec& spec, double q, double p) {
  if (spec.kind() == StateKind::fock) {
    const double r2 = q * q + p * p;
    const int n = spec.fock_number();
    return (n % 2 == 0 ? 1.0 : -1.0) * std::exp(-r2) * laguerre(n, 2.0 * r2) / pi;
  }
  return gaussian_family_squasi(spec, q, p, 1.0);
}

Eigen::VectorXd displaced_fock_populations(const StateSpec& spec, double q, double p, int count) {
  if (count < 1) throw ConfigError("population count must be at least 1");
  const FockExpansion psi = fock_coefficients(spec, oracle_truncation(spec));
  // D(gamma)|n> for gamma = -(q + ip)/sqrt2, generated column by column from the coherent
  // state |gamma> through sqrt(n+1) D|n+1> = (a^dagger - conj(gamma)) D|n>. Entry k only
  // depends on entries <= k, so truncating at `count` is exact.
  const cd gamma = -cd(q, p) / std::numbers::sqrt2;
  Eigen::VectorXcd column(count);
  column[0] = std::exp(-0.5 * std::norm(gamma));
  for (int k = 1; k < count; ++k) column[k] = column[k - 1] * gamma / std::sqrt(static_cast<double>(k));

  Eigen::VectorXcd displaced = psi.coeffs[0] * column;
  Eigen::VectorXcd next(count);
  for (int n = 0; n + 1 < psi.n_max; ++n) {
    const double scale = 1.0 / std::sqrt(n + 1.0);
    next[0] = -std::conj(gamma) * column[0] * scale;
    for (int k = 1; k < count; ++k) {
      next[k] = (std::sqrt(static_cast<double>(k)) * column[k - 1] - std::conj(gamma) * column[k]) * scale;
    }
    column.swap(next);
    if (psi.coeffs[n + 1] != cd(0.0)) displaced += psi.coeffs[n + 1] * column;
  }
  return displaced.cwiseAbs2();
}

double wigner_displaced_fock(const StateSpec& spec, double q, double p) {
  return squasi_displaced_fock(spec, q, p, 0.0);
}

double squasi_displaced_fock(const StateSpec& spec, double q, double p, double s) {
  if (s > 0.0) throw DomainError("s-ordered functions with s > 0 are not supported");
  const FockExpansion psi = fock_coefficients(spec, oracle_truncation(spec));
  const Eigen::VectorXd rho = displaced_fock_populations(spec, q, p, displaced_support(psi, q, p));
  const double ratio = (s + 1.0) / (s - 1.0);
  double acc = 0.0;
  double factor = 1.0;
  for (Eigen::Index k = 0; k < rho.size(); ++k) {
    acc += factor * rho[k];
    factor *= ratio;
  }
  return acc / (pi * (1.0 - s));
}

double squasi_true(const StateSpec& spec, double q, double p, double s) {
  if (!(s <= 0.0)) throw DomainError("s-ordered functions with s > 0 are not supported");
  if (s == 0.0) return wigner_true(spec, q, p);
  if (spec.kind() == StateKind::fock) return squasi_displaced_fock(spec, q, p, s);
  return gaussian_family_squasi(spec, q, p, 1.0 - s);
}

double fbp_expected_limit(const StateSpec& spec, double q, double p, double eta) {
  detail::check_efficiency(eta);
  if (eta == 1.0) return wigner_true(spec, q, p);
  const double scale = 1.0 / std::sqrt(eta);
  return squasi_true(spec, scale * q, scale * p, -(1.0 - eta) / eta) / eta;
}

}  // namespace homodyne
