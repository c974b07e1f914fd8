#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace homodyne {

struct PhasePoint {
  double q = 0.0;
  double p = 0.0;
};

enum class Axis { q, p };

/// Evaluation points: a line slice along one axis at a fixed value of the other, or a
/// rectangular lattice (q-major order).
class GridSpec {
 public:
  /// `count` evenly spaced points from `from` to `to` inclusive along `axis`.
  static GridSpec slice(Axis axis, double from, double to, int count, double fixed);
  static GridSpec lattice(double q_from, double q_to, int q_count, double p_from, double p_to, int p_count);

  /// `q:A:B:STEPS@p=C` or `p:A:B:STEPS@q=C`.
  static GridSpec parse_slice(std::string_view text);
  /// `qA:qB:qN,pA:pB:pN`; the leading axis letters are optional.
  static GridSpec parse_lattice(std::string_view text);

  [[nodiscard]] const std::vector<PhasePoint>& points() const { return points_; }
  [[nodiscard]] std::size_t size() const { return points_.size(); }
  /// Canonical text form, echoed into output headers.
  [[nodiscard]] const std::string& description() const { return description_; }

 private:
  std::vector<PhasePoint> points_;
  std::string description_;
};

/// `count` points from `from` to `to` inclusive; a single point sits at `from`.
std::vector<double> linspace(double from, double to, int count);

}  // namespace homodyne
