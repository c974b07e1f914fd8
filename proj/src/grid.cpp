#include "homodyne/grid.hpp"

#include <cmath>

#include "homodyne/error.hpp"
#include "homodyne/format.hpp"

namespace homodyne {
namespace {

struct Range {
  double from;
  double to;
  int count;
};

double number(std::string_view token, std::string_view text) {
  const auto v = parse_real(token);
  if (!v || !std::isfinite(*v)) throw ConfigError("bad number '" + std::string(token) + "' in '" + std::string(text) + "'");
  return *v;
}

Range range(std::string_view a, std::string_view b, std::string_view n, std::string_view text) {
  const auto count = parse_integer<int>(n);
  if (!count || *count < 1) throw ConfigError("point count must be a positive integer in '" + std::string(text) + "'");
  return {number(a, text), number(b, text), *count};
}

std::string describe(const Range& r) {
  return format_real(r.from) + ":" + format_real(r.to) + ":" + std::to_string(r.count);
}

}  // namespace

std::vector<double> linspace(double from, double to, int count) {
  if (count < 1) throw ConfigError("point count must be at least 1");
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = count == 1 ? from : from + (to - from) * i / (count - 1);
  return out;
}

GridSpec GridSpec::slice(Axis axis, double from, double to, int count, double fixed) {
  GridSpec g;
  for (double v : linspace(from, to, count)) {
    g.points_.push_back(axis == Axis::q ? PhasePoint{v, fixed} : PhasePoint{fixed, v});
  }
  const Range r{from, to, count};
  g.description_ = axis == Axis::q ? "q:" + describe(r) + "@p=" + format_real(fixed)
                                   : "p:" + describe(r) + "@q=" + format_real(fixed);
  return g;
}

GridSpec GridSpec::lattice(double q_from, double q_to, int q_count, double p_from, double p_to, int p_count) {
  GridSpec g;
  const auto ps = linspace(p_from, p_to, p_count);
  for (double q : linspace(q_from, q_to, q_count)) {
    for (double p : ps) g.points_.push_back({q, p});
  }
  g.description_ = describe({q_from, q_to, q_count}) + "," + describe({p_from, p_to, p_count});
  return g;
}

GridSpec GridSpec::parse_slice(std::string_view text) {
  const auto at = text.find('@');
  if (at == std::string_view::npos) throw ConfigError("slice must look like q:A:B:STEPS@p=C, got '" + std::string(text) + "'");
  const auto head = split_view(text.substr(0, at), ':');
  const auto tail = text.substr(at + 1);
  if (head.size() != 4 || (head[0] != "q" && head[0] != "p")) {
    throw ConfigError("slice must look like q:A:B:STEPS@p=C, got '" + std::string(text) + "'");
  }
  const Axis axis = head[0] == "q" ? Axis::q : Axis::p;
  const std::string_view expect = axis == Axis::q ? "p=" : "q=";
  if (!tail.starts_with(expect)) throw ConfigError("slice fixed coordinate must be '" + std::string(expect) + "C'");
  const Range r = range(head[1], head[2], head[3], text);
  return slice(axis, r.from, r.to, r.count, number(tail.substr(2), text));
}

GridSpec GridSpec::parse_lattice(std::string_view text) {
  const auto axes = split_view(text, ',');
  if (axes.size() != 2) throw ConfigError("grid must look like qA:qB:qN,pA:pB:pN, got '" + std::string(text) + "'");
  auto strip_axis = [](std::string_view part, char axis) {
    return !part.empty() && part.front() == axis ? part.substr(1) : part;
  };
  const auto qs = split_view(strip_axis(axes[0], 'q'), ':');
  const auto ps = split_view(strip_axis(axes[1], 'p'), ':');
  if (qs.size() != 3 || ps.size() != 3) {
    throw ConfigError("grid must look like qA:qB:qN,pA:pB:pN, got '" + std::string(text) + "'");
  }
  const Range rq = range(qs[0], qs[1], qs[2], text);
  const Range rp = range(ps[0], ps[1], ps[2], text);
  return lattice(rq.from, rq.to, rq.count, rp.from, rp.to, rp.count);
}

}  // namespace homodyne
