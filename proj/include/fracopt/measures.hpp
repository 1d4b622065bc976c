#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fracopt/errors.hpp"
#include "fracopt/rng.hpp"

namespace fracopt {

using Point = std::vector<double>;

inline std::string point_to_string(const Point& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(p[i]);
  }
  return s + ")";
}

/// Control space U: either an explicit finite point set or a box with finite
/// lower bounds and possibly infinite upper bounds.
class ControlSpace {
 public:
  enum class Kind { Finite, Box };

  static ControlSpace finite(std::vector<Point> points) {
    if (points.empty()) throw Error("finite control space needs at least one point");
    const std::size_t dim = points.front().size();
    if (dim == 0) throw Error("control points must have at least one coordinate");
    for (const Point& p : points) {
      if (p.size() != dim) throw Error("control points have inconsistent dimensions");
      for (double x : p)
        if (!std::isfinite(x)) throw Error("control points must be finite");
    }
    for (std::size_t i = 0; i < points.size(); ++i)
      for (std::size_t j = i + 1; j < points.size(); ++j)
        if (points[i] == points[j])
          throw Error("finite control space points must be pairwise distinct");
    ControlSpace s;
    s.kind_ = Kind::Finite;
    s.dim_ = dim;
    s.points_ = std::move(points);
    return s;
  }

  static ControlSpace box(std::vector<double> lower, std::vector<double> upper) {
    if (lower.empty() || lower.size() != upper.size())
      throw Error("control box needs matching non-empty lower/upper bounds");
    for (std::size_t i = 0; i < lower.size(); ++i) {
      if (!std::isfinite(lower[i])) throw Error("control box lower bounds must be finite");
      if (std::isnan(upper[i]) || upper[i] == -std::numeric_limits<double>::infinity())
        throw Error("control box upper bounds must be finite or +inf");
      if (!(lower[i] < upper[i])) throw Error("control box requires lower < upper per coordinate");
    }
    ControlSpace s;
    s.kind_ = Kind::Box;
    s.dim_ = lower.size();
    s.lower_ = std::move(lower);
    s.upper_ = std::move(upper);
    return s;
  }

  Kind kind() const { return kind_; }
  std::size_t dimension() const { return dim_; }
  const std::vector<Point>& points() const { return points_; }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }

  bool has_unbounded_edge() const {
    if (kind_ != Kind::Box) return false;
    return std::any_of(upper_.begin(), upper_.end(), [](double u) { return std::isinf(u); });
  }

  bool contains(const Point& p) const {
    if (p.size() != dim_) return false;
    if (kind_ == Kind::Finite)
      return std::find(points_.begin(), points_.end(), p) != points_.end();
    for (std::size_t i = 0; i < dim_; ++i)
      if (!(lower_[i] <= p[i] && p[i] <= upper_[i])) return false;
    return true;
  }

  /// Upper bounds with infinite edges replaced by lower + bound.
  std::vector<double> truncated_upper(double bound) const {
    std::vector<double> out = upper_;
    for (std::size_t i = 0; i < out.size(); ++i)
      if (std::isinf(out[i])) out[i] = lower_[i] + bound;
    return out;
  }

 private:
  Kind kind_ = Kind::Box;
  std::size_t dim_ = 0;
  std::vector<Point> points_;
  std::vector<double> lower_, upper_;
};

/// Parameter domain S: a finite box in R^r. Degenerate coordinates
/// (lower == upper) give singleton parameters.
class ParameterDomain {
 public:
  static ParameterDomain box(std::vector<double> lower, std::vector<double> upper) {
    if (lower.empty() || lower.size() != upper.size())
      throw Error("parameter domain needs matching non-empty lower/upper bounds");
    for (std::size_t i = 0; i < lower.size(); ++i) {
      if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]))
        throw Error("parameter domain must be a bounded box");
      if (!(lower[i] <= upper[i])) throw Error("parameter domain requires lower <= upper");
    }
    ParameterDomain d;
    d.lower_ = std::move(lower);
    d.upper_ = std::move(upper);
    return d;
  }

  std::size_t dimension() const { return lower_.size(); }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }

  bool contains(const Point& p) const {
    if (p.size() != dimension()) return false;
    for (std::size_t i = 0; i < p.size(); ++i)
      if (!(lower_[i] <= p[i] && p[i] <= upper_[i])) return false;
    return true;
  }

 private:
  std::vector<double> lower_, upper_;
};

struct Atom {
  Point point;
  double weight = 0.0;
};

/// Finitely supported probability measure on a control space. Atoms are
/// pairwise distinct, weights are non-negative and sum to 1 within 1e-12.
/// Immutable once built; safe to share across workers.
class MixtureMeasure {
 public:
  static constexpr double kWeightTolerance = 1e-12;

  /// Validates, merges duplicate points (adding weights), drops zero-weight
  /// atoms when other atoms remain.
  static MixtureMeasure from_atoms(const ControlSpace& space, std::vector<Atom> atoms) {
    if (atoms.empty()) throw Error("mixture needs at least one atom");
    double total = 0.0;
    for (const Atom& a : atoms) {
      if (!(a.weight >= 0.0)) throw Error("mixture weights must be non-negative");
      if (!space.contains(a.point))
        throw OutOfDomainError("mixture atom " + point_to_string(a.point) +
                               " lies outside the control space");
      total += a.weight;
    }
    if (std::fabs(total - 1.0) > kWeightTolerance)
      throw Error("mixture weights must sum to 1 (got " + std::to_string(total) + ")");

    std::vector<Atom> merged;
    for (Atom& a : atoms) {
      auto it = std::find_if(merged.begin(), merged.end(),
                             [&](const Atom& m) { return m.point == a.point; });
      if (it == merged.end())
        merged.push_back(std::move(a));
      else
        it->weight += a.weight;
    }
    if (merged.size() > 1) {
      std::erase_if(merged, [](const Atom& a) { return a.weight == 0.0; });
      if (merged.empty()) throw Error("mixture lost all atoms");  // unreachable: weights sum to 1
    }
    MixtureMeasure m;
    m.atoms_ = std::move(merged);
    return m;
  }

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool is_degenerate() const { return atoms_.size() == 1; }

  /// The single support point of a degenerate measure.
  const Point& concentration_point() const {
    if (!is_degenerate()) throw Error("measure is not degenerate");
    return atoms_.front().point;
  }

 private:
  std::vector<Atom> atoms_;
};

/// Degenerate measure concentrated at `point`, weight exactly 1.
inline MixtureMeasure degenerate(const ControlSpace& space, Point point) {
  if (!space.contains(point))
    throw OutOfDomainError("point " + point_to_string(point) + " lies outside the control space");
  return MixtureMeasure::from_atoms(space, {{std::move(point), 1.0}});
}

/// k atoms uniform on the space (boxes truncated at `truncation` when an
/// edge is infinite), weights uniform on the simplex via sorted uniform
/// gaps. Deterministic per seed; duplicate draws are merged.
inline MixtureMeasure random_mixture(const ControlSpace& space, std::size_t k, std::uint64_t seed,
                                     std::optional<double> truncation = std::nullopt) {
  if (k < 1) throw Error("random_mixture needs k >= 1");
  if (space.has_unbounded_edge() && !truncation)
    throw UnboundedSpaceError("control space has an infinite edge; a truncation bound is required");

  Rng rng(seed);
  std::vector<Point> pts(k);
  if (space.kind() == ControlSpace::Kind::Finite) {
    for (Point& p : pts) p = space.points()[rng.uniform_index(space.points().size())];
  } else {
    const std::vector<double> hi =
        truncation ? space.truncated_upper(*truncation) : space.upper();
    for (Point& p : pts) {
      p.resize(space.dimension());
      for (std::size_t i = 0; i < p.size(); ++i) p[i] = rng.uniform(space.lower()[i], hi[i]);
    }
  }

  std::vector<double> weights(k, 1.0);
  if (k > 1) {
    std::vector<double> cuts(k - 1);
    for (double& c : cuts) c = rng.uniform01();
    std::sort(cuts.begin(), cuts.end());
    weights[0] = cuts[0];
    for (std::size_t i = 1; i + 1 < k; ++i) weights[i] = cuts[i] - cuts[i - 1];
    weights[k - 1] = 1.0 - cuts[k - 2];
  }

  std::vector<Atom> atoms(k);
  for (std::size_t i = 0; i < k; ++i) atoms[i] = {std::move(pts[i]), weights[i]};
  return MixtureMeasure::from_atoms(space, std::move(atoms));
}

}  // namespace fracopt
