#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fracopt/reduction.hpp"

namespace fracopt {

struct KnownSolution {
  Classification classification = Classification::Attained;
  std::optional<Point> alpha;
  std::optional<Point> u;
  std::optional<double> value;  // extremum (ATTAINED) or supremum estimate (EPSILON_OPTIMAL)
};

/// A named, ready-to-run problem with its preferred solve direction and,
/// where available, an independently justified solution.
struct CatalogEntry {
  std::string name;
  ProblemDefinition problem;
  Direction direction = Direction::Max;
  std::optional<KnownSolution> known_solution;
  std::string notes;

  SolveConfig default_config() const {
    SolveConfig cfg;
    cfg.direction = direction;
    return cfg;
  }
};

/// Planned-replacement cost-rate model with unit-scale Weibull lifetimes.
///
/// A part of cost `cp` is replaced preventively at age u, or correctively at
/// cost `cf` if it fails first; lifetime T has survival exp(-t^alpha) with
/// shape alpha. Per renewal cycle:
///   expected cost   A(alpha, u) = cp + (cf - cp) * (1 - exp(-u^alpha)),
///   expected length B(alpha, u) = integral_0^u exp(-t^alpha) dt,
/// and the long-run cost rate is the ratio A/B to be minimized. The length
/// integral has no closed form; it is frozen into the problem as a 64-node
/// composite-midpoint sum so the instance stays inside the expression
/// language. Relative quadrature error, measured against a 1e6-node
/// reference: below 1e-4 for shape >= 1 and u <= 3, below 1e-3 for all
/// shapes in [0.5, 5] up to u = 3, and below 2.5e-3 up to u = 10 (shapes
/// under 1 have a derivative singularity at t = 0 that midpoint sampling
/// only tempers).
inline ProblemDefinition age_replacement_problem(double cp, double cf, double shape_lo,
                                                 double shape_hi, double u_max) {
  if (!(cp > 0.0) || !(cf >= cp))
    throw InvalidCostsError("need 0 < cp <= cf (preventive replacement must not cost more)");
  if (!(shape_lo >= 0.5) || !(shape_hi <= 5.0) || !(shape_lo <= shape_hi))
    throw InvalidCostsError("shape range must satisfy 0.5 <= lo <= hi <= 5");
  constexpr double kMinAge = 0.05;  // keeps the cycle length bounded away from 0
  if (!(u_max > kMinAge)) throw InvalidCostsError("u_max must exceed " + format_double(kMinAge));

  std::string a_text = format_double(cp) + " + " + format_double(cf - cp) +
                       "*(1 - exp(-(u1^alpha1)))";

  constexpr int kNodes = 64;
  std::string b_text = "(u1/" + std::to_string(kNodes) + ")*(";
  for (int j = 0; j < kNodes; ++j) {
    if (j) b_text += " + ";
    const double c = (2.0 * j + 1.0) / (2.0 * kNodes);  // dyadic, prints exactly
    b_text += "exp(-((" + format_double(c) + "*u1)^alpha1))";
  }
  b_text += ")";

  return make_problem("age_replacement_weibull", a_text, b_text,
                      ParameterDomain::box({shape_lo}, {shape_hi}),
                      ControlSpace::box({kMinAge}, {u_max}), Sign::Positive);
}

namespace detail {

inline std::vector<CatalogEntry> build_catalog() {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<CatalogEntry> entries;

  entries.push_back({
      "constant_ratio",
      make_problem("constant_ratio", "2", "1", ParameterDomain::box({0.0}, {1.0}),
                   ControlSpace::box({0.0}, {1.0}), Sign::Positive),
      Direction::Max,
      KnownSolution{Classification::Attained, Point{0.0}, Point{0.0}, 2.0},
      "C is identically 2, so every pair is optimal; the solver reports the "
      "lexicographically smallest grid point (0, 0).",
  });

  entries.push_back({
      "quadratic_bowl",
      make_problem("quadratic_bowl", "-((alpha1-1)^2 + (u1-2)^2)", "1",
                   ParameterDomain::box({-5.0}, {5.0}), ControlSpace::box({-5.0}, {5.0}),
                   Sign::Positive),
      Direction::Max,
      KnownSolution{Classification::Attained, Point{1.0}, Point{2.0}, 0.0},
      "Concave quadratic with the unique maximum 0 at (1, 2).",
  });

  entries.push_back({
      "reciprocal_sup",
      make_problem("reciprocal_sup", "-1", "u1", ParameterDomain::box({0.0}, {0.0}),
                   ControlSpace::box({1.0}, {kInf}), Sign::Positive),
      Direction::Max,
      KnownSolution{Classification::EpsilonOptimal, std::nullopt, std::nullopt, 0.0},
      "C(u) = -1/u on [1, inf): strictly increasing with supremum 0, never "
      "attained; -1/u > -eps exactly when u > 1/eps.",
  });

  entries.push_back({
      "linear_unbounded",
      make_problem("linear_unbounded", "u1", "1", ParameterDomain::box({0.0}, {0.0}),
                   ControlSpace::box({0.0}, {kInf}), Sign::Positive),
      Direction::Max,
      KnownSolution{Classification::Unbounded, std::nullopt, std::nullopt, std::nullopt},
      "C(u) = u on [0, inf) is unbounded above.",
  });

  {
    CatalogEntry age{
        "age_replacement_weibull",
        age_replacement_problem(1.0, 10.0, 0.5, 3.0, 3.0),
        Direction::Min,
        KnownSolution{Classification::Attained, Point{3.0}, Point{0.3824564714286105},
                      3.9493438344739626},
        "cp=1, cf=10, shape in [0.5, 3], ages in [0.05, 3]. Larger shape "
        "means a sharper increasing failure rate, which both rewards a "
        "finite replacement age and lowers the achievable rate, so the "
        "optimal shape sits at the upper edge 3. The quoted minimizer comes "
        "from an independent dense scan of C(3, .) (1e5-point sweep plus "
        "golden-section refinement).",
    };
    entries.push_back(std::move(age));
  }

  return entries;
}

inline const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = build_catalog();
  return entries;
}

}  // namespace detail

/// Stable list of catalog entry names.
inline std::vector<std::string> catalog_list() {
  std::vector<std::string> names;
  for (const CatalogEntry& e : detail::catalog()) names.push_back(e.name);
  return names;
}

inline const CatalogEntry& catalog_get(const std::string& name) {
  for (const CatalogEntry& e : detail::catalog())
    if (e.name == name) return e;
  throw UnknownEntryError("no catalog entry named '" + name + "'");
}

}  // namespace fracopt
