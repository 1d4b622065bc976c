#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fracopt/reduction.hpp"

namespace fracopt {

/// Linear-fractional objective over the probability simplex: optimize
/// (sum w_i a_i) / (sum w_i b_i) over weight vectors w. All b_i carry one
/// strict sign, so the denominator never vanishes on the simplex.
struct FiniteInstance {
  std::vector<double> a;
  std::vector<double> b;
  Direction direction = Direction::Max;

  std::size_t size() const { return a.size(); }

  void validate() const {
    if (a.empty() || a.size() != b.size())
      throw Error("finite instance needs matching non-empty a/b vectors");
    const bool positive = b.front() > 0.0;
    for (double bi : b) {
      if (std::fabs(bi) < 1e-12) throw Error("finite instance b entries must stay away from 0");
      if ((bi > 0.0) != positive) throw Error("finite instance b entries must share one sign");
    }
  }
};

struct SimplexOptimum {
  double value = 0.0;
  std::vector<double> weights;
};

namespace detail {

inline double simplex_ratio(const FiniteInstance& inst, const std::vector<double>& w) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    num += w[i] * inst.a[i];
    den += w[i] * inst.b[i];
  }
  return num / den;
}

/// Enumerates all weight vectors (k_1/m, ..., k_n/m) with k_i summing to m.
inline void for_each_composition(std::size_t n, int m,
                                 const std::function<void(const std::vector<double>&)>& fn) {
  std::vector<int> k(n, 0);
  std::vector<double> w(n, 0.0);
  const std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int left) {
    if (pos + 1 == n) {
      k[pos] = left;
      for (std::size_t i = 0; i < n; ++i) w[i] = static_cast<double>(k[i]) / m;
      fn(w);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      k[pos] = v;
      rec(pos + 1, left - v);
    }
  };
  rec(0, m);
}

}  // namespace detail

inline constexpr std::size_t kOracleMaxSize = 16;

/// Brute-force simplex optimum: all vertices, an exhaustive barycentric grid
/// for n <= 4, and seeded random interior mixtures. Makes no use of the
/// solver or of any vertex-optimality assumption.
inline SimplexOptimum simplex_lfp_value(const FiniteInstance& inst, int grid_subdivisions = 50,
                                        std::size_t random_samples = 100000,
                                        std::uint64_t seed = 0) {
  inst.validate();
  const std::size_t n = inst.size();
  if (n > kOracleMaxSize)
    throw TooLargeError("oracle handles at most " + std::to_string(kOracleMaxSize) +
                        " support points, got " + std::to_string(n));

  const bool maximize = inst.direction == Direction::Max;
  SimplexOptimum best;
  bool has = false;
  const auto offer = [&](double value, const std::vector<double>& w) {
    if (!has || (maximize ? value > best.value : value < best.value)) {
      has = true;
      best.value = value;
      best.weights = w;
    }
  };

  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(w.begin(), w.end(), 0.0);
    w[i] = 1.0;
    offer(detail::simplex_ratio(inst, w), w);
  }

  if (n >= 2 && n <= 4)
    detail::for_each_composition(n, grid_subdivisions, [&](const std::vector<double>& wg) {
      offer(detail::simplex_ratio(inst, wg), wg);
    });

  Rng rng(seed);
  std::vector<double> cuts(n >= 1 ? n - 1 : 0);
  for (std::size_t s = 0; s < random_samples && n >= 2; ++s) {
    for (double& c : cuts) c = rng.uniform01();
    std::sort(cuts.begin(), cuts.end());
    w[0] = cuts[0];
    for (std::size_t i = 1; i + 1 < n; ++i) w[i] = cuts[i] - cuts[i - 1];
    w[n - 1] = 1.0 - cuts[n - 2];
    offer(detail::simplex_ratio(inst, w), w);
  }
  return best;
}

/// True when the brute-force simplex optimum beats the best vertex ratio by
/// at most `tol`: the finite-support shadow of degenerate-measure
/// optimality.
inline bool verify_vertex_optimality(const FiniteInstance& inst, double tol,
                                     int grid_subdivisions = 50,
                                     std::size_t random_samples = 100000, std::uint64_t seed = 0) {
  const SimplexOptimum opt = simplex_lfp_value(inst, grid_subdivisions, random_samples, seed);
  double best_vertex = inst.a[0] / inst.b[0];
  for (std::size_t i = 1; i < inst.size(); ++i) {
    const double v = inst.a[i] / inst.b[i];
    if (inst.direction == Direction::Max ? v > best_vertex : v < best_vertex) best_vertex = v;
  }
  return inst.direction == Direction::Max ? opt.value - best_vertex <= tol
                                          : best_vertex - opt.value <= tol;
}

/// Result of an empirical bound check over sampled instances.
struct BoundReport {
  std::size_t instances_checked = 0;
  std::size_t samples_per_instance = 0;
  std::size_t violations_count = 0;
  std::size_t skipped = 0;  // samples that could not be evaluated
  double max_violation = 0.0;
  double tolerance = 0.0;
  bool holds() const { return max_violation <= tolerance; }
};

/// Checks the finite-support mixture bound: for every sampled alpha and
/// random mixture, I_alpha(psi) must lie within the range of the test
/// function over the mixture's own atoms (up to `tol`).
inline BoundReport check_mixture_range_bound(const ProblemDefinition& p, std::size_t n_alpha,
                                std::size_t n_mixtures, std::size_t max_atoms, std::uint64_t seed,
                                double tol, double truncation_bound = 1e3) {
  BoundReport report;
  report.instances_checked = n_alpha;
  report.samples_per_instance = n_mixtures;
  report.tolerance = tol;

  const std::size_t r = p.alpha_dim();
  Point alpha(r);
  for (std::size_t ia = 0; ia < n_alpha; ++ia) {
    Rng alpha_rng(Rng::mix(seed, ia));
    for (std::size_t i = 0; i < r; ++i)
      alpha[i] = alpha_rng.uniform(p.S.lower()[i], p.S.upper()[i]);

    for (std::size_t im = 0; im < n_mixtures; ++im) {
      const std::uint64_t mix_seed = Rng::mix(seed, (ia + 1) * 1000003ULL + im);
      Rng krng(Rng::mix(mix_seed, 0xa70c'5e7eULL));
      const std::size_t k = 1 + krng.uniform_index(max_atoms);
      try {
        const MixtureMeasure psi = random_mixture(p.U, k, mix_seed, truncation_bound);
        const double value = functional_value(p, alpha, psi);
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (const Atom& atom : psi.atoms()) {
          const double c = test_function(p, alpha, atom.point);
          lo = std::min(lo, c);
          hi = std::max(hi, c);
        }
        const double violation = std::max({0.0, lo - value, value - hi});
        if (violation > tol) ++report.violations_count;
        report.max_violation = std::max(report.max_violation, violation);
      } catch (const Error&) {
        ++report.skipped;
      }
    }
  }
  return report;
}

/// Compares the extreme of the test function over sampled degenerate
/// measures against the extreme of the functional over sampled mixtures;
/// degenerate measures must do at least as well (up to cfg.tol_value). Each
/// mixture's own atoms join the degenerate pool, so the comparison checks
/// the dominance structure rather than sampling luck.
inline bool check_degenerate_dominance(const ProblemDefinition& p, const SolveConfig& cfg,
                             std::size_t n_samples = 2000, std::size_t max_atoms = 5) {
  const bool maximize = cfg.direction == Direction::Max;
  const std::size_t r = p.alpha_dim();
  Point alpha(r);

  bool has_deg = false, has_mix = false;
  double deg_best = 0.0, mix_best = 0.0;
  const auto offer = [maximize](bool& has, double& best, double v) {
    if (!has || (maximize ? v > best : v < best)) {
      has = true;
      best = v;
    }
  };

  for (std::size_t s = 0; s < n_samples; ++s) {
    Rng rng(Rng::mix(cfg.seed, 0xd471'0000ULL + s));
    for (std::size_t i = 0; i < r; ++i) alpha[i] = rng.uniform(p.S.lower()[i], p.S.upper()[i]);
    const std::size_t k = 1 + rng.uniform_index(max_atoms);
    try {
      const MixtureMeasure psi =
          random_mixture(p.U, k, rng.next_u64(), cfg.truncation_bound);
      offer(has_mix, mix_best, functional_value(p, alpha, psi));
      for (const Atom& atom : psi.atoms())
        offer(has_deg, deg_best, test_function(p, alpha, atom.point));
      const MixtureMeasure single = random_mixture(p.U, 1, rng.next_u64(), cfg.truncation_bound);
      offer(has_deg, deg_best,
            functional_value(p, alpha, single));
    } catch (const Error&) {
      continue;
    }
  }
  if (!has_deg || !has_mix) return false;
  return maximize ? deg_best + cfg.tol_value >= mix_best : deg_best - cfg.tol_value <= mix_best;
}

}  // namespace fracopt
