#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fracopt/functional.hpp"

namespace fracopt {

enum class Direction { Max, Min };

inline const char* to_string(Direction d) { return d == Direction::Max ? "max" : "min"; }

enum class Classification { Attained, EpsilonOptimal, Unbounded, Indeterminate };

inline const char* to_string(Classification c) {
  switch (c) {
    case Classification::Attained: return "ATTAINED";
    case Classification::EpsilonOptimal: return "EPSILON_OPTIMAL";
    case Classification::Unbounded: return "UNBOUNDED";
    case Classification::Indeterminate: return "INDETERMINATE";
  }
  return "?";
}

/// Solver knobs. All stochastic behaviour is a pure function of `seed`.
struct SolveConfig {
  Direction direction = Direction::Max;
  int grid_per_dim = 33;        // full-factorial grid resolution per dimension
  int multistarts = 16;         // pattern-search starts taken from the best grid cells
  int refine_iters = 200;       // compass-search iterations per start
  double tol_value = 1e-9;      // stabilisation tolerance on incumbent values
  double tol_point = 1e-6;      // point tolerance (ties, escape detection)
  double epsilon = 1e-3;        // epsilon for certificates attached by optimize
  double divergence_threshold = 1e6;
  double truncation_bound = 1e3;     // initial truncation of infinite box edges
  double truncation_growth = 10.0;   // bound multiplier per round
  int truncation_rounds = 3;         // growth rounds always run on truncated spaces
  int max_rounds = 16;               // hard cap; past this the solve is INDETERMINATE
  int sign_samples = 1000;           // samples for the pre-solve sign check
  double denom_tolerance = 1e-12;    // |B| below this counts as a sign violation
  std::uint64_t seed = 0;

  void validate() const {
    if (grid_per_dim < 1 || multistarts < 1 || refine_iters < 1 || truncation_rounds < 1 ||
        max_rounds < 1 || sign_samples < 1)
      throw Error("solve config counts must be >= 1");
    if (!(tol_value > 0) || !(tol_point > 0) || !(epsilon > 0) || !(divergence_threshold > 0) ||
        !(truncation_bound > 0) || !(denom_tolerance > 0))
      throw Error("solve config tolerances must be positive");
    if (!(truncation_growth > 1)) throw Error("truncation growth factor must exceed 1");
  }
};

struct TraceEntry {
  int round = 0;
  Point alpha;
  Point u;
  double value = 0.0;
  std::uint64_t evaluations = 0;  // evaluation count when the improvement happened
};

/// A pair whose degenerate-measure value sits within epsilon of the
/// supremum estimate (max direction; symmetric for min).
struct EpsilonCertificate {
  double epsilon = 0.0;
  Point alpha_eps;
  Point u_eps;
  double value = 0.0;
  double sup_estimate = 0.0;
};

struct WitnessEntry {
  Point alpha;
  Point u;
  double value = 0.0;
};

/// Strictly monotone sequence of degenerate-measure values crossing the
/// divergence threshold; evidence that no finite extremum exists.
struct DivergenceWitness {
  std::vector<WitnessEntry> sequence;
};

struct SolveReport {
  Classification classification = Classification::Indeterminate;
  Direction direction = Direction::Max;
  Point best_alpha;
  Point best_u;
  double best_value = 0.0;
  std::optional<EpsilonCertificate> certificate;
  std::optional<DivergenceWitness> witness;
  std::uint64_t evaluations = 0;
  std::vector<TraceEntry> trace;
  // diagnostics
  std::uint64_t skipped_sign = 0;        // points skipped for a denominator sign violation
  std::uint64_t failed_evaluations = 0;  // points skipped for evaluation failures
  int rounds = 0;
  SignReport sign_check;
};

/// C(alpha, u) = A(alpha, u) / B(alpha, u). The whole extremal problem
/// reduces to optimizing this function over S x U.
inline double test_function(const ProblemDefinition& p, std::span<const double> alpha,
                            std::span<const double> u,
                            double zero_tol = kDenominatorTolerance) {
  detail::EvalBuffer buf;
  buf.bind(alpha, u);
  double a, b;
  try {
    b = buf.eval(p.B);
  } catch (const DomainError& e) {
    throw EvaluationError(std::string("B failed at ") + point_to_string(Point(u.begin(), u.end())) +
                          ": " + e.what());
  }
  const bool ok = p.declared_sign_B == Sign::Positive ? b >= zero_tol : b <= -zero_tol;
  if (!ok)
    throw DenominatorSignViolation("B = " + format_double(b) + " contradicts declared sign '" +
                                   to_string(p.declared_sign_B) + "'");
  try {
    a = buf.eval(p.A);
  } catch (const DomainError& e) {
    throw EvaluationError(std::string("A failed at ") + point_to_string(Point(u.begin(), u.end())) +
                          ": " + e.what());
  }
  return a / b;
}

namespace detail {

inline bool lex_less(const Point& a, const Point& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

/// Grid + multistart compass search over S x U with growing truncation of
/// infinite box edges. Deterministic: candidates are visited in
/// lexicographic order and ties keep the lexicographically smallest point.
class Optimizer {
 public:
  Optimizer(const ProblemDefinition& p, const SolveConfig& cfg, SignReport sign)
      : p_(p), cfg_(cfg), r_(p.alpha_dim()), d_(p.u_dim()),
        finite_u_(p.U.kind() == ControlSpace::Kind::Finite) {
    report_.direction = cfg.direction;
    report_.sign_check = std::move(sign);
    if (finite_u_) {
      sorted_points_.resize(p_.U.points().size());
      for (std::size_t i = 0; i < sorted_points_.size(); ++i) sorted_points_[i] = i;
      std::sort(sorted_points_.begin(), sorted_points_.end(), [&](std::size_t a, std::size_t b) {
        return lex_less(p_.U.points()[a], p_.U.points()[b]);
      });
    }
  }

  SolveReport run() {
    const bool truncated = !finite_u_ && p_.U.has_unbounded_edge();
    const int rounds_min = truncated ? 1 + cfg_.truncation_rounds : 1;

    std::optional<Classification> outcome;
    for (int round = 0; round < cfg_.max_rounds; ++round) {
      rounds_used_ = round + 1;
      last_bound_ = cfg_.truncation_bound * std::pow(cfg_.truncation_growth, round);
      run_round(round);
      if (!has_best_) throw IllPosedProblem("no grid point could be evaluated");
      round_incumbents_.push_back({best_alpha_, best_u_, best_value_});

      if (diverged()) {
        outcome = Classification::Unbounded;
        break;
      }
      if (!truncated) {
        outcome = Classification::Attained;
        break;
      }
      const bool ran_minimum = round + 1 >= rounds_min;
      if (ran_minimum && round >= 1) {
        const double prev = round_incumbents_[round - 1].value;
        if (std::fabs(best_value_ - prev) <= cfg_.tol_value) {
          outcome = escaped() ? Classification::EpsilonOptimal : Classification::Attained;
          break;
        }
      }
    }

    report_.classification = outcome.value_or(Classification::Indeterminate);
    report_.best_alpha = best_alpha_;
    report_.best_u = best_u_;
    report_.best_value = best_value_;
    report_.rounds = rounds_used_;
    if (report_.classification == Classification::Unbounded) {
      auto witness = build_witness();
      if (witness)
        report_.witness = std::move(*witness);
      else
        report_.classification = Classification::Indeterminate;  // could not assemble evidence
    } else if (report_.classification == Classification::EpsilonOptimal) {
      report_.certificate = EpsilonCertificate{cfg_.epsilon, best_alpha_, best_u_, best_value_,
                                               best_value_};
    }
    return std::move(report_);
  }

 private:
  struct Axis {
    double lo = 0.0, hi = 0.0;
    int count = 1;
    double at(int i) const {
      if (count == 1) return lo;
      return i == count - 1 ? hi : lo + (hi - lo) * i / (count - 1);
    }
    double step() const { return count > 1 ? (hi - lo) / (count - 1) : 0.0; }
  };

  struct Candidate {
    double value = 0.0;
    std::vector<double> cont;    // alpha coords, then u coords for box spaces
    std::size_t finite_idx = 0;  // index into U.points() for finite spaces
  };

  struct Incumbent {
    Point alpha;
    Point u;
    double value = 0.0;
  };

  bool better(double a, double b) const {
    return cfg_.direction == Direction::Max ? a > b : a < b;
  }

  bool diverged() const {
    return cfg_.direction == Direction::Max ? best_value_ >= cfg_.divergence_threshold
                                            : best_value_ <= -cfg_.divergence_threshold;
  }

  std::vector<Axis> make_axes(double bound) const {
    std::vector<Axis> axes;
    axes.reserve(r_ + (finite_u_ ? 0 : d_));
    for (std::size_t i = 0; i < r_; ++i) {
      const double lo = p_.S.lower()[i], hi = p_.S.upper()[i];
      axes.push_back({lo, hi, lo == hi ? 1 : cfg_.grid_per_dim});
    }
    if (!finite_u_) {
      const auto hi = p_.U.truncated_upper(bound);
      for (std::size_t i = 0; i < d_; ++i)
        axes.push_back({p_.U.lower()[i], hi[i], cfg_.grid_per_dim});
    }
    return axes;
  }

  std::optional<double> eval_c(std::span<const double> alpha, std::span<const double> u) {
    ++report_.evaluations;
    buf_.bind(alpha, u);
    double b;
    try {
      b = buf_.eval(p_.B);
    } catch (const DomainError&) {
      ++report_.failed_evaluations;
      return std::nullopt;
    }
    const bool ok =
        p_.declared_sign_B == Sign::Positive ? b >= cfg_.denom_tolerance : b <= -cfg_.denom_tolerance;
    if (!ok) {
      ++report_.skipped_sign;
      return std::nullopt;
    }
    double a;
    try {
      a = buf_.eval(p_.A);
    } catch (const DomainError&) {
      ++report_.failed_evaluations;
      return std::nullopt;
    }
    return a / b;
  }

  std::optional<double> eval_candidate(const Candidate& c) {
    const std::span<const double> alpha(c.cont.data(), r_);
    if (finite_u_) return eval_c(alpha, p_.U.points()[c.finite_idx]);
    return eval_c(alpha, std::span<const double>(c.cont.data() + r_, d_));
  }

  Point candidate_alpha(const Candidate& c) const {
    return Point(c.cont.begin(), c.cont.begin() + static_cast<std::ptrdiff_t>(r_));
  }

  Point candidate_u(const Candidate& c) const {
    if (finite_u_) return p_.U.points()[c.finite_idx];
    return Point(c.cont.begin() + static_cast<std::ptrdiff_t>(r_), c.cont.end());
  }

  void maybe_update(const Candidate& c, double value, int round) {
    Point alpha = candidate_alpha(c);
    Point u = candidate_u(c);
    if (!has_best_ || better(value, best_value_)) {
      has_best_ = true;
      best_value_ = value;
      best_alpha_ = alpha;
      best_u_ = u;
      report_.trace.push_back({round, std::move(alpha), std::move(u), value, report_.evaluations});
      return;
    }
    if (value == best_value_) {
      // ties keep the lexicographically smallest (alpha, u)
      if (lex_less(alpha, best_alpha_) ||
          (alpha == best_alpha_ && lex_less(u, best_u_))) {
        best_alpha_ = std::move(alpha);
        best_u_ = std::move(u);
      }
    }
  }

  // candidate ordering for multistart selection
  bool candidate_preferred(const Candidate& a, const Candidate& b) const {
    if (a.value != b.value) return better(a.value, b.value);
    const Point aa = candidate_alpha(a), ba = candidate_alpha(b);
    if (aa != ba) return lex_less(aa, ba);
    return lex_less(candidate_u(a), candidate_u(b));
  }

  void run_round(int round) {
    const std::vector<Axis> axes = make_axes(last_bound_);
    std::vector<Candidate> starts;  // kept sorted by candidate_preferred, at most multistarts

    const auto offer_start = [&](const Candidate& c) {
      auto pos = std::lower_bound(starts.begin(), starts.end(), c,
                                  [&](const Candidate& x, const Candidate& y) {
                                    return candidate_preferred(x, y);
                                  });
      if (starts.size() == static_cast<std::size_t>(cfg_.multistarts) && pos == starts.end())
        return;
      starts.insert(pos, c);
      if (starts.size() > static_cast<std::size_t>(cfg_.multistarts)) starts.pop_back();
    };

    // Phase 1: full-factorial grid scan in lexicographic order.
    std::uint64_t grid_total = 0, grid_bad = 0;
    Candidate cell;
    cell.cont.resize(axes.size());
    std::vector<int> idx(axes.size(), 0);
    const std::size_t n_points = finite_u_ ? sorted_points_.size() : 1;
    bool done = false;
    while (!done) {
      for (std::size_t i = 0; i < axes.size(); ++i) cell.cont[i] = axes[i].at(idx[i]);
      for (std::size_t pi = 0; pi < n_points; ++pi) {
        if (finite_u_) cell.finite_idx = sorted_points_[pi];
        ++grid_total;
        const auto value = eval_candidate(cell);
        if (!value) {
          ++grid_bad;
          continue;
        }
        cell.value = *value;
        maybe_update(cell, *value, round);
        offer_start(cell);
      }
      // odometer: last axis fastest, so combined points come out in
      // lexicographic order
      done = true;
      for (std::size_t i = axes.size(); i-- > 0;) {
        if (++idx[i] < axes[i].count) {
          done = false;
          break;
        }
        idx[i] = 0;
      }
      if (axes.empty()) break;
    }
    if (2 * grid_bad > grid_total)
      throw IllPosedProblem("evaluation failed on more than half of the grid (" +
                            std::to_string(grid_bad) + " of " + std::to_string(grid_total) + ")");

    // Phase 2: compass search from the best grid cells.
    for (const Candidate& start : starts) refine(start, axes, round);
  }

  void refine(Candidate cand, const std::vector<Axis>& axes, int round) {
    std::vector<double> step(axes.size());
    double scale = 0.0;
    for (std::size_t i = 0; i < axes.size(); ++i) {
      step[i] = axes[i].step();
      scale = std::max({scale, std::fabs(axes[i].lo), std::fabs(axes[i].hi)});
    }
    const double floor_step = 1e-18 * std::max(1.0, scale);

    double value = cand.value;
    for (int iter = 0; iter < cfg_.refine_iters; ++iter) {
      std::optional<Candidate> best_move;
      for (std::size_t j = 0; j < axes.size(); ++j) {
        if (step[j] == 0.0) continue;
        for (const double dir : {+1.0, -1.0}) {
          Candidate next = cand;
          next.cont[j] = std::clamp(cand.cont[j] + dir * step[j], axes[j].lo, axes[j].hi);
          if (next.cont[j] == cand.cont[j]) continue;
          const auto v = eval_candidate(next);
          if (!v) continue;
          next.value = *v;
          if (!best_move || candidate_preferred(next, *best_move)) best_move = std::move(next);
        }
      }
      if (best_move && better(best_move->value, value)) {
        cand = std::move(*best_move);
        value = cand.value;
        maybe_update(cand, value, round);
      } else {
        double largest = 0.0;
        for (double& s : step) {
          s *= 0.5;
          largest = std::max(largest, s);
        }
        if (largest < floor_step) break;
      }
    }
  }

  /// Any search coordinate resting on the truncated image of an infinite
  /// edge means the argmax escaped with the truncation.
  bool escaped() const {
    if (finite_u_ || !p_.U.has_unbounded_edge()) return false;
    const auto hi = p_.U.truncated_upper(last_bound_);
    for (std::size_t i = 0; i < d_; ++i) {
      if (!std::isinf(p_.U.upper()[i])) continue;
      const double tol = std::max(cfg_.tol_point, 1e-9 * (hi[i] - p_.U.lower()[i]));
      if (hi[i] - best_u_[i] <= tol) return true;
    }
    return false;
  }

  std::optional<DivergenceWitness> build_witness() const {
    const auto assemble = [&](const std::vector<WitnessEntry>& entries)
        -> std::optional<std::vector<WitnessEntry>> {
      const bool want_positive = cfg_.direction == Direction::Max;
      std::vector<WitnessEntry> seq;
      for (const WitnessEntry& e : entries) {
        if (want_positive ? e.value <= 0.0 : e.value >= 0.0) continue;
        if (!seq.empty() && !better(e.value, seq.back().value)) continue;
        seq.push_back(e);
      }
      const bool reaches = !seq.empty() && std::fabs(seq.back().value) >= cfg_.divergence_threshold;
      if (seq.size() < 3 || !reaches) return std::nullopt;
      if (seq.size() > 16) {  // thin, keeping the endpoints
        std::vector<WitnessEntry> thin;
        for (std::size_t i = 0; i < 16; ++i)
          thin.push_back(seq[i * (seq.size() - 1) / 15]);
        seq = std::move(thin);
      }
      return seq;
    };

    std::vector<WitnessEntry> rounds;
    for (const Incumbent& inc : round_incumbents_) rounds.push_back({inc.alpha, inc.u, inc.value});
    if (auto seq = assemble(rounds)) return DivergenceWitness{std::move(*seq)};

    std::vector<WitnessEntry> improvements;
    for (const TraceEntry& t : report_.trace) improvements.push_back({t.alpha, t.u, t.value});
    if (auto seq = assemble(improvements)) return DivergenceWitness{std::move(*seq)};
    return std::nullopt;
  }

  const ProblemDefinition& p_;
  const SolveConfig& cfg_;
  std::size_t r_, d_;
  bool finite_u_;
  std::vector<std::size_t> sorted_points_;

  EvalBuffer buf_;
  SolveReport report_;
  bool has_best_ = false;
  double best_value_ = 0.0;
  Point best_alpha_, best_u_;
  std::vector<Incumbent> round_incumbents_;
  double last_bound_ = 0.0;
  int rounds_used_ = 0;
};

}  // namespace detail

/// Solves problem instance `p`: classifies the extremum and returns the
/// optimal pair realized as (best_alpha, degenerate(best_u)).
///
/// Phases per truncation round:
///   1. full-factorial grid over S x U (infinite box edges truncated),
///   2. compass search from the best grid cells,
///   3. classification from the incumbent sequence across rounds:
///      crossing the divergence threshold => UNBOUNDED (with witness);
///      stabilized value at an interior point or on a compact/finite
///      space => ATTAINED; stabilized value with the argmax escaping to
///      the truncation edge => EPSILON_OPTIMAL (with certificate);
///      otherwise INDETERMINATE.
///
/// Throws SignViolation when the sampled sign check finds a witness against
/// the declared sign of B, and IllPosedProblem when more than half of a
/// round's grid evaluations fail.
inline SolveReport optimize(const ProblemDefinition& p, const SolveConfig& cfg) {
  cfg.validate();
  SignReport sign = check_sign_constancy(p, static_cast<std::size_t>(cfg.sign_samples), cfg.seed,
                                         cfg.truncation_bound, cfg.denom_tolerance);
  if (!sign.consistent()) {
    const auto& v = sign.violations.front();
    throw SignViolation("declared sign of B is '" + std::string(to_string(p.declared_sign_B)) +
                        "' but B = " + format_double(v.b_value) + " at alpha = " +
                        point_to_string(v.alpha) + ", u = " + point_to_string(v.u) + " (" +
                        std::to_string(sign.violations.size()) + " violation(s) in " +
                        std::to_string(sign.samples_checked) + " samples)");
  }
  detail::Optimizer opt(p, cfg, std::move(sign));
  return opt.run();
}

/// Builds an epsilon-certificate from a finished solve. The attained case
/// certifies trivially: the optimum itself lies within every epsilon of the
/// supremum.
inline EpsilonCertificate epsilon_certificate(const SolveReport& report, double epsilon) {
  if (!(epsilon > 0)) throw Error("epsilon must be positive");
  if (report.classification != Classification::Attained &&
      report.classification != Classification::EpsilonOptimal)
    throw NotApplicableError(std::string("no epsilon-certificate for classification ") +
                             to_string(report.classification));
  return EpsilonCertificate{epsilon, report.best_alpha, report.best_u, report.best_value,
                            report.best_value};
}

inline EpsilonCertificate epsilon_certificate(const ProblemDefinition& p, const SolveConfig& cfg,
                                              double epsilon) {
  return epsilon_certificate(optimize(p, cfg), epsilon);
}

inline DivergenceWitness divergence_witness(const SolveReport& report) {
  if (report.classification != Classification::Unbounded || !report.witness)
    throw NotApplicableError(std::string("no divergence witness for classification ") +
                             to_string(report.classification));
  return *report.witness;
}

inline DivergenceWitness divergence_witness(const ProblemDefinition& p, const SolveConfig& cfg) {
  return divergence_witness(optimize(p, cfg));
}

}  // namespace fracopt
