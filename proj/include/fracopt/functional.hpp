#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fracopt/expr.hpp"
#include "fracopt/measures.hpp"

namespace fracopt {

enum class Sign { Positive, Negative };

inline const char* to_string(Sign s) { return s == Sign::Positive ? "positive" : "negative"; }

/// A complete extremal problem instance: numerator/denominator integrands,
/// parameter domain, control space, and the declared sign of B. The declared
/// sign is mandatory; without strict sign-constancy the ratio has no
/// well-defined extremal structure.
struct ProblemDefinition {
  std::string name;
  ExpressionAst A;
  ExpressionAst B;
  ParameterDomain S;
  ControlSpace U;
  Sign declared_sign_B = Sign::Positive;

  std::size_t alpha_dim() const { return S.dimension(); }
  std::size_t u_dim() const { return U.dimension(); }
};

/// Binding convention: slots [alpha1..alphar, u1..ud].
inline std::vector<std::string> binding_variables(std::size_t r, std::size_t d) {
  std::vector<std::string> vars;
  vars.reserve(r + d);
  for (std::size_t i = 1; i <= r; ++i) vars.push_back("alpha" + std::to_string(i));
  for (std::size_t i = 1; i <= d; ++i) vars.push_back("u" + std::to_string(i));
  return vars;
}

/// Parses A and B against the variable set implied by S and U. Expressions
/// can only reference declared variables, so dimensional consistency holds
/// by construction.
inline ProblemDefinition make_problem(std::string name, std::string_view a_text,
                                      std::string_view b_text, ParameterDomain S, ControlSpace U,
                                      Sign sign_b) {
  const auto vars = binding_variables(S.dimension(), U.dimension());
  ExpressionAst a = parse_expression(a_text, vars);
  ExpressionAst b = parse_expression(b_text, vars);
  return ProblemDefinition{std::move(name), std::move(a), std::move(b),
                           std::move(S),    std::move(U), sign_b};
}

namespace detail {

/// Reusable buffers for repeated expression evaluation at (alpha, u) pairs.
struct EvalBuffer {
  std::vector<double> binding;
  std::vector<double> scratch;

  void bind(std::span<const double> alpha, std::span<const double> u) {
    binding.resize(alpha.size() + u.size());
    std::copy(alpha.begin(), alpha.end(), binding.begin());
    std::copy(u.begin(), u.end(), binding.begin() + static_cast<std::ptrdiff_t>(alpha.size()));
  }

  double eval(const ExpressionAst& ast) { return evaluate(ast, binding, scratch); }
};

}  // namespace detail

/// Evaluates an integrand expression at a single (alpha, u) point.
inline double evaluate_at(const ExpressionAst& ast, std::span<const double> alpha,
                          std::span<const double> u) {
  detail::EvalBuffer buf;
  buf.bind(alpha, u);
  return buf.eval(ast);
}

constexpr double kDenominatorTolerance = 1e-12;

/// Sum_i w_i * A(alpha, u_i): the numerator integral, exact for finite
/// mixtures.
inline double integral_numerator(const ProblemDefinition& p, std::span<const double> alpha,
                                 const MixtureMeasure& psi) {
  detail::EvalBuffer buf;
  double sum = 0.0;
  for (const Atom& atom : psi.atoms()) {
    buf.bind(alpha, atom.point);
    try {
      sum += atom.weight * buf.eval(p.A);
    } catch (const DomainError& e) {
      throw EvaluationError(std::string("numerator failed at atom ") +
                            point_to_string(atom.point) + ": " + e.what());
    }
  }
  return sum;
}

/// Sum_i w_i * B(alpha, u_i). Throws DenominatorSignViolation when the value
/// contradicts the declared sign or falls below `zero_tol` in magnitude.
inline double integral_denominator(const ProblemDefinition& p, std::span<const double> alpha,
                                   const MixtureMeasure& psi,
                                   double zero_tol = kDenominatorTolerance) {
  detail::EvalBuffer buf;
  double sum = 0.0;
  for (const Atom& atom : psi.atoms()) {
    buf.bind(alpha, atom.point);
    try {
      sum += atom.weight * buf.eval(p.B);
    } catch (const DomainError& e) {
      throw EvaluationError(std::string("denominator failed at atom ") +
                            point_to_string(atom.point) + ": " + e.what());
    }
  }
  const bool ok = p.declared_sign_B == Sign::Positive ? sum >= zero_tol : sum <= -zero_tol;
  if (!ok)
    throw DenominatorSignViolation("denominator integral " + format_double(sum) +
                                   " contradicts declared sign '" + to_string(p.declared_sign_B) +
                                   "'");
  return sum;
}

/// I_alpha(psi) = numerator / denominator. For a degenerate measure this
/// equals A(alpha, u) / B(alpha, u) bit-exactly.
inline double functional_value(const ProblemDefinition& p, std::span<const double> alpha,
                               const MixtureMeasure& psi,
                               double zero_tol = kDenominatorTolerance) {
  const double num = integral_numerator(p, alpha, psi);
  const double den = integral_denominator(p, alpha, psi, zero_tol);
  return num / den;
}

enum class SignVerdict { Consistent, Violated };

struct SignReport {
  struct Violation {
    Point alpha;
    Point u;
    double b_value = 0.0;  // NaN when B failed to evaluate at the point
  };

  std::size_t samples_checked = 0;
  std::vector<Violation> violations;
  SignVerdict verdict = SignVerdict::Consistent;

  bool consistent() const { return verdict == SignVerdict::Consistent; }
};

/// Samples B at quasi-uniform (alpha, u) points over S x U (U truncated when
/// unbounded) and records every point whose sign contradicts the declaration
/// or whose magnitude falls below `zero_tol`. Evaluation failures count as
/// violations. Nothing is thrown; the report carries the verdict.
inline SignReport check_sign_constancy(const ProblemDefinition& p, std::size_t n_samples,
                                       std::uint64_t seed, double truncation_bound = 1e3,
                                       double zero_tol = kDenominatorTolerance) {
  const std::size_t r = p.alpha_dim();
  const std::size_t d = p.u_dim();
  const bool finite_u = p.U.kind() == ControlSpace::Kind::Finite;
  const std::vector<double> u_hi =
      finite_u ? std::vector<double>() : p.U.truncated_upper(truncation_bound);

  // one extra Weyl coordinate indexes the finite point set
  WeylSequence weyl(r + (finite_u ? 1 : d), seed);
  detail::EvalBuffer buf;
  SignReport report;
  report.samples_checked = n_samples;

  Point alpha(r), u(d);
  for (std::size_t s = 0; s < n_samples; ++s) {
    const std::vector<double>& x = weyl.next();
    for (std::size_t i = 0; i < r; ++i)
      alpha[i] = p.S.lower()[i] + x[i] * (p.S.upper()[i] - p.S.lower()[i]);
    if (finite_u) {
      const auto idx = std::min(static_cast<std::size_t>(x[r] * p.U.points().size()),
                                p.U.points().size() - 1);
      u = p.U.points()[idx];
    } else {
      for (std::size_t i = 0; i < d; ++i)
        u[i] = p.U.lower()[i] + x[r + i] * (u_hi[i] - p.U.lower()[i]);
    }

    buf.bind(alpha, u);
    double b;
    try {
      b = buf.eval(p.B);
    } catch (const DomainError&) {
      report.violations.push_back({alpha, u, std::nan("")});
      continue;
    }
    const bool ok = p.declared_sign_B == Sign::Positive ? b >= zero_tol : b <= -zero_tol;
    if (!ok) report.violations.push_back({alpha, u, b});
  }
  report.verdict = report.violations.empty() ? SignVerdict::Consistent : SignVerdict::Violated;
  return report;
}

}  // namespace fracopt
