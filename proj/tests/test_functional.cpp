#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fracopt/functional.hpp"

using namespace fracopt;

namespace {

ProblemDefinition simple_problem(const std::string& a, const std::string& b,
                                 Sign sign = Sign::Positive) {
  return make_problem("test", a, b, ParameterDomain::box({-5.0}, {5.0}),
                      ControlSpace::box({0.0}, {10.0}), sign);
}

MixtureMeasure two_atom(const ProblemDefinition& p) {
  return MixtureMeasure::from_atoms(p.U, {{{1.0}, 0.5}, {{3.0}, 0.5}});
}

}  // namespace

TEST_CASE("numerator integral over mixtures") {
  const ProblemDefinition constant = simple_problem("2", "1");
  CHECK(integral_numerator(constant, Point{0.0}, two_atom(constant)) == 2.0);

  const ProblemDefinition mean = simple_problem("u1", "1");
  CHECK(integral_numerator(mean, Point{0.0}, two_atom(mean)) == 2.0);

  const ProblemDefinition bilinear = simple_problem("alpha1*u1", "1");
  CHECK(integral_numerator(bilinear, Point{2.0}, degenerate(bilinear.U, {3.0})) == 6.0);
}

TEST_CASE("denominator integral enforces the declared sign") {
  const ProblemDefinition one = simple_problem("1", "1");
  CHECK(integral_denominator(one, Point{0.0}, two_atom(one)) == 1.0);

  const ProblemDefinition linear = simple_problem("1", "u1");
  CHECK(integral_denominator(linear, Point{0.0}, two_atom(linear)) == 2.0);

  const ProblemDefinition shifted = simple_problem("1", "u1-2");
  CHECK_THROWS_AS(integral_denominator(shifted, Point{0.0}, degenerate(shifted.U, {1.0})),
                  DenominatorSignViolation);
  // near-zero integrals are rejected even when the sign is right
  CHECK_THROWS_AS(integral_denominator(shifted, Point{0.0}, degenerate(shifted.U, {2.0})),
                  DenominatorSignViolation);

  const ProblemDefinition negative = simple_problem("1", "-1", Sign::Negative);
  CHECK(integral_denominator(negative, Point{0.0}, two_atom(negative)) == -1.0);
}

TEST_CASE("functional value is the integral ratio") {
  const ProblemDefinition constant = simple_problem("2", "1");
  CHECK(functional_value(constant, Point{1.0}, two_atom(constant)) == 2.0);

  const ProblemDefinition mean = simple_problem("u1", "1");
  CHECK(functional_value(mean, Point{0.0}, two_atom(mean)) == 2.0);

  // (0.5*1 + 0.5*9) / (0.5*1 + 0.5*3) = 5/2
  const ProblemDefinition ratio = simple_problem("u1^2", "u1");
  CHECK(functional_value(ratio, Point{0.0}, two_atom(ratio)) == 2.5);
}

TEST_CASE("evaluation failures surface as EvaluationError") {
  const ProblemDefinition logp = simple_problem("log(u1 - 5)", "1");
  CHECK_THROWS_AS(integral_numerator(logp, Point{0.0}, degenerate(logp.U, {1.0})),
                  EvaluationError);
}

TEST_CASE("degenerate measures reproduce the pointwise ratio bit-exactly") {
  const ProblemDefinition p = simple_problem("alpha1*u1 + exp(-(u1))", "1 + u1^2");
  std::vector<double> scratch;
  for (int i = 0; i < 200; ++i) {
    const double alpha = -5.0 + 10.0 * i / 199.0;
    const double u = 10.0 * ((i * 29) % 200) / 199.0;
    const Point a{alpha}, uu{u};
    const double direct = evaluate_at(p.A, a, uu) / evaluate_at(p.B, a, uu);
    CHECK(functional_value(p, a, degenerate(p.U, uu)) == direct);
  }
}

TEST_CASE("mixture values stay inside the atom range of the test function") {
  const ProblemDefinition p = simple_problem("alpha1*u1 + u1^2", "1 + u1^2");
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const Point alpha{rng.uniform(-5.0, 5.0)};
    const MixtureMeasure psi = random_mixture(p.U, 1 + seed % 5, Rng::mix(seed, 17));
    const double value = functional_value(p, alpha, psi);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const Atom& atom : psi.atoms()) {
      const double c =
          evaluate_at(p.A, alpha, atom.point) / evaluate_at(p.B, alpha, atom.point);
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    CHECK(value >= lo - 1e-9);
    CHECK(value <= hi + 1e-9);
  }
}

TEST_CASE("consistent positive sign implies positive denominators") {
  const ProblemDefinition p = simple_problem("u1", "1 + u1^2");
  REQUIRE(check_sign_constancy(p, 1000, 1).consistent());
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const MixtureMeasure psi = random_mixture(p.U, 1 + seed % 4, seed);
    CHECK(integral_denominator(p, Point{0.0}, psi) > 0.0);
  }
}

TEST_CASE("sign check verdicts") {
  CHECK(check_sign_constancy(simple_problem("1", "1 + u1^2"), 1000, 0).consistent());
  CHECK(check_sign_constancy(simple_problem("1", "-1", Sign::Negative), 1000, 0).consistent());

  const SignReport bad = check_sign_constancy(simple_problem("1", "u1 - 5"), 1000, 0);
  REQUIRE_FALSE(bad.consistent());
  CHECK(bad.samples_checked == 1000);
  CHECK(bad.violations.size() > 100);  // roughly half the box violates
  for (const auto& v : bad.violations) CHECK(v.u[0] < 5.0 + 1e-9);

  // evaluation failures are recorded as violations, not thrown
  const SignReport failing = check_sign_constancy(simple_problem("1", "log(u1 - 20)"), 50, 0);
  CHECK_FALSE(failing.consistent());
  CHECK(failing.violations.size() == 50);
  CHECK(std::isnan(failing.violations.front().b_value));
}

TEST_CASE("sign check on finite control spaces") {
  const ProblemDefinition p =
      make_problem("finite", "u1", "u1", ParameterDomain::box({0.0}, {1.0}),
                   ControlSpace::finite({{1.0}, {2.0}, {3.0}}), Sign::Positive);
  CHECK(check_sign_constancy(p, 500, 3).consistent());

  const ProblemDefinition mixed =
      make_problem("finite", "u1", "u1 - 2", ParameterDomain::box({0.0}, {1.0}),
                   ControlSpace::finite({{1.0}, {3.0}}), Sign::Positive);
  CHECK_FALSE(check_sign_constancy(mixed, 500, 3).consistent());
}
