#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "fracopt/expr.hpp"
#include "support/oracle_interp.hpp"

using namespace fracopt;

namespace {

const std::vector<std::string> kVars = {"alpha1", "u1"};

double eval_text(const std::string& text, std::map<std::string, double> binding) {
  return evaluate(parse_expression(text, kVars), binding);
}

}  // namespace

TEST_CASE("literal parses to a single constant node") {
  const ExpressionAst ast = parse_expression("2", kVars);
  REQUIRE(ast.nodes().size() == 1);
  CHECK(ast.nodes()[0].kind == NodeKind::Constant);
  CHECK(ast.nodes()[0].value == 2.0);
}

TEST_CASE("polynomial in two variables") {
  const ExpressionAst ast = parse_expression("alpha1*u1 + u1^2", kVars);
  CHECK(ast.nodes().back().kind == NodeKind::Add);
  CHECK(evaluate(ast, {{"alpha1", 0.0}, {"u1", 0.0}}) == 0.0);
  CHECK(evaluate(ast, {{"alpha1", 2.0}, {"u1", 3.0}}) == 15.0);
}

TEST_CASE("syntax error reports the offending offset") {
  try {
    parse_expression("u1 + * 2", kVars);
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.offset() == 5);
  }
}

TEST_CASE("undeclared identifiers are rejected") {
  CHECK_THROWS_AS(parse_expression("x + 1", kVars), UnknownVariableError);
  CHECK_THROWS_AS(parse_expression("alpha2", kVars), UnknownVariableError);
}

TEST_CASE("parse rejects malformed input") {
  CHECK_THROWS_AS(parse_expression("", kVars), SyntaxError);
  CHECK_THROWS_AS(parse_expression("(u1", kVars), SyntaxError);
  CHECK_THROWS_AS(parse_expression("u1)", kVars), SyntaxError);
  CHECK_THROWS_AS(parse_expression("min(u1)", kVars), SyntaxError);       // arity
  CHECK_THROWS_AS(parse_expression("exp(u1, u1)", kVars), SyntaxError);   // arity
  CHECK_THROWS_AS(parse_expression("foo(u1)", kVars), SyntaxError);       // unknown function
  CHECK_THROWS_AS(parse_expression("u1 @ 2", kVars), SyntaxError);
}

TEST_CASE("evaluation basics") {
  CHECK(eval_text("exp(u1)", {{"u1", 0.0}}) == 1.0);
  CHECK(eval_text("alpha1*u1", {{"alpha1", 2.0}, {"u1", 3.0}}) == 6.0);
  CHECK(eval_text("min(1+2, 2*3)", {}) == 3.0);
  CHECK(eval_text("max(1+2, 2*3)", {}) == 6.0);
  CHECK(eval_text("abs(-(u1))", {{"u1", 4.0}}) == 4.0);
}

TEST_CASE("standard precedence and associativity") {
  CHECK(eval_text("2+3*4^2", {}) == 50.0);
  CHECK(eval_text("2^3^2", {}) == 512.0);   // right associative
  CHECK(eval_text("-2^2", {}) == -4.0);     // unary minus binds looser than ^
  CHECK(eval_text("2-3-4", {}) == -5.0);    // left associative
  CHECK(eval_text("16/4/2", {}) == 2.0);
  CHECK(eval_text("2^-1", {}) == 0.5);
}

TEST_CASE("domain failures throw instead of producing NaN or Inf") {
  CHECK_THROWS_AS(eval_text("1/(u1-1)", {{"u1", 1.0}}), DomainError);
  CHECK_THROWS_AS(eval_text("log(u1)", {{"u1", -1.0}}), DomainError);
  CHECK_THROWS_AS(eval_text("log(u1)", {{"u1", 0.0}}), DomainError);
  CHECK_THROWS_AS(eval_text("sqrt(u1)", {{"u1", -4.0}}), DomainError);
  CHECK_THROWS_AS(eval_text("exp(u1)", {{"u1", 1e6}}), DomainError);       // overflow
  CHECK_THROWS_AS(eval_text("u1^u1", {{"u1", -0.5}}), DomainError);        // pow -> NaN
}

TEST_CASE("missing bindings are an error, unused variables need none") {
  const ExpressionAst ast = parse_expression("u1 + 1", kVars);
  CHECK(evaluate(ast, {{"u1", 1.0}}) == 2.0);  // alpha1 unused
  CHECK_THROWS_AS(evaluate(ast, std::map<std::string, double>{{"alpha1", 1.0}}),
                  EvaluationError);
}

TEST_CASE("print/parse round-trip is structurally exact") {
  const std::vector<std::string> fixed = {
      "2",
      "alpha1*u1 + u1^2",
      "-(alpha1 + u1)*u1",
      "2^3^2",
      "-2^2",
      "(alpha1 + 1)/(u1 - 2)",
      "min(alpha1, max(u1, 1))",
      "exp(-(u1^alpha1))",
      "1 - 2 - 3",
      "2^-1",
      "--u1",
  };
  for (const std::string& text : fixed) {
    const ExpressionAst ast = parse_expression(text, kVars);
    const ExpressionAst reparsed = parse_expression(to_string(ast), kVars);
    INFO(text << "  ->  " << to_string(ast));
    CHECK(structurally_equal(ast, reparsed));
  }

  Rng rng(2024);
  for (int i = 0; i < 500; ++i) {
    const std::string text = testsupport::random_expression_text(rng, kVars, 5);
    const ExpressionAst ast = parse_expression(text, kVars);
    const ExpressionAst reparsed = parse_expression(to_string(ast), kVars);
    INFO(text << "  ->  " << to_string(ast));
    REQUIRE(structurally_equal(ast, reparsed));
  }
}

TEST_CASE("evaluator agrees bit-exactly with the reference interpreter") {
  Rng rng(99);
  int evaluated = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::string text = testsupport::random_expression_text(rng, kVars, 5);
    const ExpressionAst ast = parse_expression(text, kVars);
    const std::map<std::string, double> binding = {{"alpha1", rng.uniform(-2.0, 2.0)},
                                                   {"u1", rng.uniform(-2.0, 2.0)}};
    bool lib_threw = false, oracle_threw = false;
    double lib = 0.0, oracle = 0.0;
    try {
      lib = evaluate(ast, binding);
    } catch (const DomainError&) {
      lib_threw = true;
    }
    try {
      oracle = testsupport::oracle_eval(ast, binding);
    } catch (const DomainError&) {
      oracle_threw = true;
    }
    INFO(text);
    REQUIRE(lib_threw == oracle_threw);
    if (!lib_threw) {
      REQUIRE(lib == oracle);
      ++evaluated;
    }
  }
  CHECK(evaluated > 300);  // most random expressions evaluate cleanly
}

TEST_CASE("the parser survives byte soup with typed errors") {
  Rng rng(31337);
  const std::string alphabet = "alpha1u ()+-*/^.,0123456789eE_xminmaxsqrtlogbs";
  for (int i = 0; i < 2000; ++i) {
    std::string text;
    const std::size_t len = 1 + rng.uniform_index(24);
    for (std::size_t j = 0; j < len; ++j) text += alphabet[rng.uniform_index(alphabet.size())];
    try {
      const ExpressionAst ast = parse_expression(text, kVars);
      CHECK(ast.root() >= 0);  // parsed: tree must be well formed
    } catch (const SyntaxError&) {
    } catch (const UnknownVariableError&) {
    }
  }
}

TEST_CASE("evaluation is pure: repeated calls agree bit-exactly") {
  const ExpressionAst ast = parse_expression("sin(alpha1)*exp(u1) + sqrt(abs(u1))", kVars);
  const std::map<std::string, double> binding = {{"alpha1", 0.7}, {"u1", -1.3}};
  const double first = evaluate(ast, binding);
  for (int i = 0; i < 10; ++i) CHECK(evaluate(ast, binding) == first);
}
