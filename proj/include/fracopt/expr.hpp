#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <charconv>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fracopt/errors.hpp"

namespace fracopt {

/// Node kinds of the closed expression language.
///
/// Grammar (EBNF, see docs/expressions.md):
///   expression := term (('+' | '-') term)*
///   term       := factor (('*' | '/') factor)*
///   factor     := '-' factor | power
///   power      := primary ('^' factor)?          -- right associative
///   primary    := number | variable | call | '(' expression ')'
///   call       := name '(' expression (',' expression)* ')'
///
/// Calls: exp, log, sqrt, abs, sin, cos (one argument); min, max (two).
enum class NodeKind : std::uint8_t {
  Constant,
  Variable,
  Neg,
  Exp,
  Log,
  Sqrt,
  Abs,
  Sin,
  Cos,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
  Min,
  Max,
};

inline bool is_unary(NodeKind k) {
  return k == NodeKind::Neg || k == NodeKind::Exp || k == NodeKind::Log || k == NodeKind::Sqrt ||
         k == NodeKind::Abs || k == NodeKind::Sin || k == NodeKind::Cos;
}

inline bool is_binary(NodeKind k) {
  return k == NodeKind::Add || k == NodeKind::Sub || k == NodeKind::Mul || k == NodeKind::Div ||
         k == NodeKind::Pow || k == NodeKind::Min || k == NodeKind::Max;
}

struct AstNode {
  NodeKind kind = NodeKind::Constant;
  double value = 0.0;       // Constant payload
  std::int32_t slot = -1;   // Variable payload: index into the binding vector
  std::int32_t lhs = -1;    // child (unary: the only child)
  std::int32_t rhs = -1;
};

namespace detail {
class Parser;
}

/// Immutable expression tree. Nodes are stored in evaluation order: every
/// child index is smaller than its parent's, so a single forward pass
/// evaluates the whole tree. Safe to share across threads after parse.
class ExpressionAst {
 public:
  const std::vector<AstNode>& nodes() const { return nodes_; }
  std::int32_t root() const { return root_; }

  /// Declared variable names, in binding order.
  const std::vector<std::string>& variables() const { return vars_; }

  bool uses_variable(std::size_t slot) const { return used_.at(slot); }

 private:
  friend ExpressionAst parse_expression(std::string_view, const std::vector<std::string>&);
  friend class detail::Parser;

  std::vector<AstNode> nodes_;
  std::int32_t root_ = -1;
  std::vector<std::string> vars_;
  std::vector<bool> used_;
};

namespace detail {

struct Token {
  enum Kind { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End } kind;
  std::size_t offset = 0;
  double number = 0.0;
  std::string_view text;
};

inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < src.size()) {
    const char c = src[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    if ((c >= '0' && c <= '9') || c == '.') {
      double value = 0.0;
      const char* begin = src.data() + i;
      const char* end = src.data() + src.size();
      auto [ptr, ec] = std::from_chars(begin, end, value);
      if (ec != std::errc() || ptr == begin) throw SyntaxError("malformed number", i);
      out.push_back({Token::Number, i, value, src.substr(i, ptr - begin)});
      i += static_cast<std::size_t>(ptr - begin);
      continue;
    }
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') {
      std::size_t j = i + 1;
      while (j < src.size() && ((src[j] >= 'a' && src[j] <= 'z') || (src[j] >= 'A' && src[j] <= 'Z') ||
                                (src[j] >= '0' && src[j] <= '9') || src[j] == '_'))
        ++j;
      out.push_back({Token::Ident, i, 0.0, src.substr(i, j - i)});
      i = j;
      continue;
    }
    Token::Kind kind;
    switch (c) {
      case '+': kind = Token::Plus; break;
      case '-': kind = Token::Minus; break;
      case '*': kind = Token::Star; break;
      case '/': kind = Token::Slash; break;
      case '^': kind = Token::Caret; break;
      case '(': kind = Token::LParen; break;
      case ')': kind = Token::RParen; break;
      case ',': kind = Token::Comma; break;
      default: throw SyntaxError(std::string("unexpected character '") + c + "'", i);
    }
    out.push_back({kind, i, 0.0, src.substr(i, 1)});
    ++i;
  }
  out.push_back({Token::End, src.size(), 0.0, {}});
  return out;
}

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& vars, ExpressionAst& out)
      : toks_(tokenize(text)), vars_(vars), out_(out) {}

  void run() {
    out_.root_ = expression();
    if (peek().kind != Token::End) throw SyntaxError("unexpected token after expression", peek().offset);
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  Token take() { return toks_[pos_++]; }

  std::int32_t add(AstNode n) {
    out_.nodes_.push_back(n);
    return static_cast<std::int32_t>(out_.nodes_.size() - 1);
  }

  std::int32_t expression() {
    std::int32_t lhs = term();
    while (peek().kind == Token::Plus || peek().kind == Token::Minus) {
      const NodeKind op = take().kind == Token::Plus ? NodeKind::Add : NodeKind::Sub;
      const std::int32_t rhs = term();
      lhs = add({op, 0.0, -1, lhs, rhs});
    }
    return lhs;
  }

  std::int32_t term() {
    std::int32_t lhs = factor();
    while (peek().kind == Token::Star || peek().kind == Token::Slash) {
      const NodeKind op = take().kind == Token::Star ? NodeKind::Mul : NodeKind::Div;
      const std::int32_t rhs = factor();
      lhs = add({op, 0.0, -1, lhs, rhs});
    }
    return lhs;
  }

  std::int32_t factor() {
    if (peek().kind == Token::Minus) {
      take();
      const std::int32_t child = factor();
      return add({NodeKind::Neg, 0.0, -1, child, -1});
    }
    return power();
  }

  std::int32_t power() {
    const std::int32_t base = primary();
    if (peek().kind == Token::Caret) {
      take();
      const std::int32_t exponent = factor();  // right associative, allows 2^-3
      return add({NodeKind::Pow, 0.0, -1, base, exponent});
    }
    return base;
  }

  std::int32_t primary() {
    const Token tok = take();
    switch (tok.kind) {
      case Token::Number:
        return add({NodeKind::Constant, tok.number, -1, -1, -1});
      case Token::LParen: {
        const std::int32_t inner = expression();
        expect(Token::RParen, "expected ')'");
        return inner;
      }
      case Token::Ident:
        if (peek().kind == Token::LParen) return call(tok);
        return variable(tok);
      default:
        throw SyntaxError("expected a number, variable, or '('", tok.offset);
    }
  }

  std::int32_t call(const Token& name) {
    struct Fn {
      std::string_view name;
      NodeKind kind;
      int arity;
    };
    static constexpr Fn kFunctions[] = {
        {"exp", NodeKind::Exp, 1}, {"log", NodeKind::Log, 1}, {"sqrt", NodeKind::Sqrt, 1},
        {"abs", NodeKind::Abs, 1}, {"sin", NodeKind::Sin, 1}, {"cos", NodeKind::Cos, 1},
        {"min", NodeKind::Min, 2}, {"max", NodeKind::Max, 2},
    };
    const Fn* fn = nullptr;
    for (const Fn& f : kFunctions)
      if (f.name == name.text) fn = &f;
    if (fn == nullptr)
      throw SyntaxError("unknown function '" + std::string(name.text) + "'", name.offset);

    expect(Token::LParen, "expected '('");
    std::vector<std::int32_t> args;
    args.push_back(expression());
    while (peek().kind == Token::Comma) {
      take();
      args.push_back(expression());
    }
    expect(Token::RParen, "expected ')' or ','");
    if (static_cast<int>(args.size()) != fn->arity)
      throw SyntaxError("function '" + std::string(name.text) + "' takes " +
                            std::to_string(fn->arity) + " argument(s)",
                        name.offset);
    if (fn->arity == 1) return add({fn->kind, 0.0, -1, args[0], -1});
    return add({fn->kind, 0.0, -1, args[0], args[1]});
  }

  std::int32_t variable(const Token& tok) {
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (vars_[i] == tok.text) {
        out_.used_[i] = true;
        return add({NodeKind::Variable, 0.0, static_cast<std::int32_t>(i), -1, -1});
      }
    }
    throw UnknownVariableError(std::string(tok.text), tok.offset);
  }

  void expect(Token::Kind kind, const char* message) {
    if (peek().kind != kind) throw SyntaxError(message, peek().offset);
    ++pos_;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const std::vector<std::string>& vars_;
  ExpressionAst& out_;
};

inline double apply_unary(NodeKind kind, double x) {
  switch (kind) {
    case NodeKind::Neg: return -x;
    case NodeKind::Exp: return std::exp(x);
    case NodeKind::Log:
      if (x <= 0.0) throw DomainError("log of non-positive argument");
      return std::log(x);
    case NodeKind::Sqrt:
      if (x < 0.0) throw DomainError("sqrt of negative argument");
      return std::sqrt(x);
    case NodeKind::Abs: return std::fabs(x);
    case NodeKind::Sin: return std::sin(x);
    case NodeKind::Cos: return std::cos(x);
    default: throw Error("not a unary node");
  }
}

inline double apply_binary(NodeKind kind, double a, double b) {
  switch (kind) {
    case NodeKind::Add: return a + b;
    case NodeKind::Sub: return a - b;
    case NodeKind::Mul: return a * b;
    case NodeKind::Div:
      if (b == 0.0) throw DomainError("division by zero");
      return a / b;
    case NodeKind::Pow: return std::pow(a, b);
    case NodeKind::Min: return std::fmin(a, b);
    case NodeKind::Max: return std::fmax(a, b);
    default: throw Error("not a binary node");
  }
}

}  // namespace detail

/// Parses `text` against the declared variable list. Throws SyntaxError or
/// UnknownVariableError; never returns a partially built tree.
inline ExpressionAst parse_expression(std::string_view text, const std::vector<std::string>& vars) {
  if (text.empty()) throw SyntaxError("empty expression", 0);
  ExpressionAst ast;
  ast.vars_ = vars;
  ast.used_.assign(vars.size(), false);
  detail::Parser(text, vars, ast).run();
  return ast;
}

/// Evaluates with a caller-owned scratch buffer (resized as needed). The hot
/// path for solvers; bit-identical to the plain overloads.
inline double evaluate(const ExpressionAst& ast, std::span<const double> binding,
                       std::vector<double>& scratch) {
  const auto& nodes = ast.nodes();
  scratch.resize(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const AstNode& n = nodes[i];
    double v;
    switch (n.kind) {
      case NodeKind::Constant:
        v = n.value;
        break;
      case NodeKind::Variable:
        v = binding[static_cast<std::size_t>(n.slot)];
        break;
      default:
        v = is_unary(n.kind) ? detail::apply_unary(n.kind, scratch[n.lhs])
                             : detail::apply_binary(n.kind, scratch[n.lhs], scratch[n.rhs]);
        break;
    }
    if (!std::isfinite(v)) throw DomainError("non-finite value in evaluation");
    scratch[i] = v;
  }
  return scratch[ast.root()];
}

inline double evaluate(const ExpressionAst& ast, std::span<const double> binding) {
  std::vector<double> scratch;
  return evaluate(ast, binding, scratch);
}

/// Map-based evaluation; the binding must cover every variable the
/// expression actually uses.
inline double evaluate(const ExpressionAst& ast, const std::map<std::string, double>& binding) {
  std::vector<double> slots(ast.variables().size(), 0.0);
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const auto it = binding.find(ast.variables()[i]);
    if (it != binding.end()) {
      slots[i] = it->second;
    } else if (ast.uses_variable(i)) {
      throw EvaluationError("missing binding for variable '" + ast.variables()[i] + "'");
    }
  }
  return evaluate(ast, slots);
}

/// %.17g: shortest fixed formatting that round-trips a double exactly.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace detail {

inline int precedence(NodeKind kind) {
  switch (kind) {
    case NodeKind::Add:
    case NodeKind::Sub: return 1;
    case NodeKind::Mul:
    case NodeKind::Div: return 2;
    case NodeKind::Neg: return 3;
    case NodeKind::Pow: return 4;
    default: return 5;  // atoms and calls
  }
}

inline void print_node(const ExpressionAst& ast, std::int32_t idx, std::string& out);

inline void print_child(const ExpressionAst& ast, std::int32_t idx, bool parens, std::string& out) {
  if (parens) out += '(';
  print_node(ast, idx, out);
  if (parens) out += ')';
}

inline void print_node(const ExpressionAst& ast, std::int32_t idx, std::string& out) {
  const AstNode& n = ast.nodes()[idx];
  const auto prec = [&](std::int32_t child) { return precedence(ast.nodes()[child].kind); };
  switch (n.kind) {
    case NodeKind::Constant:
      out += format_double(n.value);
      return;
    case NodeKind::Variable:
      out += ast.variables()[static_cast<std::size_t>(n.slot)];
      return;
    case NodeKind::Neg:
      out += '-';
      print_child(ast, n.lhs, prec(n.lhs) <= 2, out);
      return;
    case NodeKind::Exp:
    case NodeKind::Log:
    case NodeKind::Sqrt:
    case NodeKind::Abs:
    case NodeKind::Sin:
    case NodeKind::Cos: {
      static constexpr std::string_view names[] = {"exp", "log", "sqrt", "abs", "sin", "cos"};
      out += names[static_cast<int>(n.kind) - static_cast<int>(NodeKind::Exp)];
      out += '(';
      print_node(ast, n.lhs, out);
      out += ')';
      return;
    }
    case NodeKind::Min:
    case NodeKind::Max:
      out += n.kind == NodeKind::Min ? "min(" : "max(";
      print_node(ast, n.lhs, out);
      out += ", ";
      print_node(ast, n.rhs, out);
      out += ')';
      return;
    case NodeKind::Add:
    case NodeKind::Sub:
      print_child(ast, n.lhs, prec(n.lhs) < 1, out);
      out += n.kind == NodeKind::Add ? " + " : " - ";
      print_child(ast, n.rhs, prec(n.rhs) <= 1, out);
      return;
    case NodeKind::Mul:
    case NodeKind::Div:
      print_child(ast, n.lhs, prec(n.lhs) < 2, out);
      out += n.kind == NodeKind::Mul ? "*" : "/";
      print_child(ast, n.rhs, prec(n.rhs) <= 2, out);
      return;
    case NodeKind::Pow:
      print_child(ast, n.lhs, prec(n.lhs) < 5, out);
      out += '^';
      print_child(ast, n.rhs, prec(n.rhs) <= 2, out);
      return;
  }
}

inline bool nodes_equal(const ExpressionAst& a, std::int32_t ia, const ExpressionAst& b,
                        std::int32_t ib) {
  const AstNode& na = a.nodes()[ia];
  const AstNode& nb = b.nodes()[ib];
  if (na.kind != nb.kind) return false;
  switch (na.kind) {
    case NodeKind::Constant: return na.value == nb.value;
    case NodeKind::Variable: return na.slot == nb.slot;
    default:
      if (is_unary(na.kind)) return nodes_equal(a, na.lhs, b, nb.lhs);
      return nodes_equal(a, na.lhs, b, nb.lhs) && nodes_equal(a, na.rhs, b, nb.rhs);
  }
}

}  // namespace detail

/// Prints with minimal parentheses; reparsing yields a structurally
/// identical tree for any parse-produced AST.
inline std::string to_string(const ExpressionAst& ast) {
  std::string out;
  detail::print_node(ast, ast.root(), out);
  return out;
}

inline bool structurally_equal(const ExpressionAst& a, const ExpressionAst& b) {
  if (a.variables() != b.variables()) return false;
  return detail::nodes_equal(a, a.root(), b, b.root());
}

}  // namespace fracopt
