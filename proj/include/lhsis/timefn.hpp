#pragma once

// Time-dependent coefficient functions b_A(t), b_B(t), rho0(t), b(t).
//
// A coefficient is either one of a few builtin families or an expression over
// the single variable `t`. The expression grammar is closed:
//
//   expr    := term   (('+' | '-') term)*
//   term    := unary  (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?          right-associative
//   primary := number | 't' | func '(' expr ')' | '(' expr ')'
//   func    := sin | cos | exp | ln | abs
//
// Quadrature over these functions assumes piecewise smoothness. Expressions
// such as abs(sin(t)) are accepted, but kinks and jumps cost extra panels and
// a jump in a coefficient is the caller's responsibility.

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace lhsis {

enum class UnaryOp { Negate, Plus };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class Function { Sin, Cos, Exp, Ln, Abs };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

/// Immutable expression tree node. Literals are always non-negative; a
/// negative constant is Negate(Literal).
struct ExprNode {
  struct Literal {
    double value;
  };
  struct Variable {};
  struct Unary {
    UnaryOp op;
    ExprPtr operand;
  };
  struct Binary {
    BinaryOp op;
    ExprPtr lhs;
    ExprPtr rhs;
  };
  struct Call {
    Function fn;
    ExprPtr arg;
  };

  std::variant<Literal, Variable, Unary, Binary, Call> node;
};

ExprPtr make_literal(double value);
/// Literal for v >= 0, Negate(Literal(-v)) otherwise.
ExprPtr make_number(double v);
ExprPtr make_variable();
ExprPtr make_unary(UnaryOp op, ExprPtr operand);
ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs);
ExprPtr make_call(Function fn, ExprPtr arg);

/// Parses `source`. Throws ParseError (syntax error, unknown identifier,
/// arity mismatch) carrying the byte offset of the problem.
ExprPtr parse_expression(std::string_view source);

/// Minimal-parenthesis rendering that parses back to the same tree.
std::string to_string(const ExprNode& expr);

bool structurally_equal(const ExprNode& a, const ExprNode& b);
bool depends_on_t(const ExprNode& expr);

/// Evaluates at t. Throws DomainError naming t and the offending
/// subexpression for ln of a non-positive argument or a non-finite result.
double evaluate(const ExprNode& expr, double t);

struct Interval {
  double lo;
  double hi;

  bool contains(double t) const { return lo <= t && t <= hi; }
};

/// f(t) = value
struct ConstantFamily {
  double value;
};

/// f(t) = slope * t + intercept
struct LinearFamily {
  double slope;
  double intercept;
};

/// f(t) = mean * (1 + amplitude * sin(frequency * t + phase))
struct SinusoidalFamily {
  double mean;
  double amplitude;
  double frequency;
  double phase;
};

/// A real function of time. Immutable after construction and cheap to copy;
/// copies share the expression tree.
class CoefficientFunction {
 public:
  using Definition =
      std::variant<ConstantFamily, LinearFamily, SinusoidalFamily, ExprPtr>;

  CoefficientFunction() : CoefficientFunction(ConstantFamily{0.0}) {}
  CoefficientFunction(Definition definition,
                      std::optional<Interval> domain_hint = std::nullopt);

  static CoefficientFunction constant(double value);
  static CoefficientFunction linear(double slope, double intercept);
  static CoefficientFunction sinusoidal(double mean, double amplitude,
                                        double frequency, double phase);
  static CoefficientFunction parse(std::string_view source,
                                   std::optional<Interval> domain_hint = std::nullopt);

  /// Value at t. Throws DomainError outside the domain hint or when the
  /// expression leaves its domain.
  double operator()(double t) const;

  const Definition& definition() const { return definition_; }
  const std::optional<Interval>& domain_hint() const { return domain_hint_; }

  /// Expression tree computing the same value (bit-identical for builtins).
  ExprPtr to_expression() const;
  bool is_constant() const;
  std::string describe() const;

 private:
  Definition definition_;
  std::optional<Interval> domain_hint_;
};

}  // namespace lhsis
