#include "lhsis/timefn.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <utility>

#include "format.hpp"
#include "lhsis/errors.hpp"

namespace lhsis {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

const char* function_name(Function fn) {
  switch (fn) {
    case Function::Sin: return "sin";
    case Function::Cos: return "cos";
    case Function::Exp: return "exp";
    case Function::Ln: return "ln";
    case Function::Abs: return "abs";
  }
  return "?";
}

std::optional<Function> function_from_name(std::string_view name) {
  if (name == "sin") return Function::Sin;
  if (name == "cos") return Function::Cos;
  if (name == "exp") return Function::Exp;
  if (name == "ln") return Function::Ln;
  if (name == "abs") return Function::Abs;
  return std::nullopt;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  ExprPtr parse() {
    skip_space();
    if (pos_ == src_.size()) throw ParseError("empty expression", pos_);
    ExprPtr e = parse_sum();
    skip_space();
    if (pos_ != src_.size()) {
      throw ParseError(std::string("unexpected '") + src_[pos_] + "'", pos_);
    }
    return e;
  }

 private:
  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  ExprPtr parse_sum() {
    ExprPtr lhs = parse_product();
    for (;;) {
      if (accept('+')) {
        lhs = make_binary(BinaryOp::Add, lhs, parse_product());
      } else if (accept('-')) {
        lhs = make_binary(BinaryOp::Sub, lhs, parse_product());
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_product() {
    ExprPtr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = make_binary(BinaryOp::Mul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = make_binary(BinaryOp::Div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_unary() {
    if (accept('-')) return make_unary(UnaryOp::Negate, parse_unary());
    if (accept('+')) return make_unary(UnaryOp::Plus, parse_unary());
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_primary();
    if (accept('^')) return make_binary(BinaryOp::Pow, base, parse_unary());
    return base;
  }

  ExprPtr parse_primary() {
    skip_space();
    if (pos_ == src_.size()) throw ParseError("unexpected end of expression", pos_);
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    if (c == '(') {
      ++pos_;
      ExprPtr inner = parse_sum();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return inner;
    }
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  ExprPtr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t mantissa = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) throw ParseError("malformed number", start);
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
        pos_ = look;
        digits();
      }
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
    if (ec != std::errc{} || ptr != src_.data() + pos_ || !std::isfinite(value)) {
      throw ParseError("malformed number", start);
    }
    return make_literal(value);
  }

  ExprPtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = src_.substr(start, pos_ - start);
    if (name == "t") return make_variable();
    const auto fn = function_from_name(name);
    if (!fn) throw ParseError("unknown identifier '" + std::string(name) + "'", start);
    skip_space();
    if (pos_ == src_.size() || src_[pos_] != '(') {
      throw ParseError("expected '(' after " + std::string(name), pos_);
    }
    ++pos_;
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == ')') {
      throw ParseError("arity mismatch: " + std::string(name) + " takes 1 argument, got 0", pos_);
    }
    ExprPtr arg = parse_sum();
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == ',') {
      throw ParseError("arity mismatch: " + std::string(name) + " takes 1 argument", pos_);
    }
    if (!accept(')')) throw ParseError("expected ')'", pos_);
    return make_call(*fn, std::move(arg));
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

// Binding strength used by the printer; mirrors the grammar levels.
int precedence(const ExprNode& e) {
  return std::visit(Overloaded{
                        [](const ExprNode::Binary& b) {
                          switch (b.op) {
                            case BinaryOp::Add:
                            case BinaryOp::Sub: return 1;
                            case BinaryOp::Mul:
                            case BinaryOp::Div: return 2;
                            case BinaryOp::Pow: return 4;
                          }
                          return 0;
                        },
                        [](const ExprNode::Unary&) { return 3; },
                        [](const auto&) { return 5; },
                    },
                    e.node);
}

void print(const ExprNode& e, std::string& out);

void print_wrapped(const ExprNode& e, bool wrap, std::string& out) {
  if (wrap) out += '(';
  print(e, out);
  if (wrap) out += ')';
}

void print(const ExprNode& e, std::string& out) {
  std::visit(Overloaded{
                 [&](const ExprNode::Literal& l) {
                   char buf[64];
                   const auto res = std::to_chars(buf, buf + sizeof buf, l.value);
                   out.append(buf, res.ptr);
                 },
                 [&](const ExprNode::Variable&) { out += 't'; },
                 [&](const ExprNode::Unary& u) {
                   out += u.op == UnaryOp::Negate ? '-' : '+';
                   print_wrapped(*u.operand, precedence(*u.operand) < 3, out);
                 },
                 [&](const ExprNode::Binary& b) {
                   const int p = precedence(e);
                   const int lp = precedence(*b.lhs);
                   const int rp = precedence(*b.rhs);
                   if (b.op == BinaryOp::Pow) {
                     print_wrapped(*b.lhs, lp <= p, out);
                     out += '^';
                     print_wrapped(*b.rhs, rp < 3, out);
                     return;
                   }
                   print_wrapped(*b.lhs, lp < p, out);
                   switch (b.op) {
                     case BinaryOp::Add: out += " + "; break;
                     case BinaryOp::Sub: out += " - "; break;
                     case BinaryOp::Mul: out += '*'; break;
                     case BinaryOp::Div: out += '/'; break;
                     case BinaryOp::Pow: break;
                   }
                   print_wrapped(*b.rhs, rp <= p, out);
                 },
                 [&](const ExprNode::Call& c) {
                   out += function_name(c.fn);
                   out += '(';
                   print(*c.arg, out);
                   out += ')';
                 },
             },
             e.node);
}

using detail::format_double;

[[noreturn]] void throw_domain(const std::string& what, const ExprNode& sub, double t) {
  throw DomainError(what + " in '" + to_string(sub) + "' at t=" + format_double(t), t);
}

double checked(double value, const ExprNode& sub, double t) {
  if (!std::isfinite(value)) throw_domain("non-finite value", sub, t);
  return value;
}

}  // namespace

ExprPtr make_literal(double value) {
  return std::make_shared<const ExprNode>(ExprNode{ExprNode::Literal{value}});
}

ExprPtr make_number(double v) {
  if (std::signbit(v)) return make_unary(UnaryOp::Negate, make_literal(-v));
  return make_literal(v);
}

ExprPtr make_variable() { return std::make_shared<const ExprNode>(ExprNode{ExprNode::Variable{}}); }

ExprPtr make_unary(UnaryOp op, ExprPtr operand) {
  return std::make_shared<const ExprNode>(ExprNode{ExprNode::Unary{op, std::move(operand)}});
}

ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs) {
  return std::make_shared<const ExprNode>(
      ExprNode{ExprNode::Binary{op, std::move(lhs), std::move(rhs)}});
}

ExprPtr make_call(Function fn, ExprPtr arg) {
  return std::make_shared<const ExprNode>(ExprNode{ExprNode::Call{fn, std::move(arg)}});
}

ExprPtr parse_expression(std::string_view source) { return Parser(source).parse(); }

std::string to_string(const ExprNode& expr) {
  std::string out;
  print(expr, out);
  return out;
}

bool structurally_equal(const ExprNode& a, const ExprNode& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      Overloaded{
          [&](const ExprNode::Literal& l) {
            return l.value == std::get<ExprNode::Literal>(b.node).value;
          },
          [](const ExprNode::Variable&) { return true; },
          [&](const ExprNode::Unary& u) {
            const auto& v = std::get<ExprNode::Unary>(b.node);
            return u.op == v.op && structurally_equal(*u.operand, *v.operand);
          },
          [&](const ExprNode::Binary& x) {
            const auto& y = std::get<ExprNode::Binary>(b.node);
            return x.op == y.op && structurally_equal(*x.lhs, *y.lhs) &&
                   structurally_equal(*x.rhs, *y.rhs);
          },
          [&](const ExprNode::Call& c) {
            const auto& d = std::get<ExprNode::Call>(b.node);
            return c.fn == d.fn && structurally_equal(*c.arg, *d.arg);
          },
      },
      a.node);
}

bool depends_on_t(const ExprNode& expr) {
  return std::visit(Overloaded{
                        [](const ExprNode::Literal&) { return false; },
                        [](const ExprNode::Variable&) { return true; },
                        [](const ExprNode::Unary& u) { return depends_on_t(*u.operand); },
                        [](const ExprNode::Binary& b) {
                          return depends_on_t(*b.lhs) || depends_on_t(*b.rhs);
                        },
                        [](const ExprNode::Call& c) { return depends_on_t(*c.arg); },
                    },
                    expr.node);
}

double evaluate(const ExprNode& expr, double t) {
  return std::visit(
      Overloaded{
          [](const ExprNode::Literal& l) { return l.value; },
          [&](const ExprNode::Variable&) { return checked(t, expr, t); },
          [&](const ExprNode::Unary& u) {
            const double v = evaluate(*u.operand, t);
            return u.op == UnaryOp::Negate ? -v : v;
          },
          [&](const ExprNode::Binary& b) {
            const double l = evaluate(*b.lhs, t);
            const double r = evaluate(*b.rhs, t);
            switch (b.op) {
              case BinaryOp::Add: return checked(l + r, expr, t);
              case BinaryOp::Sub: return checked(l - r, expr, t);
              case BinaryOp::Mul: return checked(l * r, expr, t);
              case BinaryOp::Div: return checked(l / r, expr, t);
              case BinaryOp::Pow: return checked(std::pow(l, r), expr, t);
            }
            return 0.0;
          },
          [&](const ExprNode::Call& c) {
            const double v = evaluate(*c.arg, t);
            switch (c.fn) {
              case Function::Sin: return checked(std::sin(v), expr, t);
              case Function::Cos: return checked(std::cos(v), expr, t);
              case Function::Exp: return checked(std::exp(v), expr, t);
              case Function::Ln:
                if (!(v > 0.0)) {
                  throw_domain("ln of non-positive argument " + format_double(v), expr, t);
                }
                return std::log(v);
              case Function::Abs: return std::abs(v);
            }
            return 0.0;
          },
      },
      expr.node);
}

CoefficientFunction::CoefficientFunction(Definition definition,
                                         std::optional<Interval> domain_hint)
    : definition_(std::move(definition)), domain_hint_(domain_hint) {
  if (const auto* e = std::get_if<ExprPtr>(&definition_); e && !*e) {
    throw Error("coefficient expression is null");
  }
}

CoefficientFunction CoefficientFunction::constant(double value) {
  return CoefficientFunction(ConstantFamily{value});
}

CoefficientFunction CoefficientFunction::linear(double slope, double intercept) {
  return CoefficientFunction(LinearFamily{slope, intercept});
}

CoefficientFunction CoefficientFunction::sinusoidal(double mean, double amplitude,
                                                    double frequency, double phase) {
  return CoefficientFunction(SinusoidalFamily{mean, amplitude, frequency, phase});
}

CoefficientFunction CoefficientFunction::parse(std::string_view source,
                                               std::optional<Interval> domain_hint) {
  return CoefficientFunction(parse_expression(source), domain_hint);
}

double CoefficientFunction::operator()(double t) const {
  if (domain_hint_ && !domain_hint_->contains(t)) {
    throw DomainError("t=" + format_double(t) + " outside the domain hint [" +
                          format_double(domain_hint_->lo) + ", " +
                          format_double(domain_hint_->hi) + "] of " + describe(),
                      t);
  }
  return std::visit(Overloaded{
                        [](const ConstantFamily& c) { return c.value; },
                        [t](const LinearFamily& l) { return l.slope * t + l.intercept; },
                        [t](const SinusoidalFamily& s) {
                          return s.mean * (1.0 + s.amplitude * std::sin(s.frequency * t + s.phase));
                        },
                        [t](const ExprPtr& e) { return evaluate(*e, t); },
                    },
                    definition_);
}

ExprPtr CoefficientFunction::to_expression() const {
  return std::visit(
      Overloaded{
          [](const ConstantFamily& c) { return make_number(c.value); },
          [](const LinearFamily& l) {
            return make_binary(BinaryOp::Add,
                               make_binary(BinaryOp::Mul, make_number(l.slope), make_variable()),
                               make_number(l.intercept));
          },
          [](const SinusoidalFamily& s) {
            auto arg = make_binary(
                BinaryOp::Add,
                make_binary(BinaryOp::Mul, make_number(s.frequency), make_variable()),
                make_number(s.phase));
            auto wave = make_binary(BinaryOp::Mul, make_number(s.amplitude),
                                    make_call(Function::Sin, std::move(arg)));
            return make_binary(
                BinaryOp::Mul, make_number(s.mean),
                make_binary(BinaryOp::Add, make_literal(1.0), std::move(wave)));
          },
          [](const ExprPtr& e) { return e; },
      },
      definition_);
}

bool CoefficientFunction::is_constant() const {
  if (std::holds_alternative<ConstantFamily>(definition_)) return true;
  if (const auto* e = std::get_if<ExprPtr>(&definition_)) return !depends_on_t(**e);
  return false;
}

std::string CoefficientFunction::describe() const { return to_string(*to_expression()); }

}  // namespace lhsis
