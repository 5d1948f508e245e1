#include "growthlab/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "growthlab/errors.hpp"

namespace growthlab {

namespace {

enum class Op { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Exp, Log, Log1p, Sqrt, Abs };

}  // namespace

struct Expression::Node {
  Op op;
  double value = 0.0;  // Op::Const
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr make_node(Op op, NodePtr a = nullptr, NodePtr b = nullptr, double v = 0.0) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->value = v;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

class Parser {
 public:
  Parser(std::string_view text, std::string_view var) : text_(text), var_(var) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) {
    throw ConfigError("expression error at position " + std::to_string(pos_) + ": " + what +
                      " in \"" + std::string(text_) + "\"");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (consume('+')) {
        lhs = make_node(Op::Add, lhs, term());
      } else if (consume('-')) {
        lhs = make_node(Op::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    for (;;) {
      if (consume('*')) {
        lhs = make_node(Op::Mul, lhs, factor());
      } else if (consume('/')) {
        lhs = make_node(Op::Div, lhs, factor());
      } else {
        return lhs;
      }
    }
  }

  // Right-associative power binds tighter than unary minus on the left.
  NodePtr factor() {
    bool neg = false;
    skip_ws();
    while (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) {
      if (text_[pos_] == '-') neg = !neg;
      ++pos_;
      skip_ws();
    }
    NodePtr base = primary();
    if (consume('^')) base = make_node(Op::Pow, base, factor());
    return neg ? make_node(Op::Neg, base) : base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!consume(')')) fail("missing ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = text_.data() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad numeric literal");
      pos_ += static_cast<std::size_t>(end - begin);
      return make_node(Op::Const, nullptr, nullptr, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      const std::string name(text_.substr(start, pos_ - start));
      if (name == var_) return make_node(Op::Var);
      if (!consume('(')) fail("unknown identifier \"" + name + "\"");
      NodePtr first = expr();
      if (name == "pow") {
        if (!consume(',')) fail("pow expects two arguments");
        NodePtr second = expr();
        if (!consume(')')) fail("missing ')'");
        return make_node(Op::Pow, first, second);
      }
      if (!consume(')')) fail("missing ')'");
      if (name == "exp") return make_node(Op::Exp, first);
      if (name == "log") return make_node(Op::Log, first);
      if (name == "log1p") return make_node(Op::Log1p, first);
      if (name == "sqrt") return make_node(Op::Sqrt, first);
      if (name == "abs") return make_node(Op::Abs, first);
      fail("unknown function \"" + name + "\"");
    }
    fail("unexpected character");
  }

  std::string_view text_;
  std::string_view var_;
  std::size_t pos_ = 0;
};

double eval_node(const Expression::Node& n, double x) {
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var: return x;
    case Op::Neg: return -eval_node(*n.a, x);
    case Op::Add: return eval_node(*n.a, x) + eval_node(*n.b, x);
    case Op::Sub: return eval_node(*n.a, x) - eval_node(*n.b, x);
    case Op::Mul: return eval_node(*n.a, x) * eval_node(*n.b, x);
    case Op::Div: return eval_node(*n.a, x) / eval_node(*n.b, x);
    case Op::Pow: return std::pow(eval_node(*n.a, x), eval_node(*n.b, x));
    case Op::Exp: return std::exp(eval_node(*n.a, x));
    case Op::Log: return std::log(eval_node(*n.a, x));
    case Op::Log1p: return std::log1p(eval_node(*n.a, x));
    case Op::Sqrt: return std::sqrt(eval_node(*n.a, x));
    case Op::Abs: return std::abs(eval_node(*n.a, x));
  }
  return 0.0;
}

}  // namespace

Expression Expression::parse(std::string_view text, std::string variable) {
  Expression e;
  e.text_ = std::string(text);
  e.root_ = Parser(text, variable).parse();
  return e;
}

double Expression::eval(double x) const { return eval_node(*root_, x); }

}  // namespace growthlab
