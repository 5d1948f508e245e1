#pragma once
#include <memory>
#include <string>
#include <string_view>

namespace growthlab {

// Minimal arithmetic expression in one named variable, used for user-supplied
// nonlinearities in config files. Supports + - * / ^, parentheses, numeric
// literals, and the functions exp, log, log1p, sqrt, abs, pow(a, b).
class Expression {
 public:
  static Expression parse(std::string_view text, std::string variable);
  double eval(double x) const;
  const std::string& text() const { return text_; }

  struct Node;  // implementation detail, defined in expr.cpp

 private:
  Expression() = default;
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace growthlab
