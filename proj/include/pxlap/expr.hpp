#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace pxl {

/// Parsed scalar expression over the coordinates x and y.
///
/// Grammar:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := unary ('^' factor)?          (right associative)
///   unary  := '-'? base
///   base   := number | 'x' | 'y' | ident '(' expr (',' expr)* ')' | '(' expr ')'
///
/// Functions: sin cos exp log abs sqrt (one argument), min max (two).
class ScalarExpr {
 public:
  enum class Op {
    kNumber, kX, kY, kNeg, kAdd, kSub, kMul, kDiv, kPow, kCall,
  };

  struct Node {
    Op op = Op::kNumber;
    double value = 0.0;
    std::string function;
    std::size_t offset = 0;
    std::vector<std::shared_ptr<const Node>> args;
  };

  static ScalarExpr parse(std::string_view source);

  /// Evaluate at (x, y). Throws ExprError for a non-finite result.
  double operator()(double x, double y = 0.0) const;

  bool uses_y() const;

  /// Fully parenthesized form; `parse(e.to_string())` rebuilds the same tree.
  std::string to_string() const;

  const std::string& source() const { return source_; }

 private:
  std::shared_ptr<const Node> root_;
  std::string source_;
};

}  // namespace pxl
