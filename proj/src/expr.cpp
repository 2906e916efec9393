#include "pxlap/expr.hpp"

#include <charconv>
#include <cctype>
#include <cmath>
#include <functional>
#include <map>

#include "pxlap/error.hpp"

namespace pxl {

namespace {

using NodePtr = std::shared_ptr<const ScalarExpr::Node>;
using Op = ScalarExpr::Op;

int arity_of(const std::string& name) {
  static const std::map<std::string, int> kArity = {
      {"sin", 1}, {"cos", 1}, {"exp", 1}, {"log", 1},
      {"abs", 1}, {"sqrt", 1}, {"min", 2}, {"max", 2},
  };
  auto it = kArity.find(name);
  return it == kArity.end() ? -1 : it->second;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr parse_all() {
    skip_ws();
    if (pos_ >= src_.size()) throw ExprError(pos_, "empty expression");
    NodePtr e = expr();
    skip_ws();
    if (pos_ != src_.size()) throw ExprError(pos_, "unexpected character");
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() &&
           std::isspace(static_cast<unsigned char>(src_[pos_]))) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      throw ExprError(pos_, std::string("expected '") + c + "'");
    }
  }

  static NodePtr make(Op op, std::size_t offset, std::vector<NodePtr> args = {},
                      double value = 0.0, std::string fn = {}) {
    auto n = std::make_shared<ScalarExpr::Node>();
    n->op = op;
    n->offset = offset;
    n->args = std::move(args);
    n->value = value;
    n->function = std::move(fn);
    return n;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      skip_ws();
      std::size_t at = pos_;
      if (accept('+')) {
        lhs = make(Op::kAdd, at, {lhs, term()});
      } else if (accept('-')) {
        lhs = make(Op::kSub, at, {lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    for (;;) {
      skip_ws();
      std::size_t at = pos_;
      if (accept('*')) {
        lhs = make(Op::kMul, at, {lhs, factor()});
      } else if (accept('/')) {
        lhs = make(Op::kDiv, at, {lhs, factor()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr factor() {
    NodePtr base = unary();
    skip_ws();
    std::size_t at = pos_;
    if (accept('^')) return make(Op::kPow, at, {base, factor()});
    return base;
  }

  NodePtr unary() {
    skip_ws();
    std::size_t at = pos_;
    if (accept('-')) return make(Op::kNeg, at, {base()});
    return base();
  }

  NodePtr base() {
    skip_ws();
    std::size_t at = pos_;
    if (pos_ >= src_.size()) throw ExprError(pos_, "unexpected end of input");
    char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return number();
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_')) {
        ++pos_;
      }
      std::string ident(src_.substr(start, pos_ - start));
      if (ident == "x") return make(Op::kX, at);
      if (ident == "y") return make(Op::kY, at);
      int arity = arity_of(ident);
      if (arity < 0) throw ExprError(at, "unknown identifier '" + ident + "'");
      expect('(');
      std::vector<NodePtr> args;
      args.push_back(expr());
      while (accept(',')) args.push_back(expr());
      expect(')');
      if (static_cast<int>(args.size()) != arity) {
        throw ExprError(at, "function '" + ident + "' expects " +
                                std::to_string(arity) + " argument(s), got " +
                                std::to_string(args.size()));
      }
      return make(Op::kCall, at, std::move(args), 0.0, ident);
    }
    throw ExprError(pos_, std::string("unexpected character '") + c + "'");
  }

  NodePtr number() {
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isdigit(static_cast<unsigned char>(src_[pos_])) ||
            src_[pos_] == '.')) {
      ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() &&
          std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        while (pos_ < src_.size() &&
               std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          ++pos_;
        }
      } else {
        pos_ = save;
      }
    }
    double v = 0.0;
    const char* first = src_.data() + start;
    const char* last = src_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
      throw ExprError(start, "malformed number");
    }
    return make(Op::kNumber, start, {}, v);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

double eval(const ScalarExpr::Node& n, double x, double y) {
  auto arg = [&](std::size_t i) { return eval(*n.args[i], x, y); };
  switch (n.op) {
    case Op::kNumber: return n.value;
    case Op::kX: return x;
    case Op::kY: return y;
    case Op::kNeg: return -arg(0);
    case Op::kAdd: return arg(0) + arg(1);
    case Op::kSub: return arg(0) - arg(1);
    case Op::kMul: return arg(0) * arg(1);
    case Op::kDiv: return arg(0) / arg(1);
    case Op::kPow: return std::pow(arg(0), arg(1));
    case Op::kCall: {
      const std::string& f = n.function;
      if (f == "sin") return std::sin(arg(0));
      if (f == "cos") return std::cos(arg(0));
      if (f == "exp") return std::exp(arg(0));
      if (f == "log") return std::log(arg(0));
      if (f == "abs") return std::fabs(arg(0));
      if (f == "sqrt") return std::sqrt(arg(0));
      if (f == "min") return std::min(arg(0), arg(1));
      if (f == "max") return std::max(arg(0), arg(1));
      break;
    }
  }
  throw ExprError(n.offset, "corrupt expression node");
}

bool mentions_y(const ScalarExpr::Node& n) {
  if (n.op == Op::kY) return true;
  for (const auto& a : n.args) {
    if (mentions_y(*a)) return true;
  }
  return false;
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string print(const ScalarExpr::Node& n) {
  auto bin = [&](const char* op) {
    return "(" + print(*n.args[0]) + op + print(*n.args[1]) + ")";
  };
  switch (n.op) {
    case Op::kNumber: return format_number(n.value);
    case Op::kX: return "x";
    case Op::kY: return "y";
    case Op::kNeg: return "(-" + print(*n.args[0]) + ")";
    case Op::kAdd: return bin("+");
    case Op::kSub: return bin("-");
    case Op::kMul: return bin("*");
    case Op::kDiv: return bin("/");
    case Op::kPow: return bin("^");
    case Op::kCall: {
      std::string s = n.function + "(";
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) s += ",";
        s += print(*n.args[i]);
      }
      return s + ")";
    }
  }
  return {};
}

}  // namespace

ScalarExpr ScalarExpr::parse(std::string_view source) {
  ScalarExpr e;
  e.root_ = Parser(source).parse_all();
  e.source_ = std::string(source);
  return e;
}

double ScalarExpr::operator()(double x, double y) const {
  double v = eval(*root_, x, y);
  if (!std::isfinite(v)) {
    throw ExprError(0, "expression '" + source_ + "' is not finite at (" +
                           format_number(x) + ", " + format_number(y) + ")");
  }
  return v;
}

bool ScalarExpr::uses_y() const { return mentions_y(*root_); }

std::string ScalarExpr::to_string() const { return print(*root_); }

}  // namespace pxl
