#include <algorithm>
#include <cctype>

#include "lcsgeom/expr.hpp"

namespace lcsgeom {

namespace {

class Parser {
 public:
  Parser(std::string_view text, std::span<const std::string> coordinates)
      : text_(text), coordinates_(coordinates) {}

  Expr run() {
    skip_space();
    if (pos_ == text_.size()) throw ParseError("empty expression", pos_);
    Expr e = expression();
    skip_space();
    if (pos_ != text_.size()) throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    return e;
  }

 private:
  Expr expression() {
    Expr lhs = term();
    for (;;) {
      skip_space();
      if (accept('+')) {
        lhs = Expr::raw_binary(Op::add, lhs, term());
      } else if (accept('-')) {
        lhs = Expr::raw_binary(Op::sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = unary();
    for (;;) {
      skip_space();
      if (accept('*')) {
        lhs = Expr::raw_binary(Op::mul, lhs, unary());
      } else if (accept('/')) {
        lhs = Expr::raw_binary(Op::div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    skip_space();
    if (peek() == '-') {
      std::size_t minus = pos_++;
      if (starts_number()) {
        std::size_t start = pos_;
        Rational value = number();
        skip_space();
        if (peek() != '^') {
          auto neg = Rational::neg(value);
          if (!neg) throw ParseError("literal out of range", start);
          return Expr(*neg);
        }
        pos_ = minus + 1;
      }
      return Expr::raw_unary(Op::neg, unary());
    }
    return power();
  }

  Expr power() {
    Expr base = primary();
    skip_space();
    if (!accept('^')) return base;
    skip_space();
    int k = 0;
    if (accept('(')) {
      skip_space();
      k = integer_exponent();
      skip_space();
      if (!accept(')')) throw ParseError("expected ')' after exponent", pos_);
    } else {
      k = integer_exponent();
    }
    return Expr::raw_pow(base, k);
  }

  int integer_exponent() {
    std::size_t start = pos_;
    bool negative = accept('-');
    skip_space();
    if (!starts_number()) throw ParseError("exponent must be an integer literal", start);
    std::size_t num_start = pos_;
    Rational value = number();
    if (!value.is_integer() || value.num() > 1000000) {
      throw ParseError("exponent must be an integer literal", num_start);
    }
    int k = static_cast<int>(value.num());
    return negative ? -k : k;
  }

  Expr primary() {
    skip_space();
    std::size_t start = pos_;
    if (pos_ == text_.size()) throw ParseError("unexpected end of expression", pos_);
    if (accept('(')) {
      Expr e = expression();
      skip_space();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    if (starts_number()) return Expr(number());
    if (std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_') {
      std::string name = identifier();
      skip_space();
      if (peek() == '(') {
        Op op;
        if (name == "exp") {
          op = Op::exp;
        } else if (name == "log") {
          op = Op::log;
        } else if (name == "sin") {
          op = Op::sin;
        } else if (name == "cos") {
          op = Op::cos;
        } else {
          throw ParseError("unknown function '" + name + "'", start);
        }
        ++pos_;
        Expr arg = expression();
        skip_space();
        if (!accept(')')) throw ParseError("expected ')'", pos_);
        return Expr::raw_unary(op, arg);
      }
      if (!coordinates_.empty() &&
          std::find(coordinates_.begin(), coordinates_.end(), name) == coordinates_.end()) {
        throw ParseError("unknown coordinate '" + name + "'", start);
      }
      return Expr::coord(name);
    }
    throw ParseError(std::string("unexpected '") + peek() + "'", pos_);
  }

  Rational number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
      ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    auto r = Rational::from_decimal(text_.substr(start, pos_ - start));
    if (!r) throw ParseError("invalid or out-of-range literal", start);
    return *r;
  }

  std::string identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  bool starts_number() const {
    if (pos_ >= text_.size()) return false;
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) return true;
    return c == '.' && pos_ + 1 < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]));
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  bool accept(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string_view text_;
  std::span<const std::string> coordinates_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text, std::span<const std::string> coordinates) {
  return Parser(text, coordinates).run();
}

}  // namespace lcsgeom
