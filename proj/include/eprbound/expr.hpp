#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace eprbound::expr {

/// Parse failure; `offset` is the byte position in the input where it occurred.
struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, std::size_t offset)
      : std::runtime_error(msg + " (at byte " + std::to_string(offset) + ")"),
        offset(offset) {}
  std::size_t offset;
};

/// Domain failure while evaluating (division by zero, ln/sqrt of an invalid
/// argument, overflow to a non-finite value).
struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Immutable arithmetic expression in the variables x and y.
///
/// Grammar: literals, x, y, binary + - * / ^, unary minus, and the functions
/// sin cos exp ln sqrt tanh abs (unary) and min max (binary). `^` binds
/// tightest and is right-associative; unary minus sits between `^` and the
/// multiplicative level. Expressions are immutable after parsing and safe to
/// evaluate concurrently.
class Expression {
 public:
  enum class Op : unsigned char {
    kNumber, kVarX, kVarY,
    kAdd, kSub, kMul, kDiv, kPow, kNeg,
    kSin, kCos, kExp, kLn, kSqrt, kTanh, kAbs, kMin, kMax,
  };

  struct Node {
    Op op;
    double value = 0.0;  // kNumber only
    int lhs = -1;
    int rhs = -1;
  };

  /// Evaluates at (x, y); throws EvalError if any intermediate is non-finite.
  double operator()(double x, double y) const;

  /// Canonical text form; parse(str()) reproduces the same tree.
  std::string str() const;

  const std::vector<Node>& nodes() const { return nodes_; }

  friend Expression parse(std::string_view text);

 private:
  std::vector<Node> nodes_;  // root is the last node
};

/// Parses `text` into an Expression. Throws ParseError on bad syntax,
/// unknown identifiers, or arity mismatches.
Expression parse(std::string_view text);

/// Free-function form of Expression::operator().
double evaluate(const Expression& e, double x, double y);

}  // namespace eprbound::expr
