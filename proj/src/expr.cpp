#include "eprbound/expr.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <vector>
#include <cstdio>
#include <cstdlib>

namespace eprbound::expr {

namespace {

using Op = Expression::Op;

struct FunctionInfo {
  const char* name;
  Op op;
  int arity;
};

constexpr std::array<FunctionInfo, 9> kFunctions = {{
    {"sin", Op::kSin, 1}, {"cos", Op::kCos, 1}, {"exp", Op::kExp, 1},
    {"ln", Op::kLn, 1},   {"sqrt", Op::kSqrt, 1}, {"tanh", Op::kTanh, 1},
    {"abs", Op::kAbs, 1}, {"min", Op::kMin, 2},  {"max", Op::kMax, 2},
}};

const FunctionInfo* find_function(std::string_view name) {
  for (const auto& f : kFunctions)
    if (name == f.name) return &f;
  return nullptr;
}

enum class TokKind { kNumber, kIdent, kPunct, kEnd };

struct Token {
  TokKind kind = TokKind::kEnd;
  std::size_t pos = 0;
  double number = 0.0;
  std::string text;  // identifier or single punct char
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    tok_ = Token{};
    tok_.pos = pos_;
    if (pos_ >= src_.size()) {
      tok_.kind = TokKind::kEnd;
      return;
    }
    char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      const char* begin = src_.data() + pos_;
      char* end = nullptr;
      tok_.number = std::strtod(begin, &end);
      if (end == begin) throw ParseError("malformed number", pos_);
      tok_.kind = TokKind::kNumber;
      pos_ += static_cast<std::size_t>(end - begin);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      tok_.kind = TokKind::kIdent;
      tok_.text = std::string(src_.substr(start, pos_ - start));
      return;
    }
    if (std::string_view("+-*/^(),").find(c) != std::string_view::npos) {
      tok_.kind = TokKind::kPunct;
      tok_.text = std::string(1, c);
      ++pos_;
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Token tok_;
};

// Binding powers: ^ (40, right) > unary - (30) > * / (20) > + - (10).
int infix_binding_power(const std::string& op) {
  if (op == "+" || op == "-") return 10;
  if (op == "*" || op == "/") return 20;
  if (op == "^") return 40;
  return -1;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) {}

  std::vector<Expression::Node> run() {
    int root = parse_expr(0);
    const Token& t = lex_.peek();
    if (t.kind != TokKind::kEnd)
      throw ParseError("unexpected trailing input", t.pos);
    if (root + 1 != static_cast<int>(nodes_.size())) {
      // Root must be last for the flat representation; rotate if needed.
      Expression::Node r = nodes_[static_cast<std::size_t>(root)];
      nodes_.push_back(r);
    }
    return std::move(nodes_);
  }

 private:
  int push(Expression::Node n) {
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size()) - 1;
  }

  int parse_expr(int min_bp) {
    int lhs = parse_prefix();
    for (;;) {
      const Token& t = lex_.peek();
      if (t.kind != TokKind::kPunct) break;
      int bp = infix_binding_power(t.text);
      if (bp < 0 || bp < min_bp) break;
      std::string op = lex_.take().text;
      // Left-associative: rhs parsed at bp+1; '^' is right-associative.
      int rhs = parse_expr(op == "^" ? bp : bp + 1);
      Op node_op = op == "+" ? Op::kAdd
                 : op == "-" ? Op::kSub
                 : op == "*" ? Op::kMul
                 : op == "/" ? Op::kDiv
                             : Op::kPow;
      lhs = push({node_op, 0.0, lhs, rhs});
    }
    return lhs;
  }

  int parse_prefix() {
    Token t = lex_.take();
    switch (t.kind) {
      case TokKind::kNumber:
        return push({Op::kNumber, t.number, -1, -1});
      case TokKind::kIdent: {
        if (t.text == "x") return push({Op::kVarX, 0.0, -1, -1});
        if (t.text == "y") return push({Op::kVarY, 0.0, -1, -1});
        const FunctionInfo* fn = find_function(t.text);
        if (!fn)
          throw ParseError("unknown identifier '" + t.text + "'", t.pos);
        expect_punct("(");
        int a = parse_expr(0);
        int b = -1;
        if (fn->arity == 2) {
          expect_punct(",");
          b = parse_expr(0);
        } else if (lex_.peek().kind == TokKind::kPunct && lex_.peek().text == ",") {
          throw ParseError("function '" + std::string(fn->name) + "' takes 1 argument",
                           lex_.peek().pos);
        }
        expect_punct(")");
        return push({fn->op, 0.0, a, b});
      }
      case TokKind::kPunct:
        if (t.text == "(") {
          int inner = parse_expr(0);
          expect_punct(")");
          return inner;
        }
        if (t.text == "-") {
          int operand = parse_expr(30);
          return push({Op::kNeg, 0.0, operand, -1});
        }
        if (t.text == "+") return parse_expr(30);
        throw ParseError("unexpected '" + t.text + "'", t.pos);
      case TokKind::kEnd:
        throw ParseError("unexpected end of input", t.pos);
    }
    throw ParseError("unreachable", t.pos);
  }

  void expect_punct(const char* p) {
    const Token& t = lex_.peek();
    if (t.kind != TokKind::kPunct || t.text != p)
      throw ParseError(std::string("expected '") + p + "'", t.pos);
    lex_.take();
  }

  Lexer lex_;
  std::vector<Expression::Node> nodes_;
};

double apply(Op op, double a, double b) {
  switch (op) {
    case Op::kAdd: return a + b;
    case Op::kSub: return a - b;
    case Op::kMul: return a * b;
    case Op::kDiv: return a / b;
    case Op::kPow: return std::pow(a, b);
    case Op::kNeg: return -a;
    case Op::kSin: return std::sin(a);
    case Op::kCos: return std::cos(a);
    case Op::kExp: return std::exp(a);
    case Op::kLn: return std::log(a);
    case Op::kSqrt: return std::sqrt(a);
    case Op::kTanh: return std::tanh(a);
    case Op::kAbs: return std::fabs(a);
    case Op::kMin: return std::fmin(a, b);
    case Op::kMax: return std::fmax(a, b);
    default: return 0.0;
  }
}

const char* op_name(Op op) {
  switch (op) {
    case Op::kAdd: return "+";
    case Op::kSub: return "-";
    case Op::kMul: return "*";
    case Op::kDiv: return "/";
    case Op::kPow: return "^";
    case Op::kNeg: return "unary -";
    case Op::kSin: return "sin";
    case Op::kCos: return "cos";
    case Op::kExp: return "exp";
    case Op::kLn: return "ln";
    case Op::kSqrt: return "sqrt";
    case Op::kTanh: return "tanh";
    case Op::kAbs: return "abs";
    case Op::kMin: return "min";
    case Op::kMax: return "max";
    default: return "?";
  }
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Precedence levels for printing; kept consistent with the parser.
int print_prec(Op op) {
  switch (op) {
    case Op::kAdd: case Op::kSub: return 10;
    case Op::kMul: case Op::kDiv: return 20;
    case Op::kNeg: return 30;
    case Op::kPow: return 40;
    default: return 100;  // atoms and function calls
  }
}

}  // namespace

Expression parse(std::string_view text) {
  if (text.empty()) throw ParseError("empty expression", 0);
  Expression e;
  e.nodes_ = Parser(text).run();
  return e;
}

double Expression::operator()(double x, double y) const {
  // Nodes are in evaluation (topological) order: children precede parents.
  // Typical field expressions fit the stack buffer; no allocation per call.
  double small[64];
  std::vector<double> big;
  double* stack = small;
  if (nodes_.size() > 64) {
    big.resize(nodes_.size());
    stack = big.data();
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    double v;
    switch (n.op) {
      case Op::kNumber: v = n.value; break;
      case Op::kVarX: v = x; break;
      case Op::kVarY: v = y; break;
      default: {
        double a = stack[static_cast<std::size_t>(n.lhs)];
        double b = n.rhs >= 0 ? stack[static_cast<std::size_t>(n.rhs)] : 0.0;
        v = apply(n.op, a, b);
        if (!std::isfinite(v))
          throw EvalError(std::string("non-finite result in '") + op_name(n.op) + "'");
        break;
      }
    }
    stack[i] = v;
  }
  double r = stack[nodes_.size() - 1];
  if (!std::isfinite(r)) throw EvalError("non-finite input value");
  return r;
}

std::string Expression::str() const {
  std::vector<std::string> out(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    auto child = [&](int k, bool needs_paren) {
      const std::string& s = out[static_cast<std::size_t>(k)];
      return needs_paren ? "(" + s + ")" : s;
    };
    int prec = print_prec(n.op);
    switch (n.op) {
      case Op::kNumber: out[i] = format_number(n.value); break;
      case Op::kVarX: out[i] = "x"; break;
      case Op::kVarY: out[i] = "y"; break;
      case Op::kNeg: {
        bool paren = print_prec(nodes_[static_cast<std::size_t>(n.lhs)].op) < prec;
        out[i] = "-" + child(n.lhs, paren);
        break;
      }
      case Op::kAdd: case Op::kSub: case Op::kMul: case Op::kDiv: case Op::kPow: {
        int lp = print_prec(nodes_[static_cast<std::size_t>(n.lhs)].op);
        int rp = print_prec(nodes_[static_cast<std::size_t>(n.rhs)].op);
        // Equal-precedence right children stay parenthesized so the printed
        // form reparses to the identical tree ('^' mirrored: right-assoc).
        bool lparen = n.op == Op::kPow ? lp <= prec : lp < prec;
        bool rparen = n.op == Op::kPow ? rp < prec : rp <= prec;
        out[i] = child(n.lhs, lparen) + " " + op_name(n.op) + " " + child(n.rhs, rparen);
        break;
      }
      default: {  // function call
        out[i] = std::string(op_name(n.op)) + "(" + out[static_cast<std::size_t>(n.lhs)];
        if (n.rhs >= 0) out[i] += ", " + out[static_cast<std::size_t>(n.rhs)];
        out[i] += ")";
        break;
      }
    }
  }
  return out.back();
}

double evaluate(const Expression& e, double x, double y) { return e(x, y); }

}  // namespace eprbound::expr
