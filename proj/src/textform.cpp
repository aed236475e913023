#include "dval/textform.hpp"

#include <cctype>

namespace dval::text {
namespace {

class Parser {
 public:
  Parser(std::string_view s, int line, int offset) : s_(s), line_(line), offset_(offset) {}

  ExprPtr run() {
    ExprPtr e = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line_, offset_ + static_cast<int>(pos_) + 1);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static ExprPtr node(Expr::Kind k, ExprPtr l, ExprPtr r = nullptr) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->lhs = std::move(l);
    e->rhs = std::move(r);
    return e;
  }

  ExprPtr expr() {
    ExprPtr e = term();
    for (;;) {
      if (eat('+')) e = node(Expr::Kind::Add, e, term());
      else if (eat('-')) e = node(Expr::Kind::Sub, e, term());
      else return e;
    }
  }

  ExprPtr term() {
    ExprPtr e = unary();
    for (;;) {
      if (eat('*')) e = node(Expr::Kind::Mul, e, unary());
      else if (eat('/')) e = node(Expr::Kind::Div, e, unary());
      else return e;
    }
  }

  ExprPtr unary() {
    if (eat('-')) return node(Expr::Kind::Neg, unary());
    return power();
  }

  mpz_class integer() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected integer");
    return mpz_class(std::string(s_.substr(start, pos_ - start)));
  }

  Rat exponent() {
    if (eat('(')) {
      const bool neg = eat('-');
      Rat q(integer());
      if (eat('/')) {
        const mpz_class d = integer();
        if (d == 0) fail("zero denominator in exponent");
        q /= Rat(d);
      }
      if (!eat(')')) fail("expected ')'");
      return neg ? Rat(-q) : q;
    }
    const bool neg = eat('-');
    Rat q(integer());
    return neg ? Rat(-q) : q;
  }

  ExprPtr power() {
    ExprPtr base = primary();
    if (eat('^')) {
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::Pow;
      e->lhs = base;
      e->exponent = exponent();
      return e;
    }
    return base;
  }

  ExprPtr primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      ExprPtr e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::Number;
      e->number = integer();
      return e;
    }
    if (c == 'T' || c == 'X' || c == 'Y') {
      ++pos_;
      if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
        fail("expected variable index after '" + std::string(1, c) + "'");
      const mpz_class idx = integer();
      if (idx < 1 || idx > static_cast<long>(kMaxVars)) fail("variable index out of range");
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::Var;
      e->symbol = c == 'Y' ? 'X' : c;
      e->index = idx.get_ui() - 1;
      return e;
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int line_;
  int offset_;
};

int precedence(const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Kind::Add:
    case Expr::Kind::Sub: return 1;
    case Expr::Kind::Mul:
    case Expr::Kind::Div: return 2;
    case Expr::Kind::Neg: return 3;
    default: return 4;
  }
}

std::string wrap(const ExprPtr& e, int min_prec) {
  std::string s = print(e);
  return precedence(e) < min_prec ? '(' + s + ')' : s;
}

std::string exponent_text(const Rat& q) {
  if (q.get_den() == 1 && q >= 0) return q.get_str();
  return '(' + q.get_str() + ')';
}

}  // namespace

ExprPtr parse(std::string_view text, int line, int column_offset) {
  return Parser(text, line, column_offset).run();
}

std::string print(const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Kind::Number: return e->number.get_str();
    case Expr::Kind::Var: return std::string(1, e->symbol) + std::to_string(e->index + 1);
    case Expr::Kind::Add: return wrap(e->lhs, 1) + '+' + wrap(e->rhs, 1);
    case Expr::Kind::Sub: return wrap(e->lhs, 1) + '-' + wrap(e->rhs, 2);
    case Expr::Kind::Mul: return wrap(e->lhs, 2) + '*' + wrap(e->rhs, 3);
    case Expr::Kind::Div: return wrap(e->lhs, 2) + '/' + wrap(e->rhs, 3);
    case Expr::Kind::Neg: return '-' + wrap(e->lhs, 3);
    case Expr::Kind::Pow: return wrap(e->lhs, 4) + '^' + exponent_text(e->exponent);
  }
  return {};
}

bool mentions(const ExprPtr& e, char symbol, std::size_t index) {
  if (!e) return false;
  if (e->kind == Expr::Kind::Var) return e->symbol == symbol && e->index == index;
  return mentions(e->lhs, symbol, index) || mentions(e->rhs, symbol, index);
}

ExprPtr ramify(const ExprPtr& e, std::size_t index, unsigned factor) {
  if (!e) return e;
  const bool target = e->kind == Expr::Kind::Var && e->symbol == 'T' && e->index == index;
  if (target) {
    if (factor == 1) return e;
    auto p = std::make_shared<Expr>();
    p->kind = Expr::Kind::Pow;
    p->lhs = e;
    p->exponent = factor;
    return p;
  }
  if (e->kind == Expr::Kind::Pow && e->lhs->kind == Expr::Kind::Var && e->lhs->symbol == 'T' &&
      e->lhs->index == index) {
    auto p = std::make_shared<Expr>(*e);
    p->exponent *= factor;
    if (p->exponent == 1) return e->lhs;
    return p;
  }
  if (!e->lhs && !e->rhs) return e;
  auto c = std::make_shared<Expr>(*e);
  c->lhs = ramify(e->lhs, index, factor);
  c->rhs = ramify(e->rhs, index, factor);
  return c;
}

template <class Vars>
Frac<Vars> evaluate(const ExprPtr& e, std::size_t nvars, int line) {
  const char want = Vars::symbol;
  switch (e->kind) {
    case Expr::Kind::Number: return Frac<Vars>::constant(nvars, Rat(e->number));
    case Expr::Kind::Var:
      if (e->symbol != want)
        throw ParseError(std::string("variable ") + e->symbol + std::to_string(e->index + 1) +
                             " not allowed here (expected " + want + "<i>)",
                         line, 1);
      if (e->index >= nvars)
        throw ParseError(std::string(1, want) + std::to_string(e->index + 1) +
                             " exceeds the declared variable count",
                         line, 1);
      return Frac<Vars>::variable(nvars, e->index);
    case Expr::Kind::Add: return evaluate<Vars>(e->lhs, nvars, line) + evaluate<Vars>(e->rhs, nvars, line);
    case Expr::Kind::Sub: return evaluate<Vars>(e->lhs, nvars, line) - evaluate<Vars>(e->rhs, nvars, line);
    case Expr::Kind::Mul: return evaluate<Vars>(e->lhs, nvars, line) * evaluate<Vars>(e->rhs, nvars, line);
    case Expr::Kind::Div: {
      const Frac<Vars> d = evaluate<Vars>(e->rhs, nvars, line);
      if (d.is_zero()) throw ParseError("division by zero in expression", line, 1);
      return evaluate<Vars>(e->lhs, nvars, line) / d;
    }
    case Expr::Kind::Neg: return -evaluate<Vars>(e->lhs, nvars, line);
    case Expr::Kind::Pow: {
      if (e->exponent.get_den() != 1)
        throw ParseError("fractional exponent " + e->exponent.get_str() +
                             " (add a ramify directive to clear it)",
                         line, 1);
      const long k = e->exponent.get_num().get_si();
      const Frac<Vars> b = evaluate<Vars>(e->lhs, nvars, line);
      if (k < 0 && b.is_zero()) throw ParseError("negative power of zero", line, 1);
      return b.pow(static_cast<int>(k));
    }
  }
  return Frac<Vars>(nvars);
}

template Frac<ParamVars> evaluate<ParamVars>(const ExprPtr&, std::size_t, int);
template Frac<XVars> evaluate<XVars>(const ExprPtr&, std::size_t, int);

RatFunc parse_ratfunc(std::string_view text, std::size_t nparams) {
  return evaluate<ParamVars>(parse(text), nparams);
}

KElem parse_kelem(std::string_view text, std::size_t nvars) {
  return evaluate<XVars>(parse(text), nvars);
}

}  // namespace dval::text
