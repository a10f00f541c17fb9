// SPDX-License-Identifier: Apache-2.0

#include "hsf/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

#include "hsf/errors.hpp"

namespace hsf
{

Expr Expr::number(double value)
{
  return Expr(std::make_shared<const Node>(Node{Kind::Number, value, 0, {}, {}}));
}

Expr Expr::variable()
{
  return Expr(std::make_shared<const Node>(Node{Kind::Variable, 0.0, 0, {}, {}}));
}

Expr Expr::binary(Kind kind, Expr lhs, Expr rhs)
{
  return Expr(std::make_shared<const Node>(Node{kind, 0.0, 0, std::move(lhs), std::move(rhs)}));
}

Expr Expr::unary(Kind kind, Expr operand)
{
  return Expr(std::make_shared<const Node>(Node{kind, 0.0, 0, std::move(operand), {}}));
}

Expr Expr::power(Expr base, int exponent)
{
  return Expr(std::make_shared<const Node>(Node{Kind::Pow, 0.0, exponent, std::move(base), {}}));
}

Expr::Kind Expr::kind() const { return node_->kind; }
double Expr::value() const { return node_->value; }
int Expr::exponent() const { return node_->exponent; }
const Expr &Expr::lhs() const { return node_->lhs; }
const Expr &Expr::rhs() const { return node_->rhs; }

TaylorSeries Expr::evaluate(const TaylorSeries &arg) const
{
  const Node &n = *node_;
  switch (n.kind)
  {
  case Kind::Number:
    return TaylorSeries::constant(n.value, arg.order());
  case Kind::Variable:
    return arg;
  case Kind::Add:
    return n.lhs.evaluate(arg) + n.rhs.evaluate(arg);
  case Kind::Sub:
    return n.lhs.evaluate(arg) - n.rhs.evaluate(arg);
  case Kind::Mul:
    return n.lhs.evaluate(arg) * n.rhs.evaluate(arg);
  case Kind::Div:
    return n.lhs.evaluate(arg) / n.rhs.evaluate(arg);
  case Kind::Pow:
    return pow(n.lhs.evaluate(arg), n.exponent);
  case Kind::Neg:
    return -n.lhs.evaluate(arg);
  case Kind::Sin:
    return sin(n.lhs.evaluate(arg));
  case Kind::Cos:
    return cos(n.lhs.evaluate(arg));
  case Kind::Exp:
    return exp(n.lhs.evaluate(arg));
  case Kind::Bump:
    return bump(n.lhs.evaluate(arg));
  }
  throw EvalError("corrupt expression node");
}

double Expr::evaluate(double x) const
{
  return evaluate(TaylorSeries::variable(x, 0))[0];
}

namespace
{

int precedence(Expr::Kind k)
{
  using K = Expr::Kind;
  switch (k)
  {
  case K::Add:
  case K::Sub:
    return 1;
  case K::Mul:
  case K::Div:
    return 2;
  case K::Neg:
    return 3;
  case K::Pow:
    return 4;
  default:
    return 5;
  }
}

std::string format_number(double v)
{
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void print(const Expr &e, int min_prec, std::string &out)
{
  using K = Expr::Kind;
  const int p = precedence(e.kind());
  const bool paren = p < min_prec;
  if (paren)
    out += '(';
  switch (e.kind())
  {
  case K::Number:
    out += format_number(e.value());
    break;
  case K::Variable:
    out += 'x';
    break;
  case K::Add:
  case K::Sub:
    print(e.lhs(), 1, out);
    out += e.kind() == K::Add ? " + " : " - ";
    print(e.rhs(), 2, out);
    break;
  case K::Mul:
  case K::Div:
    print(e.lhs(), 2, out);
    out += e.kind() == K::Mul ? "*" : "/";
    print(e.rhs(), 3, out);
    break;
  case K::Neg:
    out += '-';
    print(e.lhs(), 3, out);
    break;
  case K::Pow:
    print(e.lhs(), 5, out);
    out += '^';
    out += std::to_string(e.exponent());
    break;
  case K::Sin:
  case K::Cos:
  case K::Exp:
  case K::Bump:
    out += e.kind() == K::Sin ? "sin(" : e.kind() == K::Cos ? "cos(" : e.kind() == K::Exp ? "exp(" : "bump(";
    print(e.lhs(), 1, out);
    out += ')';
    break;
  }
  if (paren)
    out += ')';
}

class Parser
{
public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse()
  {
    Expr e = expr();
    skip_ws();
    if (pos_ != text_.size())
      throw ParseError("unexpected '" + std::string(1, text_[pos_]) + "'", pos_);
    return e;
  }

private:
  void skip_ws()
  {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool accept(char c)
  {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c)
    {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c)
  {
    if (!accept(c))
    {
      if (pos_ >= text_.size())
        throw ParseError(std::string("expected '") + c + "' but reached end of input", pos_);
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  Expr expr()
  {
    Expr lhs = term();
    for (;;)
    {
      if (accept('+'))
        lhs = Expr::binary(Expr::Kind::Add, lhs, term());
      else if (accept('-'))
        lhs = Expr::binary(Expr::Kind::Sub, lhs, term());
      else
        return lhs;
    }
  }

  Expr term()
  {
    Expr lhs = unary();
    for (;;)
    {
      if (accept('*'))
        lhs = Expr::binary(Expr::Kind::Mul, lhs, unary());
      else if (accept('/'))
        lhs = Expr::binary(Expr::Kind::Div, lhs, unary());
      else
        return lhs;
    }
  }

  Expr unary()
  {
    if (accept('-'))
      return Expr::unary(Expr::Kind::Neg, unary());
    return power();
  }

  Expr power()
  {
    Expr base = primary();
    if (!accept('^'))
      return base;
    const bool negative = accept('-');
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (start == pos_)
      throw ParseError("expected integer exponent", start);
    int exponent = 0;
    auto res = std::from_chars(text_.data() + start, text_.data() + pos_, exponent);
    if (res.ec != std::errc())
      throw ParseError("exponent out of range", start);
    return Expr::power(base, negative ? -exponent : exponent);
  }

  Expr primary()
  {
    skip_ws();
    if (pos_ >= text_.size())
      throw ParseError("unexpected end of input", pos_);
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
      return identifier();
    if (accept('('))
    {
      Expr e = expr();
      expect(')');
      return e;
    }
    throw ParseError("unexpected '" + std::string(1, c) + "'", pos_);
  }

  Expr number()
  {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E'))
    {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-'))
        ++p;
      if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p])))
      {
        pos_ = p;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
          ++pos_;
      }
    }
    double v = 0.0;
    auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != text_.data() + pos_ || !std::isfinite(v))
      throw ParseError("malformed number '" + std::string(text_.substr(start, pos_ - start)) + "'", start);
    return Expr::number(v);
  }

  Expr identifier()
  {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    if (name == "x")
      return Expr::variable();

    Expr::Kind kind;
    if (name == "sin")
      kind = Expr::Kind::Sin;
    else if (name == "cos")
      kind = Expr::Kind::Cos;
    else if (name == "exp")
      kind = Expr::Kind::Exp;
    else if (name == "bump")
      kind = Expr::Kind::Bump;
    else
      throw ParseError("unknown identifier '" + std::string(name) + "'", start);

    expect('(');
    Expr arg = expr();
    expect(')');
    return Expr::unary(kind, arg);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

} // namespace

std::string Expr::to_string() const
{
  std::string out;
  print(*this, 1, out);
  return out;
}

Expr parse_expression(std::string_view text)
{
  return Parser(text).parse();
}

TaylorJet eval_jet(const Expr &f, double x, int order)
{
  if (order < 0)
    throw PreconditionError("jet order must be nonnegative");
  TaylorSeries s = f.evaluate(TaylorSeries::variable(x, order));
  return TaylorJet{x, order, s.derivatives()};
}

} // namespace hsf
