// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "hsf/jet.hpp"

namespace hsf
{

/// Immutable expression tree in one real variable `x`.
///
/// Grammar (standard precedence, power binds tighter than unary minus):
///
///     expr    := term (('+' | '-') term)*
///     term    := unary (('*' | '/') unary)*
///     unary   := '-' unary | power
///     power   := primary ('^' '-'? integer)?
///     primary := number | 'x' | func '(' expr ')' | '(' expr ')'
///     func    := 'sin' | 'cos' | 'exp' | 'bump'
///
/// Copies share the underlying nodes.
class Expr
{
public:
  enum class Kind
  {
    Number,
    Variable,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Neg,
    Sin,
    Cos,
    Exp,
    Bump,
  };

  struct Node;

  Expr() = default;

  static Expr number(double value);
  static Expr variable();
  static Expr binary(Kind kind, Expr lhs, Expr rhs);
  static Expr unary(Kind kind, Expr operand);
  static Expr power(Expr base, int exponent);

  Kind kind() const;
  double value() const;     // Number
  int exponent() const;     // Pow
  const Expr &lhs() const;  // binary nodes, and the operand of unary nodes
  const Expr &rhs() const;  // binary nodes

  bool empty() const noexcept { return node_ == nullptr; }

  /// Propagates the Taylor series of the argument through the tree, i.e.
  /// evaluates the composition expr(arg(t)) as a series.
  TaylorSeries evaluate(const TaylorSeries &arg) const;

  double evaluate(double x) const;

  /// Canonical text form; parse(to_string()) reproduces the same tree.
  std::string to_string() const;

private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

struct Expr::Node
{
  Kind kind;
  double value = 0.0;
  int exponent = 0;
  Expr lhs;
  Expr rhs;
};

/// Throws ParseError (with the offending position) on malformed input or
/// unknown identifiers.
Expr parse_expression(std::string_view text);

/// Derivatives up to `order` at x, via Taylor-coefficient propagation.
TaylorJet eval_jet(const Expr &f, double x, int order);

} // namespace hsf
