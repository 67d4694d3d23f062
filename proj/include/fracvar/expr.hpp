#pragma once

// Tiny scalar expression language used for order functions, Lagrangians,
// trajectories and boundary data.
//
// Grammar (everything evaluates to a double):
//
//   expr    := term (('+'|'-') term)*
//   term    := factor (('*'|'/') factor)*
//   factor  := '-' factor | power
//   power   := primary ('^' factor)?        right associative; binds
//                                           tighter than unary minus
//   primary := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
//
// Built-in functions: exp log sin cos tan sqrt abs gamma pow(x,y).
// Identifiers are case-sensitive [a-zA-Z_][a-zA-Z0-9_]*.
// Trees are immutable after parse and safe to share across threads.

#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fracvar/error.hpp"

namespace fracvar::dsl {

enum class Fn { Exp, Log, Sin, Cos, Tan, Sqrt, Abs, Gamma, Pow };

std::string_view fn_name(Fn f);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  struct Num {
    double value;  // always non-negative out of the parser
  };
  struct Var {
    std::string name;
  };
  struct Neg {
    ExprPtr operand;
  };
  struct Bin {
    char op;  // + - * / ^
    ExprPtr lhs, rhs;
  };
  struct Call {
    Fn fn;
    std::vector<ExprPtr> args;
  };
  using Node = std::variant<Num, Var, Neg, Bin, Call>;
  Node node;
};

// Throws ParseError with a byte offset on bad input.
ExprPtr parse(std::string_view text);

// Pretty-print with minimal-ish parentheses. parse(to_string(e)) yields a
// structurally identical tree.
std::string to_string(const Expr& e);
std::string to_string(const ExprPtr& e);

std::set<std::string> free_vars(const Expr& e);

bool equal(const Expr& a, const Expr& b);

using Bindings = std::map<std::string, double, std::less<>>;

// Throws EvalError for unbound variables and DomainError for
// non-finite results (named after the offending operation).
double eval(const Expr& e, const Bindings& bindings);

// An expression flattened to a postfix program over a fixed variable
// layout. Construction rejects variables outside the layout, which is how
// the per-slot binding contracts are enforced. Evaluation does not
// allocate and is safe to call concurrently.
class CompiledExpr {
 public:
  CompiledExpr() = default;
  CompiledExpr(ExprPtr e, std::vector<std::string> layout);

  double operator()(std::span<const double> values) const;

  const std::vector<std::string>& layout() const { return layout_; }
  const ExprPtr& source() const { return source_; }

 private:
  enum class Op : unsigned char {
    PushConst,
    PushVar,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Neg,
    Call1,
    Call2
  };
  struct Ins {
    Op op;
    int slot = 0;
    double value = 0.0;
    Fn fn = Fn::Exp;
  };

  int compile(const Expr& e, int depth);

  ExprPtr source_;
  std::vector<std::string> layout_;
  std::vector<Ins> prog_;
};

}  // namespace fracvar::dsl
