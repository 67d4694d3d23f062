#include "fracvar/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "fracvar/gamma.hpp"

namespace fracvar::dsl {

namespace {

struct FnInfo {
  std::string_view name;
  Fn fn;
  int arity;
};

constexpr std::array<FnInfo, 9> kFunctions{{{"exp", Fn::Exp, 1},
                                            {"log", Fn::Log, 1},
                                            {"sin", Fn::Sin, 1},
                                            {"cos", Fn::Cos, 1},
                                            {"tan", Fn::Tan, 1},
                                            {"sqrt", Fn::Sqrt, 1},
                                            {"abs", Fn::Abs, 1},
                                            {"gamma", Fn::Gamma, 1},
                                            {"pow", Fn::Pow, 2}}};

const FnInfo* find_function(std::string_view name) {
  for (const auto& f : kFunctions) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double apply_bin(char op, double l, double r) {
  double v = 0.0;
  switch (op) {
    case '+':
      v = l + r;
      break;
    case '-':
      v = l - r;
      break;
    case '*':
      v = l * r;
      break;
    case '/':
      if (r == 0.0) throw DomainError("division by zero");
      v = l / r;
      break;
    case '^':
      v = std::pow(l, r);
      break;
    default:
      throw EvalError(std::string("unknown operator ") + op);
  }
  if (!std::isfinite(v)) {
    throw DomainError(std::string("operator ") + op +
                      ": non-finite result for operands " + format_double(l) +
                      ", " + format_double(r));
  }
  return v;
}

double apply_fn(Fn fn, const double* a) {
  double v = 0.0;
  switch (fn) {
    case Fn::Exp:
      v = std::exp(a[0]);
      break;
    case Fn::Log:
      if (a[0] <= 0.0) {
        throw DomainError("log: non-positive argument " + format_double(a[0]));
      }
      v = std::log(a[0]);
      break;
    case Fn::Sin:
      v = std::sin(a[0]);
      break;
    case Fn::Cos:
      v = std::cos(a[0]);
      break;
    case Fn::Tan:
      v = std::tan(a[0]);
      break;
    case Fn::Sqrt:
      if (a[0] < 0.0) {
        throw DomainError("sqrt: negative argument " + format_double(a[0]));
      }
      v = std::sqrt(a[0]);
      break;
    case Fn::Abs:
      v = std::fabs(a[0]);
      break;
    case Fn::Gamma:
      v = gamma_fn(a[0]);
      break;
    case Fn::Pow:
      v = std::pow(a[0], a[1]);
      break;
  }
  if (!std::isfinite(v)) {
    throw DomainError(std::string(fn_name(fn)) +
                      ": non-finite result at argument " + format_double(a[0]));
  }
  return v;
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  ExprPtr run() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("empty expression", pos_);
    ExprPtr e = parse_expr();
    skip_ws();
    if (pos_ < text_.size()) {
      throw ParseError("unexpected input", pos_);
    }
    return e;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  bool consume(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static ExprPtr make(Expr::Node node) {
    return std::make_shared<Expr>(Expr{std::move(node)});
  }

  ExprPtr parse_expr() {
    ExprPtr lhs = parse_term();
    for (;;) {
      skip_ws();
      char c = peek();
      if (c != '+' && c != '-') return lhs;
      ++pos_;
      ExprPtr rhs = parse_term();
      lhs = make(Expr::Bin{c, std::move(lhs), std::move(rhs)});
    }
  }

  ExprPtr parse_term() {
    ExprPtr lhs = parse_factor();
    for (;;) {
      skip_ws();
      char c = peek();
      if (c != '*' && c != '/') return lhs;
      ++pos_;
      ExprPtr rhs = parse_factor();
      lhs = make(Expr::Bin{c, std::move(lhs), std::move(rhs)});
    }
  }

  ExprPtr parse_factor() {
    skip_ws();
    if (consume('-')) {
      return make(Expr::Neg{parse_factor()});
    }
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_primary();
    skip_ws();
    if (consume('^')) {
      // exponent may carry a unary minus: 2^-3
      ExprPtr exponent = parse_factor();
      return make(Expr::Bin{'^', std::move(base), std::move(exponent)});
    }
    return base;
  }

  ExprPtr parse_primary() {
    skip_ws();
    char c = peek();
    if (c == '(') {
      ++pos_;
      ExprPtr e = parse_expr();
      skip_ws();
      if (!consume(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return parse_number();
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      return parse_name();
    }
    throw ParseError("expected a number, name or '('", pos_);
  }

  ExprPtr parse_number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '.')) {
      ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t mark = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
        ++pos_;
      }
      if (pos_ < text_.size() &&
          std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          ++pos_;
        }
      } else {
        pos_ = mark;  // not an exponent after all
      }
    }
    double value = 0.0;
    auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (res.ec != std::errc{} || res.ptr != text_.data() + pos_) {
      throw ParseError("malformed number", start);
    }
    return make(Expr::Num{value});
  }

  ExprPtr parse_name() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_')) {
      ++pos_;
    }
    std::string name(text_.substr(start, pos_ - start));
    skip_ws();
    if (peek() != '(') {
      if (find_function(name) != nullptr) {
        throw ParseError("function " + name + " requires arguments", start);
      }
      return make(Expr::Var{std::move(name)});
    }
    const FnInfo* fn = find_function(name);
    if (fn == nullptr) {
      throw ParseError("unknown function " + name, start);
    }
    ++pos_;  // '('
    std::vector<ExprPtr> args;
    args.push_back(parse_expr());
    skip_ws();
    while (consume(',')) {
      args.push_back(parse_expr());
      skip_ws();
    }
    if (!consume(')')) throw ParseError("expected ')'", pos_);
    if (static_cast<int>(args.size()) != fn->arity) {
      throw ParseError(name + " takes " + std::to_string(fn->arity) +
                           " argument(s), got " + std::to_string(args.size()),
                       start);
    }
    return make(Expr::Call{fn->fn, std::move(args)});
  }
};

// Precedence levels used by the printer: additive 1, multiplicative 2,
// unary minus 3, power 4, atoms 5.
int prec(const Expr& e) {
  return std::visit(
      Overloaded{[](const Expr::Num&) { return 5; },
                 [](const Expr::Var&) { return 5; },
                 [](const Expr::Call&) { return 5; },
                 [](const Expr::Neg&) { return 3; },
                 [](const Expr::Bin& b) {
                   switch (b.op) {
                     case '+':
                     case '-':
                       return 1;
                     case '*':
                     case '/':
                       return 2;
                     default:
                       return 4;  // ^
                   }
                 }},
      e.node);
}

void print(const Expr& e, std::string& out);

void print_child(const Expr& e, std::string& out, int min_prec) {
  if (prec(e) < min_prec) {
    out += '(';
    print(e, out);
    out += ')';
  } else {
    print(e, out);
  }
}

void print(const Expr& e, std::string& out) {
  std::visit(
      Overloaded{[&](const Expr::Num& n) { out += format_double(n.value); },
                 [&](const Expr::Var& v) { out += v.name; },
                 [&](const Expr::Neg& n) {
                   out += '-';
                   print_child(*n.operand, out, 3);
                 },
                 [&](const Expr::Bin& b) {
                   switch (b.op) {
                     case '+':
                     case '-':
                       print_child(*b.lhs, out, 1);
                       out += ' ';
                       out += b.op;
                       out += ' ';
                       print_child(*b.rhs, out, 2);
                       break;
                     case '*':
                     case '/':
                       print_child(*b.lhs, out, 2);
                       out += b.op;
                       print_child(*b.rhs, out, 3);
                       break;
                     default:  // ^ is right associative
                       print_child(*b.lhs, out, 5);
                       out += '^';
                       print_child(*b.rhs, out, 3);
                       break;
                   }
                 },
                 [&](const Expr::Call& c) {
                   out += fn_name(c.fn);
                   out += '(';
                   for (std::size_t i = 0; i < c.args.size(); ++i) {
                     if (i) out += ", ";
                     print(*c.args[i], out);
                   }
                   out += ')';
                 }},
      e.node);
}

void collect_vars(const Expr& e, std::set<std::string>& out) {
  std::visit(Overloaded{[&](const Expr::Num&) {},
                        [&](const Expr::Var& v) { out.insert(v.name); },
                        [&](const Expr::Neg& n) { collect_vars(*n.operand, out); },
                        [&](const Expr::Bin& b) {
                          collect_vars(*b.lhs, out);
                          collect_vars(*b.rhs, out);
                        },
                        [&](const Expr::Call& c) {
                          for (const auto& a : c.args) collect_vars(*a, out);
                        }},
             e.node);
}

}  // namespace

std::string_view fn_name(Fn f) {
  for (const auto& info : kFunctions) {
    if (info.fn == f) return info.name;
  }
  return "?";
}

ExprPtr parse(std::string_view text) { return Parser(text).run(); }

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

std::string to_string(const ExprPtr& e) { return to_string(*e); }

std::set<std::string> free_vars(const Expr& e) {
  std::set<std::string> out;
  collect_vars(e, out);
  return out;
}

bool equal(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      Overloaded{
          [&](const Expr::Num& n) {
            return n.value == std::get<Expr::Num>(b.node).value;
          },
          [&](const Expr::Var& v) {
            return v.name == std::get<Expr::Var>(b.node).name;
          },
          [&](const Expr::Neg& n) {
            return equal(*n.operand, *std::get<Expr::Neg>(b.node).operand);
          },
          [&](const Expr::Bin& x) {
            const auto& y = std::get<Expr::Bin>(b.node);
            return x.op == y.op && equal(*x.lhs, *y.lhs) && equal(*x.rhs, *y.rhs);
          },
          [&](const Expr::Call& x) {
            const auto& y = std::get<Expr::Call>(b.node);
            if (x.fn != y.fn || x.args.size() != y.args.size()) return false;
            for (std::size_t i = 0; i < x.args.size(); ++i) {
              if (!equal(*x.args[i], *y.args[i])) return false;
            }
            return true;
          }},
      a.node);
}

double eval(const Expr& e, const Bindings& bindings) {
  return std::visit(
      Overloaded{[](const Expr::Num& n) { return n.value; },
                 [&](const Expr::Var& v) -> double {
                   auto it = bindings.find(v.name);
                   if (it == bindings.end()) {
                     throw EvalError("unbound variable " + v.name);
                   }
                   return it->second;
                 },
                 [&](const Expr::Neg& n) { return -eval(*n.operand, bindings); },
                 [&](const Expr::Bin& b) {
                   return apply_bin(b.op, eval(*b.lhs, bindings),
                                    eval(*b.rhs, bindings));
                 },
                 [&](const Expr::Call& c) {
                   double args[2] = {0.0, 0.0};
                   for (std::size_t i = 0; i < c.args.size(); ++i) {
                     args[i] = eval(*c.args[i], bindings);
                   }
                   return apply_fn(c.fn, args);
                 }},
      e.node);
}

CompiledExpr::CompiledExpr(ExprPtr e, std::vector<std::string> layout)
    : source_(std::move(e)), layout_(std::move(layout)) {
  if (!source_) throw EvalError("null expression");
  int depth = compile(*source_, 0);
  if (depth > 64) throw EvalError("expression too deep");
}

int CompiledExpr::compile(const Expr& e, int depth) {
  return std::visit(
      Overloaded{
          [&](const Expr::Num& n) {
            prog_.push_back({Op::PushConst, 0, n.value, Fn::Exp});
            return depth + 1;
          },
          [&](const Expr::Var& v) -> int {
            for (std::size_t i = 0; i < layout_.size(); ++i) {
              if (layout_[i] == v.name) {
                prog_.push_back(
                    {Op::PushVar, static_cast<int>(i), 0.0, Fn::Exp});
                return depth + 1;
              }
            }
            std::string allowed;
            for (const auto& name : layout_) {
              if (!allowed.empty()) allowed += ", ";
              allowed += name;
            }
            throw EvalError("variable " + v.name +
                            " is not allowed here (allowed: " + allowed + ")");
          },
          [&](const Expr::Neg& n) {
            int d = compile(*n.operand, depth);
            prog_.push_back({Op::Neg, 0, 0.0, Fn::Exp});
            return d;
          },
          [&](const Expr::Bin& b) {
            int d1 = compile(*b.lhs, depth);
            int d2 = compile(*b.rhs, depth + 1);
            Op op = Op::Add;
            switch (b.op) {
              case '+':
                op = Op::Add;
                break;
              case '-':
                op = Op::Sub;
                break;
              case '*':
                op = Op::Mul;
                break;
              case '/':
                op = Op::Div;
                break;
              case '^':
                op = Op::Pow;
                break;
            }
            prog_.push_back({op, 0, 0.0, Fn::Exp});
            return d1 > d2 ? d1 : d2;
          },
          [&](const Expr::Call& c) {
            int dmax = depth;
            for (std::size_t i = 0; i < c.args.size(); ++i) {
              int d = compile(*c.args[i], depth + static_cast<int>(i));
              dmax = d > dmax ? d : dmax;
            }
            prog_.push_back({c.args.size() == 2 ? Op::Call2 : Op::Call1, 0, 0.0,
                             c.fn});
            return dmax;
          }},
      e.node);
}

double CompiledExpr::operator()(std::span<const double> values) const {
  if (!source_) throw EvalError("evaluating a default-constructed expression");
  double st[64];
  int sp = 0;
  for (const Ins& ins : prog_) {
    switch (ins.op) {
      case Op::PushConst:
        st[sp++] = ins.value;
        break;
      case Op::PushVar:
        st[sp++] = values[static_cast<std::size_t>(ins.slot)];
        break;
      case Op::Add:
        st[sp - 2] = apply_bin('+', st[sp - 2], st[sp - 1]);
        --sp;
        break;
      case Op::Sub:
        st[sp - 2] = apply_bin('-', st[sp - 2], st[sp - 1]);
        --sp;
        break;
      case Op::Mul:
        st[sp - 2] = apply_bin('*', st[sp - 2], st[sp - 1]);
        --sp;
        break;
      case Op::Div:
        st[sp - 2] = apply_bin('/', st[sp - 2], st[sp - 1]);
        --sp;
        break;
      case Op::Pow:
        st[sp - 2] = apply_bin('^', st[sp - 2], st[sp - 1]);
        --sp;
        break;
      case Op::Neg:
        st[sp - 1] = -st[sp - 1];
        break;
      case Op::Call1:
        st[sp - 1] = apply_fn(ins.fn, &st[sp - 1]);
        break;
      case Op::Call2:
        st[sp - 2] = apply_fn(ins.fn, &st[sp - 2]);
        --sp;
        break;
    }
  }
  return st[0];
}

}  // namespace fracvar::dsl
