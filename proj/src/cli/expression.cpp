#include "isoprofile/cli/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "isoprofile/core/error.hpp"

namespace isoprofile::cli {

namespace {

NodePtr make(NodeKind kind, std::vector<NodePtr> children = {}) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->children = std::move(children);
  return n;
}

class Parser {
 public:
  Parser(std::string_view text, int dim) : s_(text), dim_(dim) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what, ErrorKind kind = ErrorKind::SyntaxError) const {
    throw ParseError(kind, what, pos_);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) lhs = make(NodeKind::Add, {lhs, term()});
      else if (accept('-')) lhs = make(NodeKind::Subtract, {lhs, term()});
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) lhs = make(NodeKind::Multiply, {lhs, unary()});
      else if (accept('/')) lhs = make(NodeKind::Divide, {lhs, unary()});
      else return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(NodeKind::Negate, {unary()});
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(NodeKind::Power, {base, unary()});
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
      ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t q = pos_ + 1;
      if (q < s_.size() && (s_[q] == '+' || s_[q] == '-')) ++q;
      if (q < s_.size() && std::isdigit(static_cast<unsigned char>(s_[q]))) {
        pos_ = q;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (ec != std::errc() || end != s_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Constant;
    n->value = v;
    return n;
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    const std::string_view name = s_.substr(start, pos_ - start);
    static constexpr std::pair<std::string_view, Function> functions[] = {
        {"exp", Function::Exp}, {"sin", Function::Sin}, {"cos", Function::Cos},
        {"sqrt", Function::Sqrt}};
    for (const auto& [fname, f] : functions) {
      if (name != fname) continue;
      if (!accept('(')) fail("expected '(' after " + std::string(name));
      NodePtr arg = expr();
      if (!accept(')')) fail("expected ')'");
      auto n = std::make_shared<Node>();
      n->kind = NodeKind::Call;
      n->function = f;
      n->children = {arg};
      return n;
    }
    if (name.size() >= 2 && name[0] == 'x' && name[1] != '0') {
      int idx = 0;
      const auto [end, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), idx);
      if (ec == std::errc() && end == name.data() + name.size() && idx >= 1 && idx <= dim_) {
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::Variable;
        n->variable = idx - 1;
        return n;
      }
    }
    pos_ = start;
    fail("unknown identifier '" + std::string(name) + "'", ErrorKind::UnknownIdentifier);
  }

  std::string_view s_;
  int dim_;
  std::size_t pos_ = 0;
};

template <class T, class Leaf>
T eval(const Node& n, const Leaf& leaf) {
  using std::cos, std::exp, std::pow, std::sin, std::sqrt;
  using geometry::cos, geometry::exp, geometry::pow, geometry::sin, geometry::sqrt;
  const auto child = [&](std::size_t i) { return eval<T>(*n.children[i], leaf); };
  switch (n.kind) {
    case NodeKind::Constant:
    case NodeKind::Variable: return leaf(n);
    case NodeKind::Negate: return -child(0);
    case NodeKind::Add: return child(0) + child(1);
    case NodeKind::Subtract: return child(0) - child(1);
    case NodeKind::Multiply: return child(0) * child(1);
    case NodeKind::Divide: return child(0) / child(1);
    case NodeKind::Power: return pow(child(0), child(1));
    case NodeKind::Call:
      switch (n.function) {
        case Function::Exp: return exp(child(0));
        case Function::Sin: return sin(child(0));
        case Function::Cos: return cos(child(0));
        case Function::Sqrt: return sqrt(child(0));
      }
  }
  return leaf(n);
}

int precedence(const Node& n) {
  switch (n.kind) {
    case NodeKind::Add:
    case NodeKind::Subtract: return 1;
    case NodeKind::Multiply:
    case NodeKind::Divide: return 2;
    case NodeKind::Negate: return 3;
    case NodeKind::Power: return 4;
    default: return 5;
  }
}

void print(const Node& n, std::string& out) {
  const auto wrapped = [&](const Node& c, bool parens) {
    if (parens) out += '(';
    print(c, out);
    if (parens) out += ')';
  };
  const int p = precedence(n);
  switch (n.kind) {
    case NodeKind::Constant: {
      // Shortest form that still round-trips.
      char buf[32];
      for (int digits = 1; digits <= 17; ++digits) {
        std::snprintf(buf, sizeof buf, "%.*g", digits, n.value);
        if (std::strtod(buf, nullptr) == n.value) break;
      }
      out += buf;
      return;
    }
    case NodeKind::Variable: out += "x" + std::to_string(n.variable + 1); return;
    case NodeKind::Negate:
      out += '-';
      wrapped(*n.children[0], precedence(*n.children[0]) < 3);
      return;
    case NodeKind::Call: {
      static constexpr const char* names[] = {"exp", "sin", "cos", "sqrt"};
      out += names[static_cast<int>(n.function)];
      out += '(';
      print(*n.children[0], out);
      out += ')';
      return;
    }
    case NodeKind::Power:
      wrapped(*n.children[0], precedence(*n.children[0]) <= p);
      out += '^';
      wrapped(*n.children[1], precedence(*n.children[1]) < 3);
      return;
    default: {
      static constexpr const char* ops[] = {"", "", "", " + ", " - ", "*", "/"};
      wrapped(*n.children[0], precedence(*n.children[0]) < p);
      out += ops[static_cast<int>(n.kind)];
      wrapped(*n.children[1], precedence(*n.children[1]) <= p);
      return;
    }
  }
}

}  // namespace

Expression parse_expression(std::string_view text, int dim) {
  return Expression(Parser(text, dim).parse(), dim);
}

double Expression::evaluate(const Vec& x) const {
  return eval<double>(*root_, [&](const Node& n) {
    return n.kind == NodeKind::Constant ? n.value : x[n.variable];
  });
}

geometry::Jet Expression::evaluate_jet(const Vec& x) const {
  return eval<geometry::Jet>(*root_, [&](const Node& n) {
    return n.kind == NodeKind::Constant ? geometry::Jet::constant(n.value)
                                        : geometry::Jet::variable(n.variable, x[n.variable]);
  });
}

std::string Expression::to_string() const {
  std::string out;
  print(*root_, out);
  return out;
}

bool structurally_equal(const NodePtr& a, const NodePtr& b) {
  if (a->kind != b->kind || a->children.size() != b->children.size()) return false;
  if (a->kind == NodeKind::Constant && a->value != b->value) return false;
  if (a->kind == NodeKind::Variable && a->variable != b->variable) return false;
  if (a->kind == NodeKind::Call && a->function != b->function) return false;
  for (std::size_t i = 0; i < a->children.size(); ++i)
    if (!structurally_equal(a->children[i], b->children[i])) return false;
  return true;
}

geometry::LogFactorFn to_log_factor(const Expression& expr) {
  return [expr](const Vec& x) { return expr.evaluate_jet(x); };
}

}  // namespace isoprofile::cli
