#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "isoprofile/core/types.hpp"
#include "isoprofile/geometry/jet.hpp"
#include "isoprofile/geometry/metric_chart.hpp"

namespace isoprofile::cli {

enum class NodeKind { Constant, Variable, Negate, Add, Subtract, Multiply, Divide, Power, Call };

enum class Function { Exp, Sin, Cos, Sqrt };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind = NodeKind::Constant;
  double value = 0.0;      // Constant
  int variable = 0;        // Variable: 0-based index of x1..xn
  Function function = Function::Exp;
  std::vector<NodePtr> children;
};

/// Parsed scalar expression in the variables x1..xn.
class Expression {
 public:
  Expression() = default;
  explicit Expression(NodePtr root, int dim) : root_(std::move(root)), dim_(dim) {}

  const NodePtr& root() const { return root_; }
  int dim() const { return dim_; }

  double evaluate(const Vec& x) const;
  geometry::Jet evaluate_jet(const Vec& x) const;
  /// Shortest parenthesization that parses back to the same tree.
  std::string to_string() const;

 private:
  NodePtr root_;
  int dim_ = 0;
};

/// Precedence, high to low: ^ (right associative), unary minus, * /, + -.
/// Functions exp, sin, cos, sqrt take one parenthesized argument.
/// Throws ParseError with kind SyntaxError or UnknownIdentifier and the byte
/// offset of the offending token; variables beyond x<dim> are unknown.
Expression parse_expression(std::string_view text, int dim);

bool structurally_equal(const NodePtr& a, const NodePtr& b);

/// Log conformal factor evaluated on jets.
geometry::LogFactorFn to_log_factor(const Expression& expr);

}  // namespace isoprofile::cli
