#pragma once

#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace kanver {

enum class VarType { Continuous, Binary };
enum class RowSense { LessEqual, GreaterEqual, Equal };
enum class ObjectiveSense { Maximize, Minimize };

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = 0.0;
  VarType type = VarType::Continuous;
};

struct Term {
  int var = 0;
  double coef = 0.0;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  RowSense sense = RowSense::LessEqual;
  double rhs = 0.0;
};

struct Objective {
  ObjectiveSense sense = ObjectiveSense::Maximize;
  std::vector<Term> terms;
};

/// Mixed-integer linear program over named variables with finite bounds.
class MilpModel {
 public:
  /// Throws InvalidArgument on a duplicate name or lower > upper.
  int add_variable(std::string name, double lower, double upper,
                   VarType type = VarType::Continuous);
  /// Throws InvalidArgument on an unknown variable index or a duplicate row name.
  void add_constraint(std::string name, std::vector<Term> terms, RowSense sense, double rhs);
  void set_objective(ObjectiveSense sense, std::vector<Term> terms);
  void set_bounds(int var, double lower, double upper);

  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return rows_; }
  const Objective& objective() const { return objective_; }
  std::optional<int> find(const std::string& name) const;
  int num_binaries() const;

  double objective_value(std::span<const double> x) const;
  /// Largest violation over rows, bounds, and binary integrality.
  double max_violation(std::span<const double> x) const;

 private:
  std::vector<Variable> vars_;
  std::vector<Constraint> rows_;
  Objective objective_;
  std::unordered_map<std::string, int> index_;
  std::unordered_map<std::string, int> row_index_;
};

double row_activity(const Constraint& row, std::span<const double> x);

}  // namespace kanver
