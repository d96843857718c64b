#include "kanver/milp_model.hpp"

#include <algorithm>
#include <cmath>

#include "kanver/errors.hpp"

namespace kanver {

int MilpModel::add_variable(std::string name, double lower, double upper, VarType type) {
  if (name.empty()) throw InvalidArgument("variable needs a name");
  if (std::isnan(lower) || std::isnan(upper) || lower > upper) {
    throw InvalidArgument("variable " + name + " has lower > upper");
  }
  if (index_.count(name)) throw InvalidArgument("duplicate variable " + name);
  const int id = static_cast<int>(vars_.size());
  index_.emplace(name, id);
  vars_.push_back({std::move(name), lower, upper, type});
  return id;
}

void MilpModel::add_constraint(std::string name, std::vector<Term> terms, RowSense sense,
                               double rhs) {
  for (const auto& t : terms) {
    if (t.var < 0 || t.var >= static_cast<int>(vars_.size())) {
      throw InvalidArgument("constraint " + name + " references an unknown variable");
    }
  }
  if (name.empty()) name = "c" + std::to_string(rows_.size() + 1);
  if (row_index_.count(name)) throw InvalidArgument("duplicate constraint " + name);
  row_index_.emplace(name, static_cast<int>(rows_.size()));
  rows_.push_back({std::move(name), std::move(terms), sense, rhs});
}

void MilpModel::set_objective(ObjectiveSense sense, std::vector<Term> terms) {
  for (const auto& t : terms) {
    if (t.var < 0 || t.var >= static_cast<int>(vars_.size())) {
      throw InvalidArgument("objective references an unknown variable");
    }
  }
  objective_ = {sense, std::move(terms)};
}

void MilpModel::set_bounds(int var, double lower, double upper) {
  if (lower > upper) throw InvalidArgument("lower > upper for " + vars_.at(var).name);
  vars_.at(var).lower = lower;
  vars_.at(var).upper = upper;
}

std::optional<int> MilpModel::find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int MilpModel::num_binaries() const {
  return static_cast<int>(std::count_if(vars_.begin(), vars_.end(), [](const Variable& v) {
    return v.type == VarType::Binary;
  }));
}

double row_activity(const Constraint& row, std::span<const double> x) {
  double s = 0.0;
  for (const auto& t : row.terms) s += t.coef * x[t.var];
  return s;
}

double MilpModel::objective_value(std::span<const double> x) const {
  double s = 0.0;
  for (const auto& t : objective_.terms) s += t.coef * x[t.var];
  return s;
}

double MilpModel::max_violation(std::span<const double> x) const {
  if (x.size() != vars_.size()) throw InvalidArgument("assignment size mismatch");
  double v = 0.0;
  for (std::size_t j = 0; j < vars_.size(); ++j) {
    v = std::max({v, vars_[j].lower - x[j], x[j] - vars_[j].upper});
    if (vars_[j].type == VarType::Binary) v = std::max(v, std::abs(x[j] - std::round(x[j])));
  }
  for (const auto& row : rows_) {
    const double a = row_activity(row, x);
    switch (row.sense) {
      case RowSense::LessEqual: v = std::max(v, a - row.rhs); break;
      case RowSense::GreaterEqual: v = std::max(v, row.rhs - a); break;
      case RowSense::Equal: v = std::max(v, std::abs(a - row.rhs)); break;
    }
  }
  return v;
}

}  // namespace kanver
