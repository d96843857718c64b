#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kanver/milp_model.hpp"

namespace kanver {

/// CPLEX-style LP text: objective, Subject To, Bounds, Binaries, End.
/// Deterministic: the same model always yields the same bytes.
std::string write_lp(const MilpModel& model);

/// Parses the subset emitted by write_lp (plus `free`, one-sided bounds, and
/// `Generals` treated as continuous). Missing bounds default to [0, +inf).
/// Throws ParseError with a line number.
MilpModel read_lp(std::string_view text);

/// `<name> <value>` lines; blank lines and `#` comments are ignored.
/// Throws ParseError with a line number.
std::unordered_map<std::string, double> read_solution(std::string_view text);

/// Dense assignment for `model`; variables absent from the solution are 0.
/// Throws InvalidArgument on names the model does not know.
std::vector<double> assignment_from_solution(const MilpModel& model,
                                             const std::unordered_map<std::string, double>& sol);

/// Shortest decimal that round-trips to `v`.
std::string format_number(double v);

}  // namespace kanver
