#include "kanver/lp_format.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>

#include "kanver/errors.hpp"

namespace kanver {

std::string format_number(double v) {
  if (v == 0.0) return "0";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

constexpr std::size_t kLineWidth = 100;

class LineWriter {
 public:
  explicit LineWriter(std::string& out) : out_(out) {}
  void start(const std::string& head) {
    flush();
    line_ = " " + head;
  }
  void add(const std::string& token) {
    if (line_.size() + 1 + token.size() > kLineWidth && line_.size() > 1) {
      out_ += line_ + "\n";
      line_ = "  ";
    } else {
      line_ += ' ';
    }
    line_ += token;
  }
  void flush() {
    if (!line_.empty()) out_ += line_ + "\n";
    line_.clear();
  }

 private:
  std::string& out_;
  std::string line_;
};

void write_terms(LineWriter& w, const std::vector<Term>& terms, const MilpModel& m) {
  if (terms.empty()) {
    w.add("0");
    return;
  }
  bool first = true;
  for (const auto& t : terms) {
    const double c = std::abs(t.coef);
    const char* sign = t.coef < 0 ? "-" : "+";
    if (!first || t.coef < 0) w.add(sign);
    w.add(c == 1.0 ? m.variables()[t.var].name
                   : format_number(c) + " " + m.variables()[t.var].name);
    first = false;
  }
}

}  // namespace

std::string write_lp(const MilpModel& m) {
  std::string out;
  out += m.objective().sense == ObjectiveSense::Maximize ? "Maximize\n" : "Minimize\n";
  LineWriter w(out);
  w.start("obj:");
  write_terms(w, m.objective().terms, m);
  w.flush();
  out += "Subject To\n";
  for (const auto& row : m.constraints()) {
    w.start(row.name + ":");
    write_terms(w, row.terms, m);
    w.add(row.sense == RowSense::LessEqual ? "<=" : row.sense == RowSense::GreaterEqual ? ">=" : "=");
    w.add(format_number(row.rhs));
    w.flush();
  }
  out += "Bounds\n";
  for (const auto& v : m.variables()) {
    if (v.type == VarType::Binary && v.lower == 0.0 && v.upper == 1.0) continue;
    if (v.lower == v.upper) {
      out += " " + v.name + " = " + format_number(v.lower) + "\n";
    } else {
      out += " " + format_number(v.lower) + " <= " + v.name + " <= " + format_number(v.upper) + "\n";
    }
  }
  bool any_binary = false;
  for (const auto& v : m.variables()) {
    if (v.type != VarType::Binary) continue;
    if (!any_binary) out += "Binaries\n";
    any_binary = true;
    w.start(v.name);
  }
  w.flush();
  out += "End\n";
  return out;
}

namespace {

struct Token {
  std::string text;
  int line;
};

enum class Section { None, Objective, Constraints, Bounds, Binaries, Generals, End };

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::optional<Section> section_keyword(const std::string& line, ObjectiveSense& sense) {
  const std::string l = lower(line);
  if (l == "maximize" || l == "maximum" || l == "max") {
    sense = ObjectiveSense::Maximize;
    return Section::Objective;
  }
  if (l == "minimize" || l == "minimum" || l == "min") {
    sense = ObjectiveSense::Minimize;
    return Section::Objective;
  }
  if (l == "subject to" || l == "such that" || l == "st" || l == "s.t.") return Section::Constraints;
  if (l == "bounds" || l == "bound") return Section::Bounds;
  if (l == "binaries" || l == "binary" || l == "bin") return Section::Binaries;
  if (l == "generals" || l == "general" || l == "gen") return Section::Generals;
  if (l == "end") return Section::End;
  return std::nullopt;
}

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '[' ||
         c == ']' || c == '#' || c == '$' || c == '%' || c == '&' || c == '!' || c == '"' ||
         c == '\'' || c == '{' || c == '}' || c == '~' || c == '@' || c == '?' || c == '(' ||
         c == ')' || c == ',' || c == ';';
}

/// Splits a line into names, numbers, operators, and `name:` labels.
std::vector<Token> tokenize(const std::string& s, int line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '<' || c == '>' || c == '=') {
      std::string op(1, c);
      if (i + 1 < s.size() && (s[i + 1] == '=' || s[i + 1] == '<' || s[i + 1] == '>')) {
        op += s[i + 1];
        ++i;
      }
      ++i;
      if (op == "=<") op = "<=";
      if (op == "=>") op = ">=";
      if (op == "<") op = "<=";
      if (op == ">") op = ">=";
      if (op == "==") op = "=";
      out.push_back({op, line});
    } else if (c == '+' || c == '-') {
      out.push_back({std::string(1, c), line});
      ++i;
    } else if (c == ':') {
      if (out.empty()) throw ParseError(line, "label without a name");
      out.back().text += ':';
      ++i;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t j = i;
      while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.')) ++j;
      if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
        if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
          j = k;
          while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        }
      }
      out.push_back({s.substr(i, j - i), line});
      i = j;
    } else if (is_name_char(c)) {
      std::size_t j = i;
      while (j < s.size() && is_name_char(s[j])) ++j;
      out.push_back({s.substr(i, j - i), line});
      i = j;
    } else {
      throw ParseError(line, std::string("unexpected character '") + c + "'");
    }
  }
  return out;
}

std::optional<double> parse_number(const std::string& t) {
  const std::string l = lower(t);
  if (l == "inf" || l == "infinity") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (r.ec != std::errc() || r.ptr != t.data() + t.size()) return std::nullopt;
  return v;
}

bool is_operator(const std::string& t) { return t == "<=" || t == ">=" || t == "="; }

struct LinearParser {
  MilpModel& model;
  const std::vector<Token>& toks;
  std::size_t pos = 0;

  bool done() const { return pos >= toks.size(); }
  const Token& peek() const { return toks[pos]; }

  int variable(const Token& t) {
    if (auto id = model.find(t.text)) return *id;
    return model.add_variable(t.text, 0.0, std::numeric_limits<double>::infinity());
  }

  /// Reads `[+|-] [coef] name` terms until an operator, a label, or the end.
  std::vector<Term> terms(int line) {
    std::vector<Term> out;
    while (!done() && !is_operator(peek().text) && peek().text.back() != ':') {
      double sign = 1.0;
      while (!done() && (peek().text == "+" || peek().text == "-")) {
        if (peek().text == "-") sign = -sign;
        ++pos;
      }
      if (done()) throw ParseError(line, "dangling sign");
      double coef = 1.0;
      if (auto n = parse_number(peek().text)) {
        coef = *n;
        ++pos;
        if (done() || is_operator(peek().text)) {
          // A bare constant; only "0" is accepted, as written for empty expressions.
          if (coef != 0.0) throw ParseError(toks[pos - 1].line, "constants in expressions are unsupported");
          continue;
        }
      }
      const Token& name = peek();
      if (parse_number(name.text) || is_operator(name.text)) {
        throw ParseError(name.line, "expected a variable name, got '" + name.text + "'");
      }
      ++pos;
      out.push_back({variable(name), sign * coef});
    }
    return out;
  }
};

}  // namespace

MilpModel read_lp(std::string_view text) {
  MilpModel model;
  ObjectiveSense sense = ObjectiveSense::Maximize;
  Section section = Section::None;
  std::vector<Token> objective_toks, constraint_toks;
  std::vector<std::pair<std::vector<Token>, int>> bound_lines;
  std::vector<Token> binary_toks;
  bool saw_objective = false, saw_end = false;

  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    std::string line(text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start));
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (auto bs = line.find('\\'); bs != std::string::npos) line.erase(bs);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    std::size_t lead = 0;
    while (lead < line.size() && std::isspace(static_cast<unsigned char>(line[lead]))) ++lead;
    line.erase(0, lead);
    if (line.empty()) continue;
    if (saw_end) throw ParseError(line_no, "content after End");
    if (auto s = section_keyword(line, sense)) {
      section = *s;
      if (section == Section::Objective) saw_objective = true;
      if (section == Section::End) saw_end = true;
      continue;
    }
    auto toks = tokenize(line, line_no);
    switch (section) {
      case Section::None: throw ParseError(line_no, "expected Maximize or Minimize");
      case Section::Objective: objective_toks.insert(objective_toks.end(), toks.begin(), toks.end()); break;
      case Section::Constraints: constraint_toks.insert(constraint_toks.end(), toks.begin(), toks.end()); break;
      case Section::Bounds: bound_lines.emplace_back(std::move(toks), line_no); break;
      case Section::Binaries:
      case Section::Generals:
        if (section == Section::Binaries) binary_toks.insert(binary_toks.end(), toks.begin(), toks.end());
        break;
      case Section::End: break;
    }
  }
  if (!saw_objective) throw ParseError(line_no, "missing objective section");
  if (!saw_end) throw ParseError(line_no, "missing End");

  // Objective.
  {
    LinearParser p{model, objective_toks};
    if (!p.done() && p.peek().text.back() == ':') ++p.pos;
    auto terms = p.terms(objective_toks.empty() ? 1 : objective_toks.front().line);
    if (!p.done()) throw ParseError(p.peek().line, "unexpected '" + p.peek().text + "' in objective");
    model.set_objective(sense, std::move(terms));
  }
  // Constraints.
  {
    LinearParser p{model, constraint_toks};
    int count = 0;
    while (!p.done()) {
      const int line = p.peek().line;
      std::string name;
      if (p.peek().text.back() == ':') {
        name = p.peek().text.substr(0, p.peek().text.size() - 1);
        ++p.pos;
      }
      auto terms = p.terms(line);
      if (p.done() || !is_operator(p.peek().text)) throw ParseError(line, "constraint without a sense");
      const std::string op = p.peek().text;
      ++p.pos;
      double sign = 1.0;
      while (!p.done() && (p.peek().text == "+" || p.peek().text == "-")) {
        if (p.peek().text == "-") sign = -sign;
        ++p.pos;
      }
      if (p.done()) throw ParseError(line, "constraint without a right-hand side");
      auto rhs = parse_number(p.peek().text);
      if (!rhs) throw ParseError(p.peek().line, "right-hand side must be a number");
      ++p.pos;
      if (name.empty()) name = "R" + std::to_string(++count);
      const RowSense s = op == "<=" ? RowSense::LessEqual : op == ">=" ? RowSense::GreaterEqual : RowSense::Equal;
      model.add_constraint(name, std::move(terms), s, sign * *rhs);
    }
  }
  // Bounds.
  for (auto& [toks, line] : bound_lines) {
    // Reassemble signed numbers.
    std::vector<std::string> t;
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if ((toks[i].text == "-" || toks[i].text == "+") && i + 1 < toks.size() &&
          parse_number(toks[i + 1].text)) {
        t.push_back(toks[i].text == "-" ? "-" + toks[i + 1].text : toks[i + 1].text);
        ++i;
      } else {
        t.push_back(toks[i].text);
      }
    }
    auto var_of = [&](const std::string& n) {
      if (parse_number(n) || is_operator(n)) throw ParseError(line, "expected a variable in bound");
      if (auto id = model.find(n)) return *id;
      return model.add_variable(n, 0.0, std::numeric_limits<double>::infinity());
    };
    auto num = [&](const std::string& n) {
      auto v = parse_number(n);
      if (!v) throw ParseError(line, "expected a number, got '" + n + "'");
      return *v;
    };
    const double inf = std::numeric_limits<double>::infinity();
    if (t.size() == 2 && lower(t[1]) == "free") {
      const int v = var_of(t[0]);
      model.set_bounds(v, -inf, inf);
    } else if (t.size() == 5 && t[1] == "<=" && t[3] == "<=") {
      const int v = var_of(t[2]);
      model.set_bounds(v, num(t[0]), num(t[4]));
    } else if (t.size() == 3 && is_operator(t[1])) {
      const bool var_first = !parse_number(t[0]).has_value();
      const int v = var_of(var_first ? t[0] : t[2]);
      const double val = num(var_first ? t[2] : t[0]);
      const auto& cur = model.variables()[v];
      std::string op = t[1];
      if (!var_first && op != "=") op = op == "<=" ? ">=" : "<=";
      if (op == "=") model.set_bounds(v, val, val);
      else if (op == "<=") model.set_bounds(v, std::min(cur.lower, val), val);
      else model.set_bounds(v, val, std::max(cur.upper, val));
    } else {
      throw ParseError(line, "unrecognized bound");
    }
  }
  // Binaries: rebuild affected variables with binary type.
  if (!binary_toks.empty()) {
    MilpModel typed;
    std::vector<bool> binary(model.variables().size(), false);
    for (const auto& t : binary_toks) {
      auto id = model.find(t.text);
      if (!id) throw ParseError(t.line, "binary " + t.text + " does not appear in the model");
      binary[*id] = true;
    }
    for (std::size_t j = 0; j < model.variables().size(); ++j) {
      const auto& v = model.variables()[j];
      if (binary[j]) {
        const bool default_bounds = v.lower == 0.0 && std::isinf(v.upper);
        typed.add_variable(v.name, default_bounds ? 0.0 : v.lower, default_bounds ? 1.0 : v.upper,
                           VarType::Binary);
      } else {
        typed.add_variable(v.name, v.lower, v.upper, v.type);
      }
    }
    for (const auto& r : model.constraints()) typed.add_constraint(r.name, r.terms, r.sense, r.rhs);
    typed.set_objective(model.objective().sense, model.objective().terms);
    return typed;
  }
  return model;
}

std::unordered_map<std::string, double> read_solution(std::string_view text) {
  std::unordered_map<std::string, double> out;
  int line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    const auto nl = text.find('\n', start);
    std::string line(text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start));
    start = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::vector<std::string> fields;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      if (j > i) fields.push_back(line.substr(i, j - i));
      i = j;
    }
    if (fields.empty()) continue;
    if (fields.size() != 2) throw ParseError(line_no, "expected '<name> <value>'");
    auto v = parse_number(fields[1]);
    if (!v && (fields[1] == "-inf" || fields[1] == "-infinity")) v = -std::numeric_limits<double>::infinity();
    if (!v || !std::isfinite(*v)) throw ParseError(line_no, "value for " + fields[0] + " is not a finite number");
    if (!out.emplace(fields[0], *v).second) throw ParseError(line_no, "duplicate value for " + fields[0]);
  }
  return out;
}

std::vector<double> assignment_from_solution(const MilpModel& model,
                                             const std::unordered_map<std::string, double>& sol) {
  std::vector<double> x(model.variables().size(), 0.0);
  for (const auto& [name, value] : sol) {
    auto id = model.find(name);
    if (!id) throw InvalidArgument("solution names unknown variable " + name);
    x[*id] = value;
  }
  return x;
}

}  // namespace kanver
