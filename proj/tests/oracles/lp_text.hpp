#pragma once

// Reads the LP text format back without using the exporter's data
// structures, then evaluates objective and constraints at a point.

#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace oracle {

struct LpText {
  struct Row {
    std::string name;
    std::vector<std::pair<double, std::string>> terms;
    std::string sense;  // "<=", ">=", "="
    double rhs = 0.0;
  };
  std::vector<std::pair<double, std::string>> objective;
  std::vector<Row> rows;
  std::map<std::string, std::pair<double, double>> bounds;
  std::set<std::string> binaries;
  std::set<std::string> variables;  // every name that appears anywhere
  double constant = 0.0;            // from the "objective constant" comment
};

inline bool is_number(const std::string& t) {
  if (t.empty()) return false;
  char* end = nullptr;
  std::strtod(t.c_str(), &end);
  return *end == '\0';
}

inline LpText parse_lp(const std::string& text) {
  LpText lp;
  std::istringstream in(text);
  std::string line;
  enum { None, Obj, Rows, Bounds, Bin, Done } sec = None;
  std::vector<std::string> tokens;
  auto flush_terms = [&](std::vector<std::pair<double, std::string>>& out, std::size_t from,
                         std::size_t to) {
    double sign = 1.0;
    for (std::size_t i = from; i < to; ++i) {
      const std::string& t = tokens[i];
      if (t == "+") {
        sign = 1.0;
      } else if (t == "-") {
        sign = -1.0;
      } else {
        if (!is_number(t) || i + 1 >= to) throw std::runtime_error("bad term near '" + t + "'");
        const std::string& var = tokens[++i];
        if (is_number(var)) throw std::runtime_error("two numbers in a row near '" + var + "'");
        out.push_back({sign * std::stod(t), var});
        lp.variables.insert(var);
        sign = 1.0;
      }
    }
  };
  auto finish_section = [&] {
    if (sec == Obj) {
      if (tokens.empty() || tokens[0] != "obj:") throw std::runtime_error("objective must be named obj");
      flush_terms(lp.objective, 1, tokens.size());
    } else if (sec == Rows) {
      std::size_t i = 0;
      while (i < tokens.size()) {
        LpText::Row r;
        if (tokens[i].back() != ':') throw std::runtime_error("row without name at '" + tokens[i] + "'");
        r.name = tokens[i].substr(0, tokens[i].size() - 1);
        std::size_t j = i + 1;
        while (j < tokens.size() && tokens[j] != "<=" && tokens[j] != ">=" && tokens[j] != "=") ++j;
        if (j + 1 >= tokens.size()) throw std::runtime_error("row " + r.name + " has no sense");
        flush_terms(r.terms, i + 1, j);
        r.sense = tokens[j];
        if (!is_number(tokens[j + 1])) throw std::runtime_error("row " + r.name + " has no rhs");
        r.rhs = std::stod(tokens[j + 1]);
        lp.rows.push_back(std::move(r));
        i = j + 2;
      }
    }
    tokens.clear();
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '\\') {
      const std::string key = "objective constant not written:";
      const auto k = line.find(key);
      if (k != std::string::npos) lp.constant = std::stod(line.substr(k + key.size()));
      continue;
    }
    std::istringstream ls(line);
    std::vector<std::string> words;
    for (std::string w; ls >> w;) words.push_back(w);
    if (words.empty()) continue;
    const std::string head = words[0];
    if (head == "Minimize") {
      finish_section();
      sec = Obj;
      continue;
    }
    if (head == "Subject" && words.size() == 2 && words[1] == "To") {
      finish_section();
      sec = Rows;
      continue;
    }
    if (head == "Bounds") {
      finish_section();
      sec = Bounds;
      continue;
    }
    if (head == "Binary") {
      finish_section();
      sec = Bin;
      continue;
    }
    if (head == "End") {
      finish_section();
      sec = Done;
      continue;
    }
    switch (sec) {
      case Obj:
      case Rows:
        tokens.insert(tokens.end(), words.begin(), words.end());
        break;
      case Bounds:
        if (words.size() != 5 || words[1] != "<=" || words[3] != "<=") {
          throw std::runtime_error("bad bound line: " + line);
        }
        lp.bounds[words[2]] = {std::stod(words[0]), std::stod(words[4])};
        lp.variables.insert(words[2]);
        break;
      case Bin:
        for (const auto& w : words) {
          lp.binaries.insert(w);
          lp.variables.insert(w);
        }
        break;
      default:
        throw std::runtime_error("text outside a section: " + line);
    }
  }
  if (sec != Done) throw std::runtime_error("missing End");
  return lp;
}

inline double value_of(const std::map<std::string, double>& point, const std::string& name) {
  const auto it = point.find(name);
  return it == point.end() ? 0.0 : it->second;
}

inline double evaluate_objective(const LpText& lp, const std::map<std::string, double>& point) {
  double sum = lp.constant;
  for (const auto& [c, v] : lp.objective) sum += c * value_of(point, v);
  return sum;
}

// Largest violation over rows and bounds (0 when feasible); `worst` names it.
inline double max_violation(const LpText& lp, const std::map<std::string, double>& point,
                            std::string* worst = nullptr) {
  double max_v = 0.0;
  auto note = [&](double v, const std::string& name) {
    if (v > max_v) {
      max_v = v;
      if (worst) *worst = name;
    }
  };
  for (const auto& r : lp.rows) {
    double lhs = 0.0;
    for (const auto& [c, v] : r.terms) lhs += c * value_of(point, v);
    if (r.sense == "<=") note(lhs - r.rhs, r.name);
    if (r.sense == ">=") note(r.rhs - lhs, r.name);
    if (r.sense == "=") note(std::abs(lhs - r.rhs), r.name);
  }
  for (const auto& [name, b] : lp.bounds) {
    const double x = value_of(point, name);
    note(b.first - x, name);
    note(x - b.second, name);
  }
  for (const auto& name : lp.binaries) {
    const double x = value_of(point, name);
    note(std::min(std::abs(x), std::abs(x - 1.0)), name);
  }
  for (const auto& [name, x] : point) {
    if (!lp.bounds.count(name) && !lp.binaries.count(name)) note(-x, name);  // default lb 0
  }
  return max_v;
}

}  // namespace oracle
