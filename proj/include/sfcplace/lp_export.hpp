#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sfcplace/state.hpp"

namespace sfcplace {

enum class VarKind { Binary, Continuous };

struct LpVar {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lb = 0.0;
  double ub = kInfiniteCapacity;
};

struct LpTerm {
  int var = 0;
  double coef = 0.0;
};

enum class RowSense { LE, GE, EQ };

struct LpRow {
  std::string name;
  std::vector<LpTerm> terms;
  RowSense sense = RowSense::LE;
  double rhs = 0.0;
};

// The full mixed-integer model of one placement instance. Variable and row
// naming is described in docs/lp-naming.md.
struct LpModel {
  std::vector<LpVar> vars;
  std::map<std::string, int> index;
  std::vector<LpTerm> objective;   // minimized
  double objective_offset = 0.0;   // fixed server maintenance, not in the LP text
  std::vector<LpRow> rows;

  int find(const std::string& name) const;  // -1 if absent
};

LpModel build_milp(const Scenario& scenario, const std::optional<Snapshot>& snapshot = {});

// LP text (Minimize / Subject To / Bounds / Binary / End), coefficients with
// 9 significant digits, deterministic.
std::string write_lp(const LpModel& model);
std::string export_milp(const Scenario& scenario, const std::optional<Snapshot>& snapshot = {});

// Values of every model variable at a complete placement (binary variables
// exactly 0/1, continuous ones at their tightest feasible value).
std::map<std::string, double> lp_point(const PlacementState& state, const Scenario& scenario);

// `name value` lines for all nonzero variables of lp_point.
std::string write_solution(const PlacementState& state, const Scenario& scenario);

// Rebuilds a placement from solver output. Binary values are rounded at 0.5
// after checking they lie within 1e-4 of 0 or 1. Unknown names, fractional
// binaries or conflicting assignments throw ParseError.
PlacementState import_solution(const std::string& text, const Scenario& scenario,
                               const std::optional<Snapshot>& snapshot = {});

}  // namespace sfcplace
