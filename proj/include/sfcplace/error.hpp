#pragma once

#include <stdexcept>
#include <string>

namespace sfcplace {

// Malformed input documents (topology, scenario, placement, LP solution).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Structurally invalid models: duplicate ids, dangling references, bad values.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A required (src, dst) connection does not exist.
class UnreachableError : public std::runtime_error {
 public:
  UnreachableError(int src, int dst)
      : std::runtime_error("no path from node " + std::to_string(src) +
                           " to node " + std::to_string(dst)),
        src_(src),
        dst_(dst) {}
  int src() const { return src_; }
  int dst() const { return dst_; }

 private:
  int src_;
  int dst_;
};

// A placement algorithm found no feasible (path, server sequence) for a demand.
class InfeasibleDemand : public std::runtime_error {
 public:
  InfeasibleDemand(int demand, const std::string& details)
      : std::runtime_error("demand " + std::to_string(demand) +
                           " cannot be placed: " + details),
        demand_(demand) {}
  int demand() const { return demand_; }

 private:
  int demand_;
};

}  // namespace sfcplace
