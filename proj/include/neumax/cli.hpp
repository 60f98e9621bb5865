#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace neumax::cli {

/// Fully resolved settings of one invocation; embedded in every report.
struct RunConfig {
  std::string command;
  int n_r = 96;
  int n_theta = 192;
  double h = 0.02;
  double eps = 1e-3;   // multiplicity threshold
  double tol = 1e-10;  // renormalization tolerance
  std::uint64_t seed = 0;
  std::string output;  // empty: standard output
  std::string format = "json";

  nlohmann::json to_json() const;
};

/// Exit codes: 0 success, 2 an asserted inequality failed, 1 usage or I/O error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace neumax::cli
