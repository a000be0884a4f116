#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kslab/quadrature.hpp"

namespace kslab {

// Flat key=value configuration with [section] headers; CLI flags override.
struct RunConfig {
  // [potential]
  std::string potential_name = "quartic";
  double shape_b = 0.5;

  // [run]
  std::vector<double> epsilons = {0.35, 0.3, 0.25};
  double alpha = 0.5;
  double u0 = 1.5;
  double T = 2.0;
  std::uint64_t seed = 42;
  std::string initial_profile;  // optional CSV path (x,u columns)

  // [grid]
  double L = 3.0;
  int n_base = 400;
  std::string grading = "graded";  // graded | uniform
  bool eps_aware = true;

  // [time]
  double dt = 5e-4;
  double theta = 1.0;
  double snapshots_per_unit = 100.0;
  bool record_every_step = false;

  // [quadrature]
  QuadratureSettings quad;

  // [output]
  std::string out_dir = "out";

  void validate() const;  // throws config_error
};

RunConfig parse_config_file(const std::string& path);
void apply_key(RunConfig& cfg, const std::string& section, const std::string& key,
               const std::string& value);

std::vector<double> parse_eps_list(const std::string& csv);

}  // namespace kslab
