#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace fracsing::cli {

struct Settings {
  int n = 3;
  double sigma = 0.5;
  double p = 1.8;
  int n_xi = 128;
  int n_eta = 64;
  int quad_order = 128;
  double tol = 0.0;  // 0: the command's own default
  bool with_oracle = false;
  std::filesystem::path out_dir;
  double inner_r = 0.2;
  double outer_r = 2.5;
  double perturbation = 0.0;
  int energy_samples = 64;
  std::vector<std::string> suites;
};

nlohmann::ordered_json params_json(const Settings& s);

int cmd_constant(const Settings& s);
int cmd_verify(const Settings& s);
int cmd_solve(const Settings& s);

// 0 ok, 1 a check failed, 2 bad input, 3 the solver gave up.
enum Exit : int { kOk = 0, kVerifyFailed = 1, kBadInput = 2, kSolverFailed = 3 };

}  // namespace fracsing::cli
