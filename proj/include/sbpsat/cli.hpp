#pragma once

#include <complex>
#include <string>
#include <vector>

namespace sbpsat::cli {

// Flat experiment configuration. JSON config files carry these keys; command
// line flags override whatever the file set.
struct ExperimentConfig {
  std::string problem = "advection";
  int order = 4;
  std::vector<long> levels;      // grid sizes for converge/functional
  double a = 1.0;
  double epsilon = 0.05;
  std::string d2_mode = "narrow";
  double sigma = -1.0;
  double sigma_left = 0.0;
  double perturb_sigma_r = 0.0;
  std::string lambda = "-1+0i";
  double t_final = 0.5;
  double cfl = 0.5;
  std::vector<long> nodes;       // time-node counts for time-sbp
  long n = 65;
  std::string u0 = "default";    // zero | sine | bump | default (per problem)
  std::string out_dir;           // empty: SBPSAT_OUT, else "."
  unsigned long long seed = 20260801ULL;
  bool allow_unstable = false;
};

std::complex<double> parse_complex(const std::string& text);

// Expected fitted rate for a problem at an order, per the rate laws
// min(r+1,p) hyperbolic / min(r+2,p) parabolic with the narrow operator.
double expected_rate(const std::string& problem, int order,
                     const std::string& d2_mode);

// Exit codes: 0 pass, 1 declared tolerance violated, 2 usage/config error.
int run_cli(int argc, const char* const* argv);

}  // namespace sbpsat::cli
