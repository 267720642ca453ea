// Derivative-free minimisation on a box or a torus.
//
// Nelder-Mead (GSL nmsimplex2) with random restarts. The evaluation budget is shared by all
// starts: each start may use an equal share of what is left, so budget
// saved by an early-converging start rolls over to the next one.
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace tfdsim {

using Objective = std::function<double(const std::vector<double>&)>;

struct MinimizeOptions {
  int max_evaluations = 200;  // total over all starts
  int restarts = 3;           // extra starts after the one at x0
  double initial_step = 0.5;  // simplex edge
  // Restart points are drawn uniformly within this radius of the best point
  // found so far (per coordinate). pi covers the whole torus.
  double restart_radius = 3.141592653589793;
  double xtol = 1e-7;  // simplex size (mean vertex distance from the centre)
  std::uint64_t seed = 0;
  bool periodic = true;  // coordinates are angles, reported in (-pi, pi]
  bool record_trace = true;
};

struct Evaluation {
  std::vector<double> x;
  double f = 0;
};

struct MinimizeResult {
  std::vector<double> x;
  double f = 0;
  int evaluations = 0;
  bool converged = false;  // the best start shrank below xtol
  std::vector<Evaluation> trace;
};

MinimizeResult minimize(const Objective& f, const std::vector<double>& x0, const MinimizeOptions& opt);

}  // namespace tfdsim
