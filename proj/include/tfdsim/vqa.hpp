// vqa.hpp
// The hybrid loop: estimated-cost minimisation at each beta, warm-started
// sweeps, the fixed-angle ("cheating") baseline, landscape scans, and
// fidelity/purity against Gibbs targets.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tfdsim/circuit.hpp"
#include "tfdsim/noise.hpp"
#include "tfdsim/optimize.hpp"
#include "tfdsim/tfd.hpp"
#include "tfdsim/tomo.hpp"

namespace tfdsim {

struct OptimizerBudget {
  int max_evaluations = 200;
  int remeasure_count = 2;
  long cost_shots = 4096;
  long tomo_shots = 16384;
  int restarts = 3;
  double initial_step = 0.6;
  // Restarts stay near the incumbent so warm starts are not thrown away.
  double restart_radius = 0.5;

  void validate() const;
};

enum class SweepMode { Variational, Cheating };
const char* mode_name(SweepMode m);
SweepMode mode_from_name(const std::string& s);

std::vector<double> default_beta_grid();

struct SweepPlan {
  std::vector<double> betas = default_beta_grid();
  VariationalAngles initial_guess{};
  int noise_level = 0;
  SweepMode mode = SweepMode::Variational;

  void validate() const;
};

// Everything an evaluation needs besides the angles.
class VqaContext {
 public:
  VqaContext(const DeviceConfig& cfg, int level, bool exact, std::uint64_t seed, double varsigma = 1.57);

  const NoiseModel& model() const { return model_; }
  const ReadoutModel& readout() const { return readout_; }
  bool exact() const { return exact_; }
  std::uint64_t seed() const { return seed_; }
  double varsigma() const { return varsigma_; }

  // Compiled ansatz run under the noise model from |0000>.
  DensityMatrix prepare(const VariationalAngles& a) const;

  // Readout calibration for one evaluation: exact coefficients in exact
  // mode, otherwise a fresh shot-limited calibration on its own stream.
  MeasurementModel calibration(long shots, std::uint64_t stream) const;

 private:
  NoiseModel model_;
  ReadoutModel readout_;
  MeasurementModel exact_model_;
  bool exact_;
  std::uint64_t seed_;
  double varsigma_;
};

struct CostEvaluation {
  VariationalAngles angles;
  double cost = 0;
  CostTerms terms;
};

// Compile, simulate, calibrate, measure the eighteen cost settings, and
// combine. `stream` selects the random stream (ignored in exact mode).
CostEvaluation evaluate_candidate(const VariationalAngles& a, double beta, const VqaContext& ctx, long shots,
                                  std::uint64_t stream);

struct SweepRecord {
  double beta = 0;
  SweepMode mode = SweepMode::Variational;
  int level = 0;
  VariationalAngles initial_angles;
  VariationalAngles final_angles;
  std::vector<Evaluation> cost_trace;  // optimiser calls, or remeasurements in cheating mode
  std::vector<double> remeasured;      // costs of the best point at tomo_shots
  double c_final = 0;                  // mean of `remeasured`
  DensityMatrix rho_exp_a, rho_exp_b;
  double f_a = 0, f_b = 0, p_a = 0, p_b = 0;

  double f_mean() const { return 0.5 * (f_a + f_b); }
};

// Gibbs fidelity and purity of a tomographic estimate (fidelity clamps the
// estimate's negative eigenvalues; purity is clamped to [0, 1]).
double gibbs_fidelity(const DensityMatrix& rho_exp, double beta, System s);
double clamped_purity(const DensityMatrix& rho_exp);

// Remeasure and tomograph a fixed point; fills everything except the trace.
void finalize_record(SweepRecord& rec, const VqaContext& ctx, const OptimizerBudget& budget, std::uint64_t tag);

SweepRecord optimize_at_beta(double beta, const VariationalAngles& guess, const OptimizerBudget& budget,
                             const VqaContext& ctx, std::uint64_t tag = 0);

// Level-0 optimum of the exact cost along the grid, warm-started from the
// all-zero angles. These are the angles of the fixed-angle baseline.
std::vector<VariationalAngles> ideal_optimal_angles(const std::vector<double>& betas, double varsigma,
                                                    std::uint64_t seed, int evaluations = 2000);

std::vector<SweepRecord> run_sweep(const SweepPlan& plan, const OptimizerBudget& budget, const VqaContext& ctx);

enum class ScanAxis { Gamma, Alpha };
struct LandscapeScan {
  ScanAxis axis = ScanAxis::Gamma;
  std::vector<double> grid;                  // shared by both angles of the pair
  std::vector<std::vector<double>> values;   // values[i][j] at (grid[i], grid[j])
};
// Scans (gamma1, gamma2) at alpha = 0 or (alpha1, alpha2) at gamma = 0 over
// n x n points spanning [lo, hi] inclusive.
LandscapeScan landscape_scan(ScanAxis axis, double beta, const VqaContext& ctx, long shots, int n = 10,
                             double lo = 0.0, double hi = 3.141592653589793);

// Serialisation.
std::string record_json(const SweepRecord& r);
std::string summary_header();
std::string summary_row(const SweepRecord& r);

}  // namespace tfdsim
