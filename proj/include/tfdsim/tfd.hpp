// tfd.hpp
// Exact targets for the two-spin transverse-field Ising model: Hamiltonians,
// Gibbs and thermofield-double states, the engineered cost function and the
// calibration of its exponent.
//
// Two copies of the chain: A = (A2, A1) and B = (B2, B1). The full register
// is ansatz_register() = B2, B1, A2, A1.

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tfdsim/circuit.hpp"
#include "tfdsim/linalg.hpp"
#include "tfdsim/optimize.hpp"

namespace tfdsim {

struct IsingParams {
  double g = 1.0;
};

enum class System { A, B, BA };
const char* system_name(System s);

// Sites of a system in register order.
std::vector<std::string> system_sites(System s);
Register system_register(System s);

// H_A = Z Z + g (X + X) on A, H_B likewise, H_BA = XX_BA + ZZ_BA.
Observable hamiltonian(System s, const IsingParams& p = {});

// 4x4 Hamiltonian of one chain (first factor = site 2).
Matrix chain_hamiltonian(const IsingParams& p = {});

struct Eigensystem {
  RealVector energies;  // ascending
  Matrix vectors;       // real columns, first nonzero component positive
};
Eigensystem chain_eigensystem(const IsingParams& p = {});

// exp(-beta H)/Z on the given system's two sites.
DensityMatrix gibbs_state(double beta, const IsingParams& p = {}, System s = System::A);
// sum_j exp(-beta E_j/2) |j>_B |j>_A / sqrt(Z) on the full register.
Vector tfd_vector(double beta, const IsingParams& p = {});
DensityMatrix tfd_state(double beta, const IsingParams& p = {});

// The six cost expectations.
struct CostTerms {
  double x_a = 0, x_b = 0, zz_a = 0, zz_b = 0, xx_ba = 0, zz_ba = 0;

  static const std::array<const char*, 6>& names();
  // Throws Error when any of the six names is missing.
  static CostTerms from_map(const std::map<std::string, double>& m);
  std::map<std::string, double> to_map() const;
};

struct CostSpec {
  double varsigma = 1.57;
  double beta = 0.0;

  void validate() const;
};

// Below this beta the cost switches to its beta -> 0 limit.
constexpr double kBetaZero = 1e-9;

double cost_value(const CostTerms& t, const CostSpec& spec);
// The same cost as an operator on the four-site register.
Matrix cost_operator(const CostSpec& spec);

// The six cost-term operators (16x16) in CostTerms order.
const std::array<Matrix, 6>& cost_term_operators();
CostTerms cost_terms_of(const Vector& psi);
CostTerms cost_terms_of(const DensityMatrix& rho);

// Ideal single-step ansatz acting on Bell pairs, evaluated directly on a
// 16-dimensional state vector (the fast path for noiseless optimisation).
Vector ideal_ansatz_state(const VariationalAngles& a);

// The fifteen operators compared in the calibration objective.
struct NamedOperator {
  std::string name;
  Matrix op;
};
const std::vector<NamedOperator>& calibration_operators();

struct CostCalibrationSpec {
  std::vector<double> betas = default_betas();
  std::vector<double> varsigma_grid = default_varsigma_grid();
  int inner_evaluations_per_start = 400;
  int inner_restarts = 3;
  std::uint64_t seed = 1;
  IsingParams ising{};

  // {10^(x/2) : x = -8..8}
  static std::vector<double> default_betas();
  // 1.00, 1.01, ..., 2.00
  static std::vector<double> default_varsigma_grid();
};

struct XiResult {
  double varsigma = 0;
  double value = 0;
  std::vector<double> per_beta;
  std::vector<VariationalAngles> angles;
  // True when an inner optimisation ran out of budget before converging.
  bool flagged = false;
};

// Minimises the level-0 cost at a given beta over the four angles.
MinimizeResult minimize_ideal_cost(const CostSpec& spec, const MinimizeOptions& opt,
                                   const VariationalAngles& guess = {});

XiResult xi_objective(double varsigma, const CostCalibrationSpec& calib);

struct CalibrationResult {
  std::vector<XiResult> scan;
  std::size_t argmin = 0;
  double best_varsigma() const { return scan.at(argmin).varsigma; }
};
CalibrationResult calibrate_varsigma(const CostCalibrationSpec& calib);

// 1 - |<TFD(beta)|psi>|^2
double tfd_infidelity(const Vector& psi, double beta, const IsingParams& p = {});

}  // namespace tfdsim
