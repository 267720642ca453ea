// tomo.hpp
// Readout simulation and linear-inversion inference.
//
// Measurement operators follow the transmon readout model
//   M_i  = c_I I_i + c_Z Z_i + c_2 |2><2|_i
//   M_ji = sum_{P,Q in {I,Z}} c_PQ P_j Q_i + leakage terms
// where I is the identity on the qubit subspace {|0>, |1>} only. A leaked
// site therefore reads c_2 (or the corresponding pair coefficient).
//
// The simulator samples outcomes through an independent classical
// confusion channel per site (ReadoutModel); the coefficients implied by
// that channel are the "truth" that calibration tries to recover.

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tfdsim/circuit.hpp"
#include "tfdsim/linalg.hpp"
#include "tfdsim/noise.hpp"
#include "tfdsim/tfd.hpp"

namespace tfdsim {

// P(m = +1 | level k) for k = 0, 1, 2.
struct SiteReadout {
  std::array<double, 3> p_plus{1.0, 0.0, 0.0};

  double response(int level) const { return 2 * p_plus.at(level) - 1; }
  // Symmetric assignment error eps = 1 - fidelity; |2> reads like |1> shifted
  // by `c2_offset` in the c_2 coefficient.
  static SiteReadout from_assignment(double fidelity, double c2_offset = 0.0);
};

struct ReadoutModel {
  std::map<std::string, SiteReadout> sites;

  const SiteReadout& site(const std::string& s) const;
  static ReadoutModel ideal(const std::vector<std::string>& labels);
  static ReadoutModel from_config(const DeviceConfig& cfg);
};

struct SiteCoefficients {
  double c_i = 0, c_z = 1, c_2 = -1;
};

struct PairCoefficients {
  double c_ii = 0, c_iz = 0, c_zi = 0, c_zz = 1;
  // Leakage terms; never calibrated.
  double c_2i = 0, c_2z = 0, c_i2 = 0, c_z2 = 0, c_22 = 1;

  // Coefficients with the roles of j and i exchanged.
  PairCoefficients swapped() const;
};

class MeasurementModel {
 public:
  std::map<std::string, SiteCoefficients> sites;

  const SiteCoefficients& site(const std::string& s) const;
  // Coefficients for the ordered pair (j, i); stored pairs are found in
  // either order.
  PairCoefficients pair(const std::string& j, const std::string& i) const;
  void set_pair(const std::string& j, const std::string& i, const PairCoefficients& c);
  const std::map<std::pair<std::string, std::string>, PairCoefficients>& pairs() const { return pairs_; }

  // Throws Error when any coefficient is outside [-1, 1].
  void validate() const;

  // Product-form coefficients implied by independent confusion channels.
  static MeasurementModel from_readout(const ReadoutModel& r);
  static MeasurementModel ideal(const std::vector<std::string>& labels);

  // Operators on a site of dimension dim (2 or 3).
  Matrix site_operator(const std::string& s, int dim) const;
  Matrix pair_operator(const std::string& j, const std::string& i, int dim) const;

 private:
  std::map<std::pair<std::string, std::string>, PairCoefficients> pairs_;
};

enum class Axis { X, Y, Z };
char axis_char(Axis a);

struct SignedBasis {
  Axis axis = Axis::Z;
  int sign = +1;

  // Pre-rotation that maps the measured Z onto sign * axis (identity on |2>).
  // Returns false when no rotation is needed.
  bool pre_rotation(const std::string& site, Gate& out) const;
  std::string name() const;
};

// One basis per site, in register order.
struct BasisSetting {
  std::vector<std::string> sites;
  std::vector<SignedBasis> bases;

  std::string name() const;
  const SignedBasis& basis(const std::string& site) const;
};

// The eighteen cost settings on B2, B1, A2, A1: nine sign patterns measured
// in Z (first nine) and in X (last nine).
const std::vector<BasisSetting>& cost_settings();
// The 36 settings {+-X, +-Y, +-Z}^2 on the given two sites.
std::vector<BasisSetting> tomography_settings(const std::string& site_j, const std::string& site_i);

// Single-site and pair averages for one setting.
struct Averages {
  BasisSetting setting;
  std::string label;  // row name in dumps; defaults to the setting name
  std::vector<std::string> sites;
  std::vector<double> single;  // per site
  // pair[(j,i)] for j before i in register order
  std::map<std::pair<std::string, std::string>, double> pair;
  long shots = 0;  // 0 means expectation values

  double of(const std::string& s) const;
  double of(const std::string& j, const std::string& i) const;
};

struct SamplingOptions {
  long shots = 4096;  // 0: exact expectation values
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;  // distinguishes calls that share a seed
};

// Pre-rotates `rho` (ideal gates), then reads every site of its register.
Averages simulate_measurement(const DensityMatrix& rho, const BasisSetting& setting, const ReadoutModel& readout,
                              const SamplingOptions& opt);

// Expectation-value form Tr(M rho_rot) with explicit coefficients; used as
// the reference for the sampler and by tests.
Averages expected_averages(const DensityMatrix& rho, const BasisSetting& setting, const MeasurementModel& model);

// Least-squares fit of c_I, c_Z per site and c_II, c_IZ, c_ZI, c_ZZ per pair
// from the 2^n computational-state preparations. Leakage coefficients are
// copied from the coefficients implied by `readout`.
struct CalibrationData {
  std::vector<std::vector<int>> preparations;
  std::vector<Averages> averages;
};
MeasurementModel calibrate(const ReadoutModel& readout, const std::vector<std::string>& labels,
                           const SamplingOptions& opt, CalibrationData* raw = nullptr);

// Balanced estimators over groups of settings: for a single site the mean of
// the +P settings minus the mean of the -P settings, over 2 c_Z; for a pair
// the signed combination of the four sign-class means, over 4 c_ZZ.
double estimate_single(const std::vector<Averages>& data, const std::string& site, Axis axis,
                       const MeasurementModel& model);
double estimate_pair(const std::vector<Averages>& data, const std::string& j, Axis aj, const std::string& i, Axis ai,
                     const MeasurementModel& model);

// Cost terms from the eighteen cost settings (any order; all must be present).
CostTerms estimate_cost_terms(const std::vector<Averages>& data, const MeasurementModel& model);

struct CostMeasurement {
  std::vector<Averages> averages;
  CostTerms terms;
};
CostMeasurement measure_cost_terms(const DensityMatrix& rho, const ReadoutModel& readout,
                                   const MeasurementModel& model, const SamplingOptions& opt);

struct TomographyResult {
  DensityMatrix rho_exp;  // Hermitian, unit trace, possibly slightly negative
  // <P_i>, <P_j> for P = X, Y, Z, then <Q_j P_i> for Q, P = X, Y, Z.
  std::array<double, 15> pauli_estimates{};
  long shot_count = 0;
  std::vector<Averages> averages;
};

// Two-site tomography of one system on the full state.
TomographyResult tomography_2q(const DensityMatrix& rho, System system, const ReadoutModel& readout,
                               const MeasurementModel& model, const SamplingOptions& opt);
// Same for an arbitrary ordered pair of sites (j is the more significant).
TomographyResult tomography_2q(const DensityMatrix& rho, const std::string& site_j, const std::string& site_i,
                               const ReadoutModel& readout, const MeasurementModel& model,
                               const SamplingOptions& opt);

// Image of a two-qutrit state under qubit tomography with leakage-blind
// estimators: qubit block copied, single-leaked blocks become the other
// qubit's state times I/2, |22><22| becomes I/4, all other elements vanish.
DensityMatrix leakage_map(const DensityMatrix& rho2);

// Delimiter-separated dump: fixed header, one row per setting.
std::string averages_table(const std::vector<Averages>& rows, const std::vector<std::string>& sites);

}  // namespace tfdsim
