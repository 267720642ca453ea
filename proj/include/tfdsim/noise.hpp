// noise.hpp
// Device configuration and the incremental error models 0-4.
//
//   level 0  ideal gates, no idling noise
//   level 1  + amplitude damping (T1) and pure dephasing (T2 echo) while idling
//   level 2  + reduced T2 on the fluxed transmon during CZ
//   level 3  + residual ZZ crosstalk between coupled pairs
//   level 4  + coherent |11> <-> |02> leakage excursion at each CZ
//
// Levels 0-3 never populate |2>, so they simulate on qubit sites; level 4
// uses qutrit sites.

#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "tfdsim/circuit.hpp"
#include "tfdsim/linalg.hpp"

namespace tfdsim {

struct SiteParams {
  double t1 = 0;                   // s
  double t2_echo = 0;              // s
  double sweetspot_freq = 0;       // Hz
  double readout_freq = 0;         // Hz
  double assignment_fidelity = 1;  // average, in [0.5, 1]
};

struct PairParams {
  std::string a, b;
  std::string fluxed;          // site moved in frequency during CZ
  double zz_strength = 0;      // Hz, residual always-on ZZ
  double cz_leakage_l1 = 0;    // average leakage per CZ (from |11>: 4 * L1)
  double cz_t2_flux = 0;       // s, 0 means "derive from the 1/f helper"
  bool has_cz = true;

  bool matches(const std::string& x, const std::string& y) const {
    return (a == x && b == y) || (a == y && b == x);
  }
  std::string other() const { return fluxed == a ? b : a; }
};

class DeviceConfig {
 public:
  std::map<std::string, SiteParams> sites;
  std::vector<PairParams> pairs;

  double single_qubit_gate_time = 20e-9;
  double cz_idle_time = 35e-9;    // each of the two idle blocks around the CZ
  double cz_margin_time = 10e-9;  // noiseless phase-correction margin
  double slice_time = 10e-9;      // maximum Trotter slice
  double flux_noise_sqrt_a = 1e-6;  // flux quanta
  double anharmonicity = -300e6;    // Hz, used by the flux-T2 helper only
  bool leakage_dephasing = false;   // decohere leaked vs computational states
  double readout_c2_offset = 0.0;   // c_2 = c_I - c_Z + offset

  double cz_time() const { return 2 * cz_idle_time + cz_margin_time; }

  // Apply one `key = value` assignment. Keys:
  //   site.<S>.{T1,T2_echo,sweetspot_freq,readout_freq,assignment_fidelity}
  //   pair.<S>-<S>.{fluxed,zz,cz_leakage_L1,cz_T2_flux,cz}
  //   gate.{single_qubit_time,cz_idle_time,cz_margin_time,slice_time}
  //   noise.{flux_noise_sqrt_A,anharmonicity,leakage_dephasing}
  //   readout.c2_offset
  void set(const std::string& key, const std::string& value);
  void validate() const;

  const SiteParams& site(const std::string& s) const;
  const PairParams& pair(const std::string& x, const std::string& y) const;
  const PairParams* find_pair(const std::string& x, const std::string& y) const;
  std::vector<std::string> site_labels() const;

  // Parses `key = value` lines; `#` starts a comment. Validates the result.
  static DeviceConfig parse(const std::string& text);
  static DeviceConfig load(const std::string& path);
  // Bundled defaults (the same values as data/device_default.cfg).
  static DeviceConfig defaults();
  std::string to_text() const;

 private:
  PairParams& pair_mut(const std::string& x, const std::string& y);
};

// Echo coherence of the fluxed transmon at its CZ operating point from a 1/f
// flux-noise model: f(Phi) = f_max sqrt|cos(pi Phi/Phi0)|, operating point
// f_other + |anharmonicity|, Gamma_phi = 2 pi sqrt(A) |df/dPhi| sqrt(ln 2),
// combined with T1. Advisory only; the pulse amplitude is not modelled.
double flux_t2_estimate(const DeviceConfig& cfg, const PairParams& pair);

// Per-gate leakage from a randomized-benchmarking number quoted per
// two-qubit Clifford (1.5 CZ per Clifford on average).
inline double leakage_per_gate_from_clifford(double per_clifford) { return per_clifford / 1.5; }

enum class Mechanism { Damping, FluxDephasing, ZZCrosstalk, Leakage };
const char* mechanism_name(Mechanism m);

class NoiseModel {
 public:
  NoiseModel(int level, DeviceConfig cfg);

  int level() const { return level_; }
  const DeviceConfig& config() const { return cfg_; }
  std::vector<Mechanism> mechanisms() const;
  bool has(Mechanism m) const;

  int site_dim() const { return level_ >= 4 ? 3 : 2; }
  Register sim_register() const { return ansatz_register(site_dim()); }

  // Lindblad propagator of the single-site idle channel (row-major vec).
  // Cached; safe to call from several threads.
  const Matrix& idle_superop(int dim, double duration, double t1, double t2) const;

 private:
  int level_;
  DeviceConfig cfg_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::tuple<int, double, double, double>, std::unique_ptr<Matrix>> cache_;
};

// Idle channel generator for one site: amplitude damping 1->0 at 1/T1 and
// 2->1 at 2/T1, pure dephasing 1/T_phi = 1/T2 - 1/(2 T1) (clamped at 0).
// Throws when t2 exceeds 2 t1 by more than 5 % (unphysical).
Matrix idle_lindbladian(int dim, double t1, double t2);
Matrix idle_propagator(int dim, double duration, double t1, double t2);

DensityMatrix idle_channel(const DensityMatrix& rho, const std::string& site, double duration, double t1, double t2);
DensityMatrix zz_crosstalk_step(const DensityMatrix& rho, const PairParams& pair, double duration);

struct IdleOptions {
  std::map<std::string, double> t2_override;  // site -> T2 during this idle
  std::vector<std::pair<std::string, std::string>> zz_excluded;
};

// Damping slices of at most slice_time with ZZ steps at the slice
// boundaries (half steps at both ends, so the splitting is symmetric).
// Slice count is ceil(duration / slice_time).
void trotterized_idle_inplace(DensityMatrix& rho, double duration, const NoiseModel& model,
                              const IdleOptions& opt = {});
DensityMatrix trotterized_idle(const DensityMatrix& rho, double duration, const NoiseModel& model,
                               const IdleOptions& opt = {});

// Excursion unitary on (other, fluxed) with sin^2(theta) = 4 L1 between
// |1,1> and |0,2>. Dimension 9 (two qutrits).
Matrix leakage_unitary(double l1);

DensityMatrix apply_cz(const DensityMatrix& rho, const std::string& a, const std::string& b, const NoiseModel& model);
DensityMatrix apply_single_qubit_gate(const DensityMatrix& rho, const Gate& g, const NoiseModel& model);

// One moment: all sites idle for the moment duration (20 ns, or the CZ
// duration if the moment holds a CZ); rotations happen 10 ns in, CZs at the
// end of the first CZ idle block. MEASURE gates are ignored here.
void apply_moment_inplace(DensityMatrix& rho, const std::vector<Gate>& moment, const NoiseModel& model);

// Runs the circuit from |0...0> on model.sim_register().
DensityMatrix run_circuit(const Circuit& c, const NoiseModel& model);
void run_circuit_inplace(DensityMatrix& rho, const Circuit& c, const NoiseModel& model);

}  // namespace tfdsim
