// circuit.hpp
// Gate-level intermediate representation and the compilation pipeline that
// turns the abstract single-step ansatz into native gates (RXY, RZ, CZ).
//
// Angle conventions (matrix products read right to left, time left to right):
//   RXY(phi, theta) = exp(-i theta/2 (cos phi X + sin phi Y))
//   RZ(alpha)       = exp(-i alpha/2 Z)
//   EXP_ZZ(phi)     = exp(-i phi/2 Z Z),  EXP_XX likewise
//   CNOT targets are (control, target); PREP_BELL targets are (b, a) and
//   prepares (|00> + |11>)/sqrt2 from |00>.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tfdsim/linalg.hpp"

namespace tfdsim {

enum class GateKind { RXY, RZ, CZ, CNOT, EXP_ZZ, EXP_XX, PREP_BELL, MEASURE };

const char* gate_name(GateKind k);
GateKind gate_kind_from_name(const std::string& name);

struct Gate {
  GateKind kind = GateKind::RZ;
  std::vector<std::string> targets;
  double phi = 0.0;    // RXY axis, RZ angle, EXP_* angle
  double theta = 0.0;  // RXY rotation angle
  // Angle depends on a variational parameter. Compilation never removes or
  // specialises such gates based on their current value, so the compiled
  // structure (and depth) is the same for every angle set.
  bool variational = false;

  static Gate rxy(const std::string& s, double phi, double theta);
  static Gate rx(const std::string& s, double theta) { return rxy(s, 0.0, theta); }
  static Gate ry(const std::string& s, double theta);
  static Gate rz(const std::string& s, double alpha);
  static Gate cz(const std::string& a, const std::string& b);
  static Gate cnot(const std::string& c, const std::string& t);
  static Gate exp_zz(const std::string& a, const std::string& b, double phi);
  static Gate exp_xx(const std::string& a, const std::string& b, double phi);
  static Gate prep_bell(const std::string& b, const std::string& a);
  static Gate measure(const std::string& s);

  bool single_qubit() const { return kind == GateKind::RXY || kind == GateKind::RZ; }
  bool acts_on(const std::string& s) const;
  // Qubit-subspace matrix (2x2 or 4x4). Throws for PREP_BELL and MEASURE.
  Matrix matrix() const;
  // Throws Error unless the invariants hold (finite angles, target count).
  void validate() const;
};

struct VariationalAngles {
  double alpha1 = 0.0, alpha2 = 0.0, gamma1 = 0.0, gamma2 = 0.0;

  // Each component mapped to (-pi, pi].
  VariationalAngles wrapped() const;
  std::vector<double> to_vector() const { return {alpha1, alpha2, gamma1, gamma2}; }
  static VariationalAngles from_vector(const std::vector<double>& v);
};

double wrap_angle(double a);

class Circuit {
 public:
  Circuit() = default;
  explicit Circuit(Register reg) : reg_(std::move(reg)) {}

  // Gates in time order, packed greedily into the earliest free moment.
  static Circuit from_gates(Register reg, const std::vector<Gate>& gates);

  const Register& reg() const { return reg_; }
  const std::vector<std::vector<Gate>>& moments() const { return moments_; }
  std::size_t depth() const { return moments_.size(); }

  // Left-aligned insertion after every earlier gate on the same sites.
  void append(const Gate& g);
  // Start a fresh moment containing `gates` (they must be disjoint).
  void append_moment(const std::vector<Gate>& gates);

  // Flattened gates in time order (moment by moment).
  std::vector<Gate> gates() const;
  std::size_t count(GateKind k) const;

 private:
  Register reg_;
  std::vector<std::vector<Gate>> moments_;
};

// Qubit register B2, B1, A2, A1 used by the ansatz.
Register ansatz_register(int dim = 2);

// Bell pairs on (B2,A2) and (B1,A1), then exp(-i g1 (X_B+X_A)/2),
// exp(-i g2 (ZZ_B+ZZ_A)/2), exp(-i a1 XX_BA/2), exp(-i a2 ZZ_BA/2).
Circuit build_abstract_circuit(const VariationalAngles& angles);

Circuit pass_decompose_exponentials(const Circuit& c);
Circuit pass_cnot_to_cz(const Circuit& c);
Circuit pass_reduce_depth(const Circuit& c);

struct RzEliminationResult {
  Circuit circuit;
  // Per-site RZ angle that was dropped at the start of the circuit:
  // unitary_of(input) = unitary_of(circuit) * (RZ frame applied first).
  std::vector<double> dropped_frame;
};
RzEliminationResult eliminate_rz_with_frame(const Circuit& c);
Circuit pass_eliminate_rz(const Circuit& c);

struct PipelineOptions {
  bool reduce_depth = true;
  // Negative-control fixture: perturbs one rotation after compilation.
  bool tamper = false;
};

struct CompiledCircuit {
  Circuit circuit;
  std::vector<double> dropped_frame;
};
CompiledCircuit compile(const Circuit& abstract, const PipelineOptions& opt = {});
Circuit compile_ansatz(const VariationalAngles& angles, const PipelineOptions& opt = {});

// Product of gate matrices over the circuit register; single-qubit gates and
// CZ act as identity on level |2>. PREP_BELL and MEASURE are rejected.
Matrix unitary_of(const Circuit& c);

// Unitary that PREP_BELL stands for on |00>: CNOT(b,a) . RY(90)_b.
Matrix prep_bell_unitary();

// Unitary of an abstract circuit with each PREP_BELL expanded in place.
Matrix reference_unitary(const Circuit& abstract);

// Deviation of a compiled circuit (with its dropped RZ frame restored) from
// the abstract circuit, up to global phase.
double compilation_deviation(const Circuit& abstract, const CompiledCircuit& compiled);

// max |U - e^{i phi} V| with phi aligning the largest-magnitude element of V.
double phase_aligned_distance(const Matrix& u, const Matrix& v);

// One gate per line: `GATE target[,target] angle[,angle]`, angles with 12
// significant digits. A leading `# register` line records the sites.
std::string serialize(const Circuit& c);
Circuit parse_circuit(const std::string& text);

}  // namespace tfdsim
