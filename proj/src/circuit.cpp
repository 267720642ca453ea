#include "tfdsim/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

namespace tfdsim {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAngleTol = 1e-12;
constexpr std::size_t npos = static_cast<std::size_t>(-1);

bool angle_eq(double a, double b, double period) {
  return std::abs(std::remainder(a - b, period)) < kAngleTol;
}

Matrix pauli2(char p) { return ops::pauli(p, 2); }

Matrix rotation(double nx, double ny, double nz, double theta) {
  const Matrix n = nx * pauli2('X') + ny * pauli2('Y') + nz * pauli2('Z');
  return std::cos(theta / 2) * Matrix::Identity(2, 2) - cplx(0, std::sin(theta / 2)) * n;
}

bool is_diag(const Matrix& m) { return std::abs(m(0, 1)) < 1e-12 && std::abs(m(1, 0)) < 1e-12; }
bool is_antidiag(const Matrix& m) { return std::abs(m(0, 0)) < 1e-12 && std::abs(m(1, 1)) < 1e-12; }

// Lift a 4x4 qubit-pair matrix onto sites of dimension da, db.
Matrix lift_pair(const Matrix& m4, int da, int db) {
  const int d = da * db;
  Matrix out = Matrix::Identity(d, d);
  const int idx[4] = {0, 1, db, db + 1};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) out(idx[r], idx[c]) = m4(r, c);
  return out;
}

std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

double wrap_angle(double a) {
  double r = std::remainder(a, 2 * kPi);  // [-pi, pi]
  if (r <= -kPi) r += 2 * kPi;
  return r;
}

VariationalAngles VariationalAngles::wrapped() const {
  return {wrap_angle(alpha1), wrap_angle(alpha2), wrap_angle(gamma1), wrap_angle(gamma2)};
}

VariationalAngles VariationalAngles::from_vector(const std::vector<double>& v) {
  if (v.size() != 4) throw Error("expected 4 variational angles");
  return {v[0], v[1], v[2], v[3]};
}

const char* gate_name(GateKind k) {
  switch (k) {
    case GateKind::RXY: return "RXY";
    case GateKind::RZ: return "RZ";
    case GateKind::CZ: return "CZ";
    case GateKind::CNOT: return "CNOT";
    case GateKind::EXP_ZZ: return "EXP_ZZ";
    case GateKind::EXP_XX: return "EXP_XX";
    case GateKind::PREP_BELL: return "PREP_BELL";
    case GateKind::MEASURE: return "MEASURE";
  }
  return "?";
}

GateKind gate_kind_from_name(const std::string& name) {
  for (auto k : {GateKind::RXY, GateKind::RZ, GateKind::CZ, GateKind::CNOT, GateKind::EXP_ZZ, GateKind::EXP_XX,
                 GateKind::PREP_BELL, GateKind::MEASURE})
    if (name == gate_name(k)) return k;
  throw Error("unknown gate '" + name + "'");
}

Gate Gate::rxy(const std::string& s, double phi, double theta) { return {GateKind::RXY, {s}, phi, theta}; }
Gate Gate::ry(const std::string& s, double theta) { return rxy(s, kPi / 2, theta); }
Gate Gate::rz(const std::string& s, double alpha) { return {GateKind::RZ, {s}, alpha, 0.0}; }
Gate Gate::cz(const std::string& a, const std::string& b) { return {GateKind::CZ, {a, b}, 0.0, 0.0}; }
Gate Gate::cnot(const std::string& c, const std::string& t) { return {GateKind::CNOT, {c, t}, 0.0, 0.0}; }
Gate Gate::exp_zz(const std::string& a, const std::string& b, double phi) { return {GateKind::EXP_ZZ, {a, b}, phi, 0.0}; }
Gate Gate::exp_xx(const std::string& a, const std::string& b, double phi) { return {GateKind::EXP_XX, {a, b}, phi, 0.0}; }
Gate Gate::prep_bell(const std::string& b, const std::string& a) { return {GateKind::PREP_BELL, {b, a}, 0.0, 0.0}; }
Gate Gate::measure(const std::string& s) { return {GateKind::MEASURE, {s}, 0.0, 0.0}; }

bool Gate::acts_on(const std::string& s) const {
  return std::find(targets.begin(), targets.end(), s) != targets.end();
}

void Gate::validate() const {
  if (!std::isfinite(phi) || !std::isfinite(theta)) throw Error(std::string(gate_name(kind)) + ": non-finite angle");
  const bool two = kind == GateKind::CZ || kind == GateKind::CNOT || kind == GateKind::EXP_ZZ ||
                   kind == GateKind::EXP_XX || kind == GateKind::PREP_BELL;
  if (targets.size() != (two ? 2u : 1u)) throw Error(std::string(gate_name(kind)) + ": wrong number of targets");
  if (two && targets[0] == targets[1]) throw Error(std::string(gate_name(kind)) + ": targets must differ");
}

Matrix Gate::matrix() const {
  switch (kind) {
    case GateKind::RXY: return rotation(std::cos(phi), std::sin(phi), 0.0, theta);
    case GateKind::RZ: return rotation(0.0, 0.0, 1.0, phi);
    case GateKind::CZ: {
      Matrix m = Matrix::Identity(4, 4);
      m(3, 3) = -1;
      return m;
    }
    case GateKind::CNOT: {
      Matrix m = Matrix::Zero(4, 4);
      m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1;
      return m;
    }
    case GateKind::EXP_ZZ: {
      Matrix m = Matrix::Zero(4, 4);
      const cplx em = std::polar(1.0, -phi / 2), ep = std::polar(1.0, phi / 2);
      m(0, 0) = em;
      m(1, 1) = ep;
      m(2, 2) = ep;
      m(3, 3) = em;
      return m;
    }
    case GateKind::EXP_XX: {
      Matrix xx = Matrix::Zero(4, 4);
      xx(0, 3) = xx(1, 2) = xx(2, 1) = xx(3, 0) = 1;
      return std::cos(phi / 2) * Matrix::Identity(4, 4) - cplx(0, std::sin(phi / 2)) * xx;
    }
    case GateKind::PREP_BELL:
    case GateKind::MEASURE: break;
  }
  throw Error(std::string(gate_name(kind)) + " has no unitary matrix");
}

Circuit Circuit::from_gates(Register reg, const std::vector<Gate>& gates) {
  Circuit c(std::move(reg));
  for (const auto& g : gates) c.append(g);
  return c;
}

void Circuit::append(const Gate& g) {
  g.validate();
  for (const auto& t : g.targets) reg_.index_of(t);
  std::size_t slot = 0;
  for (std::size_t m = moments_.size(); m-- > 0;) {
    bool busy = false;
    for (const auto& other : moments_[m])
      for (const auto& t : g.targets) busy = busy || other.acts_on(t);
    if (busy) {
      slot = m + 1;
      break;
    }
  }
  if (slot == moments_.size()) moments_.emplace_back();
  moments_[slot].push_back(g);
}

void Circuit::append_moment(const std::vector<Gate>& gates) {
  std::vector<std::string> used;
  for (const auto& g : gates) {
    g.validate();
    for (const auto& t : g.targets) {
      reg_.index_of(t);
      if (std::find(used.begin(), used.end(), t) != used.end()) throw Error("moment gates overlap on " + t);
      used.push_back(t);
    }
  }
  moments_.push_back(gates);
}

std::vector<Gate> Circuit::gates() const {
  std::vector<Gate> out;
  for (const auto& m : moments_) out.insert(out.end(), m.begin(), m.end());
  return out;
}

std::size_t Circuit::count(GateKind k) const {
  std::size_t n = 0;
  for (const auto& m : moments_)
    for (const auto& g : m) n += g.kind == k;
  return n;
}

Register ansatz_register(int dim) { return Register::uniform({"B2", "B1", "A2", "A1"}, dim); }

Circuit build_abstract_circuit(const VariationalAngles& a) {
  auto var = [](Gate g) {
    g.variational = true;
    return g;
  };
  Circuit c(ansatz_register());
  c.append_moment({Gate::prep_bell("B2", "A2"), Gate::prep_bell("B1", "A1")});
  c.append_moment({var(Gate::rx("B2", a.gamma1)), var(Gate::rx("B1", a.gamma1)), var(Gate::rx("A2", a.gamma1)),
                   var(Gate::rx("A1", a.gamma1))});
  c.append_moment({var(Gate::exp_zz("B2", "B1", a.gamma2)), var(Gate::exp_zz("A2", "A1", a.gamma2))});
  c.append_moment({var(Gate::exp_xx("B2", "A2", a.alpha1)), var(Gate::exp_xx("B1", "A1", a.alpha1))});
  // Control on the A side so that the CZs meet those of the XX block.
  c.append_moment({var(Gate::exp_zz("A2", "B2", a.alpha2)), var(Gate::exp_zz("A1", "B1", a.alpha2))});
  return c;
}

// ---------------------------------------------------------------------------
// Rewriting helpers on a time-ordered gate list.

namespace {

using GateList = std::vector<Gate>;

std::size_t next_on_wire(const GateList& g, std::size_t i, const std::string& s) {
  for (std::size_t j = i + 1; j < g.size(); ++j)
    if (g[j].acts_on(s)) return j;
  return npos;
}

std::size_t prev_on_wire(const GateList& g, std::size_t i, const std::string& s) {
  for (std::size_t j = i; j-- > 0;)
    if (g[j].acts_on(s)) return j;
  return npos;
}

std::string partner(const Gate& g, const std::string& s) { return g.targets[0] == s ? g.targets[1] : g.targets[0]; }

// Single-qubit gate equal to rotation by `theta` about unit axis n, if the
// axis is along Z or in the equatorial plane.
std::optional<Gate> gate_for_axis(const std::string& s, double nx, double ny, double nz, double theta) {
  if (std::abs(std::abs(nz) - 1.0) < 1e-12) return Gate::rz(s, nz > 0 ? theta : -theta);
  if (std::abs(nz) < 1e-12) return Gate::rxy(s, std::atan2(ny, nx), theta);
  return std::nullopt;
}

double rotation_angle(const Gate& g) { return g.kind == GateKind::RZ ? g.phi : g.theta; }

// Merge neighbours, drop trivial rotations, and rewrite P.G.P^-1 patterns
// where P is a rotation and G a rotation whose conjugated axis is native.
bool peephole(GateList& g) {
  bool any = false;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < g.size() && !changed; ++i) {
      if (!g[i].single_qubit()) continue;
      const std::string s = g[i].targets[0];
      if (!g[i].variational && angle_eq(rotation_angle(g[i]), 0.0, 2 * kPi)) {
        g.erase(g.begin() + static_cast<long>(i));
        changed = true;
        break;
      }
      const std::size_t j = next_on_wire(g, i, s);
      if (j == npos || !g[j].single_qubit()) continue;
      if (g[i].kind == GateKind::RZ && g[j].kind == GateKind::RZ) {
        g[i].phi += g[j].phi;
        g[i].variational = g[i].variational || g[j].variational;
        g.erase(g.begin() + static_cast<long>(j));
        changed = true;
        break;
      }
      if (g[i].kind == GateKind::RXY && g[j].kind == GateKind::RXY && angle_eq(g[i].phi, g[j].phi, kPi)) {
        const double sign = angle_eq(g[i].phi, g[j].phi, 2 * kPi) ? 1.0 : -1.0;
        g[i].theta += sign * g[j].theta;
        g[i].variational = g[i].variational || g[j].variational;
        g.erase(g.begin() + static_cast<long>(j));
        changed = true;
        break;
      }
      if (g[i].kind != GateKind::RXY || g[i].variational) continue;
      const std::size_t k = next_on_wire(g, j, s);
      if (k == npos || !g[k].single_qubit() || g[k].variational) continue;
      const Matrix p = g[i].matrix();
      const Matrix kp = g[k].matrix() * p;
      if (std::abs(kp(0, 1)) > 1e-12 || std::abs(kp(1, 0)) > 1e-12 || std::abs(kp(0, 0) - kp(1, 1)) > 1e-12) continue;
      // Axis of G after conjugation, read off from its half-turn version.
      Gate half = g[j];
      (half.kind == GateKind::RZ ? half.phi : half.theta) = kPi;
      const Matrix m = p.adjoint() * half.matrix() * p;
      auto comp = [&](char c) { return (cplx(0, 1) * (m * pauli2(c)).trace()).real() / 2; };
      auto repl = gate_for_axis(s, comp('X'), comp('Y'), comp('Z'), rotation_angle(g[j]));
      if (!repl) continue;
      repl->variational = g[j].variational;
      g[i] = *repl;
      g.erase(g.begin() + static_cast<long>(k));
      g.erase(g.begin() + static_cast<long>(j));
      changed = true;
    }
    any = any || changed;
  }
  return any;
}

// CZ . (A x B) . CZ with A, B each diagonal or anti-diagonal reduces to
// local gates; an anti-diagonal factor leaves a Z on the partner.
bool cancel_cz_pairs(GateList& g) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i].kind != GateKind::CZ) continue;
    const std::string p = g[i].targets[0], q = g[i].targets[1];
    Matrix mp = Matrix::Identity(2, 2), mq = Matrix::Identity(2, 2);
    // A variational RXY makes the diagonal test value dependent.
    bool value_dependent = false;
    std::size_t jp = next_on_wire(g, i, p);
    while (jp != npos && g[jp].single_qubit()) {
      mp = g[jp].matrix() * mp;
      value_dependent = value_dependent || (g[jp].variational && g[jp].kind == GateKind::RXY);
      jp = next_on_wire(g, jp, p);
    }
    std::size_t jq = next_on_wire(g, i, q);
    while (jq != npos && g[jq].single_qubit()) {
      mq = g[jq].matrix() * mq;
      value_dependent = value_dependent || (g[jq].variational && g[jq].kind == GateKind::RXY);
      jq = next_on_wire(g, jq, q);
    }
    if (value_dependent || jp == npos || jp != jq || g[jp].kind != GateKind::CZ) continue;
    const bool pd = is_diag(mp), pa = is_antidiag(mp), qd = is_diag(mq), qa = is_antidiag(mq);
    if (!(pd || pa) || !(qd || qa)) continue;
    GateList repl;
    if (qa) repl.push_back(Gate::rz(p, kPi));
    if (pa) repl.push_back(Gate::rz(q, kPi));
    g.erase(g.begin() + static_cast<long>(jp));
    g.insert(g.begin() + static_cast<long>(jp), repl.begin(), repl.end());
    g.erase(g.begin() + static_cast<long>(i));
    return true;
  }
  return false;
}

bool is_half_turn(const Gate& g) { return g.kind == GateKind::RXY && angle_eq(g.theta, kPi, 2 * kPi); }

// Move a half-turn RXY(psi, pi) earlier along its wire until it merges with a
// rotation about the same axis. Crossing RXY(phi, t) gives RXY(2psi - phi, t),
// crossing RZ(a) gives RZ(-a), crossing a CZ adds RZ(pi) on the partner.
bool push_half_turns(GateList& g) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!is_half_turn(g[i]) || g[i].variational) continue;
    const std::string s = g[i].targets[0];
    const double psi = g[i].phi;
    std::vector<std::size_t> crossed;
    std::size_t target = npos;
    int cz_crossings = 0;
    for (std::size_t j = prev_on_wire(g, i, s); j != npos; j = prev_on_wire(g, j, s)) {
      const Gate& h = g[j];
      if (h.kind == GateKind::RXY && !h.variational && angle_eq(h.phi, psi, kPi)) {
        target = j;
        break;
      }
      if (h.kind == GateKind::RXY || h.kind == GateKind::RZ) {
        crossed.push_back(j);
      } else if (h.kind == GateKind::CZ) {
        ++cz_crossings;
        crossed.push_back(j);
      } else {
        break;
      }
    }
    // Without any CZ in the way the peephole merge already covers this case.
    if (target == npos || cz_crossings == 0 || cz_crossings > 1) continue;
    const double sign = angle_eq(g[target].phi, psi, 2 * kPi) ? 1.0 : -1.0;
    g[target].theta += sign * g[i].theta;
    g.erase(g.begin() + static_cast<long>(i));
    for (std::size_t j : crossed) {  // decreasing indices
      Gate& h = g[j];
      if (h.kind == GateKind::RXY) {
        h.phi = 2 * psi - h.phi;
      } else if (h.kind == GateKind::RZ) {
        h.phi = -h.phi;
      } else {
        const std::string q = partner(h, s);
        g.insert(g.begin() + static_cast<long>(j), Gate::rz(q, kPi));
      }
    }
    return true;
  }
  return false;
}

// RZ commutes with CZ: an RZ right after a CZ joins an RZ right before it.
bool merge_rz_across_cz(GateList& g) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i].kind != GateKind::RZ) continue;
    const std::string s = g[i].targets[0];
    const std::size_t j = next_on_wire(g, i, s);
    if (j == npos || g[j].kind != GateKind::CZ) continue;
    const std::size_t k = next_on_wire(g, j, s);
    if (k == npos || g[k].kind != GateKind::RZ) continue;
    g[i].phi += g[k].phi;
    g[i].variational = g[i].variational || g[k].variational;
    g.erase(g.begin() + static_cast<long>(k));
    return true;
  }
  return false;
}

// U = RZ(a) . RXY(phi, theta) up to global phase.
// With keep_rxy the RXY is emitted even when its angle happens to vanish.
GateList canonical_single(const std::string& s, const Matrix& u, bool keep_rxy) {
  const cplx det = u.determinant();
  const Matrix v = u / std::sqrt(det);
  const double c = std::abs(v(0, 0)), sn = std::abs(v(1, 0));
  const double theta = 2 * std::atan2(sn, c);
  const double a = c > 1e-14 ? -2 * std::arg(v(0, 0)) : 0.0;
  GateList out;
  if (sn > 1e-14 || keep_rxy) {
    const double phi = sn > 1e-14 ? std::arg(v(1, 0)) + kPi / 2 - a / 2 : 0.0;
    out.push_back(Gate::rxy(s, wrap_angle(phi), theta));
    out.back().variational = keep_rxy;
  }
  if (keep_rxy || !angle_eq(a, 0.0, 2 * kPi)) {
    out.push_back(Gate::rz(s, wrap_angle(a)));
    out.back().variational = keep_rxy;
  }
  return out;
}

// Replace every run of two or more single-qubit gates by its canonical form,
// which holds at most one RXY.
bool fuse_runs(GateList& g) {
  bool any = false;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g[i].single_qubit()) continue;
    const std::string s = g[i].targets[0];
    std::vector<std::size_t> run{i};
    for (std::size_t j = next_on_wire(g, i, s); j != npos && g[j].single_qubit(); j = next_on_wire(g, j, s))
      run.push_back(j);
    if (run.size() < 2) continue;
    Matrix u = Matrix::Identity(2, 2);
    bool variational = false;
    for (auto j : run) {
      u = g[j].matrix() * u;
      variational = variational || g[j].variational;
    }
    const GateList repl = canonical_single(s, u, variational);
    for (std::size_t k = run.size(); k-- > 1;) g.erase(g.begin() + static_cast<long>(run[k]));
    g.erase(g.begin() + static_cast<long>(i));
    g.insert(g.begin() + static_cast<long>(i), repl.begin(), repl.end());
    any = true;
  }
  return any;
}

void normalize_angles(GateList& g) {
  for (auto& x : g) {
    if (x.kind == GateKind::RXY) {
      x.phi = wrap_angle(x.phi);
      x.theta = wrap_angle(x.theta);
      if (x.theta < 0) {  // prefer positive rotation angles about the flipped axis
        x.theta = -x.theta;
        x.phi = wrap_angle(x.phi + kPi);
      }
    } else if (x.kind == GateKind::RZ || x.kind == GateKind::EXP_ZZ || x.kind == GateKind::EXP_XX) {
      x.phi = wrap_angle(x.phi);
    }
  }
}

}  // namespace

Circuit pass_decompose_exponentials(const Circuit& c) {
  GateList out;
  for (const auto& g : c.gates()) {
    const auto& t = g.targets;
    switch (g.kind) {
      case GateKind::EXP_ZZ: {
        Gate rz = Gate::rz(t[1], g.phi);
        rz.variational = g.variational;
        out.insert(out.end(), {Gate::cnot(t[0], t[1]), rz, Gate::cnot(t[0], t[1])});
        break;
      }
      case GateKind::EXP_XX: {
        Gate rz = Gate::rz(t[1], g.phi);
        rz.variational = g.variational;
        out.insert(out.end(), {Gate::ry(t[0], -kPi / 2), Gate::ry(t[1], -kPi / 2), Gate::cnot(t[0], t[1]), rz,
                               Gate::cnot(t[0], t[1]), Gate::ry(t[0], kPi / 2), Gate::ry(t[1], kPi / 2)});
        break;
      }
      case GateKind::PREP_BELL:
        out.insert(out.end(), {Gate::ry(t[0], kPi / 2), Gate::cnot(t[0], t[1])});
        break;
      default:
        out.push_back(g);
    }
  }
  return Circuit::from_gates(c.reg(), out);
}

Circuit pass_cnot_to_cz(const Circuit& c) {
  GateList out;
  bool had_cnot = false;
  for (const auto& g : c.gates()) {
    if (g.kind != GateKind::CNOT) {
      out.push_back(g);
      continue;
    }
    had_cnot = true;
    const auto& t = g.targets;
    out.insert(out.end(), {Gate::ry(t[1], -kPi / 2), Gate::cz(t[0], t[1]), Gate::ry(t[1], kPi / 2)});
  }
  if (!had_cnot) return c;
  peephole(out);
  normalize_angles(out);
  return Circuit::from_gates(c.reg(), out);
}

Circuit pass_reduce_depth(const Circuit& c) {
  GateList g = c.gates();
  for (const auto& x : g)
    if (!x.single_qubit() && x.kind != GateKind::CZ && x.kind != GateKind::MEASURE)
      throw Error("pass_reduce_depth expects native gates");
  bool changed = true;
  for (int guard = 0; changed && guard < 1000; ++guard) {
    changed = peephole(g);
    changed = cancel_cz_pairs(g) || changed;
    changed = push_half_turns(g) || changed;
    changed = merge_rz_across_cz(g) || changed;
  }
  fuse_runs(g);
  peephole(g);
  normalize_angles(g);
  Circuit out = Circuit::from_gates(c.reg(), g);
  return out.depth() <= c.depth() ? out : c;
}

RzEliminationResult eliminate_rz_with_frame(const Circuit& c) {
  GateList g = c.gates();
  std::vector<double> acc(c.reg().size(), 0.0);
  GateList out;
  for (std::size_t i = g.size(); i-- > 0;) {
    Gate x = g[i];
    switch (x.kind) {
      case GateKind::RZ:
        acc[c.reg().index_of(x.targets[0])] += x.phi;
        continue;
      case GateKind::RXY:
        x.phi = wrap_angle(x.phi + acc[c.reg().index_of(x.targets[0])]);
        break;
      case GateKind::CZ:
        break;
      case GateKind::MEASURE:
        if (!angle_eq(acc[c.reg().index_of(x.targets[0])], 0.0, 2 * kPi))
          throw Error("cannot move RZ across a measurement");
        break;
      default:
        throw Error(std::string("pass_eliminate_rz: unsupported gate ") + gate_name(x.kind));
    }
    out.push_back(x);
  }
  std::reverse(out.begin(), out.end());
  for (auto& a : acc) a = wrap_angle(a);
  return {Circuit::from_gates(c.reg(), out), acc};
}

Circuit pass_eliminate_rz(const Circuit& c) { return eliminate_rz_with_frame(c).circuit; }

CompiledCircuit compile(const Circuit& abstract, const PipelineOptions& opt) {
  Circuit c = pass_cnot_to_cz(pass_decompose_exponentials(abstract));
  if (opt.reduce_depth) c = pass_reduce_depth(c);
  auto r = eliminate_rz_with_frame(c);
  if (opt.tamper) {
    GateList g = r.circuit.gates();
    for (auto& x : g)
      if (x.kind == GateKind::RXY) {
        x.theta += 1e-3;
        break;
      }
    r.circuit = Circuit::from_gates(r.circuit.reg(), g);
  }
  return {r.circuit, r.dropped_frame};
}

Circuit compile_ansatz(const VariationalAngles& angles, const PipelineOptions& opt) {
  return compile(build_abstract_circuit(angles), opt).circuit;
}

Matrix prep_bell_unitary() {
  Matrix ry = Gate::ry("b", kPi / 2).matrix();
  Matrix first = Eigen::kroneckerProduct(ry, Matrix::Identity(2, 2)).eval();
  return Gate::cnot("b", "a").matrix() * first;
}

Matrix unitary_of(const Circuit& c) {
  const Register& reg = c.reg();
  const auto d = static_cast<Eigen::Index>(reg.dim());
  Matrix u = Matrix::Identity(d, d);
  for (const auto& g : c.gates()) {
    if (g.kind == GateKind::PREP_BELL || g.kind == GateKind::MEASURE)
      throw Error(std::string("unitary_of: non-unitary element ") + gate_name(g.kind));
    Matrix local;
    if (g.targets.size() == 1) {
      local = ops::lift_unitary(g.matrix(), reg[reg.index_of(g.targets[0])].dim);
    } else {
      local = lift_pair(g.matrix(), reg[reg.index_of(g.targets[0])].dim, reg[reg.index_of(g.targets[1])].dim);
    }
    u = embed(reg, local, g.targets).data() * u;
  }
  return u;
}

Matrix reference_unitary(const Circuit& abstract) {
  const Register& reg = abstract.reg();
  const auto d = static_cast<Eigen::Index>(reg.dim());
  Matrix u = Matrix::Identity(d, d);
  std::vector<Gate> run;
  auto flush = [&] {
    if (!run.empty()) u = unitary_of(Circuit::from_gates(reg, run)) * u;
    run.clear();
  };
  for (const auto& g : abstract.gates()) {
    if (g.kind == GateKind::PREP_BELL) {
      flush();
      u = embed(reg, prep_bell_unitary(), g.targets).data() * u;
    } else {
      run.push_back(g);
    }
  }
  flush();
  return u;
}

double compilation_deviation(const Circuit& abstract, const CompiledCircuit& compiled) {
  std::vector<Gate> frame;
  for (std::size_t k = 0; k < compiled.dropped_frame.size(); ++k)
    frame.push_back(Gate::rz(compiled.circuit.reg()[k].label, compiled.dropped_frame[k]));
  const Matrix u = unitary_of(compiled.circuit) * unitary_of(Circuit::from_gates(compiled.circuit.reg(), frame));
  return phase_aligned_distance(u, reference_unitary(abstract));
}

double phase_aligned_distance(const Matrix& u, const Matrix& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols()) throw Error("phase_aligned_distance: shape mismatch");
  Eigen::Index r = 0, col = 0;
  v.cwiseAbs().maxCoeff(&r, &col);
  if (std::abs(u(r, col)) < 1e-300) return max_abs(u) + max_abs(v);
  const cplx ph = v(r, col) / u(r, col);
  return max_abs(u * (ph / std::abs(ph)) - v);
}

std::string serialize(const Circuit& c) {
  std::ostringstream os;
  os << "# register";
  for (const auto& s : c.reg()) os << ' ' << s.label << ':' << s.dim;
  os << '\n';
  for (const auto& m : c.moments()) {
    for (const auto& g : m) {
      os << gate_name(g.kind) << ' ' << g.targets[0];
      if (g.targets.size() > 1) os << ',' << g.targets[1];
      switch (g.kind) {
        case GateKind::RXY: os << ' ' << fmt12(g.phi) << ',' << fmt12(g.theta); break;
        case GateKind::RZ:
        case GateKind::EXP_ZZ:
        case GateKind::EXP_XX: os << ' ' << fmt12(g.phi); break;
        default: break;
      }
      os << '\n';
    }
  }
  return os.str();
}

Circuit parse_circuit(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::optional<Register> reg;
  GateList gates;
  auto split = [](const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
  };
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string head;
    ls >> head;
    if (head == "#") {
      std::string word;
      ls >> word;
      if (word != "register") continue;
      std::vector<Site> sites;
      std::string tok;
      while (ls >> tok) {
        auto parts = split(tok, ':');
        if (parts.size() != 2) throw Error("bad register entry '" + tok + "'");
        sites.push_back({parts[0], std::stoi(parts[1])});
      }
      reg = Register(sites);
      continue;
    }
    Gate g;
    g.kind = gate_kind_from_name(head);
    std::string tgt, ang;
    if (!(ls >> tgt)) throw Error("missing targets in line '" + line + "'");
    g.targets = split(tgt, ',');
    if (ls >> ang) {
      auto a = split(ang, ',');
      try {
        if (!a.empty()) g.phi = std::stod(a[0]);
        if (a.size() > 1) g.theta = std::stod(a[1]);
      } catch (const std::exception&) {
        throw Error("bad angle in line '" + line + "'");
      }
    }
    gates.push_back(g);
  }
  if (!reg) throw Error("circuit text lacks a register line");
  return Circuit::from_gates(*reg, gates);
}

}  // namespace tfdsim
