#include "tfdsim/tfd.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "tfdsim/rng.hpp"

namespace tfdsim {

namespace {

constexpr double kPi = std::numbers::pi;

// Bit of each site in a flat 16-dimensional index (B2 most significant).
constexpr int kBitB2 = 8, kBitB1 = 4, kBitA2 = 2, kBitA1 = 1;

Matrix local_op(const std::vector<std::pair<char, std::string>>& factors) {
  const Register reg = ansatz_register(2);
  Matrix m = Matrix::Identity(16, 16);
  for (const auto& [p, s] : factors) m = m * embed(reg, ops::pauli(p, 2), {s}).data();
  return m;
}

Matrix pair_sum(char p, const std::string& a1, const std::string& a2, const std::string& b1, const std::string& b2) {
  return local_op({{p, a1}, {p, a2}}) + local_op({{p, b1}, {p, b2}});
}

void rx_all(Vector& psi, double theta) {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  for (int bit : {kBitB2, kBitB1, kBitA2, kBitA1})
    for (int i = 0; i < 16; ++i) {
      if (i & bit) continue;
      const cplx a = psi(i), b = psi(i | bit);
      psi(i) = c * a - cplx(0, s) * b;
      psi(i | bit) = -cplx(0, s) * a + c * b;
    }
}

int zz_sign(int i, int b1, int b2) { return ((i & b1) != 0) == ((i & b2) != 0) ? 1 : -1; }

void diag_zz(Vector& psi, double phi, std::initializer_list<std::pair<int, int>> pairs) {
  for (int i = 0; i < 16; ++i) {
    int z = 0;
    for (const auto& [a, b] : pairs) z += zz_sign(i, a, b);
    psi(i) *= std::polar(1.0, -phi / 2 * z);
  }
}

void xx_pairs(Vector& psi, double phi) {
  const double c = std::cos(phi / 2), s = std::sin(phi / 2);
  for (int mask : {kBitB2 | kBitA2, kBitB1 | kBitA1}) {
    Vector out(16);
    for (int i = 0; i < 16; ++i) out(i) = c * psi(i) - cplx(0, s) * psi(i ^ mask);
    psi = out;
  }
}

}  // namespace

const char* system_name(System s) {
  switch (s) {
    case System::A: return "A";
    case System::B: return "B";
    case System::BA: return "BA";
  }
  return "?";
}

std::vector<std::string> system_sites(System s) {
  switch (s) {
    case System::A: return {"A2", "A1"};
    case System::B: return {"B2", "B1"};
    case System::BA: return {"B2", "B1", "A2", "A1"};
  }
  return {};
}

Register system_register(System s) { return Register::uniform(system_sites(s), 2); }

Matrix chain_hamiltonian(const IsingParams& p) {
  if (!std::isfinite(p.g)) throw Error("transverse field must be finite");
  const Matrix x = ops::pauli('X', 2), z = ops::pauli('Z', 2), id = Matrix::Identity(2, 2);
  const Register r = Register::uniform({"s2", "s1"}, 2);
  Matrix h = embed(r, z, {"s2"}).data() * embed(r, z, {"s1"}).data();
  h += p.g * (embed(r, x, {"s2"}).data() + embed(r, x, {"s1"}).data());
  return h;
}

Observable hamiltonian(System s, const IsingParams& p) {
  const Register reg = ansatz_register(2);
  if (s == System::BA) return Observable(reg, pair_sum('X', "B2", "A2", "B1", "A1") + pair_sum('Z', "B2", "A2", "B1", "A1"));
  return Observable(reg, embed(reg, chain_hamiltonian(p), system_sites(s)).data());
}

Eigensystem chain_eigensystem(const IsingParams& p) {
  const Eigen::MatrixXd h = chain_hamiltonian(p).real();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  Eigensystem out;
  out.energies = es.eigenvalues();
  Eigen::MatrixXd v = es.eigenvectors();
  for (Eigen::Index j = 0; j < v.cols(); ++j)
    for (Eigen::Index i = 0; i < v.rows(); ++i)
      if (std::abs(v(i, j)) > 1e-12) {
        if (v(i, j) < 0) v.col(j) *= -1.0;
        break;
      }
  out.vectors = v.cast<cplx>();
  return out;
}

namespace {

RealVector boltzmann_weights(double beta, const RealVector& e) {
  if (!(beta >= 0) || !std::isfinite(beta)) throw Error("beta must be finite and non-negative");
  RealVector w = (-beta * (e.array() - e.minCoeff())).exp();
  return w / w.sum();
}

}  // namespace

DensityMatrix gibbs_state(double beta, const IsingParams& p, System s) {
  if (s == System::BA) throw Error("gibbs_state is defined for a single chain");
  const Eigensystem es = chain_eigensystem(p);
  const RealVector w = boltzmann_weights(beta, es.energies);
  Matrix rho = es.vectors * w.cast<cplx>().asDiagonal() * es.vectors.adjoint();
  rho = (0.5 * (rho + rho.adjoint())).eval();
  rho /= rho.trace();
  return DensityMatrix(system_register(s), rho);
}

Vector tfd_vector(double beta, const IsingParams& p) {
  const Eigensystem es = chain_eigensystem(p);
  const RealVector w = boltzmann_weights(beta, es.energies);
  Vector psi = Vector::Zero(16);
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k)
      for (int l = 0; l < 4; ++l) psi((k << 2) | l) += std::sqrt(w(j)) * es.vectors(k, j) * es.vectors(l, j);
  return psi / psi.norm();
}

DensityMatrix tfd_state(double beta, const IsingParams& p) {
  return DensityMatrix::pure(ansatz_register(2), tfd_vector(beta, p));
}

// ---------------------------------------------------------------------------
// Cost

const std::array<const char*, 6>& CostTerms::names() {
  static const std::array<const char*, 6> n{"X_A", "X_B", "ZZ_A", "ZZ_B", "XX_BA", "ZZ_BA"};
  return n;
}

CostTerms CostTerms::from_map(const std::map<std::string, double>& m) {
  auto get = [&](const char* k) {
    auto it = m.find(k);
    if (it == m.end()) throw Error(std::string("missing cost term ") + k);
    return it->second;
  };
  return {get("X_A"), get("X_B"), get("ZZ_A"), get("ZZ_B"), get("XX_BA"), get("ZZ_BA")};
}

std::map<std::string, double> CostTerms::to_map() const {
  return {{"X_A", x_a}, {"X_B", x_b}, {"ZZ_A", zz_a}, {"ZZ_B", zz_b}, {"XX_BA", xx_ba}, {"ZZ_BA", zz_ba}};
}

void CostSpec::validate() const {
  if (!(varsigma >= 0.5 && varsigma <= 3)) throw Error("varsigma outside [0.5, 3]");
  if (!(beta >= 0) || !std::isfinite(beta)) throw Error("beta must be finite and non-negative");
}

double cost_value(const CostTerms& t, const CostSpec& spec) {
  spec.validate();
  const double inter = t.xx_ba + t.zz_ba;
  if (spec.beta < kBetaZero) return -inter;
  return t.x_a + t.x_b + spec.varsigma * (t.zz_a + t.zz_b) - std::pow(spec.beta, -spec.varsigma) * inter;
}

const std::array<Matrix, 6>& cost_term_operators() {
  static const std::array<Matrix, 6> ops_ = [] {
    return std::array<Matrix, 6>{
        local_op({{'X', "A2"}}) + local_op({{'X', "A1"}}),
        local_op({{'X', "B2"}}) + local_op({{'X', "B1"}}),
        local_op({{'Z', "A2"}, {'Z', "A1"}}),
        local_op({{'Z', "B2"}, {'Z', "B1"}}),
        pair_sum('X', "B2", "A2", "B1", "A1"),
        pair_sum('Z', "B2", "A2", "B1", "A1"),
    };
  }();
  return ops_;
}

Matrix cost_operator(const CostSpec& spec) {
  spec.validate();
  const auto& o = cost_term_operators();
  if (spec.beta < kBetaZero) return -(o[4] + o[5]);
  return o[0] + o[1] + spec.varsigma * (o[2] + o[3]) - std::pow(spec.beta, -spec.varsigma) * (o[4] + o[5]);
}

namespace {

template <class F>
CostTerms terms_with(F&& ev) {
  const auto& o = cost_term_operators();
  return {ev(o[0]), ev(o[1]), ev(o[2]), ev(o[3]), ev(o[4]), ev(o[5])};
}

}  // namespace

CostTerms cost_terms_of(const Vector& psi) {
  if (psi.size() != 16) throw Error("cost_terms_of expects a 16-dimensional state");
  return terms_with([&](const Matrix& o) { return psi.dot(o * psi).real(); });
}

CostTerms cost_terms_of(const DensityMatrix& rho) {
  if (rho.dim() != 16) throw Error("cost_terms_of expects a four-qubit state");
  return terms_with([&](const Matrix& o) { return (o * rho.data()).trace().real(); });
}

Vector ideal_ansatz_state(const VariationalAngles& a) {
  Vector psi = Vector::Zero(16);
  // Bell pairs on (B2,A2) and (B1,A1).
  for (int b2 = 0; b2 < 2; ++b2)
    for (int b1 = 0; b1 < 2; ++b1) psi((b2 ? kBitB2 | kBitA2 : 0) | (b1 ? kBitB1 | kBitA1 : 0)) = 0.5;
  rx_all(psi, a.gamma1);
  diag_zz(psi, a.gamma2, {{kBitB2, kBitB1}, {kBitA2, kBitA1}});
  xx_pairs(psi, a.alpha1);
  diag_zz(psi, a.alpha2, {{kBitB2, kBitA2}, {kBitB1, kBitA1}});
  return psi;
}

// ---------------------------------------------------------------------------
// Calibration of varsigma

const std::vector<NamedOperator>& calibration_operators() {
  static const std::vector<NamedOperator> ops_ = [] {
    std::vector<NamedOperator> v;
    for (const char* sys : {"A", "B"})
      for (char p : {'X', 'Y', 'Z'}) {
        const std::string s2 = std::string(sys) + "2", s1 = std::string(sys) + "1";
        v.push_back({std::string(1, p) + "_" + sys, local_op({{p, s2}}) + local_op({{p, s1}})});
      }
    for (const char* sys : {"A", "B"})
      for (char p : {'X', 'Y', 'Z'}) {
        const std::string s2 = std::string(sys) + "2", s1 = std::string(sys) + "1";
        v.push_back({std::string(2, p) + "_" + sys, local_op({{p, s2}, {p, s1}})});
      }
    for (char p : {'X', 'Y', 'Z'}) v.push_back({std::string(2, p) + "_BA", pair_sum(p, "B2", "A2", "B1", "A1")});
    return v;
  }();
  return ops_;
}

std::vector<double> CostCalibrationSpec::default_betas() {
  std::vector<double> b;
  for (int x = -8; x <= 8; ++x) b.push_back(std::pow(10.0, x / 2.0));
  return b;
}

std::vector<double> CostCalibrationSpec::default_varsigma_grid() {
  std::vector<double> g;
  for (int k = 0; k <= 100; ++k) g.push_back(1.0 + 0.01 * k);
  return g;
}

MinimizeResult minimize_ideal_cost(const CostSpec& spec, const MinimizeOptions& opt, const VariationalAngles& guess) {
  spec.validate();
  const Matrix c = cost_operator(spec);
  auto f = [&](const std::vector<double>& x) {
    const Vector psi = ideal_ansatz_state(VariationalAngles::from_vector(x));
    return psi.dot(c * psi).real();
  };
  return minimize(f, guess.to_vector(), opt);
}

XiResult xi_objective(double varsigma, const CostCalibrationSpec& calib) {
  if (calib.inner_evaluations_per_start < 5 || calib.inner_restarts < 0) throw Error("invalid inner optimiser budget");
  XiResult out;
  out.varsigma = varsigma;
  const auto& ops_ = calibration_operators();
  for (std::size_t i = 0; i < calib.betas.size(); ++i) {
    const double beta = calib.betas[i];
    MinimizeOptions opt;
    opt.max_evaluations = calib.inner_evaluations_per_start * (calib.inner_restarts + 1);
    opt.restarts = calib.inner_restarts;
    opt.record_trace = false;
    // Same streams for every varsigma, so the scan compares like with like.
    opt.seed = derive_seed(calib.seed, {i});
    const MinimizeResult r = minimize_ideal_cost({varsigma, beta}, opt);
    if (!r.converged) out.flagged = true;
    const auto angles = VariationalAngles::from_vector(r.x);
    const Vector psi = ideal_ansatz_state(angles);
    const Vector tfd = tfd_vector(beta, calib.ising);
    double d = 0;
    for (const auto& o : ops_) d += std::abs(tfd.dot(o.op * tfd).real() - psi.dot(o.op * psi).real());
    out.per_beta.push_back(d);
    out.angles.push_back(angles);
    out.value += d;
  }
  return out;
}

CalibrationResult calibrate_varsigma(const CostCalibrationSpec& calib) {
  if (calib.varsigma_grid.empty()) throw Error("empty varsigma grid");
  CalibrationResult res;
  for (double s : calib.varsigma_grid) {
    res.scan.push_back(xi_objective(s, calib));
    if (res.scan.back().value < res.scan[res.argmin].value) res.argmin = res.scan.size() - 1;
  }
  return res;
}

double tfd_infidelity(const Vector& psi, double beta, const IsingParams& p) {
  return 1.0 - std::norm(tfd_vector(beta, p).dot(psi));
}

}  // namespace tfdsim
