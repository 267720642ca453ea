#include "tfdsim/tomo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "tfdsim/rng.hpp"

namespace tfdsim {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void check_coeff(double c, const std::string& what) {
  if (!(std::abs(c) <= 1 + 1e-12)) throw Error("measurement coefficient " + what + " outside [-1, 1]");
}

// Qubit-subspace identity and Z, and the |2> projector, on a site of dim d.
Matrix q_identity(int d) {
  Matrix m = Matrix::Zero(d, d);
  m(0, 0) = m(1, 1) = 1;
  return m;
}

std::vector<int> digits(std::size_t index, const Register& reg) {
  std::vector<int> out(reg.size());
  for (std::size_t k = reg.size(); k-- > 0;) {
    out[k] = static_cast<int>(index % static_cast<std::size_t>(reg[k].dim));
    index /= static_cast<std::size_t>(reg[k].dim);
  }
  return out;
}

DensityMatrix rotated(const DensityMatrix& rho, const BasisSetting& setting) {
  DensityMatrix out = rho;
  for (std::size_t k = 0; k < setting.sites.size(); ++k) {
    Gate g;
    if (!setting.bases[k].pre_rotation(setting.sites[k], g)) continue;
    const int dim = rho.reg()[rho.reg().index_of(setting.sites[k])].dim;
    StateKernel::apply_unitary(out, ops::lift_unitary(g.matrix(), dim), {setting.sites[k]});
  }
  return out;
}

Averages empty_averages(const Register& reg, const BasisSetting& setting) {
  for (const auto& s : setting.sites)
    if (!reg.contains(s)) throw Error("basis setting refers to site " + s + " outside the state");
  Averages a;
  a.setting = setting;
  a.label = setting.name();
  a.sites = reg.labels();
  a.single.assign(reg.size(), 0.0);
  for (std::size_t j = 0; j < reg.size(); ++j)
    for (std::size_t i = j + 1; i < reg.size(); ++i) a.pair[{reg[j].label, reg[i].label}] = 0.0;
  return a;
}

}  // namespace

// ---------------------------------------------------------------------------
// Readout models

SiteReadout SiteReadout::from_assignment(double fidelity, double c2_offset) {
  if (fidelity < 0.5 || fidelity > 1) throw Error("assignment fidelity outside [0.5, 1]");
  const double eps = 1 - fidelity;
  SiteReadout r;
  // c_I = 0, c_Z = 1 - 2 eps, c_2 = c_I - c_Z + offset.
  r.p_plus = {1 - eps, eps, std::clamp(eps + c2_offset / 2, 0.0, 1.0)};
  return r;
}

const SiteReadout& ReadoutModel::site(const std::string& s) const {
  auto it = sites.find(s);
  if (it == sites.end()) throw Error("no readout model for site " + s);
  return it->second;
}

ReadoutModel ReadoutModel::ideal(const std::vector<std::string>& labels) {
  ReadoutModel m;
  for (const auto& l : labels) m.sites[l] = SiteReadout::from_assignment(1.0);
  return m;
}

ReadoutModel ReadoutModel::from_config(const DeviceConfig& cfg) {
  ReadoutModel m;
  for (const auto& [l, s] : cfg.sites) m.sites[l] = SiteReadout::from_assignment(s.assignment_fidelity, cfg.readout_c2_offset);
  return m;
}

PairCoefficients PairCoefficients::swapped() const {
  PairCoefficients c = *this;
  std::swap(c.c_iz, c.c_zi);
  std::swap(c.c_2i, c.c_i2);
  std::swap(c.c_2z, c.c_z2);
  return c;
}

const SiteCoefficients& MeasurementModel::site(const std::string& s) const {
  auto it = sites.find(s);
  if (it == sites.end()) throw Error("no measurement coefficients for site " + s);
  return it->second;
}

PairCoefficients MeasurementModel::pair(const std::string& j, const std::string& i) const {
  if (auto it = pairs_.find({j, i}); it != pairs_.end()) return it->second;
  if (auto it = pairs_.find({i, j}); it != pairs_.end()) return it->second.swapped();
  throw Error("no measurement coefficients for pair " + j + "," + i);
}

void MeasurementModel::set_pair(const std::string& j, const std::string& i, const PairCoefficients& c) {
  pairs_.erase({i, j});
  pairs_[{j, i}] = c;
}

void MeasurementModel::validate() const {
  for (const auto& [l, c] : sites) {
    check_coeff(c.c_i, "c_I of " + l);
    check_coeff(c.c_z, "c_Z of " + l);
    check_coeff(c.c_2, "c_2 of " + l);
  }
  for (const auto& [k, c] : pairs_)
    for (double v : {c.c_ii, c.c_iz, c.c_zi, c.c_zz, c.c_2i, c.c_2z, c.c_i2, c.c_z2, c.c_22})
      check_coeff(v, "of pair " + k.first + "," + k.second);
}

MeasurementModel MeasurementModel::from_readout(const ReadoutModel& r) {
  MeasurementModel m;
  for (const auto& [l, s] : r.sites) {
    const double r0 = s.response(0), r1 = s.response(1), r2 = s.response(2);
    m.sites[l] = {(r0 + r1) / 2, (r0 - r1) / 2, r2};
  }
  for (auto j = m.sites.begin(); j != m.sites.end(); ++j)
    for (auto i = std::next(j); i != m.sites.end(); ++i) {
      const auto& a = j->second;
      const auto& b = i->second;
      PairCoefficients c;
      c.c_ii = a.c_i * b.c_i;
      c.c_iz = a.c_i * b.c_z;
      c.c_zi = a.c_z * b.c_i;
      c.c_zz = a.c_z * b.c_z;
      c.c_2i = a.c_2 * b.c_i;
      c.c_2z = a.c_2 * b.c_z;
      c.c_i2 = a.c_i * b.c_2;
      c.c_z2 = a.c_z * b.c_2;
      c.c_22 = a.c_2 * b.c_2;
      m.set_pair(j->first, i->first, c);
    }
  return m;
}

MeasurementModel MeasurementModel::ideal(const std::vector<std::string>& labels) {
  return from_readout(ReadoutModel::ideal(labels));
}

Matrix MeasurementModel::site_operator(const std::string& s, int dim) const {
  const auto& c = site(s);
  Matrix m = c.c_i * q_identity(dim) + c.c_z * ops::pauli('Z', dim);
  if (dim == 3) m += c.c_2 * ops::projector(2, 3);
  return m;
}

Matrix MeasurementModel::pair_operator(const std::string& j, const std::string& i, int dim) const {
  const PairCoefficients c = pair(j, i);
  const Matrix id = q_identity(dim), z = ops::pauli('Z', dim);
  auto k = [](const Matrix& a, const Matrix& b) { return tensor(Operator(Register{{"j", static_cast<int>(a.rows())}}, a),
                                                                Operator(Register{{"i", static_cast<int>(b.rows())}}, b)).data(); };
  Matrix m = c.c_ii * k(id, id) + c.c_iz * k(id, z) + c.c_zi * k(z, id) + c.c_zz * k(z, z);
  if (dim == 3) {
    const Matrix p2 = ops::projector(2, 3);
    m += c.c_2i * k(p2, id) + c.c_2z * k(p2, z) + c.c_i2 * k(id, p2) + c.c_z2 * k(z, p2) + c.c_22 * k(p2, p2);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Bases

char axis_char(Axis a) { return a == Axis::X ? 'X' : a == Axis::Y ? 'Y' : 'Z'; }

bool SignedBasis::pre_rotation(const std::string& site, Gate& out) const {
  if (sign != 1 && sign != -1) throw Error("basis sign must be +1 or -1");
  switch (axis) {
    case Axis::Z:
      if (sign > 0) return false;
      out = Gate::rx(site, kPi);
      return true;
    case Axis::X:
      out = Gate::ry(site, -sign * kPi / 2);
      return true;
    case Axis::Y:
      out = Gate::rx(site, sign * kPi / 2);
      return true;
  }
  return false;
}

std::string SignedBasis::name() const { return std::string(sign > 0 ? "+" : "-") + axis_char(axis); }

std::string BasisSetting::name() const {
  std::string s;
  for (std::size_t k = 0; k < sites.size(); ++k) s += (k ? "," : "") + bases[k].name() + "_" + sites[k];
  return s;
}

const SignedBasis& BasisSetting::basis(const std::string& site) const {
  for (std::size_t k = 0; k < sites.size(); ++k)
    if (sites[k] == site) return bases[k];
  throw Error("setting has no basis for site " + site);
}

const std::vector<BasisSetting>& cost_settings() {
  static const std::vector<BasisSetting> s = [] {
    // Sign patterns on B2, B1, A2, A1.
    const int rows[9][4] = {{+1, +1, +1, +1}, {+1, +1, +1, -1}, {+1, +1, -1, +1}, {+1, -1, +1, +1}, {-1, +1, +1, +1},
                            {+1, +1, -1, -1}, {-1, -1, +1, +1}, {+1, -1, +1, -1}, {-1, +1, -1, +1}};
    std::vector<BasisSetting> out;
    for (Axis ax : {Axis::Z, Axis::X})
      for (const auto& r : rows) {
        BasisSetting b;
        b.sites = {"B2", "B1", "A2", "A1"};
        for (int k = 0; k < 4; ++k) b.bases.push_back({ax, r[k]});
        out.push_back(b);
      }
    return out;
  }();
  return s;
}

std::vector<BasisSetting> tomography_settings(const std::string& site_j, const std::string& site_i) {
  std::vector<BasisSetting> out;
  const SignedBasis all[6] = {{Axis::X, 1}, {Axis::Y, 1}, {Axis::Z, 1}, {Axis::X, -1}, {Axis::Y, -1}, {Axis::Z, -1}};
  for (const auto& bj : all)
    for (const auto& bi : all) out.push_back({{site_j, site_i}, {bj, bi}});
  return out;
}

double Averages::of(const std::string& s) const {
  for (std::size_t k = 0; k < sites.size(); ++k)
    if (sites[k] == s) return single[k];
  throw Error("no average for site " + s);
}

double Averages::of(const std::string& j, const std::string& i) const {
  if (auto it = pair.find({j, i}); it != pair.end()) return it->second;
  if (auto it = pair.find({i, j}); it != pair.end()) return it->second;
  throw Error("no correlation average for " + j + "," + i);
}

// ---------------------------------------------------------------------------
// Measurement simulation

Averages simulate_measurement(const DensityMatrix& rho, const BasisSetting& setting, const ReadoutModel& readout,
                              const SamplingOptions& opt) {
  if (opt.shots < 0) throw Error("shots must be non-negative");
  const Register& reg = rho.reg();
  Averages out = empty_averages(reg, setting);
  out.shots = opt.shots;
  const RealVector pop = rotated(rho, setting).populations();
  const std::size_t n = reg.size();
  std::vector<const SiteReadout*> ro;
  for (const auto& s : reg) ro.push_back(&readout.site(s.label));

  if (opt.shots == 0) {
    for (std::size_t idx = 0; idx < reg.dim(); ++idx) {
      const double p = pop(static_cast<Eigen::Index>(idx));
      if (p == 0) continue;
      const auto lv = digits(idx, reg);
      std::vector<double> r(n);
      for (std::size_t k = 0; k < n; ++k) r[k] = ro[k]->response(lv[k]);
      for (std::size_t k = 0; k < n; ++k) out.single[k] += p * r[k];
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = j + 1; i < n; ++i) out.pair[{reg[j].label, reg[i].label}] += p * r[j] * r[i];
    }
    return out;
  }

  // Exact distribution over the 2^n outcome strings (bit k set: site k read -1).
  const std::size_t outcomes = std::size_t{1} << n;
  std::vector<double> q(outcomes, 0.0);
  for (std::size_t idx = 0; idx < reg.dim(); ++idx) {
    const double p = std::max(0.0, pop(static_cast<Eigen::Index>(idx)));
    if (p == 0) continue;
    const auto lv = digits(idx, reg);
    for (std::size_t o = 0; o < outcomes; ++o) {
      double w = p;
      for (std::size_t k = 0; k < n; ++k) {
        const double pp = ro[k]->p_plus.at(lv[k]);
        w *= (o >> k) & 1 ? 1 - pp : pp;
      }
      q[o] += w;
    }
  }
  double total = 0;
  for (double v : q) total += v;
  // Multinomial counts by sequential binomials.
  std::mt19937_64 rng(derive_seed(opt.seed, {opt.stream}));
  long left = opt.shots;
  double mass = total;
  std::vector<long> counts(outcomes, 0);
  for (std::size_t o = 0; o < outcomes && left > 0; ++o) {
    if (o + 1 == outcomes || mass <= 0) {
      counts[o] = left;
      break;
    }
    const double pr = std::clamp(q[o] / mass, 0.0, 1.0);
    std::binomial_distribution<long> b(left, pr);
    counts[o] = b(rng);
    left -= counts[o];
    mass -= q[o];
  }
  const double inv = 1.0 / static_cast<double>(opt.shots);
  for (std::size_t o = 0; o < outcomes; ++o) {
    if (!counts[o]) continue;
    const double w = static_cast<double>(counts[o]) * inv;
    auto m = [&](std::size_t k) { return (o >> k) & 1 ? -1.0 : 1.0; };
    for (std::size_t k = 0; k < n; ++k) out.single[k] += w * m(k);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = j + 1; i < n; ++i) out.pair[{reg[j].label, reg[i].label}] += w * m(j) * m(i);
  }
  return out;
}

Averages expected_averages(const DensityMatrix& rho, const BasisSetting& setting, const MeasurementModel& model) {
  const Register& reg = rho.reg();
  Averages out = empty_averages(reg, setting);
  const DensityMatrix r = rotated(rho, setting);
  for (std::size_t k = 0; k < reg.size(); ++k)
    out.single[k] = r.expectation(embed(reg, model.site_operator(reg[k].label, reg[k].dim), {reg[k].label}));
  for (std::size_t j = 0; j < reg.size(); ++j)
    for (std::size_t i = j + 1; i < reg.size(); ++i) {
      if (reg[j].dim != reg[i].dim) throw Error("expected_averages: mixed site dimensions");
      const Matrix m = model.pair_operator(reg[j].label, reg[i].label, reg[j].dim);
      out.pair[{reg[j].label, reg[i].label}] = r.expectation(embed(reg, m, {reg[j].label, reg[i].label}));
    }
  return out;
}

MeasurementModel calibrate(const ReadoutModel& readout, const std::vector<std::string>& labels,
                           const SamplingOptions& opt, CalibrationData* raw) {
  const std::size_t n = labels.size();
  if (n == 0 || n > 16) throw Error("calibrate: need between 1 and 16 sites");
  const Register reg = Register::uniform(labels, 2);
  BasisSetting z;
  z.sites = labels;
  z.bases.assign(n, SignedBasis{Axis::Z, 1});

  MeasurementModel m = MeasurementModel::from_readout(readout);  // leakage terms from truth
  std::vector<double> ci(n, 0), cz(n, 0);
  std::map<std::pair<std::size_t, std::size_t>, std::array<double, 4>> cp;
  const std::size_t preps = std::size_t{1} << n;
  for (std::size_t p = 0; p < preps; ++p) {
    std::vector<int> lv(n);
    for (std::size_t k = 0; k < n; ++k) lv[k] = static_cast<int>((p >> (n - 1 - k)) & 1);
    SamplingOptions o = opt;
    o.stream = derive_seed(opt.stream, {0xca11, p});
    Averages a = simulate_measurement(DensityMatrix::basis_state(reg, lv), z, readout, o);
    std::string name = "cal_";
    for (int v : lv) name += static_cast<char>('0' + v);
    a.label = name;
    std::vector<double> zs(n);
    for (std::size_t k = 0; k < n; ++k) zs[k] = lv[k] ? -1.0 : 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      ci[k] += a.single[k];
      cz[k] += zs[k] * a.single[k];
    }
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = j + 1; i < n; ++i) {
        const double v = a.of(labels[j], labels[i]);
        auto& acc = cp[{j, i}];
        acc[0] += v;
        acc[1] += zs[i] * v;
        acc[2] += zs[j] * v;
        acc[3] += zs[j] * zs[i] * v;
      }
    if (raw) {
      raw->preparations.push_back(lv);
      raw->averages.push_back(std::move(a));
    }
  }
  // Full-factorial design: the least-squares solution is the signed mean.
  const double inv = 1.0 / static_cast<double>(preps);
  for (std::size_t k = 0; k < n; ++k) {
    auto& s = m.sites[labels[k]];
    s.c_i = ci[k] * inv;
    s.c_z = cz[k] * inv;
  }
  for (const auto& [ji, acc] : cp) {
    PairCoefficients c = m.pair(labels[ji.first], labels[ji.second]);
    c.c_ii = acc[0] * inv;
    c.c_iz = acc[1] * inv;
    c.c_zi = acc[2] * inv;
    c.c_zz = acc[3] * inv;
    m.set_pair(labels[ji.first], labels[ji.second], c);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Estimators

double estimate_single(const std::vector<Averages>& data, const std::string& site, Axis axis,
                       const MeasurementModel& model) {
  double sum[2] = {0, 0};
  int cnt[2] = {0, 0};
  for (const auto& a : data) {
    const auto& sites = a.setting.sites;
    if (std::find(sites.begin(), sites.end(), site) == sites.end()) continue;
    const SignedBasis& b = a.setting.basis(site);
    if (b.axis != axis) continue;
    const int k = b.sign > 0 ? 0 : 1;
    sum[k] += a.of(site);
    ++cnt[k];
  }
  if (!cnt[0] || !cnt[1])
    throw Error(std::string("need both signs of ") + axis_char(axis) + " on " + site + " to estimate it");
  const double cz = model.site(site).c_z;
  if (std::abs(cz) < 1e-9) throw Error("c_Z of " + site + " vanishes");
  return (sum[0] / cnt[0] - sum[1] / cnt[1]) / (2 * cz);
}

double estimate_pair(const std::vector<Averages>& data, const std::string& j, Axis aj, const std::string& i, Axis ai,
                     const MeasurementModel& model) {
  double sum[2][2] = {{0, 0}, {0, 0}};
  int cnt[2][2] = {{0, 0}, {0, 0}};
  for (const auto& a : data) {
    const auto& sites = a.setting.sites;
    if (std::find(sites.begin(), sites.end(), j) == sites.end() ||
        std::find(sites.begin(), sites.end(), i) == sites.end())
      continue;
    const SignedBasis& bj = a.setting.basis(j);
    const SignedBasis& bi = a.setting.basis(i);
    if (bj.axis != aj || bi.axis != ai) continue;
    const int sj = bj.sign > 0 ? 0 : 1, si = bi.sign > 0 ? 0 : 1;
    sum[sj][si] += a.of(j, i);
    ++cnt[sj][si];
  }
  for (auto& r : cnt)
    for (int c : r)
      if (!c) throw Error("incomplete sign classes for pair " + j + "," + i);
  const double czz = model.pair(j, i).c_zz;
  if (std::abs(czz) < 1e-9) throw Error("c_ZZ of " + j + "," + i + " vanishes");
  auto mean = [&](int a, int b) { return sum[a][b] / cnt[a][b]; };
  return (mean(0, 0) - mean(0, 1) - mean(1, 0) + mean(1, 1)) / (4 * czz);
}

CostTerms estimate_cost_terms(const std::vector<Averages>& data, const MeasurementModel& model) {
  for (const auto& s : cost_settings()) {
    const std::string name = s.name();
    if (std::none_of(data.begin(), data.end(), [&](const Averages& a) { return a.setting.name() == name; }))
      throw Error("missing cost setting " + name);
  }
  CostTerms t;
  t.x_a = estimate_single(data, "A2", Axis::X, model) + estimate_single(data, "A1", Axis::X, model);
  t.x_b = estimate_single(data, "B2", Axis::X, model) + estimate_single(data, "B1", Axis::X, model);
  t.zz_a = estimate_pair(data, "A2", Axis::Z, "A1", Axis::Z, model);
  t.zz_b = estimate_pair(data, "B2", Axis::Z, "B1", Axis::Z, model);
  t.xx_ba = estimate_pair(data, "B2", Axis::X, "A2", Axis::X, model) + estimate_pair(data, "B1", Axis::X, "A1", Axis::X, model);
  t.zz_ba = estimate_pair(data, "B2", Axis::Z, "A2", Axis::Z, model) + estimate_pair(data, "B1", Axis::Z, "A1", Axis::Z, model);
  return t;
}

CostMeasurement measure_cost_terms(const DensityMatrix& rho, const ReadoutModel& readout,
                                   const MeasurementModel& model, const SamplingOptions& opt) {
  CostMeasurement out;
  const auto& settings = cost_settings();
  for (std::size_t k = 0; k < settings.size(); ++k) {
    SamplingOptions o = opt;
    o.stream = derive_seed(opt.stream, {0xc057, k});
    out.averages.push_back(simulate_measurement(rho, settings[k], readout, o));
  }
  out.terms = estimate_cost_terms(out.averages, model);
  return out;
}

// ---------------------------------------------------------------------------
// Two-qubit tomography

TomographyResult tomography_2q(const DensityMatrix& rho, System system, const ReadoutModel& readout,
                               const MeasurementModel& model, const SamplingOptions& opt) {
  const auto s = system_sites(system);
  if (s.size() != 2) throw Error("tomography_2q needs a single system");
  return tomography_2q(rho, s[0], s[1], readout, model, opt);
}

TomographyResult tomography_2q(const DensityMatrix& rho, const std::string& site_j, const std::string& site_i,
                               const ReadoutModel& readout, const MeasurementModel& model,
                               const SamplingOptions& opt) {
  if (site_j == site_i) throw Error("tomography_2q needs two distinct sites");
  const DensityMatrix red = rho.reg().size() == 2 ? rho : partial_trace(rho, {site_j, site_i});
  TomographyResult res;
  const auto settings = tomography_settings(site_j, site_i);
  for (std::size_t k = 0; k < settings.size(); ++k) {
    SamplingOptions o = opt;
    o.stream = derive_seed(opt.stream, {0x7035, k});
    res.averages.push_back(simulate_measurement(red, settings[k], readout, o));
    res.shot_count += opt.shots;
  }
  const Axis axes[3] = {Axis::X, Axis::Y, Axis::Z};
  const char pc[3] = {'X', 'Y', 'Z'};
  const Register out_reg{{site_j, 2}, {site_i, 2}};
  const Matrix id = Matrix::Identity(2, 2);
  auto kron = [&](const Matrix& a, const Matrix& b) -> Matrix { return embed(out_reg, a, {site_j}).data() * embed(out_reg, b, {site_i}).data(); };
  Matrix r = Matrix::Identity(4, 4);
  for (int p = 0; p < 3; ++p) {
    const double ei = estimate_single(res.averages, site_i, axes[p], model);
    const double ej = estimate_single(res.averages, site_j, axes[p], model);
    res.pauli_estimates[p] = ei;
    res.pauli_estimates[3 + p] = ej;
    r += ei * kron(id, ops::pauli(pc[p], 2)) + ej * kron(ops::pauli(pc[p], 2), id);
  }
  for (int q = 0; q < 3; ++q)
    for (int p = 0; p < 3; ++p) {
      const double e = estimate_pair(res.averages, site_j, axes[q], site_i, axes[p], model);
      res.pauli_estimates[6 + 3 * q + p] = e;
      r += e * kron(ops::pauli(pc[q], 2), ops::pauli(pc[p], 2));
    }
  r /= 4.0;
  r = (0.5 * (r + r.adjoint())).eval();
  res.rho_exp = DensityMatrix(out_reg, r);
  return res;
}

DensityMatrix leakage_map(const DensityMatrix& rho2) {
  const Register& reg = rho2.reg();
  if (reg.size() != 2 || reg[0].dim != 3 || reg[1].dim != 3) throw Error("leakage_map expects two qutrits");
  if (std::abs(rho2.trace() - 1) > 1e-9) throw Error("leakage_map: trace deviates from 1");
  const Matrix& in = rho2.data();
  auto at = [&](int a, int b, int c, int d) { return in(a * 3 + b, c * 3 + d); };
  Matrix out = Matrix::Zero(4, 4);
  for (int lp = 0; lp < 2; ++lp)
    for (int kp = 0; kp < 2; ++kp)
      for (int l = 0; l < 2; ++l)
        for (int k = 0; k < 2; ++k) {
          cplx v = at(lp, kp, l, k);
          if (kp == k) v += 0.5 * at(lp, 2, l, 2);
          if (lp == l) v += 0.5 * at(2, kp, 2, k);
          if (lp == l && kp == k) v += 0.25 * at(2, 2, 2, 2);
          out(lp * 2 + kp, l * 2 + k) = v;
        }
  return DensityMatrix(Register{{reg[0].label, 2}, {reg[1].label, 2}}, out);
}

std::string averages_table(const std::vector<Averages>& rows, const std::vector<std::string>& sites) {
  std::ostringstream os;
  os << "setting";
  for (const auto& s : sites) os << "\tm_" << s;
  for (std::size_t j = 0; j < sites.size(); ++j)
    for (std::size_t i = j + 1; i < sites.size(); ++i) os << "\tm_" << sites[j] << sites[i];
  os << "\tshots\n";
  for (const auto& a : rows) {
    os << (a.label.empty() ? a.setting.name() : a.label);
    for (const auto& s : sites) os << '\t' << fmt(a.of(s));
    for (std::size_t j = 0; j < sites.size(); ++j)
      for (std::size_t i = j + 1; i < sites.size(); ++i) os << '\t' << fmt(a.of(sites[j], sites[i]));
    os << '\t' << a.shots << '\n';
  }
  return os.str();
}

}  // namespace tfdsim
