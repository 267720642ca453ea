#include "tfdsim/noise.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace tfdsim {

namespace {

constexpr double kPi = std::numbers::pi;

// Measured coherence and frequencies; ZZ strengths and leakage per pair are
// illustrative values inside the expected ranges.
constexpr const char* kDefaultConfig = R"(# Four-transmon device, SI units.
site.B1.T1 = 32.1e-6
site.B1.T2_echo = 29.9e-6
site.B1.sweetspot_freq = 6.433e9
site.B1.readout_freq = 7.493e9
site.B1.assignment_fidelity = 0.965
site.B2.T1 = 40.7e-6
site.B2.T2_echo = 40.5e-6
site.B2.sweetspot_freq = 5.771e9
site.B2.readout_freq = 7.225e9
site.B2.assignment_fidelity = 0.965
site.A1.T1 = 64.0e-6
site.A1.T2_echo = 45.9e-6
site.A1.sweetspot_freq = 5.887e9
site.A1.readout_freq = 7.058e9
site.A1.assignment_fidelity = 0.970
site.A2.T1 = 33.7e-6
site.A2.T2_echo = 68.8e-6
site.A2.sweetspot_freq = 4.534e9
site.A2.readout_freq = 6.913e9
site.A2.assignment_fidelity = 0.938

# Coupled pairs. cz_T2_flux = 0 derives the value from the 1/f helper.
pair.B1-B2.fluxed = B1
pair.B1-B2.zz = 300e3
pair.B1-B2.cz_leakage_L1 = 0.004
pair.B1-B2.cz_T2_flux = 0
pair.A1-A2.fluxed = A1
pair.A1-A2.zz = 80e3
pair.A1-A2.cz_leakage_L1 = 0.003
pair.A1-A2.cz_T2_flux = 0
pair.B1-A1.fluxed = B1
pair.B1-A1.zz = 250e3
pair.B1-A1.cz_leakage_L1 = 0.005
pair.B1-A1.cz_T2_flux = 0
pair.B2-A2.fluxed = B2
pair.B2-A2.zz = 100e3
pair.B2-A2.cz_leakage_L1 = 0.004
pair.B2-A2.cz_T2_flux = 0

gate.single_qubit_time = 20e-9
gate.cz_idle_time = 35e-9
gate.cz_margin_time = 10e-9
gate.slice_time = 10e-9
noise.flux_noise_sqrt_A = 1e-6
noise.anharmonicity = -300e6
noise.leakage_dephasing = 0
readout.c2_offset = 0
)";

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (const std::exception&) {
    throw Error("config key '" + key + "': not a number: '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw Error("config key '" + key + "': not a boolean: '" + v + "'");
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::vector<std::string> split_dots(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, '.')) out.push_back(item);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// DeviceConfig

PairParams& DeviceConfig::pair_mut(const std::string& x, const std::string& y) {
  for (auto& p : pairs)
    if (p.matches(x, y)) return p;
  PairParams p;
  p.a = x;
  p.b = y;
  p.fluxed = x;
  pairs.push_back(p);
  return pairs.back();
}

void DeviceConfig::set(const std::string& key, const std::string& value) {
  const auto parts = split_dots(key);
  const std::string v = trim(value);
  if (parts.size() == 3 && parts[0] == "site") {
    SiteParams& s = sites[parts[1]];
    const std::string& f = parts[2];
    if (f == "T1") s.t1 = to_double(key, v);
    else if (f == "T2_echo") s.t2_echo = to_double(key, v);
    else if (f == "sweetspot_freq") s.sweetspot_freq = to_double(key, v);
    else if (f == "readout_freq") s.readout_freq = to_double(key, v);
    else if (f == "assignment_fidelity") s.assignment_fidelity = to_double(key, v);
    else throw Error("unknown config key '" + key + "'");
    return;
  }
  if (parts.size() == 3 && parts[0] == "pair") {
    const auto dash = parts[1].find('-');
    if (dash == std::string::npos) throw Error("pair key needs the form pair.X-Y.field: '" + key + "'");
    PairParams& p = pair_mut(parts[1].substr(0, dash), parts[1].substr(dash + 1));
    const std::string& f = parts[2];
    if (f == "fluxed") p.fluxed = v;
    else if (f == "zz") p.zz_strength = to_double(key, v);
    else if (f == "cz_leakage_L1") p.cz_leakage_l1 = to_double(key, v);
    else if (f == "cz_T2_flux") p.cz_t2_flux = to_double(key, v);
    else if (f == "cz") p.has_cz = to_bool(key, v);
    else throw Error("unknown config key '" + key + "'");
    return;
  }
  if (key == "gate.single_qubit_time") single_qubit_gate_time = to_double(key, v);
  else if (key == "gate.cz_idle_time") cz_idle_time = to_double(key, v);
  else if (key == "gate.cz_margin_time") cz_margin_time = to_double(key, v);
  else if (key == "gate.slice_time") slice_time = to_double(key, v);
  else if (key == "noise.flux_noise_sqrt_A") flux_noise_sqrt_a = to_double(key, v);
  else if (key == "noise.anharmonicity") anharmonicity = to_double(key, v);
  else if (key == "noise.leakage_dephasing") leakage_dephasing = to_bool(key, v);
  else if (key == "readout.c2_offset") readout_c2_offset = to_double(key, v);
  else throw Error("unknown config key '" + key + "'");
}

void DeviceConfig::validate() const {
  for (const auto& [label, s] : sites) {
    if (!(s.t1 > 0) || !(s.t2_echo > 0)) throw Error("site " + label + ": T1 and T2_echo must be positive");
    if (s.t2_echo > 2 * s.t1 * 1.05) throw Error("site " + label + ": T2_echo exceeds 2 T1");
    if (s.assignment_fidelity < 0.5 || s.assignment_fidelity > 1)
      throw Error("site " + label + ": assignment fidelity outside [0.5, 1]");
  }
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    const std::string name = p.a + "-" + p.b;
    if (!sites.count(p.a) || !sites.count(p.b)) throw Error("pair " + name + " refers to an unknown site");
    if (p.a == p.b) throw Error("pair " + name + " repeats a site");
    if (p.fluxed != p.a && p.fluxed != p.b) throw Error("pair " + name + ": fluxed site not in pair");
    if (p.cz_leakage_l1 < 0 || p.cz_leakage_l1 > 0.1) throw Error("pair " + name + ": L1 outside [0, 0.1]");
    if (p.cz_t2_flux < 0) throw Error("pair " + name + ": negative cz_T2_flux");
    if (!std::isfinite(p.zz_strength)) throw Error("pair " + name + ": non-finite zz");
    for (std::size_t j = i + 1; j < pairs.size(); ++j)
      if (pairs[j].matches(p.a, p.b)) throw Error("pair " + name + " listed twice");
  }
  if (!(single_qubit_gate_time > 0) || !(cz_idle_time > 0) || cz_margin_time < 0 || !(slice_time > 0))
    throw Error("gate durations must be positive");
  if (cz_idle_time < single_qubit_gate_time / 2) throw Error("cz_idle_time shorter than half a single-qubit gate");
}

const SiteParams& DeviceConfig::site(const std::string& s) const {
  auto it = sites.find(s);
  if (it == sites.end()) throw Error("no configuration for site " + s);
  return it->second;
}

const PairParams* DeviceConfig::find_pair(const std::string& x, const std::string& y) const {
  for (const auto& p : pairs)
    if (p.matches(x, y)) return &p;
  return nullptr;
}

const PairParams& DeviceConfig::pair(const std::string& x, const std::string& y) const {
  const PairParams* p = find_pair(x, y);
  if (!p) throw Error("no configuration for pair " + x + "-" + y);
  return *p;
}

std::vector<std::string> DeviceConfig::site_labels() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : sites) out.push_back(k);
  return out;
}

DeviceConfig DeviceConfig::parse(const std::string& text) {
  DeviceConfig cfg;
  cfg.sites.clear();
  cfg.pairs.clear();
  std::istringstream is(text);
  std::string line;
  int n = 0;
  while (std::getline(is, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("config line " + std::to_string(n) + ": expected key = value");
    cfg.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

DeviceConfig DeviceConfig::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

DeviceConfig DeviceConfig::defaults() { return parse(kDefaultConfig); }

std::string DeviceConfig::to_text() const {
  std::ostringstream os;
  for (const auto& [l, s] : sites) {
    os << "site." << l << ".T1 = " << fmt(s.t1) << '\n';
    os << "site." << l << ".T2_echo = " << fmt(s.t2_echo) << '\n';
    os << "site." << l << ".sweetspot_freq = " << fmt(s.sweetspot_freq) << '\n';
    os << "site." << l << ".readout_freq = " << fmt(s.readout_freq) << '\n';
    os << "site." << l << ".assignment_fidelity = " << fmt(s.assignment_fidelity) << '\n';
  }
  for (const auto& p : pairs) {
    const std::string k = "pair." + p.a + "-" + p.b + ".";
    os << k << "fluxed = " << p.fluxed << '\n';
    os << k << "zz = " << fmt(p.zz_strength) << '\n';
    os << k << "cz_leakage_L1 = " << fmt(p.cz_leakage_l1) << '\n';
    os << k << "cz_T2_flux = " << fmt(p.cz_t2_flux) << '\n';
    os << k << "cz = " << (p.has_cz ? 1 : 0) << '\n';
  }
  os << "gate.single_qubit_time = " << fmt(single_qubit_gate_time) << '\n';
  os << "gate.cz_idle_time = " << fmt(cz_idle_time) << '\n';
  os << "gate.cz_margin_time = " << fmt(cz_margin_time) << '\n';
  os << "gate.slice_time = " << fmt(slice_time) << '\n';
  os << "noise.flux_noise_sqrt_A = " << fmt(flux_noise_sqrt_a) << '\n';
  os << "noise.anharmonicity = " << fmt(anharmonicity) << '\n';
  os << "noise.leakage_dephasing = " << (leakage_dephasing ? 1 : 0) << '\n';
  os << "readout.c2_offset = " << fmt(readout_c2_offset) << '\n';
  return os.str();
}

double flux_t2_estimate(const DeviceConfig& cfg, const PairParams& pair) {
  const SiteParams& f = cfg.site(pair.fluxed);
  const SiteParams& o = cfg.site(pair.other());
  const double target = o.sweetspot_freq + std::abs(cfg.anharmonicity);
  if (target >= f.sweetspot_freq || f.sweetspot_freq <= 0) return f.t2_echo;
  const double r = target / f.sweetspot_freq;  // sqrt(cos x)
  const double cos_x = r * r;
  const double sin_x = std::sqrt(std::max(0.0, 1 - cos_x * cos_x));
  const double dfdphi = f.sweetspot_freq * kPi * sin_x / (2 * r);  // Hz per flux quantum
  const double gamma_phi = 2 * kPi * cfg.flux_noise_sqrt_a * dfdphi * std::sqrt(std::log(2.0));
  return 1.0 / (1.0 / f.t2_echo + gamma_phi);
}

// ---------------------------------------------------------------------------
// NoiseModel

const char* mechanism_name(Mechanism m) {
  switch (m) {
    case Mechanism::Damping: return "damping";
    case Mechanism::FluxDephasing: return "flux_dephasing";
    case Mechanism::ZZCrosstalk: return "zz_crosstalk";
    case Mechanism::Leakage: return "leakage";
  }
  return "?";
}

NoiseModel::NoiseModel(int level, DeviceConfig cfg) : level_(level), cfg_(std::move(cfg)) {
  if (level < 0 || level > 4) throw Error("noise level must be in 0..4");
  cfg_.validate();
}

std::vector<Mechanism> NoiseModel::mechanisms() const {
  const Mechanism all[] = {Mechanism::Damping, Mechanism::FluxDephasing, Mechanism::ZZCrosstalk, Mechanism::Leakage};
  return std::vector<Mechanism>(all, all + level_);
}

bool NoiseModel::has(Mechanism m) const { return static_cast<int>(m) < level_; }

const Matrix& NoiseModel::idle_superop(int dim, double duration, double t1, double t2) const {
  const auto key = std::make_tuple(dim, duration, t1, t2);
  std::lock_guard<std::mutex> lock(cache_mutex_);
  auto it = cache_.find(key);
  if (it != cache_.end()) return *it->second;
  auto m = std::make_unique<Matrix>(idle_propagator(dim, duration, t1, t2));
  const Matrix& ref = *m;
  cache_.emplace(key, std::move(m));
  return ref;
}

// ---------------------------------------------------------------------------
// Channels

Matrix idle_lindbladian(int dim, double t1, double t2) {
  if (!(t1 > 0) || !(t2 > 0)) throw Error("idle channel: T1 and T2 must be positive");
  if (t2 > 2 * t1 * 1.05) throw Error("idle channel: T2 > 2 T1 is unphysical");
  const double gamma_phi = std::max(0.0, 1.0 / t2 - 1.0 / (2 * t1));
  Matrix lower = Matrix::Zero(dim, dim);
  lower(0, 1) = 1.0;
  if (dim == 3) lower(1, 2) = std::sqrt(2.0);
  lower *= std::sqrt(1.0 / t1);
  Matrix number = Matrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) number(k, k) = k;
  const Matrix deph = std::sqrt(2 * gamma_phi) * number;
  const Matrix id = Matrix::Identity(dim, dim);
  Matrix l = Matrix::Zero(dim * dim, dim * dim);
  for (const Matrix* op : std::initializer_list<const Matrix*>{&lower, &deph}) {
    const Matrix ld = op->adjoint() * *op;
    l += Eigen::kroneckerProduct(*op, op->conjugate()).eval();
    l -= 0.5 * Eigen::kroneckerProduct(ld, id).eval();
    l -= 0.5 * Eigen::kroneckerProduct(id, Matrix(ld.transpose())).eval();
  }
  return l;
}

Matrix idle_propagator(int dim, double duration, double t1, double t2) {
  if (duration < 0) throw Error("idle channel: negative duration");
  const Matrix l = idle_lindbladian(dim, t1, t2);
  if (duration == 0) return Matrix::Identity(dim * dim, dim * dim);
  return Matrix(l * duration).exp();
}

DensityMatrix idle_channel(const DensityMatrix& rho, const std::string& site, double duration, double t1, double t2) {
  const int dim = rho.reg()[rho.reg().index_of(site)].dim;
  DensityMatrix out = rho;
  if (duration == 0) {
    idle_lindbladian(dim, t1, t2);  // argument validation
    return out;
  }
  StateKernel::apply_superop(out, idle_propagator(dim, duration, t1, t2), {site});
  StateKernel::hermitize(out);
  return out;
}

namespace {

Vector zz_phases(int da, int db, double zeta, double duration) {
  Vector ph = Vector::Ones(da * db);
  ph(db + 1) = std::polar(1.0, -2 * kPi * zeta * duration);
  return ph;
}

void apply_zz_inplace(DensityMatrix& rho, const PairParams& p, double duration) {
  if (p.zz_strength == 0 || duration == 0) return;
  const Register& r = rho.reg();
  if (!r.contains(p.a) || !r.contains(p.b)) return;
  const int da = r[r.index_of(p.a)].dim, db = r[r.index_of(p.b)].dim;
  StateKernel::apply_diagonal(rho, zz_phases(da, db, p.zz_strength, duration), {p.a, p.b});
}

bool excluded(const IdleOptions& opt, const PairParams& p) {
  for (const auto& [x, y] : opt.zz_excluded)
    if (p.matches(x, y)) return true;
  return false;
}

void rotate_inplace(DensityMatrix& rho, const Gate& g) {
  const std::string& s = g.targets[0];
  const int dim = rho.reg()[rho.reg().index_of(s)].dim;
  StateKernel::apply_unitary(rho, ops::lift_unitary(g.matrix(), dim), {s});
}

void ideal_cz_inplace(DensityMatrix& rho, const std::string& a, const std::string& b) {
  const Register& r = rho.reg();
  const int da = r[r.index_of(a)].dim, db = r[r.index_of(b)].dim;
  Vector ph = Vector::Ones(da * db);
  ph(db + 1) = -1.0;
  StateKernel::apply_diagonal(rho, ph, {a, b});
}

void leakage_dephasing_inplace(DensityMatrix& rho, const std::string& site) {
  Matrix s = Matrix::Zero(9, 9);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      if ((a == 2) == (b == 2)) s(a * 3 + b, a * 3 + b) = 1.0;
  StateKernel::apply_superop(rho, s, {site});
}

}  // namespace

DensityMatrix zz_crosstalk_step(const DensityMatrix& rho, const PairParams& pair, double duration) {
  if (duration < 0) throw Error("zz_crosstalk_step: negative duration");
  DensityMatrix out = rho;
  apply_zz_inplace(out, pair, duration);
  return out;
}

void trotterized_idle_inplace(DensityMatrix& rho, double duration, const NoiseModel& model, const IdleOptions& opt) {
  if (duration < 0) throw Error("trotterized_idle: negative duration");
  if (duration == 0 || model.level() == 0) return;
  const DeviceConfig& cfg = model.config();
  const long n = std::max(1L, static_cast<long>(std::ceil(duration / cfg.slice_time - 1e-9)));
  const double dt = duration / static_cast<double>(n);

  struct SiteStep {
    std::string label;
    const Matrix* superop;
  };
  std::vector<SiteStep> damping;
  if (model.has(Mechanism::Damping)) {
    for (const auto& s : rho.reg()) {
      const SiteParams& sp = cfg.site(s.label);
      double t2 = sp.t2_echo;
      if (auto it = opt.t2_override.find(s.label); it != opt.t2_override.end()) t2 = it->second;
      damping.push_back({s.label, &model.idle_superop(s.dim, dt, sp.t1, t2)});
    }
  }
  std::vector<const PairParams*> zz;
  if (model.has(Mechanism::ZZCrosstalk))
    for (const auto& p : cfg.pairs)
      if (p.zz_strength != 0 && !excluded(opt, p)) zz.push_back(&p);

  auto zz_step = [&](double t) {
    for (const auto* p : zz) apply_zz_inplace(rho, *p, t);
  };
  zz_step(dt / 2);
  for (long k = 0; k < n; ++k) {
    for (const auto& d : damping) StateKernel::apply_superop(rho, *d.superop, {d.label});
    zz_step(k + 1 < n ? dt : dt / 2);
  }
  StateKernel::hermitize(rho);
}

DensityMatrix trotterized_idle(const DensityMatrix& rho, double duration, const NoiseModel& model,
                               const IdleOptions& opt) {
  DensityMatrix out = rho;
  trotterized_idle_inplace(out, duration, model, opt);
  return out;
}

Matrix leakage_unitary(double l1) {
  const double p = 4 * l1;
  if (p < 0 || p > 1) throw Error("leakage probability outside [0, 1]");
  const double s = std::sqrt(p), c = std::sqrt(1 - p);
  Matrix u = Matrix::Identity(9, 9);
  const int i11 = 1 * 3 + 1, i02 = 0 * 3 + 2;
  u(i11, i11) = c;
  u(i02, i02) = c;
  u(i11, i02) = cplx(0, -s);
  u(i02, i11) = cplx(0, -s);
  return u;
}

void apply_moment_inplace(DensityMatrix& rho, const std::vector<Gate>& moment, const NoiseModel& model) {
  std::vector<const Gate*> singles, czs;
  for (const auto& g : moment) {
    if (g.kind == GateKind::RXY || g.kind == GateKind::RZ) singles.push_back(&g);
    else if (g.kind == GateKind::CZ) czs.push_back(&g);
    else if (g.kind != GateKind::MEASURE)
      throw Error(std::string("simulator accepts native gates only, got ") + gate_name(g.kind));
  }
  const DeviceConfig& cfg = model.config();
  auto rotations = [&] {
    for (const auto* g : singles) rotate_inplace(rho, *g);
  };
  if (model.level() == 0) {
    rotations();
    for (const auto* g : czs) ideal_cz_inplace(rho, g->targets[0], g->targets[1]);
    return;
  }
  const double half_sq = cfg.single_qubit_gate_time / 2;
  if (czs.empty()) {
    if (singles.empty()) return;
    trotterized_idle_inplace(rho, half_sq, model);
    rotations();
    trotterized_idle_inplace(rho, half_sq, model);
    return;
  }
  IdleOptions opt;
  for (const auto* g : czs) {
    const PairParams& p = cfg.pair(g->targets[0], g->targets[1]);
    if (!p.has_cz) throw Error("pair " + p.a + "-" + p.b + " has no CZ");
    opt.zz_excluded.emplace_back(p.a, p.b);
    if (model.has(Mechanism::FluxDephasing))
      opt.t2_override[p.fluxed] = p.cz_t2_flux > 0 ? p.cz_t2_flux : flux_t2_estimate(cfg, p);
  }
  if (singles.empty()) {
    trotterized_idle_inplace(rho, cfg.cz_idle_time, model, opt);
  } else {
    trotterized_idle_inplace(rho, half_sq, model, opt);
    rotations();
    trotterized_idle_inplace(rho, cfg.cz_idle_time - half_sq, model, opt);
  }
  for (const auto* g : czs) {
    ideal_cz_inplace(rho, g->targets[0], g->targets[1]);
    if (model.has(Mechanism::Leakage)) {
      const PairParams& p = cfg.pair(g->targets[0], g->targets[1]);
      if (rho.reg()[rho.reg().index_of(p.fluxed)].dim != 3) throw Error("leakage needs qutrit sites");
      StateKernel::apply_unitary(rho, leakage_unitary(p.cz_leakage_l1), {p.other(), p.fluxed});
      if (cfg.leakage_dephasing) leakage_dephasing_inplace(rho, p.fluxed);
    }
  }
  trotterized_idle_inplace(rho, cfg.cz_idle_time, model, opt);
  // The phase-correction margin is treated as noiseless.
}

DensityMatrix apply_cz(const DensityMatrix& rho, const std::string& a, const std::string& b, const NoiseModel& model) {
  DensityMatrix out = rho;
  apply_moment_inplace(out, {Gate::cz(a, b)}, model);
  StateKernel::hermitize(out);
  return out;
}

DensityMatrix apply_single_qubit_gate(const DensityMatrix& rho, const Gate& g, const NoiseModel& model) {
  if (!g.single_qubit()) throw Error("apply_single_qubit_gate expects RXY or RZ");
  DensityMatrix out = rho;
  apply_moment_inplace(out, {g}, model);
  StateKernel::hermitize(out);
  return out;
}

void run_circuit_inplace(DensityMatrix& rho, const Circuit& c, const NoiseModel& model) {
  for (const auto& m : c.moments()) apply_moment_inplace(rho, m, model);
  StateKernel::hermitize(rho);
}

DensityMatrix run_circuit(const Circuit& c, const NoiseModel& model) {
  Register reg = model.sim_register();
  DensityMatrix rho = DensityMatrix::basis_state(reg, std::vector<int>(reg.size(), 0));
  run_circuit_inplace(rho, c, model);
  return rho;
}

}  // namespace tfdsim
