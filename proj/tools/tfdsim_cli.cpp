// tfdsim: batch driver for calibrations, sweeps, landscapes, tomography
// demos and the compiler self-check.
//
// exit codes: 0 ok, 1 check failed, 2 usage or configuration error

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tfdsim/rng.hpp"
#include "tfdsim/vqa.hpp"

using namespace tfdsim;
namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
  bool exact = false;
};

void add_common(CLI::App* c, Common& o, bool stochastic) {
  c->add_option("--config", o.config, "device configuration file");
  c->add_option("--set", o.sets, "override a config entry, key=value (repeatable)");
  if (!stochastic) return;
  c->add_option("--out", o.out, "output directory");
  c->add_option("--seed", o.seed, "random seed");
  c->add_flag("--exact", o.exact, "use expectation values instead of sampling");
}

DeviceConfig load_config(const Common& o) {
  DeviceConfig cfg = o.config.empty() ? DeviceConfig::defaults() : DeviceConfig::load(o.config);
  for (const auto& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

std::uint64_t need_seed(const Common& o) {
  if (!o.seed) throw UsageError("--seed is required for this command");
  return *o.seed;
}

fs::path out_dir(const Common& o) {
  std::error_code ec;
  fs::create_directories(o.out, ec);
  const fs::path probe = fs::path(o.out) / ".tfdsim_probe";
  {
    std::ofstream f(probe);
    if (!f) throw UsageError("output directory '" + o.out + "' is not writable");
  }
  fs::remove(probe, ec);
  return o.out;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
  if (!f) throw UsageError("cannot write " + p.string());
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v + 0.0);
  return buf;
}

// ---- calibrate-varsigma

int cmd_calibrate(const Common& o, const std::vector<double>& grid) {
  const DeviceConfig cfg = load_config(o);  // parsed only for validation
  (void)cfg;
  CostCalibrationSpec spec;
  spec.seed = o.seed.value_or(spec.seed);
  if (!grid.empty()) spec.varsigma_grid = grid;
  for (double s : spec.varsigma_grid) CostSpec{s, 0}.validate();
  const fs::path dir = out_dir(o);
  const CalibrationResult r = calibrate_varsigma(spec);
  std::string t = "varsigma\txi\tflagged\n";
  for (const auto& x : r.scan) t += fmt(x.varsigma) + "\t" + fmt(x.value) + "\t" + (x.flagged ? "1" : "0") + "\n";
  write_file(dir / "xi_scan.tsv", t);
  if (r.scan.size() > 1) {
    write_file(dir / "xi_argmin.txt", fmt(r.best_varsigma()) + "\n");
    std::cout << "argmin varsigma " << fmt(r.best_varsigma()) << "  xi " << fmt(r.scan[r.argmin].value) << "\n";
  } else {
    std::cout << "xi(" << fmt(r.scan[0].varsigma) << ") = " << fmt(r.scan[0].value) << "\n";
  }
  return 0;
}

// ---- sweep

struct SweepArgs {
  std::vector<int> levels{0};
  std::vector<std::string> modes{"variational"};
  std::vector<double> betas;
  long shots = 4096;
  long tomo_shots = 16384;
  int evaluations = 200;
  double varsigma = 1.57;
};

int cmd_sweep(const Common& o, const SweepArgs& a) {
  const std::uint64_t seed = need_seed(o);
  for (int l : a.levels)
    if (l < 0 || l > 4) throw UsageError("noise level must be in 0..4");
  const DeviceConfig cfg = load_config(o);
  std::vector<SweepMode> modes;
  for (const auto& m : a.modes) modes.push_back(mode_from_name(m));
  OptimizerBudget budget;
  budget.cost_shots = a.shots;
  budget.tomo_shots = a.tomo_shots;
  budget.max_evaluations = a.evaluations;
  budget.validate();
  const fs::path dir = out_dir(o);
  fs::create_directories(dir / "records");
  std::string summary = summary_header();
  for (SweepMode m : modes)
    for (int l : a.levels) {
      SweepPlan plan;
      if (!a.betas.empty()) plan.betas = a.betas;
      plan.noise_level = l;
      plan.mode = m;
      plan.validate();
      const VqaContext ctx(cfg, l, o.exact, seed, a.varsigma);
      const auto recs = run_sweep(plan, budget, ctx);
      for (std::size_t i = 0; i < recs.size(); ++i) {
        summary += summary_row(recs[i]);
        std::cout << summary_row(recs[i]) << std::flush;
        write_file(dir / "records" /
                       (std::string(mode_name(m)) + "_level" + std::to_string(l) + "_b" + std::to_string(i) + ".json"),
                   record_json(recs[i]));
      }
    }
  write_file(dir / "summary.tsv", summary);
  return 0;
}

// ---- landscape

int cmd_landscape(const Common& o, const std::string& axis, double beta, int level, int points, long shots) {
  const std::uint64_t seed = o.exact ? o.seed.value_or(0) : need_seed(o);
  if (level < 0 || level > 4) throw UsageError("noise level must be in 0..4");
  if (axis != "gamma" && axis != "alpha") throw UsageError("--axis must be gamma or alpha");
  const DeviceConfig cfg = load_config(o);
  const fs::path dir = out_dir(o);
  const VqaContext ctx(cfg, level, o.exact, seed);
  const auto s = landscape_scan(axis == "gamma" ? ScanAxis::Gamma : ScanAxis::Alpha, beta, ctx, shots, points);
  // rows: first angle of the pair, columns: second
  std::string t = axis + "1\\" + axis + "2";
  for (double g : s.grid) t += "\t" + fmt(g);
  t += "\n";
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    t += fmt(s.grid[i]);
    for (double v : s.values[i]) t += "\t" + fmt(v);
    t += "\n";
  }
  write_file(dir / ("landscape_" + axis + ".tsv"), t);
  std::cout << "wrote " << (dir / ("landscape_" + axis + ".tsv")).string() << "\n";
  return 0;
}

// ---- compile-check

int cmd_compile_check(bool no_reduce, bool tamper, std::optional<int> expect_depth, std::uint64_t seed) {
  PipelineOptions opt;
  opt.reduce_depth = !no_reduce;
  opt.tamper = tamper;
  const std::size_t want = expect_depth ? static_cast<std::size_t>(*expect_depth) : (no_reduce ? 16 : 11);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-3.141592653589793, 3.141592653589793);
  int failures = 0;
  std::size_t depth = 0;
  for (int k = 0; k < 20; ++k) {
    const VariationalAngles a{d(rng), d(rng), d(rng), d(rng)};
    const Circuit abs = build_abstract_circuit(a);
    const CompiledCircuit c = compile(abs, opt);
    const double dev = compilation_deviation(abs, c);
    depth = c.circuit.depth();
    if (dev >= 1e-10 || depth != want) {
      ++failures;
      std::cout << "FAIL angles alpha=(" << fmt(a.alpha1) << ", " << fmt(a.alpha2) << ") gamma=(" << fmt(a.gamma1)
                << ", " << fmt(a.gamma2) << ") deviation " << fmt(dev) << " depth " << depth << "\n";
    }
  }
  std::cout << "depth " << depth << " (expected " << want << "), " << 20 - failures << "/20 equivalent\n";
  return failures == 0 ? 0 : 1;
}

// ---- tomo-demo

int cmd_tomo_demo(const Common& o, double beta, int level, long shots) {
  const std::uint64_t seed = need_seed(o);
  if (level < 0 || level > 4) throw UsageError("noise level must be in 0..4");
  const DeviceConfig cfg = load_config(o);
  const fs::path dir = out_dir(o);
  const VqaContext ctx(cfg, level, o.exact, seed);
  const auto angles = ideal_optimal_angles({beta}, ctx.varsigma(), seed).front();
  const DensityMatrix rho = ctx.prepare(angles);
  const MeasurementModel m = ctx.calibration(shots, derive_seed(seed, {0xde70, 0}));
  const long n = o.exact ? 0 : shots;
  std::ostringstream os;
  for (System s : {System::A, System::B}) {
    const auto t = tomography_2q(rho, s, ctx.readout(), m, {n, seed, derive_seed(seed, {0xde70, s == System::B ? 2u : 1u})});
    const char* name = s == System::A ? "A" : "B";
    os << "# system " << name << "  beta " << fmt(beta) << "  level " << level << "\n";
    os << "F\t" << fmt(gibbs_fidelity(t.rho_exp, beta, s)) << "\nP\t" << fmt(clamped_purity(t.rho_exp)) << "\n";
    os << "rho_exp (re, im)\n";
    for (Eigen::Index i = 0; i < 4; ++i) {
      for (Eigen::Index j = 0; j < 4; ++j)
        os << (j ? "\t" : "") << fmt(t.rho_exp.data()(i, j).real()) << "," << fmt(t.rho_exp.data()(i, j).imag());
      os << "\n";
    }
    os << averages_table(t.averages, system_sites(s));
  }
  write_file(dir / "tomo_demo.txt", os.str());
  std::cout << os.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thermofield-double preparation simulator"};
  app.require_subcommand(1);

  Common cal_o, sw_o, ls_o, cc_o, td_o;
  std::vector<double> cal_grid;
  auto* cal = app.add_subcommand("calibrate-varsigma", "scan the cost exponent and report the Xi minimum");
  add_common(cal, cal_o, true);
  cal->add_option("--grid", cal_grid, "exponent values, comma separated")->delimiter(',');

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "warm-started sweep over beta");
  add_common(sweep, sw_o, true);
  sweep->add_option("--level", sw.levels, "noise levels 0..4, comma separated")->delimiter(',');
  sweep->add_option("--mode", sw.modes, "variational and/or cheating")->delimiter(',');
  sweep->add_option("--betas", sw.betas, "beta grid, comma separated")->delimiter(',');
  sweep->add_option("--shots", sw.shots, "shots per cost evaluation");
  sweep->add_option("--tomo-shots", sw.tomo_shots, "shots per tomography setting and remeasurement");
  sweep->add_option("--evaluations", sw.evaluations, "optimiser evaluations per beta");
  sweep->add_option("--varsigma", sw.varsigma, "cost exponent");

  std::string axis = "gamma";
  double ls_beta = 0;
  int ls_level = 0, ls_points = 10;
  long ls_shots = 4096;
  auto* land = app.add_subcommand("landscape", "cost on a grid of (gamma1, gamma2) or (alpha1, alpha2)");
  add_common(land, ls_o, true);
  land->add_option("--axis", axis, "gamma or alpha");
  land->add_option("--beta", ls_beta, "inverse temperature");
  land->add_option("--level", ls_level, "noise level 0..4");
  land->add_option("--points", ls_points, "grid points per angle over [0, pi]");
  land->add_option("--shots", ls_shots, "shots per cost evaluation");

  bool no_reduce = false, tamper = false;
  std::optional<int> expect_depth;
  std::uint64_t cc_seed = 1;
  auto* cc = app.add_subcommand("compile-check", "verify the compiler on random angle sets");
  add_common(cc, cc_o, false);
  cc->add_flag("--no-reduce", no_reduce, "skip the depth-reduction pass");
  cc->add_flag("--tamper", tamper, "perturb one compiled rotation (negative control)");
  cc->add_option("--expect-depth", expect_depth, "required circuit depth");
  cc->add_option("--seed", cc_seed, "seed for the random angles");

  double td_beta = 1;
  int td_level = 0;
  long td_shots = 16384;
  auto* td = app.add_subcommand("tomo-demo", "tomography of both systems at the ideal angles for one beta");
  add_common(td, td_o, true);
  td->add_option("--beta", td_beta, "inverse temperature");
  td->add_option("--level", td_level, "noise level 0..4");
  td->add_option("--shots", td_shots, "shots per setting");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*cal) return cmd_calibrate(cal_o, cal_grid);
    if (*sweep) return cmd_sweep(sw_o, sw);
    if (*land) return cmd_landscape(ls_o, axis, ls_beta, ls_level, ls_points, ls_shots);
    if (*cc) {
      load_config(cc_o);
      return cmd_compile_check(no_reduce, tamper, expect_depth, cc_seed);
    }
    if (*td) return cmd_tomo_demo(td_o, td_beta, td_level, td_shots);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
