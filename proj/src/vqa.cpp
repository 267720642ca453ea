#include "tfdsim/vqa.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "json.hpp"
#include "tfdsim/rng.hpp"

namespace tfdsim {

namespace {

// 12 significant digits, so serialised numbers diff cleanly.
double r12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v + 0.0);
  return std::strtod(buf, nullptr);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v + 0.0);
  return buf;
}

nlohmann::ordered_json angles_json(const VariationalAngles& a) {
  return {{"alpha1", r12(a.alpha1)}, {"alpha2", r12(a.alpha2)}, {"gamma1", r12(a.gamma1)}, {"gamma2", r12(a.gamma2)}};
}

nlohmann::ordered_json matrix_json(const DensityMatrix& rho) {
  auto rows = nlohmann::ordered_json::array();
  const Matrix& m = rho.data();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    auto row = nlohmann::ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({r12(m(i, j).real()), r12(m(i, j).imag())});
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

void OptimizerBudget::validate() const {
  if (max_evaluations < 1 || remeasure_count < 1 || cost_shots < 1 || tomo_shots < 1 || restarts < 0)
    throw Error("optimizer budget entries must be positive");
}

const char* mode_name(SweepMode m) { return m == SweepMode::Variational ? "variational" : "cheating"; }

SweepMode mode_from_name(const std::string& s) {
  if (s == "variational") return SweepMode::Variational;
  if (s == "cheating") return SweepMode::Cheating;
  throw Error("unknown sweep mode '" + s + "'");
}

std::vector<double> default_beta_grid() { return {0, 0.1, 0.2, 0.35, 0.5, 0.75, 1, 1.5, 2, 3, 4, 5}; }

void SweepPlan::validate() const {
  if (noise_level < 0 || noise_level > 4) throw Error("noise level must be in 0..4");
  if (betas.empty()) throw Error("empty beta grid");
  for (double b : betas)
    if (!(b >= 0) || !std::isfinite(b)) throw Error("beta values must be finite and non-negative");
  if (mode == SweepMode::Variational) {
    if (betas.front() != 0) throw Error("a variational sweep starts at beta = 0");
    if (!std::is_sorted(betas.begin(), betas.end())) throw Error("a variational sweep needs ascending betas");
  }
}

VqaContext::VqaContext(const DeviceConfig& cfg, int level, bool exact, std::uint64_t seed, double varsigma)
    : model_(level, cfg),
      readout_(ReadoutModel::from_config(cfg)),
      exact_model_(calibrate(readout_, ansatz_register().labels(), {0, 0, 0})),
      exact_(exact),
      seed_(seed),
      varsigma_(varsigma) {
  CostSpec{varsigma, 0}.validate();
}

DensityMatrix VqaContext::prepare(const VariationalAngles& a) const { return run_circuit(compile_ansatz(a), model_); }

MeasurementModel VqaContext::calibration(long shots, std::uint64_t stream) const {
  if (exact_) return exact_model_;
  return calibrate(readout_, ansatz_register().labels(), {shots, seed_, stream});
}

CostEvaluation evaluate_candidate(const VariationalAngles& a, double beta, const VqaContext& ctx, long shots,
                                  std::uint64_t stream) {
  CostEvaluation out;
  out.angles = a;
  const DensityMatrix rho = ctx.prepare(a);
  const MeasurementModel m = ctx.calibration(shots, derive_seed(stream, {1}));
  const SamplingOptions so{ctx.exact() ? 0 : shots, ctx.seed(), derive_seed(stream, {2})};
  out.terms = measure_cost_terms(rho, ctx.readout(), m, so).terms;
  out.cost = cost_value(out.terms, {ctx.varsigma(), beta});
  return out;
}

double gibbs_fidelity(const DensityMatrix& rho_exp, double beta, System s) {
  return fidelity(gibbs_state(beta, {}, s), rho_exp, Negativity::Clamp);
}

double clamped_purity(const DensityMatrix& rho_exp) { return std::clamp(purity(rho_exp), 0.0, 1.0); }

void finalize_record(SweepRecord& rec, const VqaContext& ctx, const OptimizerBudget& budget, std::uint64_t tag) {
  rec.level = ctx.model().level();
  rec.remeasured.clear();
  for (int r = 0; r < budget.remeasure_count; ++r) {
    const auto e = evaluate_candidate(rec.final_angles, rec.beta, ctx, budget.tomo_shots,
                                      derive_seed(ctx.seed(), {tag, 0x4e3, static_cast<std::uint64_t>(r)}));
    rec.remeasured.push_back(e.cost);
  }
  double sum = 0;
  for (double c : rec.remeasured) sum += c;
  rec.c_final = sum / static_cast<double>(rec.remeasured.size());

  const DensityMatrix rho = ctx.prepare(rec.final_angles);
  const std::uint64_t ts = derive_seed(ctx.seed(), {tag, 0x70});
  const MeasurementModel m = ctx.calibration(budget.tomo_shots, derive_seed(ts, {0}));
  const long shots = ctx.exact() ? 0 : budget.tomo_shots;
  rec.rho_exp_a = tomography_2q(rho, System::A, ctx.readout(), m, {shots, ctx.seed(), derive_seed(ts, {1})}).rho_exp;
  rec.rho_exp_b = tomography_2q(rho, System::B, ctx.readout(), m, {shots, ctx.seed(), derive_seed(ts, {2})}).rho_exp;
  rec.f_a = gibbs_fidelity(rec.rho_exp_a, rec.beta, System::A);
  rec.f_b = gibbs_fidelity(rec.rho_exp_b, rec.beta, System::B);
  rec.p_a = clamped_purity(rec.rho_exp_a);
  rec.p_b = clamped_purity(rec.rho_exp_b);
}

SweepRecord optimize_at_beta(double beta, const VariationalAngles& guess, const OptimizerBudget& budget,
                             const VqaContext& ctx, std::uint64_t tag) {
  budget.validate();
  SweepRecord rec;
  rec.beta = beta;
  rec.mode = SweepMode::Variational;
  rec.initial_angles = guess;
  std::uint64_t calls = 0;
  auto f = [&](const std::vector<double>& x) {
    return evaluate_candidate(VariationalAngles::from_vector(x), beta, ctx, budget.cost_shots,
                              derive_seed(ctx.seed(), {tag, 0xe7a1, calls++}))
        .cost;
  };
  MinimizeOptions opt;
  opt.max_evaluations = budget.max_evaluations;
  opt.restarts = budget.restarts;
  opt.initial_step = budget.initial_step;
  opt.restart_radius = budget.restart_radius;
  opt.seed = derive_seed(ctx.seed(), {tag, 0x0b7});
  const MinimizeResult res = minimize(f, guess.to_vector(), opt);
  rec.cost_trace = res.trace;
  rec.final_angles = VariationalAngles::from_vector(res.x);
  finalize_record(rec, ctx, budget, tag);
  return rec;
}

std::vector<VariationalAngles> ideal_optimal_angles(const std::vector<double>& betas, double varsigma,
                                                    std::uint64_t seed, int evaluations) {
  std::vector<VariationalAngles> out;
  VariationalAngles guess{};
  for (std::size_t i = 0; i < betas.size(); ++i) {
    MinimizeOptions opt;
    opt.max_evaluations = evaluations;
    opt.restarts = 3;
    opt.restart_radius = 0.5;
    opt.record_trace = false;
    opt.seed = derive_seed(seed, {0x1dea, i});
    const auto r = minimize_ideal_cost({varsigma, betas[i]}, opt, guess);
    guess = VariationalAngles::from_vector(r.x);
    out.push_back(guess);
  }
  return out;
}

std::vector<SweepRecord> run_sweep(const SweepPlan& plan, const OptimizerBudget& budget, const VqaContext& ctx) {
  plan.validate();
  budget.validate();
  if (plan.noise_level != ctx.model().level()) throw Error("sweep plan and context disagree on the noise level");
  std::vector<SweepRecord> out;
  const auto lvl = static_cast<std::uint64_t>(plan.noise_level);
  const auto md = static_cast<std::uint64_t>(plan.mode);
  if (plan.mode == SweepMode::Variational) {
    VariationalAngles guess = plan.initial_guess;
    for (std::size_t i = 0; i < plan.betas.size(); ++i) {
      out.push_back(optimize_at_beta(plan.betas[i], guess, budget, ctx, derive_seed(0x5eed, {lvl, md, i})));
      guess = out.back().final_angles;
    }
    return out;
  }
  const auto angles = ideal_optimal_angles(plan.betas, ctx.varsigma(), ctx.seed());
  for (std::size_t i = 0; i < plan.betas.size(); ++i) {
    SweepRecord rec;
    rec.beta = plan.betas[i];
    rec.mode = SweepMode::Cheating;
    rec.initial_angles = rec.final_angles = angles[i];
    finalize_record(rec, ctx, budget, derive_seed(0x5eed, {lvl, md, i}));
    for (double c : rec.remeasured) rec.cost_trace.push_back({angles[i].wrapped().to_vector(), c});
    out.push_back(std::move(rec));
  }
  return out;
}

LandscapeScan landscape_scan(ScanAxis axis, double beta, const VqaContext& ctx, long shots, int n, double lo,
                             double hi) {
  if (n < 2) throw Error("landscape grid needs at least two points per axis");
  LandscapeScan s;
  s.axis = axis;
  for (int k = 0; k < n; ++k) s.grid.push_back(lo + (hi - lo) * k / (n - 1));
  s.values.assign(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      VariationalAngles a{};
      if (axis == ScanAxis::Gamma) a.gamma1 = s.grid[i], a.gamma2 = s.grid[j];
      else a.alpha1 = s.grid[i], a.alpha2 = s.grid[j];
      s.values[i][j] = evaluate_candidate(a, beta, ctx, shots,
                                          derive_seed(ctx.seed(), {0x1a4d, static_cast<std::uint64_t>(axis),
                                                                   static_cast<std::uint64_t>(i),
                                                                   static_cast<std::uint64_t>(j)}))
                           .cost;
    }
  return s;
}

std::string record_json(const SweepRecord& r) {
  nlohmann::ordered_json j;
  j["beta"] = r12(r.beta);
  j["mode"] = mode_name(r.mode);
  j["level"] = r.level;
  j["initial_angles"] = angles_json(r.initial_angles);
  j["final_angles"] = angles_json(r.final_angles);
  auto trace = nlohmann::ordered_json::array();
  for (const auto& e : r.cost_trace) {
    nlohmann::ordered_json t;
    t["angles"] = nlohmann::ordered_json::array();
    for (double v : e.x) t["angles"].push_back(r12(v));
    t["cost"] = r12(e.f);
    trace.push_back(t);
  }
  j["cost_trace"] = trace;
  j["remeasured"] = nlohmann::ordered_json::array();
  for (double c : r.remeasured) j["remeasured"].push_back(r12(c));
  j["C_final"] = r12(r.c_final);
  j["rho_exp_A"] = matrix_json(r.rho_exp_a);
  j["rho_exp_B"] = matrix_json(r.rho_exp_b);
  j["F_A"] = r12(r.f_a);
  j["F_B"] = r12(r.f_b);
  j["P_A"] = r12(r.p_a);
  j["P_B"] = r12(r.p_b);
  return j.dump(1) + "\n";
}

std::string summary_header() { return "beta\tmode\tlevel\tF_A\tF_B\tP_A\tP_B\tC_final\n"; }

std::string summary_row(const SweepRecord& r) {
  return fmt(r.beta) + "\t" + mode_name(r.mode) + "\t" + std::to_string(r.level) + "\t" + fmt(r.f_a) + "\t" +
         fmt(r.f_b) + "\t" + fmt(r.p_a) + "\t" + fmt(r.p_b) + "\t" + fmt(r.c_final) + "\n";
}

}  // namespace tfdsim
