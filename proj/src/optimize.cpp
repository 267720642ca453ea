#include "tfdsim/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "tfdsim/circuit.hpp"
#include "tfdsim/linalg.hpp"
#include "tfdsim/rng.hpp"

namespace tfdsim {

namespace {

struct Run {
  std::vector<double> x;
  double f = INFINITY;
  bool converged = false;
};

class Counter {
 public:
  Counter(const Objective& f, const MinimizeOptions& opt, MinimizeResult& res) : f_(f), opt_(opt), res_(res) {}

  double operator()(const std::vector<double>& x) {
    std::vector<double> y = opt_.periodic ? wrap(x) : x;
    const double v = f_(y);
    ++res_.evaluations;
    if (opt_.record_trace) res_.trace.push_back({y, v});
    return std::isnan(v) ? INFINITY : v;
  }

  static std::vector<double> wrap(std::vector<double> x) {
    for (double& v : x) v = wrap_angle(v);
    return x;
  }

 private:
  const Objective& f_;
  const MinimizeOptions& opt_;
  MinimizeResult& res_;
};

// One simplex run through GSL. An nmsimplex2 iteration costs at most n + 2
// evaluations, so iteration stops before it could overrun the budget.
Run nelder_mead(Counter& eval, const std::vector<double>& x0, double step, int budget, const MinimizeOptions& opt) {
  const std::size_t n = x0.size();
  Run out;
  if (budget < static_cast<int>(n) + 1) {
    if (budget >= 1) {
      out.x = x0;
      out.f = eval(x0);
    }
    return out;
  }
  int used = 0;
  // The best evaluated point is the best vertex; GSL's own minimum() is only
  // valid after an iteration, which a small budget may never reach.
  struct Ctx {
    Counter* eval;
    int* used;
    std::size_t n;
    Run* best;
  } ctx{&eval, &used, n, &out};
  gsl_multimin_function fn;
  fn.n = n;
  fn.params = &ctx;
  fn.f = [](const gsl_vector* v, void* p) {
    auto* c = static_cast<Ctx*>(p);
    std::vector<double> x(c->n);
    for (std::size_t k = 0; k < c->n; ++k) x[k] = gsl_vector_get(v, k);
    ++*c->used;
    const double f = (*c->eval)(x);
    if (c->best->x.empty() || f < c->best->f) c->best->x = x, c->best->f = f;
    // GSL rejects non-finite values
    return std::isfinite(f) ? f : 1e300;
  };

  gsl_vector* x = gsl_vector_alloc(n);
  gsl_vector* dx = gsl_vector_alloc(n);
  for (std::size_t k = 0; k < n; ++k) gsl_vector_set(x, k, x0[k]);
  gsl_vector_set_all(dx, step);
  gsl_multimin_fminimizer* m = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
  gsl_multimin_fminimizer_set(m, &fn, x, dx);

  while (true) {
    if (gsl_multimin_fminimizer_size(m) < opt.xtol) {
      out.converged = true;
      break;
    }
    if (used + static_cast<int>(n) + 2 > budget) break;
    if (gsl_multimin_fminimizer_iterate(m) != GSL_SUCCESS) break;
  }
  gsl_multimin_fminimizer_free(m);
  gsl_vector_free(dx);
  gsl_vector_free(x);
  return out;
}

}  // namespace

MinimizeResult minimize(const Objective& f, const std::vector<double>& x0, const MinimizeOptions& opt) {
  if (x0.empty()) throw Error("minimize: empty starting point");
  if (opt.max_evaluations < 1 || opt.restarts < 0) throw Error("minimize: invalid budget");
  gsl_set_error_handler_off();
  MinimizeResult res;
  Counter eval(f, opt, res);
  std::mt19937_64 rng(derive_seed(opt.seed, {0x6e6d}));
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  Run best;
  const int starts = opt.restarts + 1;
  for (int k = 0; k < starts; ++k) {
    const int left = opt.max_evaluations - res.evaluations;
    if (left <= 0) break;
    const int share = left / (starts - k);
    std::vector<double> start = x0;
    if (k > 0) {
      start = best.x;
      for (double& v : start) v += opt.restart_radius * u(rng);
    }
    Run r = nelder_mead(eval, start, opt.initial_step, std::max(share, 1), opt);
    if (r.x.empty()) continue;
    if (r.f < best.f || best.x.empty()) best = r;
  }
  res.x = opt.periodic ? Counter::wrap(best.x) : best.x;
  res.f = best.f;
  res.converged = best.converged;
  return res;
}

}  // namespace tfdsim
