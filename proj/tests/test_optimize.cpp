#include <cmath>

#include "doctest.h"
#include "tfdsim/linalg.hpp"
#include "tfdsim/optimize.hpp"

using namespace tfdsim;

TEST_CASE("quadratic bowl off the torus") {
  MinimizeOptions opt;
  opt.periodic = false;
  opt.max_evaluations = 2000;
  const auto r = minimize(
      [](const std::vector<double>& x) { return (x[0] - 1) * (x[0] - 1) + 3 * (x[1] + 2) * (x[1] + 2) + 0.5; },
      {0.0, 0.0}, opt);
  CHECK(r.x[0] == doctest::Approx(1).epsilon(1e-5));
  CHECK(r.x[1] == doctest::Approx(-2).epsilon(1e-5));
  CHECK(r.f == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(r.converged);
}

TEST_CASE("budget is a hard cap across restarts") {
  for (int budget : {1, 3, 7, 40, 123}) {
    MinimizeOptions opt;
    opt.max_evaluations = budget;
    int calls = 0;
    const auto r = minimize(
        [&](const std::vector<double>& x) {
          ++calls;
          return std::sin(x[0]) * std::cos(x[1]) + std::sin(3 * x[2]);
        },
        {0.1, 0.2, 0.3}, opt);
    CHECK(calls <= budget);
    CHECK(r.evaluations == calls);
    CHECK(r.trace.size() == static_cast<std::size_t>(calls));
  }
}

TEST_CASE("periodic coordinates are reported wrapped") {
  MinimizeOptions opt;
  opt.max_evaluations = 600;
  const auto r = minimize([](const std::vector<double>& x) { return std::cos(x[0] - 3.0) + std::cos(x[1]); },
                          {2.5, 2.8}, opt);
  // minimum at x0 = 3 - pi, x1 = pi (wrapped into (-pi, pi])
  CHECK(std::abs(std::remainder(r.x[0] - (3.0 - 3.141592653589793), 2 * 3.141592653589793)) < 1e-4);
  CHECK(std::abs(std::cos(r.x[1]) + 1) < 1e-8);
  for (const auto& e : r.trace)
    for (double v : e.x) CHECK(std::abs(v) <= 3.141592653589793 + 1e-12);
}

TEST_CASE("restarts are seeded") {
  auto f = [](const std::vector<double>& x) { return std::sin(2 * x[0]) + std::sin(5 * x[1]); };
  MinimizeOptions opt;
  opt.max_evaluations = 150;
  opt.seed = 4;
  const auto a = minimize(f, {0.3, 0.3}, opt), b = minimize(f, {0.3, 0.3}, opt);
  CHECK(a.x == b.x);
  CHECK(a.trace.size() == b.trace.size());
  opt.seed = 5;
  const auto c = minimize(f, {0.3, 0.3}, opt);
  bool differs = false;
  for (std::size_t k = 0; k < std::min(a.trace.size(), c.trace.size()); ++k) differs |= a.trace[k].x != c.trace[k].x;
  CHECK(differs);
}

TEST_CASE("non-finite values do not stop the search") {
  MinimizeOptions opt;
  opt.periodic = false;
  opt.max_evaluations = 1000;
  const auto r = minimize(
      [](const std::vector<double>& x) { return x[0] < -1 ? NAN : (x[0] - 0.5) * (x[0] - 0.5); }, {0.0}, opt);
  CHECK(r.x[0] == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("invalid input") {
  CHECK_THROWS_AS(minimize([](const std::vector<double>&) { return 0.0; }, {}, {}), Error);
  MinimizeOptions opt;
  opt.max_evaluations = 0;
  CHECK_THROWS_AS(minimize([](const std::vector<double>&) { return 0.0; }, {0.0}, opt), Error);
}
