#include <random>

#include "doctest.h"
#include "tfdsim/linalg.hpp"

#include <unsupported/Eigen/KroneckerProduct>

using namespace tfdsim;

namespace {

Matrix random_density(std::mt19937_64& rng, int d, int rank) {
  std::normal_distribution<double> n;
  Matrix g(d, rank);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < rank; ++j) g(i, j) = cplx(n(rng), n(rng));
  Matrix r = g * g.adjoint();
  r /= r.trace().real();
  return 0.5 * (r + r.adjoint());
}

Vector bell_phi_plus() {
  Vector v = Vector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  return v;
}

}  // namespace

TEST_CASE("register basics") {
  Register r{{"B2", 2}, {"B1", 3}, {"A2", 2}};
  CHECK(r.dim() == 12);
  CHECK(r.index_of("B1") == 1);
  CHECK(r.strides() == std::vector<std::size_t>{6, 2, 1});
  CHECK_THROWS_AS(r.index_of("Q"), Error);
  CHECK_THROWS_AS((Register{{"A", 2}, {"A", 2}}), Error);
  CHECK_THROWS_AS((Register{{"A", 4}}), Error);
  CHECK(r.subset({"A2", "B2"}).labels() == std::vector<std::string>{"B2", "A2"});
}

TEST_CASE("tensor examples") {
  Observable i1(Register{{"a", 2}}, ops::identity(2));
  Observable i2(Register{{"b", 2}}, ops::identity(2));
  auto ii = tensor(i1, i2);
  CHECK(max_abs(ii.data() - Matrix::Identity(4, 4)) == 0.0);

  auto r0 = DensityMatrix::basis_state(Register{{"a", 2}}, {0});
  auto r1 = DensityMatrix::basis_state(Register{{"b", 2}}, {1});
  auto r01 = tensor(r0, r1);
  CHECK(std::abs(r01.data()(1, 1) - 1.0) == 0.0);
  CHECK(r01.data().cwiseAbs().sum() == doctest::Approx(1.0));

  Register ab{{"a", 2}, {"b", 2}};
  auto bell = DensityMatrix::pure(ab, bell_phi_plus());
  auto zz = embed(ab, Eigen::kroneckerProduct(ops::pauli('Z', 2), ops::pauli('Z', 2)).eval(), {"a", "b"});
  CHECK(bell.expectation(zz) == doctest::Approx(1.0).epsilon(1e-14));

  CHECK_THROWS_AS(tensor(r0, r0), Error);
}

TEST_CASE("partial trace") {
  std::mt19937_64 rng(7);
  Register ra{{"A2", 2}, {"A1", 3}};
  Register rb{{"B2", 3}};
  DensityMatrix a(ra, random_density(rng, 6, 3));
  DensityMatrix b(rb, random_density(rng, 3, 2));
  auto ab = tensor(a, b);
  CHECK(max_abs(partial_trace(ab, {"A2", "A1"}).data() - a.data()) < 1e-12);
  CHECK(max_abs(partial_trace(ab, {"B2"}).data() - b.data()) < 1e-12);
  CHECK(max_abs(partial_trace(ab, {"A2", "A1", "B2"}).data() - ab.data()) < 1e-15);
  CHECK_THROWS_AS(partial_trace(ab, {"Q"}), Error);

  // Tracing one half of a Bell pair leaves I/2.
  Register r2{{"a", 2}, {"b", 2}};
  auto bell = DensityMatrix::pure(r2, bell_phi_plus());
  CHECK(max_abs(partial_trace(bell, {"a"}).data() - Matrix::Identity(2, 2) / 2.0) < 1e-15);
}

TEST_CASE("fidelity and purity") {
  Register r{{"a", 2}, {"b", 2}};
  auto mixed = DensityMatrix::maximally_mixed(r);
  auto bell = DensityMatrix::pure(r, bell_phi_plus());
  CHECK(fidelity(bell, bell) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fidelity(mixed, bell) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fidelity(bell, mixed) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(purity(mixed) == doctest::Approx(0.25));
  CHECK(purity(bell) == doctest::Approx(1.0).epsilon(1e-14));

  std::mt19937_64 rng(11);
  for (int k = 0; k < 30; ++k) {
    DensityMatrix p(r, random_density(rng, 4, 1 + k % 4));
    DensityMatrix q(r, random_density(rng, 4, 1 + (k / 4) % 4));
    const double f1 = fidelity(p, q), f2 = fidelity(q, p);
    CHECK(std::abs(f1 - f2) < 1e-10);
    CHECK(f1 >= 0.0);
    CHECK(f1 <= 1.0);
    const double pp = purity(p);
    CHECK(pp > 0.0);
    CHECK(pp <= 1.0 + 1e-12);
  }

  DensityMatrix other(Register{{"a", 3}}, Matrix::Identity(3, 3) / 3.0);
  CHECK_THROWS_AS(fidelity(mixed, other), Error);

  Matrix neg = Matrix::Zero(4, 4);
  neg(0, 0) = 1.1;
  neg(1, 1) = -0.1;
  DensityMatrix bad(r, neg);
  CHECK_THROWS_AS(fidelity(bad, mixed), Error);
  CHECK_THROWS_AS(fidelity(mixed, bad), Error);
  CHECK_NOTHROW(fidelity(mixed, bad, Negativity::Clamp));
}

TEST_CASE("density matrix validation") {
  Register r{{"a", 2}};
  Matrix m = Matrix::Identity(2, 2);
  CHECK_THROWS_AS(DensityMatrix(r, m), Error);
  m(0, 1) = 0.3;
  m /= 2.0;
  CHECK_THROWS_AS(DensityMatrix(r, m), Error);
}

TEST_CASE("kernels agree with dense embedding") {
  std::mt19937_64 rng(3);
  Register r{{"q0", 2}, {"q1", 3}, {"q2", 2}};
  DensityMatrix rho(r, random_density(rng, 12, 5));
  std::normal_distribution<double> n;
  Matrix h(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) h(i, j) = cplx(n(rng), n(rng));
  Eigen::ComplexEigenSolver<Matrix> ces(h + h.adjoint());
  Matrix u = ces.eigenvectors();  // unitary from a Hermitian eigenbasis
  Matrix full = embed(r, u, {"q2", "q1"}).data();
  Matrix expected = full * rho.data() * full.adjoint();

  DensityMatrix a = rho;
  StateKernel::apply_unitary(a, u, {"q2", "q1"});
  CHECK(max_abs(a.data() - expected) < 1e-12);

  // Same unitary expressed as a superoperator U (x) conj(U).
  Matrix s = Eigen::kroneckerProduct(u, u.conjugate()).eval();
  DensityMatrix b = rho;
  StateKernel::apply_superop(b, s, {"q2", "q1"});
  CHECK(max_abs(b.data() - expected) < 1e-12);

  Vector ph(3);
  ph << 1.0, std::polar(1.0, 0.3), std::polar(1.0, -1.1);
  DensityMatrix c = rho;
  StateKernel::apply_diagonal(c, ph, {"q1"});
  Matrix dfull = embed(r, Matrix(ph.asDiagonal()), {"q1"}).data();
  CHECK(max_abs(c.data() - dfull * rho.data() * dfull.adjoint()) < 1e-14);
}
