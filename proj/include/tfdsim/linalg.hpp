// linalg.hpp
// Dense complex linear algebra over registers of qubit/qutrit sites.
//
// A Register is an ordered list of labelled sites. Operators and density
// matrices carry their register; site 0 is the most significant tensor
// factor. Local operators are always placed by site label through the
// register, never by hand-written index arithmetic.

#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tfdsim {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Base for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Site {
  std::string label;
  int dim = 2;

  bool operator==(const Site&) const = default;
};

class Register {
 public:
  Register() = default;
  explicit Register(std::vector<Site> sites);
  Register(std::initializer_list<Site> sites) : Register(std::vector<Site>(sites)) {}

  // Register of n identical sites with the given labels.
  static Register uniform(const std::vector<std::string>& labels, int dim);

  std::size_t size() const { return sites_.size(); }
  bool empty() const { return sites_.empty(); }
  const Site& operator[](std::size_t i) const { return sites_[i]; }
  const std::vector<Site>& sites() const { return sites_; }
  auto begin() const { return sites_.begin(); }
  auto end() const { return sites_.end(); }

  // Hilbert-space dimension, product of site dimensions.
  std::size_t dim() const;

  std::optional<std::size_t> find(const std::string& label) const;
  // Throws Error on unknown label.
  std::size_t index_of(const std::string& label) const;
  bool contains(const std::string& label) const { return find(label).has_value(); }

  // Row-major stride of each site's digit in a flat basis index.
  std::vector<std::size_t> strides() const;

  // Sites of `labels` in register order. Throws on unknown labels.
  Register subset(const std::vector<std::string>& labels) const;
  std::vector<std::string> labels() const;

  bool operator==(const Register&) const = default;

 private:
  std::vector<Site> sites_;
};

// Concatenation; throws if a label appears in both.
Register concat(const Register& a, const Register& b);

// Matrix with an attached register. Used for unitaries and observables.
class Operator {
 public:
  Operator() = default;
  Operator(Register reg, Matrix data);

  const Register& reg() const { return reg_; }
  const Matrix& data() const { return data_; }
  std::size_t dim() const { return reg_.dim(); }

  bool is_hermitian(double tol = 1e-12) const;

 private:
  Register reg_;
  Matrix data_;
};

// Hermitian operator; the constructor enforces Hermiticity within 1e-12.
class Observable : public Operator {
 public:
  Observable() = default;
  Observable(Register reg, Matrix data);
};

class DensityMatrix {
 public:
  static constexpr double kHermitianTol = 1e-12;
  static constexpr double kTraceTol = 1e-10;
  static constexpr double kNegativityTol = 1e-10;

  DensityMatrix() = default;
  // Checks Hermiticity and unit trace. Positivity is checked separately
  // because tomographic estimates may legitimately be slightly negative.
  DensityMatrix(Register reg, Matrix data);

  static DensityMatrix pure(Register reg, const Vector& psi);
  static DensityMatrix basis_state(Register reg, const std::vector<int>& levels);
  static DensityMatrix maximally_mixed(Register reg);

  const Register& reg() const { return reg_; }
  const Matrix& data() const { return data_; }
  std::size_t dim() const { return reg_.dim(); }

  double trace() const { return data_.trace().real(); }
  double min_eigenvalue() const;
  bool is_positive(double tol = kNegativityTol) const { return min_eigenvalue() >= -tol; }
  // Throws Error when the minimum eigenvalue is below -tol.
  void require_positive(double tol = kNegativityTol) const;

  double expectation(const Operator& op) const;
  RealVector populations() const { return data_.diagonal().real(); }

 private:
  friend class StateKernel;
  struct Unchecked {};
  DensityMatrix(Register reg, Matrix data, Unchecked)
      : reg_(std::move(reg)), data_(std::move(data)) {}

  Register reg_;
  Matrix data_;
};

// Kronecker products with register concatenation.
Operator tensor(const Operator& a, const Operator& b);
Observable tensor(const Observable& a, const Observable& b);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::string>& keep);

enum class Negativity { Reject, Clamp };

// Uhlmann fidelity Tr sqrt(sqrt(rho) sigma sqrt(rho)).
// With Negativity::Reject both arguments must be positive within 1e-10.
// With Negativity::Clamp the first argument must still be positive; the
// second may carry negativity (e.g. a linear-inversion estimate), whose
// negative eigenvalues are clamped to zero.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma,
                Negativity policy = Negativity::Reject);

double purity(const DensityMatrix& rho);

// Principal square root of a Hermitian PSD matrix; eigenvalues in
// [-clamp_tol, 0) are set to zero, anything more negative throws.
Matrix hermitian_sqrt(const Matrix& m, double clamp_tol);

// Single-site operators. Qubit operators are lifted into a qutrit by acting
// as identity on level |2> (for unitaries) or zero there (for Paulis X, Y, Z
// used as observables, see `pauli`).
namespace ops {
Matrix identity(int dim);
// Pauli on the qubit subspace of a site of dimension `dim`; zero on |2>.
Matrix pauli(char which, int dim);
// Projector onto level k.
Matrix projector(int level, int dim);
// Lift a 2x2 unitary onto a site of dimension `dim`, identity on |2>.
Matrix lift_unitary(const Matrix& u2, int dim);
}  // namespace ops

// Place `local` (acting on `labels`, in that order) into the full register.
Operator embed(const Register& reg, const Matrix& local, const std::vector<std::string>& labels);
Observable embed_observable(const Register& reg, const Matrix& local,
                            const std::vector<std::string>& labels);

// In-place local evolution kernels. These are the only places where basis
// indices are decomposed into site digits.
class StateKernel {
 public:
  // rho -> U rho U^dagger, U acting on `labels`.
  static void apply_unitary(DensityMatrix& rho, const Matrix& u, const std::vector<std::string>& labels);
  // Diagonal unitary given by its phases on the local space.
  static void apply_diagonal(DensityMatrix& rho, const Vector& diag, const std::vector<std::string>& labels);
  // Superoperator in row-major vec convention: vec(rho)_{(a,b)} = rho(a,b),
  // local dimension d gives a d^2 x d^2 matrix.
  static void apply_superop(DensityMatrix& rho, const Matrix& s, const std::vector<std::string>& labels);
  // Restore exact Hermiticity after a chain of numerical updates.
  static void hermitize(DensityMatrix& rho);
  static DensityMatrix make_unchecked(Register reg, Matrix data) {
    return DensityMatrix(std::move(reg), std::move(data), DensityMatrix::Unchecked{});
  }
};

// Flat index bookkeeping for a set of sites inside a register.
struct LocalIndex {
  std::vector<std::size_t> local_offsets;  // one per local basis state
  std::vector<std::size_t> rest_offsets;   // one per basis state of the other sites
  std::size_t local_dim = 1;

  LocalIndex(const Register& reg, const std::vector<std::string>& labels);
};

double max_abs(const Matrix& m);

}  // namespace tfdsim
