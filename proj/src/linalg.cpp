#include "tfdsim/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>

namespace tfdsim {

Register::Register(std::vector<Site> sites) : sites_(std::move(sites)) {
  std::set<std::string> seen;
  for (const auto& s : sites_) {
    if (s.dim != 2 && s.dim != 3) throw Error("site '" + s.label + "' must have dimension 2 or 3");
    if (!seen.insert(s.label).second) throw Error("duplicate site label '" + s.label + "'");
  }
}

Register Register::uniform(const std::vector<std::string>& labels, int dim) {
  std::vector<Site> sites;
  sites.reserve(labels.size());
  for (const auto& l : labels) sites.push_back({l, dim});
  return Register(std::move(sites));
}

std::size_t Register::dim() const {
  std::size_t d = 1;
  for (const auto& s : sites_) d *= static_cast<std::size_t>(s.dim);
  return d;
}

std::optional<std::size_t> Register::find(const std::string& label) const {
  for (std::size_t i = 0; i < sites_.size(); ++i)
    if (sites_[i].label == label) return i;
  return std::nullopt;
}

std::size_t Register::index_of(const std::string& label) const {
  auto i = find(label);
  if (!i) throw Error("unknown site label '" + label + "'");
  return *i;
}

std::vector<std::size_t> Register::strides() const {
  std::vector<std::size_t> st(sites_.size());
  std::size_t s = 1;
  for (std::size_t k = sites_.size(); k-- > 0;) {
    st[k] = s;
    s *= static_cast<std::size_t>(sites_[k].dim);
  }
  return st;
}

Register Register::subset(const std::vector<std::string>& labels) const {
  for (const auto& l : labels) index_of(l);
  std::vector<Site> out;
  for (const auto& s : sites_)
    if (std::find(labels.begin(), labels.end(), s.label) != labels.end()) out.push_back(s);
  return Register(std::move(out));
}

std::vector<std::string> Register::labels() const {
  std::vector<std::string> out;
  for (const auto& s : sites_) out.push_back(s.label);
  return out;
}

Register concat(const Register& a, const Register& b) {
  std::vector<Site> sites = a.sites();
  for (const auto& s : b) {
    if (a.contains(s.label)) throw Error("registers overlap on site '" + s.label + "'");
    sites.push_back(s);
  }
  return Register(std::move(sites));
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

Operator::Operator(Register reg, Matrix data) : reg_(std::move(reg)), data_(std::move(data)) {
  const auto d = static_cast<Eigen::Index>(reg_.dim());
  if (data_.rows() != d || data_.cols() != d) throw Error("operator size does not match register");
}

bool Operator::is_hermitian(double tol) const { return max_abs(data_ - data_.adjoint()) <= tol; }

Observable::Observable(Register reg, Matrix data) : Operator(std::move(reg), std::move(data)) {
  if (!is_hermitian(1e-12)) throw Error("observable is not Hermitian");
}

DensityMatrix::DensityMatrix(Register reg, Matrix data) : reg_(std::move(reg)), data_(std::move(data)) {
  const auto d = static_cast<Eigen::Index>(reg_.dim());
  if (data_.rows() != d || data_.cols() != d) throw Error("density matrix size does not match register");
  if (max_abs(data_ - data_.adjoint()) > kHermitianTol) throw Error("density matrix is not Hermitian");
  if (std::abs(data_.trace() - cplx(1.0)) > kTraceTol) throw Error("density matrix trace differs from 1");
}

DensityMatrix DensityMatrix::pure(Register reg, const Vector& psi) {
  if (static_cast<std::size_t>(psi.size()) != reg.dim()) throw Error("state vector size does not match register");
  const double n = psi.norm();
  if (n == 0.0) throw Error("zero state vector");
  Vector v = psi / n;
  Matrix m = v * v.adjoint();
  m = 0.5 * (m + m.adjoint()).eval();
  return DensityMatrix(std::move(reg), std::move(m));
}

DensityMatrix DensityMatrix::basis_state(Register reg, const std::vector<int>& levels) {
  if (levels.size() != reg.size()) throw Error("one level per site required");
  const auto st = reg.strides();
  std::size_t idx = 0;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    if (levels[k] < 0 || levels[k] >= reg[k].dim) throw Error("level out of range for site " + reg[k].label);
    idx += st[k] * static_cast<std::size_t>(levels[k]);
  }
  const auto d = static_cast<Eigen::Index>(reg.dim());
  Matrix m = Matrix::Zero(d, d);
  m(static_cast<Eigen::Index>(idx), static_cast<Eigen::Index>(idx)) = 1.0;
  return DensityMatrix(std::move(reg), std::move(m));
}

DensityMatrix DensityMatrix::maximally_mixed(Register reg) {
  const auto d = static_cast<Eigen::Index>(reg.dim());
  Matrix m = Matrix::Identity(d, d) / static_cast<double>(d);
  return DensityMatrix(std::move(reg), std::move(m));
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(data_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void DensityMatrix::require_positive(double tol) const {
  const double m = min_eigenvalue();
  if (m < -tol) throw Error("density matrix has eigenvalue " + std::to_string(m) + " below tolerance");
}

double DensityMatrix::expectation(const Operator& op) const {
  if (!(op.reg() == reg_)) throw Error("expectation: register mismatch");
  // Tr(rho O) = sum_ij rho_ij O_ji
  return (data_.transpose().cwiseProduct(op.data())).sum().real();
}

Operator tensor(const Operator& a, const Operator& b) {
  Register r = concat(a.reg(), b.reg());
  Matrix m = Eigen::kroneckerProduct(a.data(), b.data()).eval();
  return Operator(std::move(r), std::move(m));
}

Observable tensor(const Observable& a, const Observable& b) {
  Register r = concat(a.reg(), b.reg());
  Matrix m = Eigen::kroneckerProduct(a.data(), b.data()).eval();
  return Observable(std::move(r), std::move(m));
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  Register r = concat(a.reg(), b.reg());
  Matrix m = Eigen::kroneckerProduct(a.data(), b.data()).eval();
  return DensityMatrix(std::move(r), std::move(m));
}

LocalIndex::LocalIndex(const Register& reg, const std::vector<std::string>& labels) {
  const auto st = reg.strides();
  std::vector<bool> is_local(reg.size(), false);
  std::vector<std::size_t> idx;
  for (const auto& l : labels) {
    const auto i = reg.index_of(l);
    if (is_local[i]) throw Error("site '" + l + "' listed twice");
    is_local[i] = true;
    idx.push_back(i);
  }
  local_offsets = {0};
  for (auto i : idx) {
    std::vector<std::size_t> next;
    for (auto off : local_offsets)
      for (int k = 0; k < reg[i].dim; ++k) next.push_back(off + st[i] * static_cast<std::size_t>(k));
    local_offsets = std::move(next);
  }
  local_dim = local_offsets.size();
  rest_offsets = {0};
  for (std::size_t i = 0; i < reg.size(); ++i) {
    if (is_local[i]) continue;
    std::vector<std::size_t> next;
    for (auto off : rest_offsets)
      for (int k = 0; k < reg[i].dim; ++k) next.push_back(off + st[i] * static_cast<std::size_t>(k));
    rest_offsets = std::move(next);
  }
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::string>& keep) {
  Register kept = rho.reg().subset(keep);
  const LocalIndex li(rho.reg(), kept.labels());
  const auto d = static_cast<Eigen::Index>(li.local_dim);
  Matrix out = Matrix::Zero(d, d);
  const Matrix& m = rho.data();
  for (auto r : li.rest_offsets)
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b < d; ++b)
        out(a, b) += m(static_cast<Eigen::Index>(li.local_offsets[a] + r),
                       static_cast<Eigen::Index>(li.local_offsets[b] + r));
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityMatrix(std::move(kept), std::move(out));
}

Matrix hermitian_sqrt(const Matrix& m, double clamp_tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()));
  RealVector w = es.eigenvalues();
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w(i) < -clamp_tol) throw Error("matrix square root: eigenvalue " + std::to_string(w(i)) + " is negative");
    w(i) = std::sqrt(std::max(w(i), 0.0));
  }
  return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma, Negativity policy) {
  if (rho.dim() != sigma.dim() || rho.reg().size() != sigma.reg().size())
    throw Error("fidelity: dimension mismatch");
  for (std::size_t i = 0; i < rho.reg().size(); ++i)
    if (rho.reg()[i].dim != sigma.reg()[i].dim) throw Error("fidelity: dimension mismatch");
  const double tol = DensityMatrix::kNegativityTol;
  const Matrix a = hermitian_sqrt(rho.data(), tol);
  const Matrix b = hermitian_sqrt(sigma.data(), policy == Negativity::Clamp ? INFINITY : tol);
  // Tr sqrt(sqrt(rho) sigma sqrt(rho)) is the trace norm of sqrt(rho) sqrt(sigma);
  // the singular-value form is symmetric and stable for rank-deficient inputs.
  Eigen::JacobiSVD<Matrix> svd(a * b);
  return std::clamp(svd.singularValues().sum(), 0.0, 1.0);
}

double purity(const DensityMatrix& rho) {
  return rho.data().cwiseAbs2().sum();
}

namespace ops {

Matrix identity(int dim) { return Matrix::Identity(dim, dim); }

Matrix pauli(char which, int dim) {
  Matrix m = Matrix::Zero(dim, dim);
  switch (which) {
    case 'I': m(0, 0) = 1; m(1, 1) = 1; break;
    case 'X': m(0, 1) = 1; m(1, 0) = 1; break;
    case 'Y': m(0, 1) = cplx(0, -1); m(1, 0) = cplx(0, 1); break;
    case 'Z': m(0, 0) = 1; m(1, 1) = -1; break;
    default: throw Error(std::string("unknown Pauli '") + which + "'");
  }
  return m;
}

Matrix projector(int level, int dim) {
  if (level < 0 || level >= dim) throw Error("projector level out of range");
  Matrix m = Matrix::Zero(dim, dim);
  m(level, level) = 1;
  return m;
}

Matrix lift_unitary(const Matrix& u2, int dim) {
  if (u2.rows() != 2 || u2.cols() != 2) throw Error("lift_unitary expects a 2x2 matrix");
  Matrix m = Matrix::Identity(dim, dim);
  m.topLeftCorner(2, 2) = u2;
  return m;
}

}  // namespace ops

Operator embed(const Register& reg, const Matrix& local, const std::vector<std::string>& labels) {
  const LocalIndex li(reg, labels);
  if (static_cast<std::size_t>(local.rows()) != li.local_dim || local.cols() != local.rows())
    throw Error("embed: local operator size does not match sites");
  const auto d = static_cast<Eigen::Index>(reg.dim());
  Matrix full = Matrix::Zero(d, d);
  const auto n = static_cast<Eigen::Index>(li.local_dim);
  for (auto r : li.rest_offsets)
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = 0; b < n; ++b)
        full(static_cast<Eigen::Index>(li.local_offsets[a] + r), static_cast<Eigen::Index>(li.local_offsets[b] + r)) =
            local(a, b);
  return Operator(reg, std::move(full));
}

Observable embed_observable(const Register& reg, const Matrix& local, const std::vector<std::string>& labels) {
  Operator op = embed(reg, local, labels);
  return Observable(op.reg(), op.data());
}

void StateKernel::apply_unitary(DensityMatrix& rho, const Matrix& u, const std::vector<std::string>& labels) {
  const LocalIndex li(rho.reg(), labels);
  const auto n = static_cast<Eigen::Index>(li.local_dim);
  if (u.rows() != n || u.cols() != n) throw Error("apply_unitary: size mismatch");
  Matrix& m = rho.data_;
  const Eigen::Index d = m.rows();
  Vector buf(n), out(n);
  // Left multiplication, column by column.
  for (Eigen::Index c = 0; c < d; ++c)
    for (auto r : li.rest_offsets) {
      for (Eigen::Index a = 0; a < n; ++a) buf(a) = m(static_cast<Eigen::Index>(li.local_offsets[a] + r), c);
      out.noalias() = u * buf;
      for (Eigen::Index a = 0; a < n; ++a) m(static_cast<Eigen::Index>(li.local_offsets[a] + r), c) = out(a);
    }
  // Right multiplication by U^dagger, row by row.
  const Matrix uc = u.conjugate();
  for (Eigen::Index row = 0; row < d; ++row)
    for (auto r : li.rest_offsets) {
      for (Eigen::Index a = 0; a < n; ++a) buf(a) = m(row, static_cast<Eigen::Index>(li.local_offsets[a] + r));
      out.noalias() = uc * buf;
      for (Eigen::Index a = 0; a < n; ++a) m(row, static_cast<Eigen::Index>(li.local_offsets[a] + r)) = out(a);
    }
}

void StateKernel::apply_diagonal(DensityMatrix& rho, const Vector& diag, const std::vector<std::string>& labels) {
  const LocalIndex li(rho.reg(), labels);
  if (static_cast<std::size_t>(diag.size()) != li.local_dim) throw Error("apply_diagonal: size mismatch");
  const auto d = static_cast<Eigen::Index>(rho.dim());
  Vector full(d);
  for (auto r : li.rest_offsets)
    for (std::size_t a = 0; a < li.local_dim; ++a)
      full(static_cast<Eigen::Index>(li.local_offsets[a] + r)) = diag(static_cast<Eigen::Index>(a));
  Matrix& m = rho.data_;
  for (Eigen::Index j = 0; j < d; ++j) {
    const cplx cj = std::conj(full(j));
    for (Eigen::Index i = 0; i < d; ++i) m(i, j) *= full(i) * cj;
  }
}

void StateKernel::apply_superop(DensityMatrix& rho, const Matrix& s, const std::vector<std::string>& labels) {
  const LocalIndex li(rho.reg(), labels);
  const auto n = static_cast<Eigen::Index>(li.local_dim);
  if (s.rows() != n * n || s.cols() != n * n) throw Error("apply_superop: size mismatch");
  struct Entry {
    Eigen::Index out, in;
    cplx v;
  };
  std::vector<Entry> nz;
  for (Eigen::Index i = 0; i < s.rows(); ++i)
    for (Eigen::Index j = 0; j < s.cols(); ++j)
      if (std::abs(s(i, j)) > 1e-300) nz.push_back({i, j, s(i, j)});
  Matrix& m = rho.data_;
  std::vector<cplx> in(static_cast<std::size_t>(n * n)), out(static_cast<std::size_t>(n * n));
  for (auto r : li.rest_offsets)
    for (auto c : li.rest_offsets) {
      for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b)
          in[static_cast<std::size_t>(a * n + b)] =
              m(static_cast<Eigen::Index>(li.local_offsets[a] + r), static_cast<Eigen::Index>(li.local_offsets[b] + c));
      std::fill(out.begin(), out.end(), cplx(0));
      for (const auto& e : nz) out[static_cast<std::size_t>(e.out)] += e.v * in[static_cast<std::size_t>(e.in)];
      for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b)
          m(static_cast<Eigen::Index>(li.local_offsets[a] + r), static_cast<Eigen::Index>(li.local_offsets[b] + c)) =
              out[static_cast<std::size_t>(a * n + b)];
    }
}

void StateKernel::hermitize(DensityMatrix& rho) {
  rho.data_ = 0.5 * (rho.data_ + rho.data_.adjoint()).eval();
}

}  // namespace tfdsim
