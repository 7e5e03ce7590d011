#pragma once
// Truncated Fock-space operator algebra and state constructors.
//
// Mode ordering is fixed globally as (module1, module2, bus); every tensor
// product and partial trace in the toolkit follows it.

#include <qbus/common.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

namespace qbus {

inline int total_dim(const std::vector<int>& dims) {
  int d = 1;
  for (int x : dims) {
    if (x < 1) throw DimensionError("per-mode dimension must be >= 1");
    d *= x;
  }
  return d;
}

// Dense operator on a truncated multimode Fock space.
class Operator {
 public:
  Operator(std::vector<int> dims, Matrix m)
      : dims_(std::move(dims)), m_(std::move(m)) {
    const int d = total_dim(dims_);
    if (m_.rows() != d || m_.cols() != d)
      throw DimensionError("operator matrix does not match mode dimensions");
  }
  static Operator single_mode(int dim, Matrix m) {
    return Operator(std::vector<int>{dim}, std::move(m));
  }

  const std::vector<int>& dims() const { return dims_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  int n_modes() const { return static_cast<int>(dims_.size()); }
  const Matrix& matrix() const { return m_; }

  Operator adjoint() const { return Operator(dims_, m_.adjoint()); }
  Complex trace() const { return m_.trace(); }
  bool is_hermitian(double tol = 1e-12) const {
    return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() < tol;
  }

  friend Operator operator+(const Operator& a, const Operator& b) {
    a.require_same_dims(b);
    return Operator(a.dims_, a.m_ + b.m_);
  }
  friend Operator operator-(const Operator& a, const Operator& b) {
    a.require_same_dims(b);
    return Operator(a.dims_, a.m_ - b.m_);
  }
  friend Operator operator*(const Operator& a, const Operator& b) {
    a.require_same_dims(b);
    return Operator(a.dims_, a.m_ * b.m_);
  }
  friend Operator operator*(Complex s, const Operator& a) {
    return Operator(a.dims_, s * a.m_);
  }
  friend Operator operator*(double s, const Operator& a) {
    return Operator(a.dims_, s * a.m_);
  }

 private:
  void require_same_dims(const Operator& other) const {
    if (dims_ != other.dims_)
      throw DimensionError("operator mode dimensions differ");
  }
  std::vector<int> dims_;
  Matrix m_;
};

// Validation tolerances for density matrices. Freshly constructed states use
// the strict defaults; states coming out of a numerical integrator are checked
// against the relaxed set.
struct StateTolerances {
  double trace = 1e-10;
  double hermiticity = 1e-10;
  double min_eigenvalue = -1e-8;
};
inline StateTolerances relaxed_state_tolerances() {
  return StateTolerances{1e-6, 1e-6, -1e-6};
}

// Hermitian, unit-trace, PSD matrix; pure states are stored as rank-1
// densities. Trace and Hermiticity are checked at construction; the PSD check
// needs an eigendecomposition and is explicit via min_eigenvalue()/validate().
class DensityState {
 public:
  DensityState(std::vector<int> dims, Matrix m,
               StateTolerances tol = StateTolerances{})
      : dims_(std::move(dims)), m_(std::move(m)) {
    const int d = total_dim(dims_);
    if (m_.rows() != d || m_.cols() != d)
      throw DimensionError("state matrix does not match mode dimensions");
    if (std::abs(m_.trace() - Complex(1.0, 0.0)) > tol.trace)
      throw StateError("density matrix trace deviates from 1");
    if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > tol.hermiticity)
      throw StateError("density matrix is not Hermitian");
  }
  static DensityState single_mode(int dim, Matrix m,
                                  StateTolerances tol = StateTolerances{}) {
    return DensityState(std::vector<int>{dim}, std::move(m), tol);
  }
  static DensityState pure(std::vector<int> dims, const Vector& psi) {
    const double n = psi.norm();
    if (n == 0.0) throw StateError("zero state vector");
    Vector v = psi / n;
    return DensityState(std::move(dims), v * v.adjoint());
  }

  const std::vector<int>& dims() const { return dims_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m_ + m_.adjoint()));
    return es.eigenvalues().minCoeff();
  }
  void validate(StateTolerances tol = StateTolerances{}) const {
    if (std::abs(m_.trace() - Complex(1.0, 0.0)) > tol.trace)
      throw StateError("density matrix trace deviates from 1");
    if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > tol.hermiticity)
      throw StateError("density matrix is not Hermitian");
    if (min_eigenvalue() < tol.min_eigenvalue)
      throw StateError("density matrix has a significant negative eigenvalue");
  }

 private:
  std::vector<int> dims_;
  Matrix m_;
};

// --- elementary single-mode operators -------------------------------------

inline Operator annihilation(int dim) {
  if (dim < 2) throw DimensionError("annihilation needs dim >= 2");
  Matrix m = Matrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) m(n - 1, n) = std::sqrt(double(n));
  return Operator::single_mode(dim, m);
}

inline Operator creation(int dim) { return annihilation(dim).adjoint(); }

inline Operator number_op(int dim) {
  Matrix m = Matrix::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) m(n, n) = double(n);
  return Operator::single_mode(dim, m);
}

inline Operator identity_op(int dim) {
  return Operator::single_mode(dim, Matrix::Identity(dim, dim));
}

inline Operator identity_op(const std::vector<int>& dims) {
  const int d = total_dim(dims);
  return Operator(dims, Matrix::Identity(d, d));
}

inline Operator parity(int dim) {
  if (dim < 1) throw DimensionError("parity needs dim >= 1");
  Matrix m = Matrix::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) m(n, n) = (n % 2 == 0) ? 1.0 : -1.0;
  return Operator::single_mode(dim, m);
}

// exp(i*H) for Hermitian H via eigendecomposition. Exact at these sizes.
inline Matrix expi_hermitian(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const auto& lam = es.eigenvalues();
  Vector phases(lam.size());
  for (Eigen::Index k = 0; k < lam.size(); ++k)
    phases(k) = std::exp(Complex(0.0, lam(k)));
  return es.eigenvectors() * phases.asDiagonal() *
         es.eigenvectors().adjoint();
}

// Truncation guard for displacements: |alpha|^2 should stay below dim/4.
inline bool displacement_truncation_risk(Complex alpha, int dim) {
  return std::norm(alpha) > double(dim) / 4.0;
}

inline Operator displacement(Complex alpha, int dim) {
  if (dim < 2) throw DimensionError("displacement needs dim >= 2");
  const Matrix a = annihilation(dim).matrix();
  // alpha a† - alpha* a is anti-Hermitian; exponentiate as exp(i K).
  const Matrix k =
      Complex(0.0, -1.0) * (alpha * a.adjoint() - std::conj(alpha) * a);
  return Operator::single_mode(dim, expi_hermitian(k));
}

// --- tensor algebra --------------------------------------------------------

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Operator tensor(std::span<const Operator> ops) {
  if (ops.empty()) throw DimensionError("tensor of an empty operator list");
  std::vector<int> dims;
  Matrix m = ops[0].matrix();
  dims = ops[0].dims();
  for (size_t k = 1; k < ops.size(); ++k) {
    m = kron(m, ops[k].matrix());
    dims.insert(dims.end(), ops[k].dims().begin(), ops[k].dims().end());
  }
  return Operator(std::move(dims), std::move(m));
}

inline Operator tensor(std::initializer_list<Operator> ops) {
  return tensor(std::span<const Operator>(ops.begin(), ops.size()));
}

inline DensityState tensor_states(std::span<const DensityState> states) {
  if (states.empty()) throw DimensionError("tensor of an empty state list");
  std::vector<int> dims = states[0].dims();
  Matrix m = states[0].matrix();
  for (size_t k = 1; k < states.size(); ++k) {
    m = kron(m, states[k].matrix());
    dims.insert(dims.end(), states[k].dims().begin(), states[k].dims().end());
  }
  return DensityState(std::move(dims), std::move(m));
}

inline DensityState tensor_states(std::initializer_list<DensityState> states) {
  return tensor_states(
      std::span<const DensityState>(states.begin(), states.size()));
}

// Embeds a single-mode operator at position `mode` of a multimode space.
inline Operator embed(const Operator& op, int mode,
                      const std::vector<int>& dims) {
  if (mode < 0 || mode >= static_cast<int>(dims.size()))
    throw DimensionError("embed: mode index out of range");
  if (op.n_modes() != 1 || op.dim() != dims[mode])
    throw DimensionError("embed: operator does not fit the target mode");
  std::vector<Operator> factors;
  factors.reserve(dims.size());
  for (int k = 0; k < static_cast<int>(dims.size()); ++k)
    factors.push_back(k == mode ? op : identity_op(dims[k]));
  return tensor(std::span<const Operator>(factors.data(), factors.size()));
}

// Traces out all modes except `keep` (matrix-level helper).
inline Matrix partial_trace_matrix(const Matrix& m,
                                   const std::vector<int>& dims,
                                   const std::vector<int>& keep) {
  const int n = static_cast<int>(dims.size());
  std::vector<int> kept_dims;
  for (int k : keep) {
    if (k < 0 || k >= n) throw DimensionError("partial trace: bad mode index");
    kept_dims.push_back(dims[k]);
  }
  const int dk = total_dim(kept_dims);
  Matrix out = Matrix::Zero(dk, dk);

  // strides for the row-major mode ordering
  std::vector<int> stride(n, 1);
  for (int k = n - 2; k >= 0; --k) stride[k] = stride[k + 1] * dims[k + 1];
  std::vector<int> traced;
  for (int k = 0; k < n; ++k)
    if (std::find(keep.begin(), keep.end(), k) == keep.end())
      traced.push_back(k);

  std::vector<int> kept_stride(keep.size(), 1);
  for (int k = static_cast<int>(keep.size()) - 2; k >= 0; --k)
    kept_stride[k] = kept_stride[k + 1] * dims[keep[k + 1]];

  const int dt = [&] {
    int d = 1;
    for (int k : traced) d *= dims[k];
    return d;
  }();

  std::vector<int> idx_keep_i(keep.size()), idx_keep_j(keep.size());
  for (int ii = 0; ii < dk; ++ii) {
    int rem = ii;
    for (size_t q = 0; q < keep.size(); ++q) {
      idx_keep_i[q] = rem / kept_stride[q];
      rem %= kept_stride[q];
    }
    for (int jj = 0; jj < dk; ++jj) {
      rem = jj;
      for (size_t q = 0; q < keep.size(); ++q) {
        idx_keep_j[q] = rem / kept_stride[q];
        rem %= kept_stride[q];
      }
      Complex sum = 0.0;
      for (int tt = 0; tt < dt; ++tt) {
        int trem = tt;
        int row = 0, col = 0;
        for (size_t q = 0; q < traced.size(); ++q) {
          int digit = trem;
          for (size_t r = q + 1; r < traced.size(); ++r) digit /= dims[traced[r]];
          digit %= dims[traced[q]];
          (void)trem;
          row += digit * stride[traced[q]];
          col += digit * stride[traced[q]];
        }
        for (size_t q = 0; q < keep.size(); ++q) {
          row += idx_keep_i[q] * stride[keep[q]];
          col += idx_keep_j[q] * stride[keep[q]];
        }
        sum += m(row, col);
      }
      out(ii, jj) = sum;
    }
  }
  return out;
}

inline DensityState partial_trace(const DensityState& rho,
                                  const std::vector<int>& keep,
                                  StateTolerances tol = StateTolerances{}) {
  std::vector<int> kept_dims;
  for (int k : keep) kept_dims.push_back(rho.dims()[k]);
  return DensityState(kept_dims,
                      partial_trace_matrix(rho.matrix(), rho.dims(), keep),
                      tol);
}

inline double expectation(const DensityState& rho, const Operator& op) {
  if (rho.dims() != op.dims())
    throw DimensionError("expectation: dimension mismatch");
  return (op.matrix() * rho.matrix()).trace().real();
}

// --- state constructors ----------------------------------------------------

inline DensityState make_fock(int n, int dim) {
  if (n < 0 || n >= dim)
    throw DimensionError("fock state does not fit the truncation");
  Vector psi = Vector::Zero(dim);
  psi(n) = 1.0;
  return DensityState::pure({dim}, psi);
}

inline DensityState make_coherent(Complex alpha, int dim) {
  if (dim < 2) throw DimensionError("coherent state needs dim >= 2");
  Vector psi(dim);
  // amplitudes alpha^n/sqrt(n!) with the e^{-|alpha|^2/2} prefactor folded in
  psi(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < dim; ++n) psi(n) = psi(n - 1) * alpha / std::sqrt(double(n));
  return DensityState::pure({dim}, psi);
}

// Binomial codewords: |0L> = (|0>+|4>)/sqrt(2), |1L> = |2>.
inline DensityState make_binomial_0L(int dim) {
  if (dim < 5) throw DimensionError("binomial codeword needs dim >= 5");
  Vector psi = Vector::Zero(dim);
  psi(0) = psi(4) = 1.0 / std::sqrt(2.0);
  return DensityState::pure({dim}, psi);
}

inline DensityState make_binomial_1L(int dim) {
  if (dim < 5) throw DimensionError("binomial codeword needs dim >= 5");
  Vector psi = Vector::Zero(dim);
  psi(2) = 1.0;
  return DensityState::pure({dim}, psi);
}

inline DensityState make_binomial_plusL(int dim) {
  if (dim < 5) throw DimensionError("binomial codeword needs dim >= 5");
  Vector psi = Vector::Zero(dim);
  psi(0) = psi(4) = 0.5;
  psi(2) = 1.0 / std::sqrt(2.0);
  return DensityState::pure({dim}, psi);
}

inline DensityState make_zero_plus_n(int n, int dim) {
  if (n < 1 || dim < n + 1)
    throw DimensionError("|0>+|N> needs dim >= N+1");
  Vector psi = Vector::Zero(dim);
  psi(0) = psi(n) = 1.0 / std::sqrt(2.0);
  return DensityState::pure({dim}, psi);
}

// Single-mode thermal state with mean occupation n_bar, renormalized over the
// truncation. n_bar = 0 gives vacuum.
inline DensityState make_thermal(double n_bar, int dim) {
  if (n_bar < 0.0) throw StateError("thermal occupation must be >= 0");
  Matrix m = Matrix::Zero(dim, dim);
  double norm = 0.0;
  for (int n = 0; n < dim; ++n) {
    const double p =
        (n_bar == 0.0) ? (n == 0 ? 1.0 : 0.0)
                       : std::pow(n_bar / (1.0 + n_bar), n) / (1.0 + n_bar);
    m(n, n) = p;
    norm += p;
  }
  m /= norm;
  return DensityState::single_mode(dim, m);
}

}  // namespace qbus
