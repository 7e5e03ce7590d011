#pragma once
// Time-evolution engines: Lindblad master-equation integrator, pure-state
// propagation for closed runs, and the closed-form lossless solutions used as
// cross-checks.

#include <qbus/common.hpp>
#include <qbus/fock.hpp>
#include <qbus/hamiltonian.hpp>

#include <Eigen/SparseCore>

#include <vector>

namespace qbus {

using SparseMatrix = Eigen::SparseMatrix<Complex>;

inline SparseMatrix to_sparse(const Matrix& m, double prune = 1e-15) {
  SparseMatrix s = m.sparseView(prune, 1.0);
  s.makeCompressed();
  return s;
}

struct Trajectory {
  std::vector<int> dims;
  std::vector<double> times_ns;
  // [mode][grid point]
  std::vector<std::vector<double>> populations;
  // population in the top two Fock levels of each mode, for truncation checks
  std::vector<std::vector<double>> edge_populations;
  std::vector<Matrix> states;  // full density matrices when requested
  double max_trace_drift = 0.0;

  bool has_states() const { return !states.empty(); }
  DensityState state_at(size_t k) const {
    return DensityState(dims, states.at(k), relaxed_state_tolerances());
  }
  DensityState final_state() const { return state_at(states.size() - 1); }
  double total_excitation_at(size_t k) const {
    double n = 0.0;
    for (const auto& p : populations) n += p.at(k);
    return n;
  }
};

struct EvolveOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  bool store_states = true;
  // closed pure-state inputs normally take the Schrodinger fast path; force
  // the full density-matrix integration instead
  bool force_density = false;
};

namespace detail {

// Dormand-Prince 5(4) with FSAL. Integrates y' = f(t, y) over [t0, t1],
// adapting the step to the local error estimate. Works for dense matrices and
// vectors alike.
template <typename StateT, typename Rhs>
void rk45_segment(const Rhs& f, double t0, double t1, StateT& y, double& h,
                  double rtol, double atol, StateT& k1, bool& k1_valid) {
  static const double A[7][6] = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176,
       -5103.0 / 18656},
      {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static const double C[7] = {0.0,     1.0 / 5, 3.0 / 10, 4.0 / 5,
                              8.0 / 9, 1.0,     1.0};
  static const double B5[7] = {35.0 / 384,    0.0,  500.0 / 1113, 125.0 / 192,
                               -2187.0 / 6784, 11.0 / 84, 0.0};
  static const double B4[7] = {5179.0 / 57600,    0.0,
                               7571.0 / 16695,    393.0 / 640,
                               -92097.0 / 339200, 187.0 / 2100,
                               1.0 / 40};

  const double span = t1 - t0;
  if (span <= 0.0) return;
  double t = t0;
  if (h <= 0.0) h = span / 20.0;
  h = std::min(h, span);
  StateT k[7];
  if (!k1_valid) k1 = f(t, y);

  while (t < t1 - 1e-14 * std::max(1.0, std::abs(t1))) {
    h = std::min(h, t1 - t);
    if (h < 1e-12 * std::max(1.0, span))
      throw ConvergenceError("integrator step-size underflow");
    k[0] = k1;
    for (int i = 1; i < 7; ++i) {
      StateT yi = y;
      for (int j = 0; j < i; ++j)
        if (A[i][j] != 0.0) yi += (h * A[i][j]) * k[j];
      k[i] = f(t + C[i] * h, yi);
    }
    StateT y5 = y;
    for (int i = 0; i < 7; ++i)
      if (B5[i] != 0.0) y5 += (h * B5[i]) * k[i];
    StateT err = (B5[0] - B4[0]) * k[0];
    for (int i = 1; i < 7; ++i) err += (B5[i] - B4[i]) * k[i];

    const double scale =
        atol + rtol * std::max(y.cwiseAbs().maxCoeff(),
                               y5.cwiseAbs().maxCoeff());
    const double err_norm = h * err.cwiseAbs().maxCoeff() / scale;
    if (err_norm <= 1.0) {
      t += h;
      y.swap(y5);
      k1 = k[6];  // FSAL: stage 7 equals f at the accepted point
      k1_valid = true;
    } else {
      k1_valid = true;  // k1 still matches y
    }
    const double factor =
        (err_norm > 0.0) ? 0.9 * std::pow(err_norm, -0.2) : 5.0;
    h *= std::clamp(factor, 0.2, 5.0);
  }
}

// Precomputed sparse pieces of the Lindblad right-hand side.
struct LindbladRhs {
  SparseMatrix static_h;                    // static Hamiltonian (rad/us)
  std::vector<SparseMatrix> drive_ops;      // per drive term
  std::vector<std::function<double(double)>> drive_env;  // of t_ns
  std::vector<SparseMatrix> c_ops;
  std::vector<SparseMatrix> c_ops_adj;
  SparseMatrix c_half;  // (1/2) sum c†c
  bool has_static = false;
  bool has_collapse = false;

  // t in us; rho Hermitian. d rho/dt = -i[H, rho] + sum_c D[c] rho.
  Matrix operator()(double t_us, const Matrix& rho) const {
    const double t_ns = us_to_ns(t_us);
    Matrix x(rho.rows(), rho.cols());
    x.setZero();
    if (has_static) x.noalias() -= Complex(0, 1) * (static_h * rho);
    for (size_t k = 0; k < drive_ops.size(); ++k) {
      const double e = drive_env[k](t_ns);
      if (e != 0.0) x.noalias() -= Complex(0, e) * (drive_ops[k] * rho);
    }
    if (has_collapse) x.noalias() -= c_half * rho;
    Matrix out = x + x.adjoint().eval();
    for (size_t k = 0; k < c_ops.size(); ++k) {
      const Matrix cr = c_ops[k] * rho;
      out.noalias() += cr * c_ops_adj[k];
    }
    return out;
  }

  // Schrodinger picture for closed evolutions: d psi/dt = -i H(t) psi.
  Vector apply_schrodinger(double t_us, const Vector& psi) const {
    const double t_ns = us_to_ns(t_us);
    Vector out = Vector::Zero(psi.size());
    if (has_static) out.noalias() -= Complex(0, 1) * (static_h * psi);
    for (size_t k = 0; k < drive_ops.size(); ++k) {
      const double e = drive_env[k](t_ns);
      if (e != 0.0) out.noalias() -= Complex(0, e) * (drive_ops[k] * psi);
    }
    return out;
  }
};

inline LindbladRhs make_rhs(const TimeDependentHamiltonian& h,
                            const std::vector<Operator>& c_ops) {
  LindbladRhs rhs;
  rhs.static_h = to_sparse(h.static_part().matrix());
  rhs.has_static = rhs.static_h.nonZeros() > 0;
  for (const auto& d : h.drives()) {
    rhs.drive_ops.push_back(to_sparse(d.op.matrix()));
    rhs.drive_env.push_back(d.envelope);
  }
  const int dim = h.static_part().dim();
  Matrix chalf = Matrix::Zero(dim, dim);
  for (const auto& c : c_ops) {
    if (c.dims() != h.dims())
      throw DimensionError("collapse operator dimensions differ from H");
    rhs.c_ops.push_back(to_sparse(c.matrix()));
    rhs.c_ops_adj.push_back(to_sparse(c.matrix().adjoint()));
    chalf += 0.5 * (c.matrix().adjoint() * c.matrix());
  }
  rhs.c_half = to_sparse(chalf);
  rhs.has_collapse = !c_ops.empty();
  return rhs;
}

// Per-mode digit weights on the flat tensor index, for populations and
// truncation monitoring. The truncation guard band is the top two Fock levels
// of each mode, clipped so it never intrudes on the {0,1} subspace (a dim-2
// mode has no guard band, a dim-3 mode guards only its top level).
struct ModeDiagonals {
  std::vector<Eigen::VectorXd> number;  // photon number of each basis state
  std::vector<Eigen::VectorXd> edge;    // 1 on guard-band levels
};

inline ModeDiagonals make_mode_diagonals(const std::vector<int>& dims) {
  const int n = static_cast<int>(dims.size());
  const int d = total_dim(dims);
  std::vector<int> stride(n, 1);
  for (int k = n - 2; k >= 0; --k) stride[k] = stride[k + 1] * dims[k + 1];
  ModeDiagonals md;
  md.number.assign(n, Eigen::VectorXd::Zero(d));
  md.edge.assign(n, Eigen::VectorXd::Zero(d));
  for (int f = 0; f < d; ++f) {
    for (int k = 0; k < n; ++k) {
      const int digit = (f / stride[k]) % dims[k];
      md.number[k](f) = digit;
      md.edge[k](f) = (digit >= std::max(dims[k] - 2, 2)) ? 1.0 : 0.0;
    }
  }
  return md;
}

}  // namespace detail

// Solves d rho/dt = -i[H(t), rho] + sum_c D[c] rho on the given ns grid.
// Closed evolutions of pure inputs run in the Schrodinger picture unless
// force_density is set; the result is identical up to integrator tolerance.
inline Trajectory evolve_master(const TimeDependentHamiltonian& h,
                                const std::vector<Operator>& c_ops,
                                const DensityState& rho0,
                                const std::vector<double>& t_grid_ns,
                                EvolveOptions opts = {}) {
  if (rho0.dims() != h.dims())
    throw DimensionError("initial state dimensions differ from H");
  if (t_grid_ns.size() < 2)
    throw std::invalid_argument("time grid needs at least two points");
  for (size_t k = 1; k < t_grid_ns.size(); ++k)
    if (t_grid_ns[k] <= t_grid_ns[k - 1])
      throw std::invalid_argument("time grid must be strictly ascending");

  const auto rhs = detail::make_rhs(h, c_ops);
  const auto md = detail::make_mode_diagonals(h.dims());
  const int n_modes = static_cast<int>(h.dims().size());

  Trajectory traj;
  traj.dims = h.dims();
  traj.times_ns = t_grid_ns;
  traj.populations.assign(n_modes, {});
  traj.edge_populations.assign(n_modes, {});

  bool pure_path = false;
  Vector psi;
  if (c_ops.empty() && !opts.force_density) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho0.matrix());
    const auto& vals = es.eigenvalues();
    if (vals.maxCoeff() > 1.0 - 1e-9) {
      Eigen::Index imax;
      vals.maxCoeff(&imax);
      psi = es.eigenvectors().col(imax);
      psi /= psi.norm();
      pure_path = true;
    }
  }

  auto record = [&](const Matrix* rho, const Vector* vec) {
    Eigen::VectorXd diag;
    if (rho) diag = rho->diagonal().real();
    else diag = vec->cwiseAbs2();
    for (int m = 0; m < n_modes; ++m) {
      traj.populations[m].push_back(md.number[m].dot(diag));
      traj.edge_populations[m].push_back(md.edge[m].dot(diag));
    }
    const double trace = diag.sum();
    traj.max_trace_drift =
        std::max(traj.max_trace_drift, std::abs(trace - 1.0));
    if (opts.store_states) {
      if (rho) traj.states.push_back(0.5 * (*rho + rho->adjoint()));
      else traj.states.push_back((*vec) * vec->adjoint());
    }
  };

  double h_step = 0.0;
  if (pure_path) {
    auto f = [&rhs](double t, const Vector& y) {
      return rhs.apply_schrodinger(t, y);
    };
    Vector k1;
    bool k1_valid = false;
    record(nullptr, &psi);
    for (size_t k = 1; k < t_grid_ns.size(); ++k) {
      detail::rk45_segment(f, ns_to_us(t_grid_ns[k - 1]),
                           ns_to_us(t_grid_ns[k]), psi, h_step, opts.rtol,
                           opts.atol, k1, k1_valid);
      record(nullptr, &psi);
    }
  } else {
    Matrix rho = rho0.matrix();
    auto f = [&rhs](double t, const Matrix& y) { return rhs(t, y); };
    Matrix k1;
    bool k1_valid = false;
    record(&rho, nullptr);
    for (size_t k = 1; k < t_grid_ns.size(); ++k) {
      detail::rk45_segment(f, ns_to_us(t_grid_ns[k - 1]),
                           ns_to_us(t_grid_ns[k]), rho, h_step, opts.rtol,
                           opts.atol, k1, k1_valid);
      rho = 0.5 * (rho + rho.adjoint().eval());
      record(&rho, nullptr);
    }
  }
  return traj;
}

inline std::vector<double> linspace_ns(double t0, double t1, int points) {
  std::vector<double> out(points);
  for (int k = 0; k < points; ++k)
    out[k] = t0 + (t1 - t0) * double(k) / double(points - 1);
  return out;
}

// --- lossless closed forms --------------------------------------------------

// Heisenberg-picture propagator of (a1, a2, b) under the beamsplitter
// Hamiltonian with cavity detunings: M = exp(-i C t) with
// C = [[D1, 0, g], [0, D2, g], [g, g, 0]] in rad/us.
struct TransferMatrix {
  Eigen::Matrix3cd m;

  double population(int i, int j) const { return std::norm(m(i, j)); }
  bool is_unitary(double tol = 1e-10) const {
    return (m.adjoint() * m - Eigen::Matrix3cd::Identity())
               .cwiseAbs()
               .maxCoeff() < tol;
  }
};

inline Eigen::Matrix3d bs_coefficient_matrix(double g_mhz, double delta1_mhz,
                                             double delta2_mhz) {
  const double g = mhz_to_angular(g_mhz);
  Eigen::Matrix3d c;
  c << mhz_to_angular(delta1_mhz), 0.0, g,
       0.0, mhz_to_angular(delta2_mhz), g,
       g, g, 0.0;
  return c;
}

inline TransferMatrix heisenberg_m(double g_mhz, double delta1_mhz,
                                   double delta2_mhz, double t_ns) {
  const Eigen::Matrix3d c =
      bs_coefficient_matrix(g_mhz, delta1_mhz, delta2_mhz);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(c);
  const double t = ns_to_us(t_ns);
  Eigen::Vector3cd phases;
  for (int k = 0; k < 3; ++k)
    phases(k) = std::exp(Complex(0.0, -es.eigenvalues()(k) * t));
  TransferMatrix out;
  out.m = es.eigenvectors().cast<Complex>() * phases.asDiagonal() *
          es.eigenvectors().transpose().cast<Complex>();
  return out;
}

// Complete-transfer time pi/(sqrt(2) g) for the resonant chain, in ns.
inline double swap_time_ns(double g_bs_mhz) {
  if (g_bs_mhz <= 0.0) throw std::invalid_argument("swap time needs g > 0");
  return us_to_ns(1.0 / (2.0 * std::sqrt(2.0) * g_bs_mhz));
}

// <n1(t)> for a single photon in module 2 under common detuning
// Delta_1 = Delta_2 = Delta_c; the "beat" closed form.
inline double population_common_detuning(double g_mhz, double delta_c_mhz,
                                         double t_ns) {
  const double g = mhz_to_angular(g_mhz);
  const double dc = mhz_to_angular(delta_c_mhz);
  const double omega1 = std::sqrt(8.0 * g * g + dc * dc);
  if (omega1 == 0.0) return 0.0;
  const double t = ns_to_us(t_ns);
  const double ch = std::cos(0.5 * omega1 * t);
  const double sh = std::sin(0.5 * omega1 * t);
  const double cd = std::cos(0.5 * dc * t);
  const double sd = std::sin(0.5 * dc * t);
  return 0.25 * (1.0 - 2.0 * cd * ch + ch * ch -
                 (2.0 * dc / omega1) * sd * sh +
                 (dc * dc / (omega1 * omega1)) * sh * sh);
}

// <n1(t)> for a single photon in module 2 under differential detuning
// Delta_1 = -Delta_2 = Delta_d; efficiency is capped at 4g^4/Omega2^4.
inline double population_differential_detuning(double g_mhz,
                                               double delta_d_mhz,
                                               double t_ns) {
  const double g = mhz_to_angular(g_mhz);
  const double dd = mhz_to_angular(delta_d_mhz);
  const double omega2 = std::sqrt(2.0 * g * g + dd * dd);
  if (omega2 == 0.0) return 0.0;
  const double s = std::sin(0.5 * omega2 * ns_to_us(t_ns));
  const double amp = 4.0 * std::pow(g, 4) / std::pow(omega2, 4);
  return amp * s * s * s * s;
}

inline double differential_detuning_efficiency_cap(double g_mhz,
                                                   double delta_d_mhz) {
  const double g = mhz_to_angular(g_mhz);
  const double dd = mhz_to_angular(delta_d_mhz);
  const double omega2sq = 2.0 * g * g + dd * dd;
  return 4.0 * std::pow(g, 4) / (omega2sq * omega2sq);
}

// --- truncation monitoring ---------------------------------------------------

struct TruncationReport {
  bool ok = true;
  double worst_fraction = 0.0;
  int worst_mode = -1;
  double worst_time_ns = 0.0;
};

// Flags any mode whose top two Fock levels carry more than `threshold`
// population at any grid point.
inline TruncationReport check_truncation(const Trajectory& traj,
                                         double threshold = 1e-6) {
  TruncationReport rep;
  for (size_t m = 0; m < traj.edge_populations.size(); ++m) {
    for (size_t k = 0; k < traj.edge_populations[m].size(); ++k) {
      const double frac = traj.edge_populations[m][k];
      if (frac > rep.worst_fraction) {
        rep.worst_fraction = frac;
        rep.worst_mode = static_cast<int>(m);
        rep.worst_time_ns = traj.times_ns[k];
      }
    }
  }
  rep.ok = rep.worst_fraction <= threshold;
  return rep;
}

}  // namespace qbus
