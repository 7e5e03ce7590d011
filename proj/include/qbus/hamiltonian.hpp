#pragma once
// Time-dependent Hamiltonian and collapse operators for the three-mode
// transfer model: two cavities exchanging excitations with a shared bus under
// pumped beamsplitter couplings.
//
// Frame convention: detunings sit on the cavities (Delta_1 n1 + Delta_2 n2).
// The equivalent description with the detuning on the bus differs by a total-
// excitation-number rotation, which leaves populations untouched.

#include <qbus/common.hpp>
#include <qbus/device.hpp>
#include <qbus/fock.hpp>

#include <functional>
#include <vector>

namespace qbus {

// Pump drive for both modules. Rates are ordinary frequencies (MHz); times ns.
struct PumpSchedule {
  double g_bs_mhz[2] = {0.5, 0.5};
  double delta_mhz[2] = {0.0, 0.0};
  double ramp_ns = 50.0;
  double hold_ns = 0.0;
  double stark_coeff_mhz = 0.0;  // detuning offset at full pump amplitude
  double phase_rad[2] = {0.0, 0.0};

  void check() const {
    if (g_bs_mhz[0] < 0.0 || g_bs_mhz[1] < 0.0)
      throw ConfigError("pump g_bs must be >= 0");
    if (ramp_ns < 0.0 || hold_ns < 0.0)
      throw ConfigError("pump ramp and hold must be >= 0");
  }
  double total_duration_ns() const { return 2.0 * ramp_ns + hold_ns; }

  static PumpSchedule from_defaults(const DeviceConfig& config) {
    PumpSchedule p;
    if (config.pump_defaults) {
      const auto& d = *config.pump_defaults;
      p.g_bs_mhz[0] = p.g_bs_mhz[1] = d.g_bs_mhz;
      p.delta_mhz[0] = p.delta_mhz[1] = d.delta_mhz;
      p.ramp_ns = d.ramp_ns;
      p.stark_coeff_mhz = d.stark_coeff_mhz;
      p.phase_rad[0] = p.phase_rad[1] = d.phase_rad;
    }
    return p;
  }
};

// Raised-cosine flat-top envelope in [0, 1]; C1 across the ramp boundaries.
inline double pump_envelope(double t_ns, double ramp_ns, double hold_ns) {
  const double total = 2.0 * ramp_ns + hold_ns;
  if (t_ns <= 0.0 || t_ns >= total) return 0.0;
  if (ramp_ns == 0.0) return 1.0;
  if (t_ns < ramp_ns) return 0.5 * (1.0 - std::cos(kPi * t_ns / ramp_ns));
  if (t_ns <= ramp_ns + hold_ns) return 1.0;
  return 0.5 * (1.0 - std::cos(kPi * (total - t_ns) / ramp_ns));
}

struct DriveTerm {
  Operator op;
  // coefficient of `op` at time t (ns); in rad/us for detunings, and a
  // dimensionless envelope for beamsplitter terms whose op carries the rate
  std::function<double(double)> envelope;
};

class TimeDependentHamiltonian {
 public:
  TimeDependentHamiltonian(Operator static_part, std::vector<DriveTerm> drives,
                           double total_duration_ns)
      : static_part_(std::move(static_part)),
        drives_(std::move(drives)),
        duration_ns_(total_duration_ns) {
    for (const auto& d : drives_)
      if (d.op.dims() != static_part_.dims())
        throw DimensionError("drive term dimensions differ from static part");
  }

  const Operator& static_part() const { return static_part_; }
  const std::vector<DriveTerm>& drives() const { return drives_; }
  double duration_ns() const { return duration_ns_; }
  const std::vector<int>& dims() const { return static_part_.dims(); }

  Matrix matrix_at_ns(double t_ns) const {
    Matrix m = static_part_.matrix();
    for (const auto& d : drives_) m += d.envelope(t_ns) * d.op.matrix();
    return m;
  }

 private:
  Operator static_part_;
  std::vector<DriveTerm> drives_;
  double duration_ns_;
};

struct HamiltonianOptions {
  bool include_kerr = false;
  bool include_stark = false;
};

// Assembles H(t)/hbar in rad/us on (module1, module2, bus):
//   eps(t) * sum_j g_j (e^{i phi_j} a_j† b + h.c.)
// + sum_j Delta_j(t) n_j      with Delta_j(t) = Delta_j + s (eps(t)^2 - 1)
// + sum_j (K_j/2) a_j†a_j†a_j a_j                      (optional Kerr)
// so the flat top sits exactly on the configured detuning and the edges are
// transiently detuned when the ac-Stark term is enabled.
inline TimeDependentHamiltonian build_transfer_hamiltonian(
    const DeviceConfig& config, const PumpSchedule& pumps,
    const std::vector<int>& dims, HamiltonianOptions options = {}) {
  if (dims.size() != 3)
    throw DimensionError("transfer model needs (module1, module2, bus) dims");
  pumps.check();

  const Operator a1 = embed(annihilation(dims[0]), 0, dims);
  const Operator a2 = embed(annihilation(dims[1]), 1, dims);
  const Operator b = embed(annihilation(dims[2]), 2, dims);
  const Operator n1 = embed(number_op(dims[0]), 0, dims);
  const Operator n2 = embed(number_op(dims[1]), 1, dims);

  Matrix static_m = Matrix::Zero(total_dim(dims), total_dim(dims));
  if (options.include_kerr) {
    const ModeParams* cavities[2] = {&config.module1, &config.module2};
    const Operator* as[2] = {&a1, &a2};
    for (int j = 0; j < 2; ++j) {
      const double k_ang = mhz_to_angular(cavities[j]->self_kerr_mhz);
      if (k_ang != 0.0) {
        const Matrix& a = as[j]->matrix();
        static_m += 0.5 * k_ang *
                    (a.adjoint() * a.adjoint() * a * a);
      }
    }
  }

  const double ramp = pumps.ramp_ns;
  const double hold = pumps.hold_ns;
  auto eps = [ramp, hold](double t_ns) {
    return pump_envelope(t_ns, ramp, hold);
  };

  std::vector<DriveTerm> drives;
  const Operator* as[2] = {&a1, &a2};
  for (int j = 0; j < 2; ++j) {
    const double g_ang = mhz_to_angular(pumps.g_bs_mhz[j]);
    if (g_ang != 0.0) {
      const Complex phase = std::exp(Complex(0.0, pumps.phase_rad[j]));
      Matrix bs = g_ang * (phase * (as[j]->matrix().adjoint() * b.matrix()));
      bs += bs.adjoint().eval();
      drives.push_back({Operator(dims, std::move(bs)), eps});
    }
    const double delta_ang = mhz_to_angular(pumps.delta_mhz[j]);
    const double stark_ang =
        options.include_stark ? mhz_to_angular(pumps.stark_coeff_mhz) : 0.0;
    if (delta_ang != 0.0 || stark_ang != 0.0) {
      auto detuning = [delta_ang, stark_ang, eps](double t_ns) {
        const double e = eps(t_ns);
        return delta_ang + stark_ang * (e * e - 1.0);
      };
      drives.push_back({j == 0 ? n1 : n2, detuning});
    }
  }

  return TimeDependentHamiltonian(Operator(dims, std::move(static_m)),
                                  std::move(drives),
                                  pumps.total_duration_ns());
}

// Which Lindblad families to include; used by the error-budget decomposition.
struct ErrorChannels {
  bool cavity_decoherence = true;  // cavity T1, T2*, n_th
  bool line_loss = true;           // bus T1, n_th
  bool bs_dephasing = true;        // bus Gamma_Phi override
  bool ac_stark = true;            // coherent; consumed by protocols, not here

  static ErrorChannels none() { return {false, false, false, false}; }
  static ErrorChannels all() { return {true, true, true, true}; }
};

// Standard Lindblad channels: relaxation sqrt((1+n_th)/T1) a, thermal
// excitation sqrt(n_th/T1) a†, pure dephasing sqrt(2/T_phi) a†a. The bus
// dephasing rate is the lumped Gamma_Phi override from the config.
inline std::vector<Operator> build_collapse_operators(
    const DeviceConfig& config, const std::vector<int>& dims,
    ErrorChannels channels = ErrorChannels::all()) {
  if (dims.size() != 3)
    throw DimensionError("transfer model needs (module1, module2, bus) dims");
  std::vector<Operator> ops;
  auto add_mode = [&](const ModeParams& m, int mode, double dephasing_rate) {
    const Operator a = embed(annihilation(dims[mode]), mode, dims);
    const double relax = (1.0 + m.n_th) / m.t1_us;
    if (relax > 0.0) ops.push_back(std::sqrt(relax) * a);
    const double excite = m.n_th / m.t1_us;
    if (excite > 0.0) ops.push_back(std::sqrt(excite) * a.adjoint());
    if (dephasing_rate > 0.0)
      ops.push_back(std::sqrt(2.0 * dephasing_rate) *
                    embed(number_op(dims[mode]), mode, dims));
  };
  if (channels.cavity_decoherence) {
    add_mode(config.module1, 0, pure_dephasing_rate(config.module1));
    add_mode(config.module2, 1, pure_dephasing_rate(config.module2));
  }
  if (channels.line_loss) {
    // bus loss/thermal only; its dephasing is the separate Gamma_Phi channel
    const ModeParams& m = config.bus;
    const Operator b = embed(annihilation(dims[2]), 2, dims);
    const double relax = (1.0 + m.n_th) / m.t1_us;
    if (relax > 0.0) ops.push_back(std::sqrt(relax) * b);
    const double excite = m.n_th / m.t1_us;
    if (excite > 0.0) ops.push_back(std::sqrt(excite) * b.adjoint());
  }
  if (channels.bs_dephasing) {
    const double gamma_phi = bus_pure_dephasing_rate(config);
    if (gamma_phi > 0.0)
      ops.push_back(std::sqrt(2.0 * gamma_phi) *
                    embed(number_op(dims[2]), 2, dims));
  }
  return ops;
}

// SNAIL-induced three-wave mixing strength, linear in the pump amplitude.
inline double effective_coupling_three_wave(double g3_mhz, double ga_mhz,
                                            double gb_mhz, double delta_a_mhz,
                                            double delta_b_mhz, double xi) {
  if (delta_a_mhz == 0.0 || delta_b_mhz == 0.0)
    throw std::invalid_argument("effective coupling: zero coupler detuning");
  return 6.0 * g3_mhz * (ga_mhz / delta_a_mhz) * (gb_mhz / delta_b_mhz) *
         std::abs(xi);
}

// Transmon-style four-wave mixing strength, quadratic in the pump amplitude.
inline double effective_coupling_four_wave(double ec_mhz, double ga_mhz,
                                           double gb_mhz, double delta_a_mhz,
                                           double delta_b_mhz, double xi) {
  if (delta_a_mhz == 0.0 || delta_b_mhz == 0.0)
    throw std::invalid_argument("effective coupling: zero coupler detuning");
  return ec_mhz * (ga_mhz / delta_a_mhz) * (gb_mhz / delta_b_mhz) * xi * xi;
}

// Default truncations: Fock-{0,1} work needs little headroom, multiphoton
// states keep the bus as large as the cavities so transit amplitudes fit.
inline std::vector<int> default_dims_fock() { return {2, 2, 3}; }
inline std::vector<int> default_dims_binomial() { return {7, 7, 7}; }
inline std::vector<int> default_dims_zero_plus_n(int n) {
  return {n + 4, n + 4, n + 4};
}

}  // namespace qbus
