#include <qbus/dynamics.hpp>
#include <qbus/hamiltonian.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace qbus;

static const std::string kPaperConfig =
    std::string(QBUS_DATA_DIR) + "/paper_device.json";

static PumpSchedule test_pumps(double g = 0.5, double d1 = 0.0,
                               double d2 = 0.0) {
  PumpSchedule p;
  p.g_bs_mhz[0] = p.g_bs_mhz[1] = g;
  p.delta_mhz[0] = d1;
  p.delta_mhz[1] = d2;
  p.ramp_ns = 50.0;
  p.hold_ns = 600.0;
  return p;
}

TEST_CASE("zero pumps give a static Hamiltonian") {
  const DeviceConfig c = load_config(kPaperConfig);
  const auto h = build_transfer_hamiltonian(c, test_pumps(0.0), {2, 2, 3});
  CHECK(h.drives().empty());
  CHECK(h.matrix_at_ns(100.0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("resonant Hamiltonian conserves total excitation number") {
  const DeviceConfig c = load_config(kPaperConfig);
  const std::vector<int> dims = {3, 3, 3};
  const auto h = build_transfer_hamiltonian(c, test_pumps(0.6), dims);
  Matrix n_total = Matrix::Zero(27, 27);
  for (int m = 0; m < 3; ++m)
    n_total += embed(number_op(3), m, dims).matrix();
  for (double t : {10.0, 60.0, 300.0, 660.0}) {
    const Matrix ht = h.matrix_at_ns(t);
    CHECK((ht * n_total - n_total * ht).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("assembled Hamiltonian is Hermitian at random times") {
  const DeviceConfig c = load_config(kPaperConfig);
  PumpSchedule p = test_pumps(0.5, 0.3, -0.2);
  p.stark_coeff_mhz = 0.4;
  p.phase_rad[0] = 0.7;
  p.phase_rad[1] = -1.1;
  const auto h = build_transfer_hamiltonian(c, p, {2, 2, 3},
                                            {.include_kerr = true,
                                             .include_stark = true});
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, h.duration_ns());
  for (int k = 0; k < 100; ++k) {
    const Matrix ht = h.matrix_at_ns(u(rng));
    CHECK((ht - ht.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("envelope is exactly 1 on the hold and C1 at ramp boundaries") {
  const double ramp = 50.0, hold = 500.0;
  SECTION("flat top") {
    for (double t : {ramp, ramp + 0.25 * hold, ramp + hold})
      CHECK(pump_envelope(t, ramp, hold) == 1.0);
  }
  SECTION("rest value") {
    CHECK(pump_envelope(0.0, ramp, hold) == 0.0);
    CHECK(pump_envelope(2 * ramp + hold, ramp, hold) == 0.0);
  }
  SECTION("derivative continuity across boundaries") {
    const double dt = 1e-3;
    for (double edge : {0.0, ramp, ramp + hold, 2 * ramp + hold}) {
      const double dl = (pump_envelope(edge, ramp, hold) -
                         pump_envelope(edge - dt, ramp, hold)) / dt;
      const double dr = (pump_envelope(edge + dt, ramp, hold) -
                         pump_envelope(edge, ramp, hold)) / dt;
      CHECK(std::abs(dl - dr) < 1e-6);
    }
  }
  SECTION("detuning sits exactly on Delta without the Stark term") {
    const DeviceConfig c = load_config(kPaperConfig);
    PumpSchedule p = test_pumps(0.5, 0.25, 0.25);
    p.stark_coeff_mhz = 0.4;  // must be ignored with include_stark=false
    const std::vector<int> dims = {2, 2, 3};
    const auto h =
        build_transfer_hamiltonian(c, p, dims, {.include_stark = false});
    const Matrix mid = h.matrix_at_ns(p.ramp_ns + 0.5 * p.hold_ns);
    // coefficient of n1 read off a diagonal element with one photon in m1
    const Matrix n1 = embed(number_op(2), 0, dims).matrix();
    const double coeff = (mid.cwiseProduct(n1.conjugate())).sum().real() /
                         n1.squaredNorm();
    CHECK(coeff == Catch::Approx(mhz_to_angular(0.25)).epsilon(1e-12));
  }
  SECTION("stark detuning vanishes on the flat top and offsets the edges") {
    const DeviceConfig c = load_config(kPaperConfig);
    PumpSchedule p = test_pumps(0.5, 0.0, 0.0);
    p.stark_coeff_mhz = 0.4;
    const auto h = build_transfer_hamiltonian(c, p, {2, 2, 3},
                                              {.include_stark = true});
    CHECK(h.matrix_at_ns(p.ramp_ns + 1.0).cwiseAbs().maxCoeff() ==
          Catch::Approx(mhz_to_angular(0.5) * std::sqrt(2.0)));
    // before the ramp the beamsplitter is off and the detuning is -s
    const Matrix at0 = h.matrix_at_ns(0.0);
    const std::vector<int> dims = {2, 2, 3};
    const Matrix n12 = embed(number_op(2), 0, dims).matrix() +
                       embed(number_op(2), 1, dims).matrix();
    CHECK((at0 + mhz_to_angular(0.4) * n12).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("frame equivalence on the single-excitation subspace") {
  // Cavity-detuning frame vs bus-detuning frame: spectra differ by a uniform
  // shift of Delta_c once per excitation.
  const double g = 0.5, dc = 0.37;
  const Eigen::Matrix3d c_sm = bs_coefficient_matrix(g, dc, dc);
  Eigen::Matrix3d c_main;
  const double ga = mhz_to_angular(g);
  c_main << 0, 0, ga, 0, 0, ga, ga, ga, -mhz_to_angular(dc);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es_sm(c_sm), es_main(c_main);
  for (int k = 0; k < 3; ++k) {
    CHECK(es_sm.eigenvalues()(k) ==
          Catch::Approx(es_main.eigenvalues()(k) + mhz_to_angular(dc))
              .margin(1e-10));
  }
}

TEST_CASE("collapse operators") {
  const DeviceConfig paper = load_config(kPaperConfig);
  SECTION("zero thermal and infinite T_phi give one operator per mode") {
    DeviceConfig c = paper;
    c.module1.n_th = c.module2.n_th = c.bus.n_th = 0.0;
    c.module1.t2_star_us = 2.0 * c.module1.t1_us;
    c.module2.t2_star_us = 2.0 * c.module2.t1_us;
    c.couplings.bus_pure_dephasing_rate_per_us = 0.0;
    const auto ops = build_collapse_operators(c, {2, 2, 3});
    CHECK(ops.size() == 3);
  }
  SECTION("cavity 1 relaxation prefactor") {
    const auto ops = build_collapse_operators(paper, {2, 2, 3});
    // first emitted operator is sqrt((1+n_th)/T1) a1
    const double expect = std::sqrt(1.035 / 180.0);
    const Matrix a1 = embed(annihilation(2), 0, {2, 2, 3}).matrix();
    CHECK((ops.front().matrix() - expect * a1).cwiseAbs().maxCoeff() < 1e-12);
  }
  SECTION("bus dephasing prefactor") {
    const auto ops = build_collapse_operators(paper, {2, 2, 3});
    const Matrix nb = embed(number_op(3), 2, {2, 2, 3}).matrix();
    const double expect = std::sqrt(2.0 / 38.0);
    bool found = false;
    for (const auto& op : ops) {
      if ((op.matrix() - expect * nb).cwiseAbs().maxCoeff() < 1e-9)
        found = true;
    }
    CHECK(found);
  }
  SECTION("channel selection flags") {
    ErrorChannels only_bus = ErrorChannels::none();
    only_bus.line_loss = true;
    const auto ops = build_collapse_operators(paper, {2, 2, 3}, only_bus);
    REQUIRE(ops.size() == 1);  // bus n_th = 0 in the bundled config
    const Matrix b = embed(annihilation(3), 2, {2, 2, 3}).matrix();
    CHECK((ops.front().matrix() - std::sqrt(1.0 / 74.0) * b)
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  }
}

TEST_CASE("effective mixing strengths") {
  SECTION("three-wave vanishes with the pump off") {
    CHECK(effective_coupling_three_wave(50.0, 30.0, 30.0, 300.0, 300.0, 0.0) ==
          0.0);
  }
  SECTION("three-wave is linear in the pump amplitude") {
    const double v1 =
        effective_coupling_three_wave(50.0, 25.0, 30.0, 250.0, 400.0, 0.1);
    const double v2 =
        effective_coupling_three_wave(50.0, 25.0, 30.0, 250.0, 400.0, 0.2);
    CHECK(v2 == Catch::Approx(2.0 * v1));
  }
  SECTION("representative magnitude") {
    // 6 g3 = 300 MHz, g/Delta ratios of 0.1, xi = 0.17 -> 0.51 MHz
    CHECK(effective_coupling_three_wave(50.0, 10.0, 10.0, 100.0, 100.0,
                                        0.17) == Catch::Approx(0.51));
  }
  SECTION("four-wave is quadratic in the pump amplitude") {
    const double v1 =
        effective_coupling_four_wave(74.0, 25.0, 30.0, 250.0, 400.0, 0.1);
    const double v2 =
        effective_coupling_four_wave(74.0, 25.0, 30.0, 250.0, 400.0, 0.2);
    CHECK(v2 == Catch::Approx(4.0 * v1));
    CHECK(effective_coupling_four_wave(74.0, 25.0, 30.0, 250.0, 400.0, 0.0) ==
          0.0);
  }
  SECTION("three-wave beats four-wave at matched ratios") {
    const double r = 0.1;
    const double three =
        effective_coupling_three_wave(50.0, r * 100.0, r * 100.0, 100.0, 100.0,
                                      0.2);
    const double four = effective_coupling_four_wave(74.0, r * 100.0, r * 100.0,
                                                     100.0, 100.0, 0.2);
    CHECK(three / four == Catch::Approx((300.0 * 0.2) / (74.0 * 0.04)));
  }
  SECTION("zero coupler detuning rejected") {
    CHECK_THROWS_AS(
        effective_coupling_three_wave(50.0, 10.0, 10.0, 0.0, 100.0, 0.1),
        std::invalid_argument);
  }
}
