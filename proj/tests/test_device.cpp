#include <qbus/device.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace qbus;

static const std::string kPaperConfig =
    std::string(QBUS_DATA_DIR) + "/paper_device.json";

TEST_CASE("bundled paper_device config") {
  const DeviceConfig c = load_config(kPaperConfig);
  CHECK(c.bus.t1_us == Catch::Approx(74.0));
  CHECK(c.module1.t1_us == Catch::Approx(180.0));
  CHECK(c.module1.n_th == Catch::Approx(0.035));
  CHECK(c.module2.t2_star_us == Catch::Approx(124.0));
  CHECK(c.couplings.g_snail_bus_mhz[0] == Catch::Approx(28.8));
  CHECK(c.couplings.g_snail_bus_mhz[1] == Catch::Approx(30.6));
  CHECK(c.snail2.beta == Catch::Approx(0.184));
  CHECK(c.readout1.f_g == Catch::Approx(0.995));
  REQUIRE(c.pump_defaults.has_value());
  CHECK(c.pump_defaults->ramp_ns == Catch::Approx(50.0));
}

TEST_CASE("bus quality factor from the bundled config") {
  const DeviceConfig c = load_config(kPaperConfig);
  // Q = omega * T1 = 2*pi*nu*T1, with nu in 1/us (GHz * 1000).
  const double q = kTwoPi * c.bus.frequency_ghz * 1000.0 * c.bus.t1_us;
  CHECK(std::abs(q - 1.7e6) / 1.7e6 < 0.03);
}

TEST_CASE("invariant violations are reported with field paths") {
  nlohmann::json j = config_to_json(load_config(kPaperConfig));
  SECTION("t2* above the physicality bound") {
    j["module1"]["t2_star_us"] = 3.0 * j["module1"]["t1_us"].get<double>();
    CHECK_THROWS_WITH(parse_config(j),
                      Catch::Matchers::ContainsSubstring("module1.t2_star_us"));
  }
  SECTION("n_th = 0.035 accepted") {
    j["module1"]["n_th"] = 0.035;
    CHECK_NOTHROW(parse_config(j));
  }
  SECTION("missing field") {
    j["module2"].erase("t1_us");
    CHECK_THROWS_WITH(parse_config(j),
                      Catch::Matchers::ContainsSubstring("module2.t1_us"));
  }
  SECTION("readout invertibility") {
    j["readout1"]["f_g"] = 0.5;
    j["readout1"]["f_e"] = 0.5;
    CHECK_THROWS_AS(parse_config(j), ConfigError);
  }
  SECTION("snail beta bound") {
    j["snail1"]["beta"] = 1.2;
    CHECK_THROWS_WITH(parse_config(j),
                      Catch::Matchers::ContainsSubstring("snail1.beta"));
  }
}

TEST_CASE("parse errors carry the file name") {
  const std::string path =
      (std::filesystem::temp_directory_path() / "qbus_bad_config.json")
          .string();
  {
    std::ofstream out(path);
    out << "{ not json";
  }
  CHECK_THROWS_AS(load_config(path), ConfigError);
  std::remove(path.c_str());
}

TEST_CASE("pure dephasing rate") {
  SECTION("cavity 1 numbers") {
    ModeParams m;
    m.t1_us = 180.0;
    m.t2_star_us = 144.0;
    // 1/144 - 1/360
    CHECK(pure_dephasing_rate(m) ==
          Catch::Approx(1.0 / 144.0 - 1.0 / 360.0).epsilon(1e-12));
    CHECK(pure_dephasing_rate(m) == Catch::Approx(0.004167).margin(2e-6));
  }
  SECTION("t2* = 2 t1 clips to zero") {
    ModeParams m;
    m.t1_us = 100.0;
    m.t2_star_us = 200.0;
    CHECK(pure_dephasing_rate(m) == 0.0);
  }
  SECTION("bus override") {
    const DeviceConfig c = load_config(kPaperConfig);
    CHECK(bus_pure_dephasing_rate(c) == Catch::Approx(1.0 / 38.0));
  }
}

TEST_CASE("load/save round trip is field-exact") {
  const DeviceConfig c = load_config(kPaperConfig);
  const std::string path =
      (std::filesystem::temp_directory_path() / "qbus_roundtrip.json").string();
  save_config(c, path);
  const DeviceConfig c2 = load_config(path);
  CHECK(c2.module1.t1_us == c.module1.t1_us);
  CHECK(c2.module1.n_th == c.module1.n_th);
  CHECK(c2.module2.self_kerr_mhz == c.module2.self_kerr_mhz);
  CHECK(c2.bus.frequency_ghz == c.bus.frequency_ghz);
  CHECK(c2.couplings.bus_pure_dephasing_rate_per_us ==
        c.couplings.bus_pure_dephasing_rate_per_us);
  CHECK(c2.couplings.chi_snail_cavity_mhz[1] ==
        c.couplings.chi_snail_cavity_mhz[1]);
  CHECK(c2.snail1.e_c_mhz == c.snail1.e_c_mhz);
  CHECK(c2.readout2.f_e == c.readout2.f_e);
  REQUIRE(c2.pump_defaults.has_value());
  CHECK(c2.pump_defaults->g_bs_mhz == c.pump_defaults->g_bs_mhz);
  CHECK(c2.pump_defaults->stark_coeff_mhz == c.pump_defaults->stark_coeff_mhz);
  std::remove(path.c_str());
}
