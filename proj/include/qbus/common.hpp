#pragma once
// Shared aliases, constants, error types, and small utilities.

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace qbus {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
// All config values are ordinary frequencies (nu = omega/2pi, MHz) and times
// in us/ns; conversion to angular rad/us happens once, where noted.
inline constexpr double kNsPerUs = 1000.0;

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct StateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProtocolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double mhz_to_angular(double nu_mhz) { return kTwoPi * nu_mhz; }
inline double ns_to_us(double t_ns) { return t_ns / kNsPerUs; }
inline double us_to_ns(double t_us) { return t_us * kNsPerUs; }

// Runs fn(0..n-1) across hardware threads. Used for independent sweep points;
// results must be written to pre-sized slots so ordering stays deterministic.
inline void parallel_for(int n, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  const int workers =
      std::min<int>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr first_error;
  std::mutex err_mutex;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int i = w; i < n; i += workers) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace qbus
