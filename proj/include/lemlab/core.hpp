#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace lemlab {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

inline bool is_power_of_two(int m) { return m > 0 && (m & (m - 1)) == 0; }

/// Base class for all diagnostic errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Bad arguments / violated preconditions (maps to CLI exit code 2).
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(what) {}
};

/// Grid too coarse for the requested spectral content.
class AliasingError : public Error {
 public:
  explicit AliasingError(const std::string& what) : Error(what) {}
};

/// Per-sample residual vector with its summary statistics.
struct ResidualReport {
  std::vector<double> samples;
  double sup = 0.0;
  double rms = 0.0;

  static ResidualReport from_samples(std::vector<double> r) {
    ResidualReport rep;
    rep.samples = std::move(r);
    double s2 = 0.0;
    for (double v : rep.samples) {
      const double a = std::abs(v);
      if (a > rep.sup || std::isnan(v)) rep.sup = a;
      s2 += v * v;
    }
    rep.rms = rep.samples.empty() ? 0.0 : std::sqrt(s2 / double(rep.samples.size()));
    return rep;
  }
};

/// Uniform double in [0,1) from the top 53 bits; avoids the
/// implementation-defined std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& gen) {
  return double(gen() >> 11) * 0x1.0p-53;
}

namespace logging {
enum class Level { error = 0, info = 1, debug = 2 };
Level level();
void log(Level lv, const std::string& msg);
inline void info(const std::string& m) { log(Level::info, m); }
inline void debug(const std::string& m) { log(Level::debug, m); }
inline void error(const std::string& m) { log(Level::error, m); }
}  // namespace logging

}  // namespace lemlab
