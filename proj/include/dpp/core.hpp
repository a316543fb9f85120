#pragma once
// Shared vocabulary: physical constants, crystal axes, polarization mapping,
// exact rationals for duty cycles, error taxonomy, structured warnings.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace dpp {

inline constexpr const char* kToolName = "dppkit";
inline constexpr const char* kToolVersion = "0.1.0";

// CODATA 2018.
namespace constants {
inline constexpr double c = 299792458.0;           // m/s
inline constexpr double eps0 = 8.8541878128e-12;   // F/m
inline constexpr double hbar = 1.054571817e-34;    // J s
inline constexpr double pi = 3.141592653589793238462643383279502884;
}  // namespace constants

enum class CrystalAxis { x, y, z };

inline const char* to_string(CrystalAxis a) {
  switch (a) {
    case CrystalAxis::x: return "x";
    case CrystalAxis::y: return "y";
    case CrystalAxis::z: return "z";
  }
  return "?";
}

// ---- error taxonomy ------------------------------------------------------
// ConfigError/RangeError: bad user input or out-of-validity evaluation (exit 1).
// NoSolutionError: well-posed search with empty result (exit 2).
// NumericalError: internal failure - non-convergence, invariant violation (exit 3).

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct RangeError : Error {
  using Error::Error;
};
struct NoSolutionError : Error {
  using Error::Error;
};
struct NumericalError : Error {
  using Error::Error;
};

// Non-fatal findings; carried alongside results, surfaced in reports.
struct Warning {
  std::string code;
  std::string message;
};
using WarningLog = std::vector<Warning>;

inline void warn(WarningLog* log, std::string code, std::string message) {
  if (log) log->push_back({std::move(code), std::move(message)});
}

// ---- polarization -> crystal axis ----------------------------------------

struct PolarizationMapping {
  CrystalAxis h = CrystalAxis::z;
  CrystalAxis v = CrystalAxis::y;

  void validate() const {
    if (h == v) throw ConfigError("polarization mapping: H and V must use distinct axes");
  }
  CrystalAxis axis_h() const { return h; }
  CrystalAxis axis_v() const { return v; }
};

inline CrystalAxis parse_axis(const std::string& s) {
  if (s == "x") return CrystalAxis::x;
  if (s == "y") return CrystalAxis::y;
  if (s == "z") return CrystalAxis::z;
  throw ConfigError("unknown crystal axis '" + s + "' (expected x, y, or z)");
}

// ---- exact rational (duty cycles) ----------------------------------------

struct Rational {
  long long num = 0;
  long long den = 1;

  Rational() = default;
  Rational(long long n, long long d) : num(n), den(d) {
    if (den == 0) throw ConfigError("rational with zero denominator");
    if (den < 0) { num = -num; den = -den; }
    const long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
  }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

inline std::string to_string(const Rational& r) {
  return std::to_string(r.num) + "/" + std::to_string(r.den);
}

// ---- small numeric helpers ------------------------------------------------

// sin(x)/x with the removable singularity filled in.
inline double sinc(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

inline bool close_rel(double a, double b, double rtol) {
  return std::abs(a - b) <= rtol * std::max(std::abs(a), std::abs(b));
}

}  // namespace dpp
