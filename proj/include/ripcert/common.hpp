#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace ripcert {

using Index = Eigen::Index;

/// Invalid arguments (bad rho, empty support, out-of-range delta, ...).
/// The CLI maps this to exit code 2.
class parameter_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed numeric input: non-finite entries, truncated files. Exit code 2.
class data_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown instead of guessing when a computation would exceed its cost
/// ceiling. Distinguishable from a "no" verdict; the CLI maps it to exit 1.
class refusal : public std::runtime_error {
 public:
  refusal(const std::string& what, double estimated_cost)
      : std::runtime_error(what), estimated_cost(estimated_cost) {}

  double estimated_cost;
};

/// Series value left the representable range. Carries the offending degree.
class phi_overflow : public std::overflow_error {
 public:
  phi_overflow(const std::string& what, int degree, double argument)
      : std::overflow_error(what), degree(degree), argument(argument) {}

  int degree;
  double argument;
};

enum class Scale { raw, inv_sqrt_m };

inline const char* to_string(Scale s) {
  return s == Scale::raw ? "raw" : "inv-sqrt-m";
}

/// Dense sensing matrix plus the metadata needed to interpret it: the scaling
/// convention (recorded explicitly so callers never double-normalize), the
/// seed it was generated from, and a free-form model tag for reporting.
///
/// Deliberately carries no spike: code that certifies sees only this type.
struct SensingMatrix {
  Eigen::MatrixXd data;
  Scale scale = Scale::raw;
  std::uint64_t seed = 0;
  std::string model = "unknown";

  Index rows() const { return data.rows(); }
  Index cols() const { return data.cols(); }

  /// Copy with the 1/sqrt(m) convention applied; no-op when already scaled.
  SensingMatrix scaled() const {
    if (scale == Scale::inv_sqrt_m) return *this;
    return SensingMatrix{data / std::sqrt(static_cast<double>(data.rows())),
                         Scale::inv_sqrt_m, seed, model};
  }

  bool all_finite() const { return data.allFinite(); }
};

inline void require_scaled(const SensingMatrix& x, const char* who) {
  if (x.scale != Scale::inv_sqrt_m)
    throw parameter_error(std::string(who) +
                          ": matrix must carry the inv-sqrt-m scale tag");
}

}  // namespace ripcert
