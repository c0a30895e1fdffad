#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace photonloom {

using Complex = std::complex<double>;

inline constexpr const char* kToolVersion = "0.1.0";

// Library-wide tolerances.
inline constexpr double kPruneTol = 1e-14;     // amplitudes below this are dropped after each operation
inline constexpr double kUnitaryTol = 1e-12;   // norm / unitarity checks
inline constexpr double kOracleTol = 1e-10;    // sparse engine vs dense oracle agreement
inline constexpr double kZeroNormTol = 1e-28;  // squared norm at or below this counts as the zero state
inline constexpr double kBranchMatchTol = 1e-9;  // fidelity threshold used by fraction_of
inline constexpr int kDefaultPhotonCap = 16;

// Base class for all simulator errors.
struct SimError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OverlappingRegistries : SimError { using SimError::SimError; };
struct RegistryMismatch : SimError { using SimError::SimError; };
struct ZeroState : SimError { using SimError::SimError; };
struct DuplicateRail : SimError { using SimError::SimError; };
struct TransmittanceOutOfRange : SimError { using SimError::SimError; };
struct UnknownRail : SimError { using SimError::SimError; };
struct OccupiedOutputRail : SimError { using SimError::SimError; };
struct PhotonCapExceeded : SimError { using SimError::SimError; };
struct NonSinglePhotonMode : SimError { using SimError::SimError; };
struct AmbiguousDetection : SimError { using SimError::SimError; };
struct ZeroEnsemble : SimError { using SimError::SimError; };
struct GammaOutOfRange : SimError { using SimError::SimError; };
struct NotConverging : SimError { using SimError::SimError; };
struct ShapeMismatch : SimError { using SimError::SimError; };
struct BasisOverflow : SimError { using SimError::SimError; };
struct RailSetMismatch : SimError { using SimError::SimError; };

// n! as a double, cached. Exact for n <= 18; callers stay far below that
// unless the photon cap is raised, and the tolerances absorb the rest.
inline double factorial(int n) {
  constexpr int kMax = 32;
  static const std::array<double, kMax + 1> table = [] {
    std::array<double, kMax + 1> t{};
    t[0] = 1.0;
    for (int i = 1; i <= kMax; ++i) t[i] = t[i - 1] * static_cast<double>(i);
    return t;
  }();
  if (n < 0 || n > kMax) throw PhotonCapExceeded("factorial: argument out of cached range");
  return table[static_cast<size_t>(n)];
}

inline double sqrt_factorial(int n) { return std::sqrt(factorial(n)); }

}  // namespace photonloom
