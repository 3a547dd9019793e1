#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace pfrmt {

using cplx = std::complex<double>;

// Thrown on malformed or out-of-domain requests (CLI exit code 1).
struct validation_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Thrown when a computation cannot reach its accuracy contract (CLI exit code 2).
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Integer power by binary exponentiation. For complex bases this is exact in the
// sense of being branch-free: integer powers are single-valued, so no principal
// branch choice can leak in.
template <class T>
T pow_int(T base, long e) {
  if (e < 0) return T(1.0) / pow_int(base, -e);
  T acc(1.0);
  while (e > 0) {
    if (e & 1) acc *= base;
    base *= base;
    e >>= 1;
  }
  return acc;
}

inline double parity_sign(long e) { return (e % 2 == 0) ? 1.0 : -1.0; }

inline long choose2(long k) { return k * (k - 1) / 2; }

}  // namespace pfrmt
