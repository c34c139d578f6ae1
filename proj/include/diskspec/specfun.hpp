#pragma once

#include <vector>

namespace diskspec::specfun {

// Declared evaluation range for the Bessel routines.
inline constexpr double kMaxArgument = 1.0e4;

enum class ZeroKind { of_j, of_j_prime };

/// J_0(t)..J_nmax(t) in one pass (backward recurrence, normalized by the
/// even-order sum identity). All operations here are pure and thread-safe.
std::vector<double> bessel_j_array(int nmax, double t);

double bessel_j(int n, double t);

/// J'_n(t) from the recurrence identity J'_n = (J_{n-1} - J_{n+1})/2,
/// J'_0 = -J_1.
double bessel_j_prime(int n, double t);

/// k-th positive zero of J_n or J'_n (k >= 1, ascending). Bracketed by a
/// scan and polished by safeguarded Newton; absolute error below 1e-10.
double bessel_zero(int n, int k, ZeroKind kind);

/// Apery's constant zeta(3).
double zeta3() noexcept;

// Base-2 scaled values J_k(t) = mantissa[k] * 2^(exponent[k]), usable far
// below the double underflow threshold. This is what the collocation solver
// uses for high-order basis columns.
struct ScaledBesselArray {
    std::vector<double> mantissa;
    std::vector<long> exponent;

    double value(int k) const;                  // plain double, may underflow to 0
    double prime_mantissa(int k, long& e2) const; // J'_k as mantissa/exponent pair
};

ScaledBesselArray bessel_j_scaled(int nmax, double t);

} // namespace diskspec::specfun
