#include "diskspec/specfun.hpp"
#include "diskspec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace diskspec::specfun {

namespace {

constexpr double kRescaleLimit = 0x1p500;
constexpr int kRescaleShift = 500;

void check_argument(double t) {
    if (std::isnan(t) || t < 0.0)
        throw std::domain_error("bessel_j: argument must be nonnegative, got " + std::to_string(t));
    if (t > kMaxArgument)
        throw std::domain_error("bessel_j: argument above declared range 1e4: " + std::to_string(t));
}

void check_order(int n) {
    if (n < 0) throw std::domain_error("bessel_j: order must be nonnegative");
}

int start_order(int nmax, double t) {
    double m = std::max<double>(nmax, t);
    int M = static_cast<int>(std::max<double>(nmax, std::ceil(t)) + 44.0 + 2.0 * std::cbrt(m + 1.0));
    return M + (M & 1); // even start keeps the even-sum bookkeeping aligned
}

} // namespace

double ScaledBesselArray::value(int k) const {
    long e = exponent[static_cast<size_t>(k)];
    if (e < -1400) return 0.0;
    return std::ldexp(mantissa[static_cast<size_t>(k)], static_cast<int>(e));
}

double ScaledBesselArray::prime_mantissa(int k, long& e2) const {
    // J'_k = (J_{k-1} - J_{k+1})/2, J'_0 = -J_1; result on the larger exponent.
    if (k == 0) {
        e2 = exponent[1];
        return -mantissa[1];
    }
    const long em = exponent[static_cast<size_t>(k - 1)];
    const long ep = exponent[static_cast<size_t>(k + 1)];
    const long e = std::max(em, ep);
    double a = (em - e < -1400) ? 0.0 : std::ldexp(mantissa[static_cast<size_t>(k - 1)], static_cast<int>(em - e));
    double b = (ep - e < -1400) ? 0.0 : std::ldexp(mantissa[static_cast<size_t>(k + 1)], static_cast<int>(ep - e));
    e2 = e;
    return 0.5 * (a - b);
}

ScaledBesselArray bessel_j_scaled(int nmax, double t) {
    check_order(nmax);
    check_argument(t);

    ScaledBesselArray out;
    out.mantissa.assign(static_cast<size_t>(nmax) + 1, 0.0);
    out.exponent.assign(static_cast<size_t>(nmax) + 1, 0);

    if (t == 0.0) {
        out.mantissa[0] = 1.0;
        return out;
    }
    if (t < 1e-6) {
        // Two-term ascending series, assembled in log2 space so large orders
        // underflow gracefully instead of hitting exp() limits.
        const double l2 = std::log2(0.5 * t);
        for (int n = 0; n <= nmax; ++n) {
            double lg = n * l2 - std::lgamma(n + 1.0) / std::numbers::ln2;
            long e = static_cast<long>(std::floor(lg));
            double mant = std::exp2(lg - static_cast<double>(e));
            mant *= 1.0 - 0.25 * t * t / (n + 1.0);
            out.mantissa[static_cast<size_t>(n)] = mant;
            out.exponent[static_cast<size_t>(n)] = e;
        }
        return out;
    }

    const int M = start_order(nmax, t);
    std::vector<int> rescales_at_store(static_cast<size_t>(nmax) + 1, 0);
    int rescales = 0;

    double jp = 0.0;    // J_{k+1} in the working scale
    double jc = 1e-30;  // J_k
    double sum = 0.0;   // J_0 + 2*sum_{k even >= 2} J_k, same working scale

    if (M % 2 == 0) sum += 2.0 * jc;

    for (int k = M; k >= 1; --k) {
        double jm = (2.0 * k / t) * jc - jp; // J_{k-1}
        jp = jc;
        jc = jm;
        const int idx = k - 1;
        if (idx <= nmax) {
            out.mantissa[static_cast<size_t>(idx)] = jc;
            rescales_at_store[static_cast<size_t>(idx)] = rescales;
        }
        if (idx == 0)
            sum += jc;
        else if (idx % 2 == 0)
            sum += 2.0 * jc;
        if (std::abs(jc) > kRescaleLimit) {
            // stored entries keep their scale; rescales_at_store records it
            jc = std::ldexp(jc, -kRescaleShift);
            jp = std::ldexp(jp, -kRescaleShift);
            sum = std::ldexp(sum, -kRescaleShift);
            ++rescales;
        }
    }

    if (sum == 0.0 || !std::isfinite(sum))
        throw NumericalError("bessel_j: normalization sum degenerate");

    for (int k = 0; k <= nmax; ++k) {
        double m = out.mantissa[static_cast<size_t>(k)] / sum;
        long e = static_cast<long>(kRescaleShift) * (rescales_at_store[static_cast<size_t>(k)] - rescales);
        // renormalize the mantissa so |mant| is O(1)
        if (m != 0.0 && std::isfinite(m)) {
            int fe = 0;
            m = std::frexp(m, &fe);
            e += fe;
        } else if (!std::isfinite(m)) {
            throw NumericalError("bessel_j: non-finite mantissa in backward recurrence");
        }
        out.mantissa[static_cast<size_t>(k)] = m;
        out.exponent[static_cast<size_t>(k)] = e;
    }
    return out;
}

std::vector<double> bessel_j_array(int nmax, double t) {
    ScaledBesselArray s = bessel_j_scaled(nmax, t);
    std::vector<double> out(static_cast<size_t>(nmax) + 1);
    for (int k = 0; k <= nmax; ++k) out[static_cast<size_t>(k)] = s.value(k);
    return out;
}

double bessel_j(int n, double t) {
    check_order(n);
    return bessel_j_array(n, t)[static_cast<size_t>(n)];
}

double bessel_j_prime(int n, double t) {
    check_order(n);
    std::vector<double> j = bessel_j_array(n + 1, t);
    if (n == 0) return -j[1];
    return 0.5 * (j[static_cast<size_t>(n - 1)] - j[static_cast<size_t>(n + 1)]);
}

namespace {

double zero_objective(int n, double t, ZeroKind kind) {
    return kind == ZeroKind::of_j ? bessel_j(n, t) : bessel_j_prime(n, t);
}

double zero_objective_prime(int n, double t, ZeroKind kind) {
    if (kind == ZeroKind::of_j) return bessel_j_prime(n, t);
    // J''_n from the differential equation
    std::vector<double> j = bessel_j_array(n + 1, t);
    double jn = j[static_cast<size_t>(n)];
    double jpn = (n == 0) ? -j[1] : 0.5 * (j[static_cast<size_t>(n - 1)] - j[static_cast<size_t>(n + 1)]);
    return -jpn / t - (1.0 - static_cast<double>(n) * n / (t * t)) * jn;
}

} // namespace

double bessel_zero(int n, int k, ZeroKind kind) {
    check_order(n);
    if (k < 1 || k > 100) throw std::domain_error("bessel_zero: index k must be in [1,100]");
    if (n > 500) throw std::domain_error("bessel_zero: order too large for zero search");

    // All positive zeros of J_n and J'_n exceed n; scan with a step well
    // below the ~pi spacing of consecutive zeros.
    const double step = std::numbers::pi / 4.0;
    double a = (n == 0) ? 0.05 : n + 1e-4;
    double fa = zero_objective(n, a, kind);
    int found = 0;
    const int max_steps = 8 * (k + n + 30);
    double lo = 0.0, hi = 0.0;
    for (int i = 0; i < max_steps; ++i) {
        double b = a + step;
        double fb = zero_objective(n, b, kind);
        if (fa == 0.0) { // landed exactly on a zero
            ++found;
            if (found == k) { lo = a; hi = a; break; }
        } else if (fa * fb < 0.0) {
            ++found;
            if (found == k) { lo = a; hi = b; break; }
        }
        a = b;
        fa = fb;
    }
    if (hi == 0.0 && lo == 0.0)
        throw NumericalError("bessel_zero: scan failed to bracket requested zero");
    if (hi == lo) return lo;

    double flo = zero_objective(n, lo, kind);
    for (int i = 0; i < 40; ++i) {
        double mid = 0.5 * (lo + hi);
        double fm = zero_objective(n, mid, kind);
        if (fm == 0.0) { lo = hi = mid; break; }
        if (flo * fm < 0.0) hi = mid;
        else { lo = mid; flo = fm; }
    }
    double x = 0.5 * (lo + hi);
    for (int i = 0; i < 4; ++i) {
        double f = zero_objective(n, x, kind);
        double fp = zero_objective_prime(n, x, kind);
        if (fp == 0.0) break;
        double xn = x - f / fp;
        if (xn <= lo || xn >= hi) break; // keep the certified bracket
        x = xn;
    }
    return x;
}

double zeta3() noexcept {
    return 1.2020569031595942854;
}

} // namespace diskspec::specfun
