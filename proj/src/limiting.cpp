#include "diskspec/limiting.hpp"
#include "diskspec/errors.hpp"
#include "diskspec/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace diskspec::limiting {

namespace specfun = diskspec::specfun;

double robin_function(int n, double A, double t) {
    if (t == 0.0) return (n == 0) ? A : 0.0;
    std::vector<double> j = specfun::bessel_j_array(n + 1, t);
    double jp = (n == 0) ? -j[1] : 0.5 * (j[static_cast<size_t>(n - 1)] - j[static_cast<size_t>(n + 1)]);
    return t * jp + A * j[static_cast<size_t>(n)];
}

namespace {

// d/dt [t J'_n + A J_n] via the Bessel ODE: A J'_n - (t - n^2/t) J_n.
double robin_function_prime(int n, double A, double t) {
    std::vector<double> j = specfun::bessel_j_array(n + 1, t);
    double jn = j[static_cast<size_t>(n)];
    double jp = (n == 0) ? -j[1] : 0.5 * (j[static_cast<size_t>(n - 1)] - j[static_cast<size_t>(n + 1)]);
    return A * jp - (t - static_cast<double>(n) * n / t) * jn;
}

double refine_robin_root(int n, double A, double lo, double hi) {
    double flo = robin_function(n, A, lo);
    for (int i = 0; i < 40; ++i) {
        double mid = 0.5 * (lo + hi);
        double fm = robin_function(n, A, mid);
        if (fm == 0.0) return mid;
        if (flo * fm < 0.0) hi = mid;
        else { lo = mid; flo = fm; }
    }
    double x = 0.5 * (lo + hi);
    for (int i = 0; i < 6; ++i) {
        double f = robin_function(n, A, x);
        double fp = robin_function_prime(n, A, x);
        if (fp == 0.0) break;
        double xn = x - f / fp;
        if (xn <= lo || xn >= hi) break;
        if (std::abs(xn - x) < 1e-16 * (1.0 + x)) { x = xn; break; }
        x = xn;
    }
    return x;
}

// Scan roots of the Robin function up to t_max; assumes roots exceed n.
std::vector<double> scan_roots(int n, double A, double t_max, int max_count) {
    std::vector<double> roots;
    const double step = std::numbers::pi / 8.0; // roots interlace with Bessel zeros, spacing ~pi
    double a = (n == 0) ? 1e-9 : n + 1e-9;
    double fa = robin_function(n, A, a);
    while (a < t_max && static_cast<int>(roots.size()) < max_count) {
        double b = a + step;
        double fb = robin_function(n, A, b);
        if (fa == 0.0) {
            roots.push_back(a);
        } else if (fa * fb < 0.0) {
            double r = refine_robin_root(n, A, a, b);
            if (r <= t_max) roots.push_back(r);
        }
        a = b;
        fa = fb;
    }
    return roots;
}

} // namespace

std::vector<RobinRoot> robin_roots(int n, double A, int count) {
    if (n < 0) throw std::domain_error("robin_roots: order must be nonnegative");
    if (!(A >= 0.0)) throw std::domain_error("robin_roots: A must be nonnegative");
    if (count < 1 || count > 50) throw std::domain_error("robin_roots: count must be in [1,50]");

    std::vector<RobinRoot> out;
    int remaining = count;
    if (n == 0 && A == 0.0) {
        out.push_back(RobinRoot{0, 1, 0.0, 0.0, A});
        --remaining;
    }
    if (remaining > 0) {
        double t_max = n + (remaining + 3) * std::numbers::pi + 5.0;
        std::vector<double> roots = scan_roots(n, A, t_max, remaining);
        if (static_cast<int>(roots.size()) < remaining)
            throw NumericalError("robin_roots: scan found fewer roots than requested");
        for (double r : roots) {
            RobinRoot root;
            root.n = n;
            root.k = static_cast<int>(out.size()) + 1;
            root.t0 = r;
            root.lambda0 = r * r;
            root.A = A;
            out.push_back(root);
            if (static_cast<int>(out.size()) == count) break;
        }
    }
    for (const RobinRoot& r : out) {
        if (r.t0 == 0.0) continue;
        if (std::abs(robin_function(n, A, r.t0)) > 1e-10)
            throw NumericalError("robin_roots: residual above 1e-10 after polish");
    }
    return out;
}

std::vector<LimitingEigenvalue> limiting_spectrum(double A, double lambda_max) {
    if (!(A >= 0.0)) throw std::domain_error("limiting_spectrum: A must be nonnegative");
    if (!(lambda_max > 0.0) || lambda_max > 2500.0)
        throw std::domain_error("limiting_spectrum: lambda_max must be in (0, 2500]");

    const double t_max = std::sqrt(lambda_max);
    struct Tagged { double t0; int n; int k; };
    std::vector<Tagged> all;
    if (A == 0.0) all.push_back({0.0, 0, 1});
    for (int n = 0; n <= static_cast<int>(t_max) + 1; ++n) {
        if (static_cast<double>(n) >= t_max) break; // first root exceeds n
        std::vector<double> roots = scan_roots(n, A, t_max, 1000);
        int k0 = (n == 0 && A == 0.0) ? 2 : 1;
        for (size_t i = 0; i < roots.size(); ++i)
            all.push_back({roots[i], n, k0 + static_cast<int>(i)});
    }
    std::sort(all.begin(), all.end(), [](const Tagged& a, const Tagged& b) { return a.t0 < b.t0; });

    std::vector<LimitingEigenvalue> out;
    size_t i = 0;
    while (i < all.size()) {
        size_t j = i + 1;
        while (j < all.size() && all[j].t0 - all[j - 1].t0 <= 1e-8) ++j;
        LimitingEigenvalue ev;
        double t_mean = 0.0;
        for (size_t p = i; p < j; ++p) {
            t_mean += all[p].t0;
            ev.contributors.emplace_back(all[p].n, all[p].k);
            ev.multiplicity += (all[p].n == 0) ? 1 : 2;
        }
        t_mean /= static_cast<double>(j - i);
        ev.lambda0 = t_mean * t_mean;
        std::sort(ev.contributors.begin(), ev.contributors.end());
        out.push_back(std::move(ev));
        i = j;
    }
    return out;
}

double F_nm(int n, int m, double t) {
    if (n < 0 || m < 0) throw std::domain_error("F_nm: orders must be nonnegative");
    if (n == m) throw std::invalid_argument("F_nm: orders must differ");
    if (!(t > 0.0)) throw std::domain_error("F_nm: t must be positive");
    int top = std::max(n, m) + 1;
    std::vector<double> j = specfun::bessel_j_array(top, t);
    auto prime = [&](int p) {
        return (p == 0) ? -j[1] : 0.5 * (j[static_cast<size_t>(p - 1)] - j[static_cast<size_t>(p + 1)]);
    };
    return t * (prime(m) * j[static_cast<size_t>(n)] - prime(n) * j[static_cast<size_t>(m)]);
}

DegeneracyCertificate degenerate_A(int n, int m, std::pair<double, double> bracket) {
    if (n == m) throw std::invalid_argument("degenerate_A: orders must differ");
    const double lo = bracket.first, hi = bracket.second;
    if (!(lo > 0.0) || !(hi > lo)) throw std::domain_error("degenerate_A: invalid bracket");

    // no zero of J_n or J_m may lie inside the bracket
    for (int p : {n, m}) {
        for (int k = 1; k <= 100; ++k) {
            double z = specfun::bessel_zero(p, k, specfun::ZeroKind::of_j);
            if (z >= hi) break;
            if (z > lo && z < hi)
                throw ZeroInsideBracket("J_" + std::to_string(p) + " vanishes at " + std::to_string(z));
        }
    }

    double flo = F_nm(n, m, lo), fhi = F_nm(n, m, hi);
    if (!(flo * fhi < 0.0))
        throw NoSignChange("F_{" + std::to_string(n) + "," + std::to_string(m) + "} does not change sign on bracket");

    // t J'_p / J_p must stay negative on the bracket for at least one of the
    // orders; at the common root both ratios agree, so this certifies A > 0.
    const int grid = 257;
    auto ratio_negative_throughout = [&](int p) {
        for (int i = 0; i < grid; ++i) {
            double t = lo + (hi - lo) * i / (grid - 1);
            std::vector<double> j = specfun::bessel_j_array(p + 1, t);
            double jp = (p == 0) ? -j[1]
                                 : 0.5 * (j[static_cast<size_t>(p - 1)] - j[static_cast<size_t>(p + 1)]);
            if (t * jp * j[static_cast<size_t>(p)] >= 0.0) return false;
        }
        return true;
    };
    if (!ratio_negative_throughout(n) && !ratio_negative_throughout(m))
        throw WrongSign("t J'_p/J_p nonnegative somewhere on the bracket for both orders");

    double a = lo, b = hi, fa = flo;
    for (int i = 0; i < 64; ++i) {
        double mid = 0.5 * (a + b);
        double fm = F_nm(n, m, mid);
        if (fm == 0.0) { a = b = mid; break; }
        if (fa * fm < 0.0) b = mid;
        else { a = mid; fa = fm; }
        if (b - a < 1e-13 * (1.0 + mid)) break;
    }
    double t0 = 0.5 * (a + b);

    std::vector<double> j = specfun::bessel_j_array(std::max(n, m) + 1, t0);
    auto prime = [&](int p) {
        return (p == 0) ? -j[1] : 0.5 * (j[static_cast<size_t>(p - 1)] - j[static_cast<size_t>(p + 1)]);
    };
    double A = -t0 * prime(n) / j[static_cast<size_t>(n)];
    if (!(A > 0.0)) throw WrongSign("recovered A is not positive");

    DegeneracyCertificate cert;
    cert.n = n;
    cert.m = m;
    cert.t0 = t0;
    cert.A = A;
    cert.bracket = bracket;
    cert.residual_n = std::abs(t0 * prime(n) + A * j[static_cast<size_t>(n)]);
    cert.residual_m = std::abs(t0 * prime(m) + A * j[static_cast<size_t>(m)]);
    if (cert.residual_n > 1e-9 || cert.residual_m > 1e-9)
        throw NumericalError("degenerate_A: certificate residual above 1e-9");
    return cert;
}

} // namespace diskspec::limiting
