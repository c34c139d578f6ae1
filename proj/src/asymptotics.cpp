#include "diskspec/asymptotics.hpp"
#include "diskspec/errors.hpp"
#include "diskspec/specfun.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace diskspec::asymptotics {

namespace specfun = diskspec::specfun;
using limiting::RobinRoot;

PerturbationParams params_from_geometry(int N, double eta, double A) {
    if (N < 4 || N % 2 != 0) throw std::invalid_argument("params: N must be even and >= 4");
    if (!(A >= 0.0)) throw std::invalid_argument("params: A must be nonnegative");
    if (!(eta > 0.0)) throw OutOfRegime("eta must be positive");
    if (eta >= 1.0) throw OutOfRegime("eta >= 1 puts the coupling outside the admissible regime");

    PerturbationParams p;
    p.N = N;
    p.epsilon = 2.0 / N;
    p.eta = eta;
    p.A = A;
    p.mu = -1.0 / (p.epsilon * std::log(eta)) - A;
    if (!(p.coupling() > 0.0)) throw OutOfRegime("derived A + mu is not positive");
    return p;
}

PerturbationParams params_from_mu(int N, double A, double mu) {
    if (N < 4 || N % 2 != 0) throw std::invalid_argument("params: N must be even and >= 4");
    if (!(A >= 0.0)) throw std::invalid_argument("params: A must be nonnegative");
    if (!(A + mu > 0.0)) throw OutOfRegime("A + mu must be positive");
    PerturbationParams p;
    p.N = N;
    p.epsilon = 2.0 / N;
    p.A = A;
    p.mu = mu;
    p.eta = std::exp(-1.0 / (p.epsilon * (A + mu)));
    if (!(p.eta > 0.0 && p.eta < 0.5 * std::numbers::pi))
        throw OutOfRegime("derived eta outside (0, pi/2)");
    return p;
}

namespace {

double dispersion(int n, double coupling, double t) {
    return limiting::robin_function(n, coupling, t);
}

double dispersion_prime(int n, double coupling, double t) {
    std::vector<double> j = specfun::bessel_j_array(n + 1, t);
    double jn = j[static_cast<size_t>(n)];
    double jp = (n == 0) ? -j[1] : 0.5 * (j[static_cast<size_t>(n - 1)] - j[static_cast<size_t>(n + 1)]);
    return coupling * jp - (t - static_cast<double>(n) * n / t) * jn;
}

} // namespace

double lambda0_of_mu(const RobinRoot& root, double A, double mu) {
    if (std::abs(mu) > 0.5) throw std::invalid_argument("lambda0_of_mu: |mu| must be <= 0.5");
    const double coupling = A + mu;

    if (root.t0 == 0.0) {
        // degenerate Neumann branch (n = 0, A = 0, lambda0 = 0)
        if (root.n != 0 || A != 0.0)
            throw std::invalid_argument("lambda0_of_mu: zero root only valid for (n, A) = (0, 0)");
        if (mu == 0.0) return 0.0;
        if (!(mu > 0.0)) throw OutOfRegime("degenerate branch requires mu > 0");
        // the branch sits near sqrt(2 mu), well below the next root of t J'_0
        double a = 1e-12, b = 0.5 * (std::sqrt(2.0 * mu) + 3.8317059702075123);
        double fa = dispersion(0, coupling, a);
        double fb = dispersion(0, coupling, b);
        if (!(fa * fb < 0.0)) throw BranchLost("degenerate branch: no sign change in safeguard interval");
        for (int i = 0; i < 80; ++i) {
            double mid = 0.5 * (a + b);
            double fm = dispersion(0, coupling, mid);
            if (fm == 0.0) { a = b = mid; break; }
            if (fa * fm < 0.0) b = mid;
            else { a = mid; fa = fm; }
        }
        double t = 0.5 * (a + b);
        return t * t;
    }

    if (!(coupling >= 0.0)) throw OutOfRegime("lambda0_of_mu: A + mu must not be negative");

    // safeguard interval: half the distance to the adjacent roots of the
    // unperturbed dispersion function
    std::vector<RobinRoot> roots = limiting::robin_roots(root.n, A, root.k + 1);
    double prev;
    if (root.k >= 2) prev = roots[static_cast<size_t>(root.k - 2)].t0;
    else prev = (root.n >= 1) ? static_cast<double>(root.n) : 0.0;
    double next = roots[static_cast<size_t>(root.k)].t0;
    double lo = root.t0 - 0.5 * (root.t0 - prev);
    double hi = root.t0 + 0.5 * (next - root.t0);

    double flo = dispersion(root.n, coupling, lo);
    double fhi = dispersion(root.n, coupling, hi);
    if (!(flo * fhi < 0.0))
        throw BranchLost("lambda0_of_mu: branch left the safeguard interval");

    double a = lo, b = hi, fa = flo;
    double x = root.t0;
    for (int i = 0; i < 80; ++i) {
        double f = dispersion(root.n, coupling, x);
        if (f == 0.0) break;
        if (fa * f < 0.0) b = x;
        else { a = x; fa = f; }
        double fp = dispersion_prime(root.n, coupling, x);
        double xn = (fp != 0.0) ? x - f / fp : 0.5 * (a + b);
        if (!(xn > a && xn < b)) xn = 0.5 * (a + b);
        if (std::abs(xn - x) < 1e-15 * (1.0 + std::abs(x))) { x = xn; break; }
        x = xn;
    }
    return x * x;
}

double lambda3(const RobinRoot& root, double A, double mu, double Lambda0) {
    const double c = A + mu;
    const double n2 = static_cast<double>(root.n) * root.n;
    const double denom = Lambda0 - n2 + c * c;
    if (std::abs(denom) < 1e-12)
        throw DegenerateDenominator("lambda3: Lambda0 - n^2 + (A+mu)^2 vanishes");
    return -0.25 * specfun::zeta3() * c * c * (Lambda0 + 2.0 * n2) * Lambda0 / denom;
}

double lambda4(const RobinRoot& root, double A, double mu, double Lambda0) {
    const double c = A + mu;
    const double n2 = static_cast<double>(root.n) * root.n;
    const double denom = Lambda0 - n2 + c * c;
    if (std::abs(denom) < 1e-12)
        throw DegenerateDenominator("lambda4: Lambda0 - n^2 + (A+mu)^2 vanishes");
    const double pi4 = std::pow(std::numbers::pi, 4);
    return pi4 / 5760.0 * c * c * (8.0 * Lambda0 + 1.0) * Lambda0 / denom;
}

AsymptoticEigenvalue eigenvalue_series(const RobinRoot& root,
                                       const PerturbationParams& params,
                                       int order) {
    if (order != 0 && order != 3 && order != 4)
        throw UnsupportedOrder("eigenvalue_series: order must be 0, 3 or 4");
    if (std::abs(root.A - params.A) > 1e-12)
        throw std::invalid_argument("eigenvalue_series: root.A and params.A disagree");

    AsymptoticEigenvalue ev;
    ev.root = root;
    ev.params = params;
    ev.order = order;
    ev.Lambda0 = lambda0_of_mu(root, params.A, params.mu);
    ev.Lambda3 = lambda3(root, params.A, params.mu, ev.Lambda0);
    ev.Lambda4 = lambda4(root, params.A, params.mu, ev.Lambda0);
    double value = ev.Lambda0;
    const double e = params.epsilon;
    if (order >= 3) value += e * e * e * ev.Lambda3;
    if (order >= 4) value += e * e * e * e * ev.Lambda4;
    ev.value = value;
    ev.remainder_order = order + 1;
    ev.remainder_factor = params.coupling();
    ev.predicted_multiplicity = (root.n == 0) ? 1 : 2;
    return ev;
}

GapPrediction eigenvalue_gap(const RobinRoot& root1,
                             const RobinRoot& root2,
                             const PerturbationParams& params) {
    if (root1.n == root2.n)
        throw std::invalid_argument("eigenvalue_gap: orders must differ");
    if (std::abs(root1.lambda0 - root2.lambda0) > 1e-8 * (1.0 + std::abs(root1.lambda0)))
        throw NotDegenerate("eigenvalue_gap: roots do not share a limiting eigenvalue");

    AsymptoticEigenvalue a = eigenvalue_series(root1, params, 4);
    AsymptoticEigenvalue b = eigenvalue_series(root2, params, 4);

    GapPrediction gap;
    gap.series_gap = a.value - b.value;

    const double l0 = root1.lambda0;
    const double n2 = static_cast<double>(root1.n) * root1.n;
    const double m2 = static_cast<double>(root2.n) * root2.n;
    const double A = params.A;
    const double e3 = params.epsilon * params.epsilon * params.epsilon;
    double leading = 0.0;
    if (params.mu != 0.0) {
        double dn = (A == 0.0) ? (l0 - n2) : (l0 - n2 + A * A);
        double dm = (A == 0.0) ? (l0 - m2) : (l0 - m2 + A * A);
        leading += params.mu * 2.0 * l0 * (n2 - m2) / (dn * dm);
    }
    if (A > 0.0) {
        double dn = l0 - n2 + A * A;
        double dm = l0 - m2 + A * A;
        leading += -e3 * 0.25 * A * A * l0 * specfun::zeta3() * (2.0 * A * A + 3.0 * l0) * (n2 - m2) / (dn * dm);
    }
    gap.leading_term = leading;
    return gap;
}

} // namespace diskspec::asymptotics
