#pragma once

#include "diskspec/asymptotics.hpp"
#include "diskspec/limiting.hpp"

#include <functional>
#include <vector>

namespace diskspec::boundary_layer {

// Stretched boundary coordinates xi = (theta/eps, (1-r)/eps).
struct StretchedPoint {
    double xi1 = 0.0;
    double xi2 = 0.0; // >= 0
};

// Inner coordinates near an arc center, sigma = xi/eta.
struct InnerPoint {
    double sigma1 = 0.0;
    double sigma2 = 0.0; // >= 0
};

/// Periodic boundary-layer kernel Re ln sin(xi1 + i xi2) + ln 2 - xi2,
/// evaluated in the overflow-free form 0.5*ln((1-q)^2 + 4 q sin^2 xi1),
/// q = exp(-2 xi2). Singular on the lattice xi2 = 0, xi1 = 0 mod pi.
double X(StretchedPoint p);

/// Partial derivative d^(d1+d2) X / dxi1^d1 dxi2^d2, d1 + d2 <= 4,
/// from the derivatives of ln sin z (cot z chain).
double X_partials(StretchedPoint p, int d1, int d2);

/// Iterated tail integral A_k[f](xi2) = int_{xi2}^inf t A_{k-1}[f](t) dt
/// along a wall, for exponentially decaying f, k in [1,3].
double A_k_on_axis(int k, const std::function<double(double)>& f, double xi2,
                   double abstol = 1e-10);

/// Single tail integral int_{lower}^inf t^p f(t) dt with the same
/// truncation/endpoint handling (p = 0, 1, 2). Building block for the
/// two-dimensional corrector terms.
double weighted_tail_integral(const std::function<double(double)>& f, double lower,
                              int p, double abstol = 1e-10);

/// Boundary-layer correctors v_1..v_4 at a stretched point. alpha1 must be
/// sqrt(Lambda0) J'_n(sqrt(Lambda0)); alpha2 = alpha3 = 0 are built in, and
/// the coupling A+mu needed by the fourth-order term is recovered from the
/// dispersion identity alpha1 = -(A+mu) J_n(sqrt(Lambda0)).
double v_i(int i, StretchedPoint p, int n, double Lambda0, double alpha1);

/// Inner (near-arc) harmonic functions on the upper half-plane slit along
/// gamma1 = (-1,1): Y = Re acosh(y), Y1 = Re sqrt(y^2-1) (branch continuous
/// off the slit), Y2 = (sigma1 Y - ln2 Y1)/2.
double Y(InnerPoint p);
double Y1(InnerPoint p);
double Y2(InnerPoint p);

/// dY/dsigma2, used by the first-order inner correction.
double Y_dsigma2(InnerPoint p);

/// Inner functions w_{i,0} = -alpha_i Y and w_{i,1} = 0.5 s2^2 d(w_{i,0})/ds2.
double w(int i, int j, InnerPoint p, double alpha_i);

/// w^{ad}_{1,1} = -2 n alpha1 Y2 + c Y1 with the Y1 coefficient supplied by
/// the caller (its closed form is not available).
double w_ad_11(InnerPoint p, int n, double alpha1, double y1_coefficient);

/// Smooth cutoff: 1 for t <= 1/3, 0 for t >= 1/2, exponential bump between.
double cutoff_chi(double t);

struct PolarGridSpec {
    int nr = 0;
    double r_lo = 0.0, r_hi = 0.0;
    int ntheta = 0;
    double theta_lo = 0.0, theta_hi = 0.0;
};

enum class Parity { cos_mode, sin_mode, radial };

struct FieldSample {
    double r = 0.0, theta = 0.0, value = 0.0;
};

struct CompositeField {
    int K = 0;
    int n = 0;
    Parity parity = Parity::radial;
    asymptotics::PerturbationParams params;
    double lambda_used = 0.0;
    std::vector<FieldSample> samples;
};

/// Composite eigenfunction approximation of order K in {0,1}: outer Bessel
/// mode, boundary-layer term eps*v_1 under the mid cutoff, hole cutoffs at
/// the arcs, and the inner w_{1,0} contribution.
CompositeField composite_field(const limiting::RobinRoot& root,
                               const asymptotics::PerturbationParams& params,
                               Parity parity, int K, const PolarGridSpec& grid);

} // namespace diskspec::boundary_layer
