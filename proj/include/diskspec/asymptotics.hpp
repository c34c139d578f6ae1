#pragma once

#include "diskspec/limiting.hpp"

namespace diskspec::asymptotics {

// Geometry/coupling bundle: N Dirichlet arcs of half-length epsilon*eta on
// the unit circle, epsilon = 2/N, and eta = exp(-1/(epsilon*(A+mu))).
struct PerturbationParams {
    int N = 0;
    double epsilon = 0.0;
    double eta = 0.0;
    double A = 0.0;
    double mu = 0.0;

    double coupling() const { return A + mu; }
};

PerturbationParams params_from_geometry(int N, double eta, double A);

/// Convenience inverse: fixes mu and derives eta from the coupling identity.
PerturbationParams params_from_mu(int N, double A, double mu);

/// Continuation of the limiting root: the branch of
///   sqrt(L) J'_n(sqrt(L)) + (A+mu) J_n(sqrt(L)) = 0
/// through L = lambda0 at mu = 0. |mu| <= 0.5.
double lambda0_of_mu(const limiting::RobinRoot& root, double A, double mu);

/// Closed-form third- and fourth-order coefficients of the eigenvalue series.
double lambda3(const limiting::RobinRoot& root, double A, double mu, double Lambda0);
double lambda4(const limiting::RobinRoot& root, double A, double mu, double Lambda0);

struct AsymptoticEigenvalue {
    limiting::RobinRoot root;
    PerturbationParams params;
    int order = 0;                // 0, 3 or 4
    double Lambda0 = 0.0;
    double Lambda3 = 0.0;
    double Lambda4 = 0.0;
    double value = 0.0;           // evaluated partial sum
    int remainder_order = 1;      // exponent M in the O(eps^M (A+mu)) remainder
    double remainder_factor = 0.0; // A + mu
    int predicted_multiplicity = 1;
};

AsymptoticEigenvalue eigenvalue_series(const limiting::RobinRoot& root,
                                       const PerturbationParams& params,
                                       int order);

struct GapPrediction {
    double series_gap = 0.0;   // order-4 series difference, signed
    double leading_term = 0.0; // closed-form leading behavior of the gap
};

/// Predicted splitting between two branches sharing the same limiting
/// eigenvalue (root1.lambda0 == root2.lambda0 within 1e-8, different n).
GapPrediction eigenvalue_gap(const limiting::RobinRoot& root1,
                             const limiting::RobinRoot& root2,
                             const PerturbationParams& params);

} // namespace diskspec::asymptotics
