#pragma once

#include <utility>
#include <vector>

namespace diskspec::limiting {

// One eigenvalue branch of the Robin disk problem: t0 solves
// t J'_n(t) + A J_n(t) = 0, lambda0 = t0^2.
struct RobinRoot {
    int n = 0;
    int k = 1;          // ascending index for fixed (n, A)
    double t0 = 0.0;
    double lambda0 = 0.0;
    double A = 0.0;
};

struct LimitingEigenvalue {
    double lambda0 = 0.0;
    std::vector<std::pair<int, int>> contributors; // (n, k) pairs
    int multiplicity = 0;                          // 1 per n=0 contributor, 2 otherwise
};

struct DegeneracyCertificate {
    int n = 0;
    int m = 0;
    double t0 = 0.0;   // common root of the Robin equation for both orders
    double A = 0.0;    // = -t0 J'_n(t0) / J_n(t0) > 0
    std::pair<double, double> bracket{0.0, 0.0};
    double residual_n = 0.0;
    double residual_m = 0.0;
};

/// t J'_n(t) + A J_n(t), the Robin dispersion function.
double robin_function(int n, double A, double t);

/// First `count` roots, ascending. For (n, A) = (0, 0) the list starts with
/// the degenerate root t0 = 0 (constant Neumann mode).
std::vector<RobinRoot> robin_roots(int n, double A, int count);

/// All limiting eigenvalues <= lambda_max, merged across orders n with a
/// 1e-8 coincidence tolerance on t0, sorted ascending.
std::vector<LimitingEigenvalue> limiting_spectrum(double A, double lambda_max);

/// Cross-Wronskian whose sign changes certify a common Robin root for two
/// distinct orders. Sign convention fixed by F(6,3)(8) < 0 < F(6,3)(9).
double F_nm(int n, int m, double t);

/// Refines a sign-change bracket of F_nm into a coupling constant A at which
/// orders n and m share a Robin root.
DegeneracyCertificate degenerate_A(int n, int m, std::pair<double, double> bracket);

} // namespace diskspec::limiting
