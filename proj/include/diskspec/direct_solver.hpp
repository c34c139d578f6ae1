#pragma once

#include "diskspec/asymptotics.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <utility>
#include <vector>

namespace diskspec::direct_solver {

enum class BoundaryMode { alternating, full_dirichlet, full_neumann };
enum class SymmetryParity { cosine, sine };

// Modal collocation configuration. The basis is restricted to Fourier
// indices m = +-residue (mod N) with one reflection parity, so the dihedral
// symmetry classes of the arc arrangement decouple exactly.
struct SolverConfig {
    asymptotics::PerturbationParams params;
    int residue = 0;
    SymmetryParity parity = SymmetryParity::cosine;
    int J = 0;               // modal basis size
    int Mb = 0;              // boundary collocation points (>= 4J)
    int Mi = 0;              // interior normalization points
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    double sigma_threshold = 1e-5;
    std::uint64_t seed = 0;  // offsets the deterministic interior point set
    int pts_per_arc = 6; // even count keeps arc nodes off the singular center
    BoundaryMode mode = BoundaryMode::alternating;
    bool normalize_columns = true;
    // junction exclusion zone in units of the basis resolution 2*pi/top_index
    double junction_buffer = 1.0;
    // append layer-tail columns sum_{j>j0} j^{-p} J_{jN+-n}(sqrt(lambda) r)
    // / J_{jN+-n}(sqrt(lambda)) trig; they carry the boundary-layer log comb
    // the truncated modal basis cannot represent
    bool tail_columns = true;
    int tail_exact_terms = 300; // Bessel-exact correction terms per tail column
};

struct BoundaryPoint {
    double theta = 0.0;
    bool dirichlet = false;
    double weight = 1.0;
};

struct AssembledSystem {
    Eigen::MatrixXd boundary;       // Mb x J' rows: weighted BC residuals
    Eigen::MatrixXd interior;       // Mi x J' rows: weighted point values
    std::vector<int> basis_indices; // Fourier index per column; negative tags
                                    // mark the layer-tail columns
    std::vector<int> kept;          // original column -> kept column (-1 if dropped)
    std::vector<double> column_log2_scale; // log2 of the equilibration scale per kept column
    std::vector<BoundaryPoint> boundary_points;
};

struct DirectEigenResult {
    double lambda = 0.0;
    double sigma_min = 0.0;
    Eigen::VectorXd coeffs; // in equilibrated column units, kept columns only
    SolverConfig config;
    double dirichlet_residual = 0.0; // max |u| on Dirichlet points, unit interior norm
    double neumann_residual = 0.0;   // max |du/dr| on Neumann points
};

std::vector<int> basis_indices(const SolverConfig& config);

AssembledSystem assemble(const SolverConfig& config, double lambda);

/// Betcke-Trefethen generalized smallest singular value at one lambda.
double sigma_min(const SolverConfig& config, double lambda);

std::vector<std::pair<double, double>> sigma_min_scan(const SolverConfig& config, int samples);

DirectEigenResult find_eigenvalue(const SolverConfig& config);

/// Reasonable solver configuration for one symmetry class around a
/// predicted eigenvalue. quality = 1 is the workhorse; quality = 2 doubles
/// the modal resolution for convergence studies.
SolverConfig make_config(const asymptotics::PerturbationParams& params, int n,
                         SymmetryParity parity, double lambda_center,
                         double half_width, int quality = 1);

} // namespace diskspec::direct_solver
