#pragma once

#include "diskspec/asymptotics.hpp"
#include "diskspec/direct_solver.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace diskspec::study {

enum class MuScheme { mu_zero, mu_prop_eps, eta_const };

struct StudyConfig {
    double A = 1.0;
    int n = 0;
    int k = 1;
    std::vector<int> N_list;
    MuScheme scheme = MuScheme::mu_zero;
    double c = 1.0;           // mu = c * epsilon for mu_prop_eps
    double eta = 1e-3;        // for eta_const
    std::uint64_t seed = 0;
    int quality = 1;
    double sigma_threshold = 1e-4;
};

struct StudyRow {
    int N = 0;
    double epsilon = 0.0;
    double mu = 0.0;
    double eta = 0.0;
    bool ok = false;
    std::string message;
    double lambda_direct = 0.0;
    double sigma_min = 0.0;
    double lambda_asym[3] = {0.0, 0.0, 0.0}; // orders 0, 3, 4
    double errors[3] = {0.0, 0.0, 0.0};      // |lambda_direct - lambda_asym[i]|
};

struct StudyReport {
    StudyConfig config;
    std::vector<StudyRow> rows;
    double slopes[3] = {0.0, 0.0, 0.0}; // log-log error slopes vs epsilon
    int failed = 0;
    double wall_ms = 0.0;
};

/// Runs the direct solver against the asymptotic partial sums over N_list
/// and fits log-log error slopes. Individual row failures are recorded and
/// the study continues.
StudyReport convergence_study(const StudyConfig& config);

} // namespace diskspec::study
