#include "diskspec/study.hpp"
#include "diskspec/errors.hpp"

#include <chrono>
#include <cmath>

namespace diskspec::study {

namespace {

void fit_slopes(StudyReport& report) {
    // least squares of ln(err) against ln(eps), per order
    for (int ord = 0; ord < 3; ++ord) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int m = 0;
        for (const StudyRow& row : report.rows) {
            if (!row.ok || row.errors[ord] <= 0.0) continue;
            double x = std::log(row.epsilon);
            double y = std::log(row.errors[ord]);
            sx += x; sy += y; sxx += x * x; sxy += x * y;
            ++m;
        }
        report.slopes[ord] = (m >= 2) ? (m * sxy - sx * sy) / (m * sxx - sx * sx) : 0.0;
    }
}

} // namespace

StudyReport convergence_study(const StudyConfig& cfg) {
    if (cfg.N_list.size() < 3) throw std::invalid_argument("study: need at least 3 values of N");
    for (size_t i = 0; i < cfg.N_list.size(); ++i) {
        if (cfg.N_list[i] % 2 != 0 || cfg.N_list[i] < 4)
            throw std::invalid_argument("study: N values must be even and >= 4");
        if (i > 0 && cfg.N_list[i] <= cfg.N_list[i - 1])
            throw std::invalid_argument("study: N_list must be ascending");
    }

    const auto t_start = std::chrono::steady_clock::now();
    StudyReport report;
    report.config = cfg;

    limiting::RobinRoot root = limiting::robin_roots(cfg.n, cfg.A, cfg.k).back();

    for (int N : cfg.N_list) {
        StudyRow row;
        row.N = N;
        try {
            asymptotics::PerturbationParams params;
            switch (cfg.scheme) {
                case MuScheme::mu_zero:
                    params = asymptotics::params_from_mu(N, cfg.A, 0.0);
                    break;
                case MuScheme::mu_prop_eps:
                    params = asymptotics::params_from_mu(N, cfg.A, cfg.c * 2.0 / N);
                    break;
                case MuScheme::eta_const:
                    params = asymptotics::params_from_geometry(N, cfg.eta, cfg.A);
                    break;
            }
            row.epsilon = params.epsilon;
            row.mu = params.mu;
            row.eta = params.eta;

            const int orders[3] = {0, 3, 4};
            asymptotics::AsymptoticEigenvalue ev4 =
                asymptotics::eigenvalue_series(root, params, 4);
            for (int i = 0; i < 3; ++i)
                row.lambda_asym[i] =
                    asymptotics::eigenvalue_series(root, params, orders[i]).value;

            double width = std::max({0.02 * (1.0 + ev4.value),
                                     20.0 * std::abs(ev4.value - row.lambda_asym[0]), 1e-3});
            direct_solver::SolverConfig sc = direct_solver::make_config(
                params, cfg.n, direct_solver::SymmetryParity::cosine, ev4.value, width,
                cfg.quality);
            sc.seed = cfg.seed;
            sc.sigma_threshold = cfg.sigma_threshold;
            direct_solver::DirectEigenResult res = direct_solver::find_eigenvalue(sc);
            row.lambda_direct = res.lambda;
            row.sigma_min = res.sigma_min;
            for (int i = 0; i < 3; ++i)
                row.errors[i] = std::abs(row.lambda_direct - row.lambda_asym[i]);
            row.ok = true;
        } catch (const std::exception& e) {
            row.ok = false;
            row.message = e.what();
            ++report.failed;
        }
        report.rows.push_back(std::move(row));
    }

    fit_slopes(report);
    report.wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t_start)
                         .count();
    return report;
}

} // namespace diskspec::study
