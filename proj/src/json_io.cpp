#include "diskspec/json_io.hpp"

#include <cmath>

namespace diskspec::json_io {

namespace {

ordered_json params_json(const asymptotics::PerturbationParams& p) {
    return ordered_json{{"N", p.N},  {"epsilon", p.epsilon}, {"eta", p.eta},
                        {"A", p.A},  {"mu", p.mu}};
}

ordered_json root_json(const limiting::RobinRoot& r) {
    return ordered_json{{"n", r.n}, {"k", r.k}, {"t0", r.t0}, {"lambda0", r.lambda0}, {"A", r.A}};
}

} // namespace

ordered_json limiting_spectrum_json(double A, double lambda_max,
                                    const std::vector<limiting::LimitingEigenvalue>& spectrum,
                                    const std::vector<limiting::RobinRoot>& roots) {
    ordered_json evs = ordered_json::array();
    for (const auto& ev : spectrum) {
        ordered_json contributors = ordered_json::array();
        for (const auto& [n, k] : ev.contributors) {
            double t0 = std::sqrt(ev.lambda0);
            for (const auto& r : roots)
                if (r.n == n && r.k == k) t0 = r.t0;
            contributors.push_back(ordered_json{{"n", n}, {"k", k}, {"t0", t0}});
        }
        evs.push_back(ordered_json{{"lambda0", ev.lambda0},
                                   {"multiplicity", ev.multiplicity},
                                   {"contributors", contributors}});
    }
    return ordered_json{{"schema", "limiting_spectrum.v1"},
                        {"A", A},
                        {"lambda_max", lambda_max},
                        {"eigenvalues", evs}};
}

ordered_json asymptotic_eigenvalue_json(const asymptotics::AsymptoticEigenvalue& ev) {
    return ordered_json{
        {"schema", "asymptotic_eigenvalue.v1"},
        {"params", params_json(ev.params)},
        {"root", root_json(ev.root)},
        {"order", ev.order},
        {"Lambda0", ev.Lambda0},
        {"Lambda3", ev.Lambda3},
        {"Lambda4", ev.Lambda4},
        {"value", ev.value},
        {"remainder", ordered_json{{"exponent", ev.remainder_order},
                                   {"factor", ev.remainder_factor},
                                   {"factor_is_mu_only", ev.params.A == 0.0}}},
        {"predicted_multiplicity", ev.predicted_multiplicity},
        {"flags", ordered_json{{"lambda3_negative", ev.Lambda3 < 0.0},
                               {"lambda4_positive", ev.Lambda4 > 0.0}}}};
}

ordered_json degeneracy_certificate_json(const limiting::DegeneracyCertificate& cert) {
    return ordered_json{{"schema", "degeneracy_certificate.v1"},
                        {"n", cert.n},
                        {"m", cert.m},
                        {"bracket", ordered_json::array({cert.bracket.first, cert.bracket.second})},
                        {"t0", cert.t0},
                        {"lambda0", cert.t0 * cert.t0},
                        {"A", cert.A},
                        {"residual_n", cert.residual_n},
                        {"residual_m", cert.residual_m}};
}

ordered_json study_report_json(const study::StudyReport& report) {
    const char* scheme = "mu0";
    if (report.config.scheme == study::MuScheme::mu_prop_eps) scheme = "mu_prop_eps";
    if (report.config.scheme == study::MuScheme::eta_const) scheme = "eta_const";

    ordered_json rows = ordered_json::array();
    for (const auto& r : report.rows) {
        ordered_json row{{"N", r.N},       {"epsilon", r.epsilon}, {"mu", r.mu},
                         {"eta", r.eta},   {"ok", r.ok}};
        if (r.ok) {
            row["lambda_direct"] = r.lambda_direct;
            row["sigma_min"] = r.sigma_min;
            row["lambda_asym"] = ordered_json{{"order0", r.lambda_asym[0]},
                                              {"order3", r.lambda_asym[1]},
                                              {"order4", r.lambda_asym[2]}};
            row["errors"] = ordered_json{{"order0", r.errors[0]},
                                         {"order3", r.errors[1]},
                                         {"order4", r.errors[2]}};
        } else {
            row["message"] = r.message;
        }
        rows.push_back(row);
    }
    return ordered_json{
        {"schema", "study_report.v1"},
        {"study", ordered_json{{"A", report.config.A},
                               {"n", report.config.n},
                               {"k", report.config.k},
                               {"mu_scheme", scheme},
                               {"c", report.config.c},
                               {"eta", report.config.eta},
                               {"seed", report.config.seed},
                               {"quality", report.config.quality},
                               {"sigma_threshold", report.config.sigma_threshold}}},
        {"rows", rows},
        {"slopes", ordered_json{{"order0", report.slopes[0]},
                                {"order3", report.slopes[1]},
                                {"order4", report.slopes[2]}}},
        {"meta", ordered_json{{"failed_rows", report.failed}, {"wall_ms", report.wall_ms}}}};
}

ordered_json layer_check_json(const std::vector<LayerCheck>& checks) {
    ordered_json arr = ordered_json::array();
    bool all = true;
    for (const auto& c : checks) {
        arr.push_back(ordered_json{{"name", c.name},
                                   {"value", c.value},
                                   {"expected", c.expected},
                                   {"abs_error", std::abs(c.value - c.expected)},
                                   {"tol", c.tol},
                                   {"pass", c.pass}});
        all = all && c.pass;
    }
    return ordered_json{{"schema", "layer_check.v1"}, {"checks", arr}, {"all_pass", all}};
}

std::string canonical_dump(const ordered_json& j) {
    return j.dump(2) + "\n";
}

} // namespace diskspec::json_io
