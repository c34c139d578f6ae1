#pragma once

#include "diskspec/asymptotics.hpp"
#include "diskspec/limiting.hpp"
#include "diskspec/study.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace diskspec::json_io {

using ordered_json = nlohmann::ordered_json;

ordered_json limiting_spectrum_json(double A, double lambda_max,
                                    const std::vector<limiting::LimitingEigenvalue>& spectrum,
                                    const std::vector<limiting::RobinRoot>& roots);

ordered_json asymptotic_eigenvalue_json(const asymptotics::AsymptoticEigenvalue& ev);

ordered_json degeneracy_certificate_json(const limiting::DegeneracyCertificate& cert);

ordered_json study_report_json(const study::StudyReport& report);

struct LayerCheck {
    std::string name;
    double value = 0.0;
    double expected = 0.0;
    double tol = 0.0;
    bool pass = false;
};

ordered_json layer_check_json(const std::vector<LayerCheck>& checks);

/// Canonical serialization: two-space indent plus trailing newline, keys in
/// insertion order. Parse + re-emit of a canonical document is byte-stable.
std::string canonical_dump(const ordered_json& j);

} // namespace diskspec::json_io
