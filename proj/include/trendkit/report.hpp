#pragma once

// Analysis reports and their renderings. JSON output is deterministic:
// fixed key order, numbers rounded to 10 significant digits.

#include "trendkit/dataset.hpp"
#include "trendkit/inference.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace trendkit {

inline constexpr const char* kToolVersion = "0.1.0";

struct ReportRow {
    std::string label;
    double estimate = 0.0;
    double std_error = 0.0;
    double t = 0.0;
    double adjusted_p = 1.0;
    double lower = std::numeric_limits<double>::quiet_NaN();
    double upper = std::numeric_limits<double>::quiet_NaN();
    // effect on a transformed scale (e.g. odds ratio), when applicable
    std::string effect_type;  // "" when the estimate itself is the effect
    double effect = std::numeric_limits<double>::quiet_NaN();
    double effect_lower = std::numeric_limits<double>::quiet_NaN();
    double effect_upper = std::numeric_limits<double>::quiet_NaN();
};

struct DownturnReport {
    bool trend_significant = false;
    bool high_vs_control_significant = false;
    bool claim_monotone = false;
    double min_adjusted_p = 1.0;
    std::string high_label;
    double high_t = 0.0;
    double high_p = 1.0;
};

struct Report {
    std::string tool_version = kToolVersion;
    std::string dataset_name;
    std::string dataset_hash;
    std::map<std::string, std::string> options;  // flag echo, sorted by key
    std::uint64_t seed = 42;
    double mvt_tol = 1e-4;
    double max_mvt_error = 0.0;
    std::string alternative = "greater";
    double alpha = 0.05;
    int df = 0;  // 0 = asymptotic
    double critical_value = std::numeric_limits<double>::quiet_NaN();
    std::vector<ReportRow> rows;
    std::optional<DownturnReport> downturn;
    int rows_used = 0;
    int rows_total = 0;
    std::vector<RejectedRow> rejected;
};

// paper-style table: Model | Estimate | SE | Statistic | p | bound
std::string render_text(const Report& report);
// one row per comparison
std::string render_csv(const Report& report);
// deterministic JSON, 10 significant digits
std::string render_json(const Report& report);

// fills rows/df/critical value/... from a JointInference
void attach_inference(Report& report, const JointInference& inf,
                      const std::string& effect_type);

} // namespace trendkit
