#include "trendkit/report.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>

namespace trendkit {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt(double v, const char* spec) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

// round through a 10-significant-digit decimal representation so the
// serialized report parses back to exactly the numbers it prints
double round10(double v) {
    if (!std::isfinite(v)) return v;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return std::strtod(buf, nullptr);
}

ordered_json json_number(double v) {
    if (std::isnan(v)) return nullptr;
    return round10(v);
}

} // namespace

void attach_inference(Report& report, const JointInference& inf,
                      const std::string& effect_type) {
    report.alternative = alternative_name(inf.alternative);
    report.alpha = inf.alpha;
    report.df = inf.df;
    report.critical_value = inf.critical_value;
    report.seed = inf.seed;
    report.mvt_tol = inf.mvt_tol;
    report.max_mvt_error = inf.max_mvt_error;
    for (Eigen::Index j = 0; j < inf.size(); ++j) {
        ReportRow row;
        row.label = inf.labels[j];
        row.estimate = inf.estimates[j];
        row.std_error = inf.std_errors[j];
        row.t = inf.t_stats[j];
        row.adjusted_p = inf.adjusted_p[j];
        row.lower = inf.lower_bounds[j];
        row.upper = inf.upper_bounds[j];
        if (effect_type == "odds-ratio" || effect_type == "rate-ratio") {
            row.effect_type = effect_type;
            row.effect = std::exp(row.estimate);
            if (!std::isnan(row.lower)) row.effect_lower = std::exp(row.lower);
            if (!std::isnan(row.upper)) row.effect_upper = std::exp(row.upper);
        }
        report.rows.push_back(std::move(row));
    }
}

std::string render_text(const Report& report) {
    std::ostringstream out;
    out << "trendkit " << report.tool_version << " | dataset " << report.dataset_name
        << " (" << report.rows_used << "/" << report.rows_total << " rows)\n";
    out << "alternative=" << report.alternative << " alpha=" << fmt(report.alpha, "%g")
        << " df=" << (report.df > 0 ? std::to_string(report.df) : std::string("asympt"))
        << " seed=" << report.seed << " mvt-tol=" << fmt(report.mvt_tol, "%g") << "\n";

    std::size_t width = 5;
    for (const auto& r : report.rows) width = std::max(width, r.label.size());

    const bool have_lower = std::any_of(report.rows.begin(), report.rows.end(),
                                        [](const ReportRow& r) { return !std::isnan(r.lower); });
    const bool have_upper = std::any_of(report.rows.begin(), report.rows.end(),
                                        [](const ReportRow& r) { return !std::isnan(r.upper); });

    out << "\n";
    char head[256];
    std::snprintf(head, sizeof(head), "%-*s %10s %9s %10s %9s", static_cast<int>(width),
                  "Model", "Estimate", "SE", "Statistic", "p-value");
    out << head;
    if (have_lower) out << "      lower";
    if (have_upper) out << "      upper";
    out << "\n";
    for (const auto& r : report.rows) {
        char line[512];
        std::snprintf(line, sizeof(line), "%-*s %10.3f %9.3f %10.3f %9.4f",
                      static_cast<int>(width), r.label.c_str(), r.estimate, r.std_error,
                      r.t, r.adjusted_p);
        out << line;
        if (have_lower)
            out << (std::isnan(r.lower) ? "          -" : fmt(r.lower, " %10.3f"));
        if (have_upper)
            out << (std::isnan(r.upper) ? "          -" : fmt(r.upper, " %10.3f"));
        out << "\n";
    }
    if (!std::isnan(report.critical_value))
        out << "\ncritical value (equicoordinate, 1-alpha="
            << fmt(1.0 - report.alpha, "%g") << "): " << fmt(report.critical_value, "%.4f")
            << "\n";
    if (report.downturn) {
        const auto& d = *report.downturn;
        out << "downturn guard: trend "
            << (d.trend_significant ? "significant" : "not significant")
            << " (min adj p=" << fmt(d.min_adjusted_p, "%.4f") << "), " << d.high_label
            << " " << (d.high_vs_control_significant ? "significant" : "not significant")
            << " (p=" << fmt(d.high_p, "%.4f") << ") -> "
            << (d.claim_monotone ? "monotone trend claimed"
                                 : "no monotone-trend claim")
            << "\n";
    }
    for (const auto& rej : report.rejected)
        out << "rejected row (line " << rej.line << "): " << rej.reason << "\n";
    return out.str();
}

std::string render_csv(const Report& report) {
    std::ostringstream out;
    out << "label,estimate,std_error,statistic,adjusted_p,lower,upper,effect_type,"
           "effect,effect_lower,effect_upper\n";
    auto cell = [&](double v) {
        return std::isnan(v) ? std::string() : fmt(round10(v), "%.10g");
    };
    for (const auto& r : report.rows) {
        std::string label = r.label;
        if (label.find(',') != std::string::npos || label.find('"') != std::string::npos) {
            std::string quoted = "\"";
            for (char c : label) {
                if (c == '"') quoted += '"';
                quoted += c;
            }
            quoted += '"';
            label = quoted;
        }
        out << label << ',' << cell(r.estimate) << ',' << cell(r.std_error) << ','
            << cell(r.t) << ',' << cell(r.adjusted_p) << ',' << cell(r.lower) << ','
            << cell(r.upper) << ',' << r.effect_type << ',' << cell(r.effect) << ','
            << cell(r.effect_lower) << ',' << cell(r.effect_upper) << "\n";
    }
    return out.str();
}

std::string render_json(const Report& report) {
    ordered_json j;
    j["tool"] = "trendkit";
    j["version"] = report.tool_version;
    j["dataset"] = {{"name", report.dataset_name},
                    {"hash", report.dataset_hash},
                    {"rows_used", report.rows_used},
                    {"rows_total", report.rows_total}};
    ordered_json rejected = ordered_json::array();
    for (const auto& r : report.rejected)
        rejected.push_back({{"line", r.line}, {"reason", r.reason}});
    j["dataset"]["rejected"] = rejected;
    ordered_json opts = ordered_json::object();
    for (const auto& [k, v] : report.options) opts[k] = v;
    j["options"] = opts;
    j["seed"] = report.seed;
    j["mvt_tol"] = json_number(report.mvt_tol);
    j["max_mvt_error"] = json_number(report.max_mvt_error);
    j["alternative"] = report.alternative;
    j["alpha"] = json_number(report.alpha);
    j["df"] = report.df;
    j["critical_value"] = json_number(report.critical_value);
    ordered_json rows = ordered_json::array();
    for (const auto& r : report.rows) {
        ordered_json row;
        row["label"] = r.label;
        row["estimate"] = json_number(r.estimate);
        row["std_error"] = json_number(r.std_error);
        row["statistic"] = json_number(r.t);
        row["adjusted_p"] = json_number(r.adjusted_p);
        row["lower"] = json_number(r.lower);
        row["upper"] = json_number(r.upper);
        if (!r.effect_type.empty()) {
            row["effect_type"] = r.effect_type;
            row["effect"] = json_number(r.effect);
            row["effect_lower"] = json_number(r.effect_lower);
            row["effect_upper"] = json_number(r.effect_upper);
        }
        rows.push_back(row);
    }
    j["comparisons"] = rows;
    if (report.downturn) {
        const auto& d = *report.downturn;
        j["downturn_guard"] = {{"trend_significant", d.trend_significant},
                               {"min_adjusted_p", json_number(d.min_adjusted_p)},
                               {"high_vs_control", d.high_label},
                               {"high_statistic", json_number(d.high_t)},
                               {"high_p", json_number(d.high_p)},
                               {"high_significant", d.high_vs_control_significant},
                               {"claim_monotone", d.claim_monotone}};
    }
    return j.dump(2) + "\n";
}

} // namespace trendkit
