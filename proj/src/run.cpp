#include "trendkit/run.hpp"
#include "trendkit/distributions.hpp"
#include "trendkit/polyk.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace trendkit {

namespace {

struct Frame {
    DoseDesign design;
    std::vector<int> group;  // per kept row
};

Frame build_design(const Dataset& ds) {
    std::map<double, int> counts;
    for (const auto& row : ds.rows) counts[row.dose] += 1;
    if (counts.size() < 2)
        throw std::invalid_argument("analysis: at least 2 distinct dose groups required");
    std::vector<double> doses;
    std::vector<int> n;
    std::map<double, int> index;
    for (const auto& [dose, count] : counts) {
        index[dose] = static_cast<int>(doses.size());
        doses.push_back(dose);
        n.push_back(count);
    }
    Frame frame{DoseDesign::from_doses(std::move(doses), std::move(n)), {}};
    frame.group.reserve(ds.rows.size());
    for (const auto& row : ds.rows) frame.group.push_back(index[row.dose]);
    return frame;
}

Eigen::MatrixXd covariate_block(const Dataset& ds) {
    const auto m = ds.schema.covariates.size();
    Eigen::MatrixXd covs(static_cast<Eigen::Index>(ds.rows.size()),
                         static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < ds.rows.size(); ++i)
        for (std::size_t c = 0; c < m; ++c)
            covs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
                ds.rows[i].covariates[c];
    return covs;
}

InferenceOptions make_inference_options(const RunOptions& opt) {
    InferenceOptions io;
    io.vcov = parse_vcov(opt.vcov);
    io.alternative = parse_alternative(opt.alternative);
    io.alpha = opt.alpha;
    io.df_rule = DfRule::parse(opt.df_rule);
    io.mvt_tol = opt.mvt_tol;
    io.seed = opt.seed;
    io.ctype = parse_ctype(opt.ctype);
    io.scalings.clear();
    for (const auto& s : opt.scalings) io.scalings.push_back(parse_scaling(s));
    return io;
}

Family make_family(const RunOptions& opt) {
    Family fam;
    if (opt.family == "binomial-logit") fam = Family::binomial_logit();
    else if (opt.family == "binomial-identity") fam = Family::binomial_identity();
    else if (opt.family == "poisson") fam = Family::poisson_log();
    else throw UsageError("unknown family: " + opt.family);
    if (opt.dispersion == "pearson") fam.dispersion_mode = DispersionMode::pearson;
    else if (opt.dispersion != "fixed") throw UsageError("unknown dispersion: " + opt.dispersion);
    return fam;
}

ScalarTest glm_high_vs_control(const GlmTrendData& data, const DoseDesign& design,
                               const Family& family, const InferenceOptions& options) {
    InferenceOptions sub = options;
    sub.scalings = {Scaling::treat};
    sub.ctype = ContrastType::dunnett;
    MarginalSet set = glm_marginal_set(data, design, family, sub);
    const MarginalModel& m = set.models.back();  // highest dose vs control
    ScalarTest st;
    st.label = m.label;
    st.estimate = m.estimate;
    st.std_error = std::sqrt(m.variance);
    st.t = m.estimate / st.std_error;
    st.df = m.df;
    double cdf = m.df > 0 ? t_cdf(st.t, m.df) : norm_cdf(st.t);
    switch (options.alternative) {
        case Alternative::greater: st.p = 1.0 - cdf; break;
        case Alternative::less: st.p = cdf; break;
        case Alternative::two_sided:
            st.p = 2.0 * (m.df > 0 ? 1.0 - t_cdf(std::fabs(st.t), m.df)
                                   : 1.0 - norm_cdf(std::fabs(st.t)));
            break;
    }
    return st;
}

DownturnReport downturn_report(const DownturnDecision& d) {
    DownturnReport r;
    r.trend_significant = d.trend_significant;
    r.high_vs_control_significant = d.high_vs_control_significant;
    r.claim_monotone = d.claim_monotone;
    r.min_adjusted_p = d.min_adjusted_p;
    r.high_label = d.high_vs_control.label;
    r.high_t = d.high_vs_control.t;
    r.high_p = d.high_vs_control.p;
    return r;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

void echo_options(Report& report, const RunOptions& opt) {
    report.options["data"] = opt.data;
    report.options["family"] = opt.family;
    report.options["scaling"] = join(opt.scalings, ",");
    report.options["ctype"] = opt.ctype;
    report.options["vcov"] = opt.vcov;
    report.options["alternative"] = opt.alternative;
    report.options["alpha"] = std::to_string(opt.alpha);
    report.options["dispersion"] = opt.dispersion;
    report.options["df_rule"] = opt.df_rule;
    report.options["add1"] = opt.add1 ? "true" : "false";
    if (!opt.polyk.empty()) {
        std::vector<std::string> ks;
        for (double k : opt.polyk) ks.push_back(format_dose(k));
        report.options["polyk"] = join(ks, ",");
        if (opt.tmax > 0.0) report.options["tmax"] = format_dose(opt.tmax);
    }
    if (!opt.schema.response.empty()) report.options["response"] = opt.schema.response;
    if (!opt.schema.tumor.empty()) report.options["tumor"] = opt.schema.tumor;
    if (!opt.schema.trials.empty()) report.options["trials"] = opt.schema.trials;
    if (!opt.schema.time.empty()) report.options["time"] = opt.schema.time;
    if (!opt.schema.covariates.empty())
        report.options["covariates"] = join(opt.schema.covariates, ",");
    report.options["dose"] = opt.schema.dose;
}

void validate_options(const RunOptions& opt) {
    if (opt.data.empty()) throw UsageError("--data is required");
    if (!(opt.alpha > 0.0 && opt.alpha < 1.0))
        throw UsageError("--alpha must lie strictly between 0 and 1");
    if (!(opt.mvt_tol > 0.0)) throw UsageError("--mvt-tol must be positive");
    if (!opt.polyk.empty()) {
        if (opt.schema.time.empty())
            throw UsageError("--polyk requires a --time column");
        if (opt.schema.tumor.empty())
            throw UsageError("--polyk requires a --tumor column");
        if (opt.family != "binomial-identity" && opt.family != "gaussian")
            throw UsageError("--polyk implies family binomial-identity");
        for (double k : opt.polyk)
            if (!(k > 0.0)) throw UsageError("--polyk exponents must be positive");
        if (opt.add1) throw UsageError("--add1 is not available with --polyk");
    } else if (opt.family == "gaussian" || opt.family == "poisson") {
        if (opt.schema.response.empty())
            throw UsageError("family " + opt.family + " requires a --response column");
        if (opt.add1) throw UsageError("--add1 applies to binomial families only");
    } else if (opt.family == "binomial-logit" || opt.family == "binomial-identity") {
        if (opt.schema.tumor.empty())
            throw UsageError("family " + opt.family + " requires a --tumor column");
    } else {
        throw UsageError("unknown family: " + opt.family);
    }
    if (opt.scalings.empty()) throw UsageError("at least one --scaling required");
    // spelling of enum-valued flags is validated before any computation
    for (const auto& s : opt.scalings) parse_scaling(s);
    parse_ctype(opt.ctype);
    parse_vcov(opt.vcov);
    parse_alternative(opt.alternative);
    DfRule::parse(opt.df_rule);
    if (opt.dispersion != "fixed" && opt.dispersion != "pearson")
        throw UsageError("unknown dispersion: " + opt.dispersion);
}

} // namespace

Dataset load_dataset(const std::string& data, const IngestSchema& schema) {
    if (const char* csv = embedded_dataset_csv(data))
        return ingest_csv_text(csv, data, schema);
    return ingest_csv_file(data, schema);
}

Report run_trend(const RunOptions& opt) {
    validate_options(opt);
    Dataset ds = load_dataset(opt.data, opt.schema);

    Report report;
    report.dataset_name = ds.name;
    report.dataset_hash = ds.hash_hex;
    report.rows_used = static_cast<int>(ds.rows.size());
    report.rows_total = ds.total_data_rows;
    report.rejected = ds.rejected;
    echo_options(report, opt);

    InferenceOptions io = make_inference_options(opt);
    Frame frame = build_design(ds);
    const auto n = static_cast<Eigen::Index>(ds.rows.size());

    if (!opt.polyk.empty()) {
        PolyKData pk;
        pk.t_max = opt.tmax;
        for (const auto& row : ds.rows) {
            PolyKRecord rec;
            rec.dose = row.dose;
            rec.time = *row.time;
            rec.tumor = static_cast<int>(*row.tumor);
            pk.records.push_back(rec);
        }
        JointInference inf = polyk_trend(pk, opt.polyk, io);
        attach_inference(report, inf, "");
        return report;
    }

    if (opt.family == "gaussian") {
        GroupedData gd;
        gd.y.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) gd.y[i] = *ds.rows[i].response;
        gd.group = frame.group;
        gd.covariates = covariate_block(ds);
        JointInference inf = tukey_williams_joint(gd, frame.design, io);
        attach_inference(report, inf, "");
        if (frame.design.k() >= 1 && io.alternative != Alternative::two_sided) {
            ScalarTest high = high_vs_control_test(gd, frame.design, io.vcov,
                                                   io.alternative);
            report.downturn = downturn_report(downturn_guard(inf, high, io.alpha));
        }
        return report;
    }

    // GLM families
    Family fam = make_family(opt);
    GlmTrendData gt;
    gt.group = frame.group;
    gt.covariates = covariate_block(ds);
    gt.y.resize(n);
    if (opt.family == "poisson") {
        for (Eigen::Index i = 0; i < n; ++i) gt.y[i] = *ds.rows[i].response;
    } else {
        gt.y.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) gt.y[i] = *ds.rows[i].tumor;
        if (!opt.schema.trials.empty()) {
            gt.trials.resize(n);
            for (Eigen::Index i = 0; i < n; ++i) gt.trials[i] = *ds.rows[i].trials;
        }
        if (opt.add1) {
            // the correction operates on per-group totals: needs one row per group
            std::set<int> seen;
            for (int g : gt.group)
                if (!seen.insert(g).second)
                    throw std::invalid_argument(
                        "add-1 correction requires one row per dose group; "
                        "aggregate the data first");
            if (gt.covariates.cols() > 0)
                throw std::invalid_argument("add-1 correction cannot be combined with covariates");
            std::vector<double> succ(gt.y.data(), gt.y.data() + n);
            std::vector<double> tri(n, 1.0);
            if (gt.trials.size())
                tri.assign(gt.trials.data(), gt.trials.data() + n);
            auto [s2, t2] = add1_correction(succ, tri);
            for (Eigen::Index i = 0; i < n; ++i) {
                gt.y[i] = s2[static_cast<std::size_t>(i)];
                if (!gt.trials.size()) gt.trials = Eigen::VectorXd::Ones(n);
                gt.trials[i] = t2[static_cast<std::size_t>(i)];
            }
        }
    }
    JointInference inf = tukey_williams_glm(gt, frame.design, fam, io);
    std::string effect_type;
    if (fam.link == LinkKind::logit) effect_type = "odds-ratio";
    if (fam.link == LinkKind::log_link) effect_type = "rate-ratio";
    attach_inference(report, inf, effect_type);
    if (frame.design.k() >= 1 && io.alternative != Alternative::two_sided) {
        ScalarTest high = glm_high_vs_control(gt, frame.design, fam, io);
        report.downturn = downturn_report(downturn_guard(inf, high, io.alpha));
    }
    return report;
}

} // namespace trendkit
