#pragma once

// End-to-end analysis runs: dataset resolution, option validation,
// pipeline dispatch, report assembly. The CLI is a thin wrapper over
// run_trend().

#include "trendkit/report.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace trendkit {

// Invalid flag combinations; the CLI maps this to exit code 1.
class UsageError : public std::runtime_error {
  public:
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

struct RunOptions {
    std::string data;  // embedded dataset name, or a CSV path
    IngestSchema schema;
    std::string family = "gaussian";  // gaussian | binomial-logit |
                                      // binomial-identity | poisson
    std::vector<std::string> scalings = {"ari", "ord", "arilog", "treat"};
    std::string ctype = "williams";
    std::string vcov = "hc0";
    std::string alternative = "greater";
    double alpha = 0.05;
    std::string dispersion = "fixed";  // fixed | pearson
    bool add1 = false;
    std::vector<double> polyk;  // poly-k exponents; empty = no adjustment
    double tmax = 0.0;          // 0 = max observed time
    std::string df_rule = "min-marginal";
    std::uint64_t seed = 42;
    double mvt_tol = 1e-4;
};

Report run_trend(const RunOptions& options);

// resolves embedded names first, then filesystem paths
Dataset load_dataset(const std::string& data, const IngestSchema& schema);

} // namespace trendkit
