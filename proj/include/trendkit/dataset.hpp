#pragma once

// CSV ingestion (RFC 4180) into a typed long-format dataset, with
// per-row rejection accounting and embedded example datasets.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace trendkit {

struct IngestSchema {
    std::string dose = "dose";  // required
    std::string response;       // optional column names; empty = unused
    std::string tumor;
    std::string trials;
    std::string time;
    std::string study;
    std::vector<std::string> covariates;
};

struct DataRow {
    int line = 0;  // 1-based source line
    double dose = 0.0;
    std::optional<double> response;
    std::optional<double> tumor;
    std::optional<double> trials;
    std::optional<double> time;
    std::string study;
    std::vector<double> covariates;
};

struct RejectedRow {
    int line = 0;
    std::string reason;
};

struct Dataset {
    std::string name;
    std::string hash_hex;  // FNV-1a 64 of the raw bytes
    IngestSchema schema;
    std::vector<DataRow> rows;
    std::vector<RejectedRow> rejected;
    int total_data_rows = 0;  // rows used + rows rejected
};

// Structured ingestion failure carrying a 1-based line number (0 = file level).
class IngestError : public std::exception {
  public:
    IngestError(int line, std::string message);
    const char* what() const noexcept override { return full_.c_str(); }
    int line;
    std::string message;

  private:
    std::string full_;
};

Dataset ingest_csv_file(const std::string& path, const IngestSchema& schema);
Dataset ingest_csv_text(const std::string& text, const std::string& name,
                        const IngestSchema& schema);

// Embedded example datasets ("bun", "glyphosate"); nullptr when unknown.
const char* embedded_dataset_csv(const std::string& name);
std::vector<std::string> embedded_dataset_names();

// Low-level CSV access (used by ingestion and tests).
std::vector<std::vector<std::string>> parse_csv(const std::string& text,
                                                std::vector<int>* line_numbers);

} // namespace trendkit
