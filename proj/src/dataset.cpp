#include "trendkit/dataset.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace trendkit {

IngestError::IngestError(int line_no, std::string msg)
    : line(line_no), message(std::move(msg)) {
    full_ = line > 0 ? "line " + std::to_string(line) + ": " + message : message;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text,
                                                std::vector<int>* line_numbers) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_was_quoted = false;
    int line = 1;
    int record_start_line = 1;

    auto end_field = [&]() {
        record.push_back(field);
        field.clear();
        field_was_quoted = false;
    };
    auto end_record = [&]() {
        end_field();
        // skip records that are entirely empty (e.g. trailing newline)
        bool all_empty = std::all_of(record.begin(), record.end(),
                                     [](const std::string& s) { return s.empty(); });
        if (!(record.size() == 1 && all_empty)) {
            records.push_back(record);
            if (line_numbers) line_numbers->push_back(record_start_line);
        }
        record.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
        } else if (c == '"' && field.empty() && !field_was_quoted) {
            in_quotes = true;
            field_was_quoted = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\r') {
            // swallow; newline handling follows
        } else if (c == '\n') {
            end_record();
            ++line;
            record_start_line = line;
        } else {
            field += c;
        }
    }
    if (in_quotes) throw IngestError(line, "unterminated quoted field");
    if (!field.empty() || !record.empty()) end_record();
    return records;
}

namespace {

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// strict numeric parse; nullopt for empty, throws IngestError otherwise
std::optional<double> parse_number(const std::string& cell, int line,
                                   const std::string& column) {
    std::string s = cell;
    // trim surrounding whitespace
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t");
    s = (b == std::string::npos) ? "" : s.substr(b, e - b + 1);
    if (s.empty()) return std::nullopt;
    errno = 0;
    char* endp = nullptr;
    double v = std::strtod(s.c_str(), &endp);
    if (endp == s.c_str() || *endp != '\0' || errno == ERANGE)
        throw IngestError(line, "non-numeric value '" + cell + "' in column '" + column + "'");
    return v;
}

} // namespace

Dataset ingest_csv_text(const std::string& text, const std::string& name,
                        const IngestSchema& schema) {
    if (schema.dose.empty())
        throw std::invalid_argument("ingest: a dose column name is required");

    Dataset ds;
    ds.name = name;
    ds.hash_hex = fnv1a_hex(text);
    ds.schema = schema;

    std::vector<int> lines;
    auto records = parse_csv(text, &lines);
    if (records.empty()) throw IngestError(0, "empty file: no header row");

    const auto& header = records[0];
    auto col_index = [&](const std::string& col) -> int {
        auto it = std::find(header.begin(), header.end(), col);
        return it == header.end() ? -1 : static_cast<int>(it - header.begin());
    };
    auto require_col = [&](const std::string& col) {
        int idx = col_index(col);
        if (idx < 0) throw IngestError(lines[0], "missing required column '" + col + "'");
        return idx;
    };

    const int dose_idx = require_col(schema.dose);
    const int response_idx = schema.response.empty() ? -1 : require_col(schema.response);
    const int tumor_idx = schema.tumor.empty() ? -1 : require_col(schema.tumor);
    const int trials_idx = schema.trials.empty() ? -1 : require_col(schema.trials);
    const int time_idx = schema.time.empty() ? -1 : require_col(schema.time);
    const int study_idx = schema.study.empty() ? -1 : col_index(schema.study);
    if (!schema.study.empty() && study_idx < 0)
        throw IngestError(lines[0], "missing required column '" + schema.study + "'");
    std::vector<int> cov_idx;
    for (const auto& c : schema.covariates) cov_idx.push_back(require_col(c));

    if (records.size() == 1) throw IngestError(lines[0], "empty dataset: header only");

    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        const int line = lines[r];
        ++ds.total_data_rows;
        if (rec.size() != header.size()) {
            ds.rejected.push_back({line, "expected " + std::to_string(header.size()) +
                                             " fields, found " + std::to_string(rec.size())});
            continue;
        }
        DataRow row;
        row.line = line;
        auto fetch = [&](int idx, const std::string& col) {
            return parse_number(rec[idx], line, col);
        };
        try {
            auto dose = fetch(dose_idx, schema.dose);
            if (!dose) {
                ds.rejected.push_back({line, "missing value in column '" + schema.dose + "'"});
                continue;
            }
            if (*dose < 0.0)
                throw IngestError(line, "negative dose " + std::to_string(*dose));
            row.dose = *dose;

            bool missing = false;
            auto required_value = [&](int idx, const std::string& col,
                                      std::optional<double>& slot) {
                if (idx < 0) return;
                slot = fetch(idx, col);
                if (!slot) {
                    ds.rejected.push_back({line, "missing value in column '" + col + "'"});
                    missing = true;
                }
            };
            required_value(response_idx, schema.response, row.response);
            if (missing) continue;
            required_value(tumor_idx, schema.tumor, row.tumor);
            if (missing) continue;
            required_value(trials_idx, schema.trials, row.trials);
            if (missing) continue;
            required_value(time_idx, schema.time, row.time);
            if (missing) continue;
            for (std::size_t c = 0; c < cov_idx.size(); ++c) {
                auto v = fetch(cov_idx[c], schema.covariates[c]);
                if (!v) {
                    ds.rejected.push_back(
                        {line, "missing value in column '" + schema.covariates[c] + "'"});
                    missing = true;
                    break;
                }
                row.covariates.push_back(*v);
            }
            if (missing) continue;
            if (study_idx >= 0) row.study = rec[study_idx];
        } catch (const IngestError&) {
            throw;  // malformed numerics are hard errors, not rejections
        }
        ds.rows.push_back(std::move(row));
    }
    if (ds.rows.empty())
        throw IngestError(0, "empty dataset: no usable rows (" +
                                 std::to_string(ds.rejected.size()) + " rejected)");
    return ds;
}

Dataset ingest_csv_file(const std::string& path, const IngestSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError(0, "cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ingest_csv_text(ss.str(), path, schema);
}

} // namespace trendkit
