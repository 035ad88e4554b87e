#pragma once

#include "sinrldp/detection.hpp"
#include "sinrldp/harness.hpp"
#include "sinrldp/information.hpp"
#include "sinrldp/measures.hpp"
#include "sinrldp/realization.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace sinrldp {

/// Current binary format version shared by every file kind.
inline constexpr std::uint32_t kFormatVersion = 1;

/// Binary layout, little-endian throughout:
///   "SINRLDP" | u32 version | u8 kind | header block | body
/// Realization body: u64 N, u64 E, N records of (d f64 coordinates + f64 mark),
/// E records of two u32 indices with the smaller first.
enum class FileKind : std::uint8_t {
    realization = 1,
    measure = 2,
    pair_measure = 3,
    estimate = 4,
};

std::vector<std::uint8_t> encode_realization(const SinrRealization& y);
/// Throws FormatError (with byte offset) on malformed input and ValidationError when the
/// decoded realization breaks an invariant.
SinrRealization decode_realization(std::span<const std::uint8_t> bytes);

void save_realization(const SinrRealization& y, const std::filesystem::path& path);
SinrRealization load_realization(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_measure(const BinnedMeasure& m);
std::vector<std::uint8_t> encode_measure(const BinnedPairMeasure& m);
void save_measure(const BinnedMeasure& m, const std::filesystem::path& path);
void save_measure(const BinnedPairMeasure& m, const std::filesystem::path& path);
BinnedMeasure load_measure(const std::filesystem::path& path);
BinnedPairMeasure load_pair_measure(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_estimate(const EstimatedModel& m);
EstimatedModel decode_estimate(std::span<const std::uint8_t> bytes);
void save_estimate(const EstimatedModel& m, const std::filesystem::path& path);
EstimatedModel load_estimate(const std::filesystem::path& path);

/// Header row then one row per cell: cell, spatial, mark, lower_i, upper_i..., mark_lower, mark_upper, weight.
std::string measure_csv(const BinnedMeasure& m);
/// One row per ordered cell pair: x, y, bounds of x, bounds of y, weight. Zero rows are skipped
/// unless `dense`.
std::string measure_csv(const BinnedPairMeasure& m, bool dense = false);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path& path, std::string_view text);
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

/// One line of the report stream. Non-finite numbers are written as the strings "inf", "-inf"
/// or "nan"; doubles use shortest round-trip formatting.
struct RateRecord {
    std::uint64_t seed = 0;
    double lambda = 0.0;
    RateReport report;
    double aep_statistic = 0.0;
    bool has_aep = false;

    friend bool operator==(const RateRecord&, const RateRecord&) = default;
};

std::string to_json_line(const RateRecord& r);
RateRecord parse_rate_record(std::string_view line);
std::string to_json_line(const DetectionReport& r);
DetectionReport parse_detection_report(std::string_view line);

struct TrendFiles {
    std::filesystem::path summary;  ///< <experiment>_summary.json
    std::filesystem::path records;  ///< <experiment>_records.jsonl
    std::filesystem::path csv;      ///< <experiment>.csv: rung, lambda, statistic, quantiles
};

std::string trend_summary_json(const TrendResult& r);
std::string trend_records_jsonl(const TrendResult& r);
std::string trend_csv(const TrendResult& r);
/// `stem` defaults to r.experiment.
TrendFiles write_trend(const TrendResult& r, const std::filesystem::path& dir, const std::string& stem = "");

}  // namespace sinrldp
