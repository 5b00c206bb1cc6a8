#pragma once

#include "hetnet/harness.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace hetnet {

inline constexpr std::string_view kToolName = "hetnet-sim";
inline constexpr std::string_view kToolVersion = "0.1.0";

inline constexpr std::string_view kCsvHeader =
    "experiment,sweep_param,sweep_value,algorithm,scheme,direction,seed_count,hpue_outage,lpue_outage,"
    "agg_power_w,agg_throughput_bps_hz,spectral_eff_bps_hz,convergence_rate";

/// CSV text (header plus one line per row). Absent outage ratios are empty fields.
std::string report_csv(const MetricsReport& report);
/// JSON summary: tool, version, experiment, resolved config, rows.
std::string report_json(const MetricsReport& report);

/// Writes results.csv, summary.json and curves/<algorithm>_<scheme>_<metric>.xy
/// into `out_dir` (created if missing). Each file is written to a temporary
/// name and renamed into place. Returns the written paths.
std::vector<std::filesystem::path> emit_report(const MetricsReport& report, const std::filesystem::path& out_dir);

/// Writes `content` atomically. Throws IoError with the path on failure.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace hetnet
