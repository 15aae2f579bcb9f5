#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "seqlat/model.hpp"

namespace seqlat::report {

inline constexpr const char* kSchemaVersion = "seqlat.report/1";
inline constexpr const char* kToolkitVersion = "0.3.0";

/// Everything needed to replay a command. Output paths and the worker count
/// are deliberately absent so reruns into another directory, or with more
/// threads, produce identical bytes.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> parameters;
  std::map<std::string, std::uint64_t> seeds;
  std::map<std::string, std::string> input_digests;  // role -> sha256 hex
  std::string toolkit_version = kToolkitVersion;
  std::optional<std::string> timestamp;  // from SOURCE_DATE_EPOCH when set
};

/// SHA-256 of a file's bytes as lowercase hex.
std::string file_digest(const std::string& path);
/// Manifest timestamp taken from SOURCE_DATE_EPOCH (ISO 8601, UTC).
std::optional<std::string> reproducible_timestamp();

nlohmann::ordered_json manifest_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

/// Report document. Undefined metrics are the string "NaN"; an infinite
/// threshold is "inf".
nlohmann::ordered_json report_json(const EvalReport& rep, const RunManifest& manifest);
std::string render_report(const EvalReport& rep, const RunManifest& manifest);

struct ParsedReport {
  std::string schema_version;
  RunManifest manifest;
  EvalReport report;
};

/// Reads a report, ignoring fields it does not know.
ParsedReport parse_report(const std::string& json_text);

/// Curve CSV with header
/// `target_fpr,threshold,achieved_fpr,sdr,al_points,al_seconds,recall,precision`.
std::string render_curve_csv(const TradeoffCurve& curve);
TradeoffCurve parse_curve_csv(const std::vector<std::string>& lines);

struct PlotSeries {
  std::string name;
  TradeoffCurve curve;
};

/// AL (points) against target FPR on a log axis, one polyline per series,
/// with the SDR printed next to each point.
std::string render_tradeoff_svg(const std::vector<PlotSeries>& series, const std::string& title);

}  // namespace seqlat::report
