#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "seqlat/model.hpp"

namespace seqlat::text {

/// Splits one CSV record on commas. Quoting is not supported; the toolkit's
/// formats never need it.
std::vector<std::string_view> split_fields(std::string_view line);

/// Full-field decimal parse. Accepts "nan"/"inf" spellings so callers can
/// report non-finite values with their own message.
std::optional<double> parse_real(std::string_view field);
std::optional<long long> parse_integer(std::string_view field);

/// Shortest decimal that parses back to the same double.
std::string format_real(double v);
/// Timestamps: fixed 6 fractional digits with trailing zeros trimmed.
std::string format_time(double t);
/// Undefined metrics render as "NaN".
std::string format_metric(const Metric& m);

/// Reads a whole file into lines, stripping a trailing '\r'. Throws
/// InputError when the file cannot be opened.
std::vector<std::string> read_lines(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace seqlat::text
