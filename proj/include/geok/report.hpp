#pragma once

// JSON and CSV rendering of reports, the output envelope, and atomic file
// writes.

#include <string>
#include <string_view>

#include <json.hpp>

#include "geok/geodesics.hpp"
#include "geok/kernels.hpp"
#include "geok/numerics.hpp"
#include "geok/witness.hpp"

namespace geok {

inline constexpr std::string_view kToolName = "geok";
inline constexpr std::string_view kToolVersion = "0.1.0";

/// "%.17g"; non-finite values render as "nan", "inf" or "-inf".
std::string format_number(double v);

nlohmann::json to_json(const PerturbationCertificate& c);
nlohmann::json to_json(const Point& p);
nlohmann::json to_json(const WitnessReport& r);
nlohmann::json to_json(const ShorteningReport& r);
nlohmann::json to_json(const LambdaScanReport& r);

/// Columns: lambda, psd_observed, lambda_min, witness_n, seed.
std::string to_csv(const LambdaScanReport& r);
/// Columns: N, lambda_min, direct.
std::string trace_csv(const WitnessReport& r);

/// {tool, version, config, timestamp, payload}. The timestamp is UTC ISO 8601.
nlohmann::json envelope(const nlohmann::json& config, const nlohmann::json& payload);

/// Writes via a temporary sibling file and rename. Throws std::runtime_error.
void write_file_atomic(const std::string& path, std::string_view content);

}  // namespace geok
