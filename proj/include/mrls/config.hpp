#pragma once

#include <filesystem>
#include <vector>

#include "json.hpp"
#include "mrls/harness.hpp"

namespace mrls::config {

using Json = nlohmann::ordered_json;

Json to_json(const RunConfig& c);

/// Overlays the keys present in j onto base. Unknown keys and type
/// mismatches raise ArgumentError.
RunConfig from_json(const Json& j, RunConfig base = RunConfig::defaults());

/// Reads a JSON config file. IoError if unreadable, ArgumentError if malformed.
RunConfig load(const std::filesystem::path& path, RunConfig base = RunConfig::defaults());

Json tracking_summary(const RunConfig& c, const TrackingResult& r);
Json sweep_summary(const RunConfig& c, const std::vector<SweepPoint>& points);
Json uncertainty_summary(const RunConfig& c, const std::vector<UncertaintyPoint>& points);
Json impulse_summary(const RunConfig& c, const ImpulseResult& r);
Json acf_summary(const RunConfig& c, const LayerAcfResult& r);

}  // namespace mrls::config
