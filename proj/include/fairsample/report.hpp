#ifndef FAIRSAMPLE_REPORT_HPP
#define FAIRSAMPLE_REPORT_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "fairsample/detection.hpp"
#include "fairsample/fsa.hpp"
#include "fairsample/io.hpp"
#include "fairsample/polytope.hpp"

namespace fairsample {

inline constexpr const char* kToolVersion = "1.0.0";

/// Common fields of every report: tool, version, format_version, command,
/// and the seed when one was used.
Json report_header(const std::string& command, std::optional<std::uint64_t> seed = std::nullopt);

Json path_verdict_to_json(const PathVerdict& v);
Json verdict_to_json(const FsaVerdict& v);
Json sweep_to_json(const SweepReport& r);
Json locality_to_json(const LocalityResult& r);

std::string render_verdict(const FsaVerdict& v);
std::string render_behavior(const BehaviorTable& b);
std::string render_sweep(const SweepReport& r);
std::string format_number(double v);

}  // namespace fairsample

#endif  // FAIRSAMPLE_REPORT_HPP
