#ifndef FAIRSAMPLE_IO_HPP
#define FAIRSAMPLE_IO_HPP

#include <filesystem>
#include <string>
#include <variant>

#include "json.hpp"

#include "fairsample/behavior.hpp"
#include "fairsample/multiparty.hpp"

namespace fairsample {

using Json = nlohmann::json;

inline constexpr int kFormatVersion = 1;
/// Loaded distributions may deviate from unit sum by this much; they are
/// renormalized afterwards.
inline constexpr double kLoadTolerance = 1e-9;

/// JSON with sorted keys, two-space indent and every float printed with 17
/// significant digits.
std::string stable_dump(const Json& j);

/// Probabilities are written as decimal strings; numbers are accepted too.
double parse_probability(const Json& v);
std::string format_probability(double p);

/// Behavior file:
///   {"format_version": 1, "kind": "behavior",
///    "parties": [{"settings": 2, "outcomes": 2}, ...],
///    "p": ["0.25", ...]}   // index (setting vector) * outcome_count + outcome vector
/// Errors: FormatError, InvalidModel.
BehaviorTable behavior_from_json(const Json& j);
Json behavior_to_json(const BehaviorTable& b);

/// Model file, kind "lhv":
///   {"format_version": 1, "kind": "lhv",
///    "parties": [{"settings": 2, "outcomes": 4, "aux": 2}, ...],
///    "weights": [...],
///    "responses": [[[[p(a|x,λ) for a] for x] for λ] for party],
///    "accept": [[p(K=1|a,x) in behavior layout over raw outcomes] for λ]}   // optional
/// "accept" holds one table shared by all λ or one per λ.
///
/// kind "hybrid":
///   {"parties": ..., "weights": [...],
///    "branches": [{"pair": [i, j], "pair_behavior": [...], "locals": [[[p(a|x)]]]}],
///    "accept": ...}
using LoadedModel = std::variant<JointModel, HybridJoint>;
LoadedModel model_from_json(const Json& j);
Json model_to_json(const JointModel& m);
Json model_to_json(const HybridJoint& m);

Json read_json_file(const std::filesystem::path& file);
BehaviorTable load_behavior(const std::filesystem::path& file);
LoadedModel load_model(const std::filesystem::path& file);

}  // namespace fairsample

#endif  // FAIRSAMPLE_IO_HPP
