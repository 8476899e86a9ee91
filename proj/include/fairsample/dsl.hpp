#ifndef FAIRSAMPLE_DSL_HPP
#define FAIRSAMPLE_DSL_HPP

#include <filesystem>
#include <string>
#include <string_view>

#include "fairsample/fsa.hpp"

namespace fairsample {

/// Line-oriented diagram language:
///
///   node <name> setting | setting(<party>) | outcome(<party>) | latent | selection
///   edge <a> -> <b>
///   biedge <a> -- <b>
///   nsedge <a> ~~ <b>
///   bell <party>: <name> ...
///   condition <name>=<value> ...
///   assume lambda-influences-all
///   # comment
///
/// Nodes must be declared before use. Every failure is a ParseError with a
/// 1-based line and column; structural errors keep their own code
/// (EdgeOutOfSelection, CycleDetected, ...).
ScenarioSpec parse_diagram(std::string_view src);
ScenarioSpec load_diagram(const std::filesystem::path& file);

/// Canonical text: nodes, edges and bell lines in sorted order.
std::string serialize_diagram(const ScenarioSpec& spec);

}  // namespace fairsample

#endif  // FAIRSAMPLE_DSL_HPP
