#ifndef FAIRSAMPLE_FIXTURES_HPP
#define FAIRSAMPLE_FIXTURES_HPP

#include <string>
#include <string_view>
#include <vector>

#include "fairsample/fsa.hpp"

namespace fairsample {

/// Built-in diagrams; the same text ships as fixtures/<name>.diagram.
struct Fixture {
    std::string name;
    std::string_view source;
};

const std::vector<Fixture>& builtin_fixtures();
/// Errors: FormatError for an unknown name.
const Fixture& builtin_fixture(const std::string& name);
ScenarioSpec fixture_spec(const std::string& name);

}  // namespace fairsample

#endif  // FAIRSAMPLE_FIXTURES_HPP
