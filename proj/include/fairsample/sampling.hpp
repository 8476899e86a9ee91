#ifndef FAIRSAMPLE_SAMPLING_HPP
#define FAIRSAMPLE_SAMPLING_HPP

#include <cstdint>
#include <random>

#include "fairsample/behavior.hpp"
#include "fairsample/detection.hpp"
#include "fairsample/multiparty.hpp"

namespace fairsample {

using Rng = std::mt19937_64;

/// Seed for the index-th item of a seeded batch; independent of schedule.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

std::vector<double> random_simplex_point(Rng& rng, std::size_t n);

/// Each (λ, x) slice is deterministic with probability `deterministic`,
/// otherwise a random distribution.
LhvModel random_lhv_model(Rng& rng, const Dims& dims, std::size_t lambdas, double deterministic = 0.5);

DetectionModel random_detection(Rng& rng, FsaVariant variant, std::size_t parties, int settings, std::size_t lambdas);

/// Two binary outcomes per party: the Bell outcome depends on (x, λ), the
/// auxiliary one on λ only; K is a random table over the auxiliary outcomes.
JointModel random_fig2c_joint(Rng& rng, std::size_t parties = 2);
/// The auxiliary outcome depends on λ, the Bell outcome on (x, λ, aux); K
/// requires every auxiliary outcome to equal 1.
JointModel random_fig4_joint(Rng& rng, std::size_t parties = 2);
/// K depends on the settings only.
JointModel random_settings_only_joint(Rng& rng, const Dims& dims);

HybridModel random_hybrid_model(Rng& rng, std::size_t lambdas);
/// Hybrid model with an auxiliary outcome per party that depends on λ only,
/// and a random outcome-only K over the auxiliary outcomes.
HybridJoint random_fig3_joint(Rng& rng);

}  // namespace fairsample

#endif  // FAIRSAMPLE_SAMPLING_HPP
