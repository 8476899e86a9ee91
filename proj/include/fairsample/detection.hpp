#ifndef FAIRSAMPLE_DETECTION_HPP
#define FAIRSAMPLE_DETECTION_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fairsample/behavior.hpp"
#include "fairsample/fsa.hpp"

namespace fairsample {

/// η(x, λ): probability that one party's detector fires.
class DetectionTable {
public:
    DetectionTable() = default;
    DetectionTable(int settings, std::size_t lambdas, double fill = 1.0)
        : settings_(settings), lambdas_(lambdas), eta_(static_cast<std::size_t>(settings) * lambdas, fill) {}

    int settings() const { return settings_; }
    std::size_t lambdas() const { return lambdas_; }
    double& operator()(int x, std::size_t l) { return eta_[static_cast<std::size_t>(x) * lambdas_ + l]; }
    double operator()(int x, std::size_t l) const { return eta_[static_cast<std::size_t>(x) * lambdas_ + l]; }

private:
    int settings_ = 0;
    std::size_t lambdas_ = 0;
    std::vector<double> eta_;
};

struct DetectionModel {
    std::vector<DetectionTable> parties;
    void validate() const;
};

/// Ordered from strictest to weakest.
enum class FsaVariant { ConstantEta, LambdaOnlyEta, FactorizedEta, Unrestricted };

const char* to_string(FsaVariant v);
FsaVariant variant_from_string(const std::string& s);  // constant|lambda|factorized|unrestricted

/// Each party reports (outcome, detected). A detected outcome keeps the
/// model's response; an undetected one is replaced by a uniform coin. K
/// accepts when every party detected. Errors: DimensionMismatch.
JointModel extend_with_detection(const LhvModel& m, const DetectionModel& dm);

/// Strictest variant every party's table satisfies (relative tolerance).
FsaVariant classify_detection(const DetectionModel& dm, double rel_tol = 1e-9);
FsaVariant classify_detection(const DetectionTable& t, double rel_tol = 1e-9);

/// max over parties and settings of |p(d|x) - p(d)| for uniform settings.
double detection_marginal_gap(const LhvModel& m, const DetectionModel& dm);

/// Causal diagram implied by a detection model: A1 carries the Bell outcome
/// (setting and latent parents), A2 the detection bit with a setting parent
/// only when η varies with x and a latent parent only when it varies with λ.
ScenarioSpec induced_detection_spec(const DetectionModel& dm);

struct SweepReport {
    FsaVariant variant = FsaVariant::ConstantEta;
    int n_models = 0;
    int n_local = 0;
    int n_classified_within = 0;  // classify_detection at least as strict as the variant
    double max_chsh = 0;
    double max_residual = 0;
    double min_acceptance = 1;
    std::uint64_t seed = 0;
    bool all_local() const { return n_local == n_models; }
};

/// Random two-party models whose detection tables obey `variant`; every
/// postselected behavior is tested with is_local at tolerance 1e-9.
/// Errors: InvalidScenario for Unrestricted, EmptyPostselection.
SweepReport safety_sweep(FsaVariant variant, int n_models, std::uint64_t seed);

enum class DemoKind { PrFilter, MarginalFair };

struct FakeViolation {
    DemoKind kind = DemoKind::PrFilter;
    JointModel model;
    std::optional<LhvModel> base;
    std::optional<DetectionModel> detection;
    BehaviorTable postselected;
    double chsh = 0;
    std::vector<double> acceptance;
    double marginal_gap = 0;
    int restarts = 0;
    ScenarioSpec induced;
};

/// Deterministic strategies (f_A, f_B) filtered on a ⊕ b = x·y. With
/// `chsh_optimal_only` the hidden variable ranges over the 8 strategy pairs
/// that win 3 of 4 setting pairs, otherwise over all 16.
JointModel pr_filter_model(bool chsh_optimal_only = true);
ScenarioSpec induced_filter_spec();

/// PrFilter: the filter above (CHSH 4). MarginalFair: hill-climbing search
/// over small binary η tables and deterministic responses with the
/// detection marginal held setting-independent. Errors: SearchFailed.
FakeViolation fake_violation_demo(DemoKind kind, std::uint64_t seed = 7);

}  // namespace fairsample

#endif  // FAIRSAMPLE_DETECTION_HPP
