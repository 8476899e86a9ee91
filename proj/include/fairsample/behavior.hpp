#ifndef FAIRSAMPLE_BEHAVIOR_HPP
#define FAIRSAMPLE_BEHAVIOR_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace fairsample {

struct PartyDims {
    int settings = 2;
    int outcomes = 2;
    friend bool operator==(const PartyDims&, const PartyDims&) = default;
};

/// Shape of an n-party scenario. Setting and outcome vectors are encoded in
/// mixed radix with party 0 as the most significant digit; a behavior entry
/// p(a|x) lives at index x * outcome_count() + a.
class Dims {
public:
    Dims() = default;
    explicit Dims(std::vector<PartyDims> parties);
    static Dims uniform(std::size_t parties, int settings, int outcomes);

    std::size_t parties() const { return parties_.size(); }
    const PartyDims& operator[](std::size_t p) const { return parties_[p]; }
    const std::vector<PartyDims>& all() const { return parties_; }

    std::size_t setting_count() const { return setting_count_; }
    std::size_t outcome_count() const { return outcome_count_; }
    std::size_t size() const { return setting_count_ * outcome_count_; }

    std::vector<int> settings_of(std::size_t s) const;
    std::vector<int> outcomes_of(std::size_t o) const;
    std::size_t encode_settings(std::span<const int> x) const;
    std::size_t encode_outcomes(std::span<const int> a) const;

    friend bool operator==(const Dims& a, const Dims& b) { return a.parties_ == b.parties_; }

private:
    std::vector<PartyDims> parties_;
    std::size_t setting_count_ = 1;
    std::size_t outcome_count_ = 1;
};

/// Conditional probability tensor p(a⃗ | x⃗).
struct BehaviorTable {
    Dims dims;
    std::vector<double> p;

    BehaviorTable() = default;
    explicit BehaviorTable(Dims d) : dims(std::move(d)), p(dims.size(), 0.0) {}

    double& at(std::size_t s, std::size_t o) { return p[s * dims.outcome_count() + o]; }
    double at(std::size_t s, std::size_t o) const { return p[s * dims.outcome_count() + o]; }
};

/// Largest deviation of any setting block from unit sum, or of any entry below 0.
double normalization_error(const BehaviorTable& b);
/// Largest change of any marginal p(a_S | x⃗) under a change of settings outside S.
double no_signalling_violation(const BehaviorTable& b);
bool is_no_signalling(const BehaviorTable& b, double tol = 1e-12);
/// Marginal on `keep` (sorted party indices), with dropped parties' settings at 0.
BehaviorTable marginal(const BehaviorTable& b, const std::vector<std::size_t>& keep);
double max_abs_difference(const BehaviorTable& a, const BehaviorTable& b);

/// p(a | x, λ) for one party, stored [λ][x][a].
class ResponseTable {
public:
    ResponseTable() = default;
    ResponseTable(std::size_t lambdas, int settings, int outcomes)
        : lambdas_(lambdas), settings_(settings), outcomes_(outcomes),
          p_(lambdas * static_cast<std::size_t>(settings * outcomes), 0.0) {}

    std::size_t lambdas() const { return lambdas_; }
    int settings() const { return settings_; }
    int outcomes() const { return outcomes_; }

    double& operator()(std::size_t l, int x, int a) { return p_[(l * settings_ + x) * outcomes_ + a]; }
    double operator()(std::size_t l, int x, int a) const { return p_[(l * settings_ + x) * outcomes_ + a]; }
    const std::vector<double>& data() const { return p_; }

    friend bool operator==(const ResponseTable&, const ResponseTable&) = default;

private:
    std::size_t lambdas_ = 0;
    int settings_ = 0;
    int outcomes_ = 0;
    std::vector<double> p_;
};

/// Finite hidden-variable model: p_λ and one response table per party.
struct LhvModel {
    std::vector<double> weights;
    std::vector<ResponseTable> responses;

    Dims dims() const;
    /// Throws InvalidModel unless all probabilities lie in [0,1] and every
    /// distribution sums to one within `tol`.
    void validate(double tol = 1e-12) const;
};

/// Deterministic response: strategy index enumerates functions setting->outcome
/// in mixed radix with setting 0 as the most significant digit.
std::vector<int> deterministic_strategy(int settings, int outcomes, std::size_t index);

/// Sum-product p(a⃗|x⃗) = Σ_λ p_λ Π_p p(a_p | x_p, λ).
BehaviorTable behavior_from_lhv(const LhvModel& m);

/// Probability that K = 1 given the hidden variable, all raw outcomes and
/// all settings.
using KRule = std::function<double(std::size_t lambda, std::span<const int> outcomes, std::span<const int> settings)>;

/// A model with a postselection. Each party's raw outcome r splits into a
/// Bell outcome r / aux[p] and an auxiliary outcome r % aux[p]; only the Bell
/// part is reported after postselection.
struct JointModel {
    LhvModel model;
    std::vector<int> aux;
    KRule accept;

    Dims bell_dims() const;
};

JointModel attach_selection(LhvModel m, KRule rule);

/// Acceptance probability p(K=1 | x⃗) per setting vector.
std::vector<double> acceptance_rates(const JointModel& j);

/// p(a⃗ | x⃗, K=1) over Bell outcomes. Errors: EmptyPostselection when some
/// setting vector is accepted with probability <= 1e-9.
BehaviorTable postselect(const JointModel& j);

/// Bell-outcome behavior ignoring the postselection.
BehaviorTable unpostselected(const JointModel& j);

inline constexpr double kMinAcceptance = 1e-9;

/// If a deterministic acceptance rule over variables with the given
/// cardinalities accepts exactly one assignment, returns it: the rule is then
/// expressible as conditioning on fixed values. Otherwise nullopt.
std::optional<std::vector<int>> as_direct_conditioning(const std::vector<int>& cards,
                                                       const std::function<double(std::span<const int>)>& accept);

}  // namespace fairsample

#endif  // FAIRSAMPLE_BEHAVIOR_HPP
