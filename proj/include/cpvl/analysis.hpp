#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cpvl/bd.hpp"
#include "cpvl/engine.hpp"
#include "cpvl/stats.hpp"

namespace cpvl {

enum class SurvivalProxy { alive_at_horizon, reached_boundary, population_threshold };
std::string to_string(SurvivalProxy proxy);
SurvivalProxy survival_proxy_from_string(const std::string& name);

/// alive-at-horizon on tori and cycles, reached-boundary on tree balls.
SurvivalProxy default_proxy(const Graph& g);

struct SurvivalEstimate {
    double lambda = 0.0;
    double gamma = 0.0;
    SurvivalProxy proxy = SurvivalProxy::alive_at_horizon;
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t survivors = 0;
    std::size_t replicas = 0;
    double horizon = 0.0;
    std::string graph;
};

struct SurvivalOptions {
    double horizon = 10.0;
    std::size_t replicas = 1000;
    SurvivalProxy proxy = SurvivalProxy::alive_at_horizon;
    std::size_t population_threshold = 0;  ///< used by the population-threshold proxy
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

/// Fraction of Gillespie runs for which the proxy event happens: alive at the
/// horizon, or (for the two early-stopping proxies) the boundary or the
/// population threshold was reached before dying out.
SurvivalEstimate estimate_survival(const Graph& g, const RateModel& model, const InfectionRate& infection,
                                   const Configuration& init, const SurvivalOptions& options);

/// Shared-randomness survival: every (model, init) pair is replayed on the
/// same event stream in each replica, so estimates are exactly ordered
/// whenever the pairs are ordered. Capped models only; the early-stopping
/// proxies count the boundary or threshold as reached at any time.
std::vector<SurvivalEstimate> estimate_survival_shared(const Graph& g, const std::vector<ModelSpec>& specs,
                                                       const std::vector<Configuration>& inits,
                                                       const SurvivalOptions& options);

struct LambdaCOptions {
    double lo = 0.25;
    double hi = 4.0;
    double resolution = 0.05;
    double threshold = 0.5;
    std::size_t max_replicas = 0;  ///< 0 = 8 x initial replicas
    double separation = 2.0;       ///< required |estimate - threshold| / stderr
};

struct LambdaCResult {
    double lambda_lo = 0.0;
    double lambda_hi = 0.0;
    SurvivalEstimate at_lo;
    SurvivalEstimate at_hi;
    bool inconclusive = false;
    std::string note;
    std::vector<SurvivalEstimate> evaluations;
    double midpoint() const { return 0.5 * (lambda_lo + lambda_hi); }
    /// Half-width of the bracket, used as the lambda-scale standard error.
    double half_width() const { return 0.5 * (lambda_hi - lambda_lo); }
};

/// Bisection on the survival proxy for lambda with Lambda(n) = lambda n^gamma
/// (constant when gamma = 0). The bracket is expanded until it separates
/// the threshold; a midpoint too close to the threshold doubles the replica
/// count up to the budget, then the search probes half a resolution to each
/// side of it. If neither probe separates, the search ends as inconclusive.
LambdaCResult estimate_lambda_c(const Graph& g, const RateModel& model, double gamma, const Configuration& init,
                                const SurvivalOptions& survival, const LambdaCOptions& options);

InfectionRate infection_with_gamma(double lambda, double gamma);

enum class CriterionVerdict { guaranteed_extinction, no_conclusion };
std::string to_string(CriterionVerdict verdict);

struct CriterionResult {
    double value = 0.0;  ///< D E[int_0^tau_rec Lambda(X_s) ds]
    CriterionVerdict verdict = CriterionVerdict::no_conclusion;
    bool divergent = false;
    SeriesResult series;
};

CriterionResult extinction_criterion(int D, const RateModel& model, const InfectionRate& infection);

struct RegimeResult {
    SeriesResult series;
    bool converges = false;
    /// Sufficient condition for lambda_c(gamma) > 0: gamma < a - 1 for the
    /// power-law family, always for the linear family.
    bool condition_holds = false;
    std::string condition;
};

/// Convergence of sum_n (n^gamma / d(n)) prod_{j<n} b(j)/d(j).
RegimeResult corollary_regimes(const RateModel& model, double gamma);

struct InvariantSample {
    std::vector<double> times;
    std::vector<double> median;            ///< median of xi(o) across replicas at each time
    std::map<long, double> histogram;      ///< pooled law of xi(o) after burn-in
    stats::LinearFit second_half;                ///< median against time over the second half
    bool flat = false;                     ///< |slope| <= 3 stderr
    bool growing = false;                  ///< slope > 3 stderr and > 0
    std::string verdict;                   ///< heuristic label
};

struct InvariantOptions {
    double burn_in = 10.0;
    double spacing = 1.0;
    std::size_t samples = 40;
    std::size_t replicas = 200;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    Vertex origin = 0;
};

/// CPLI from all-active 0, recording xi(o) at burn_in + k spacing.
InvariantSample sample_upper_invariant_cpli(const Graph& g, const RateModel& model, double lambda,
                                            const InvariantOptions& options);

struct TruncationResult {
    double tv = 0.0;
    double noise_floor = 0.0;  ///< expected TV of two independent samples of one law
    std::map<long, double> small_law;
    std::map<long, double> large_law;
    std::uint32_t origin_eccentricity = 0;  ///< graph radius of the small graph around the origin
    double growth_constant = 0.0;           ///< of the large graph
    std::size_t replicas = 0;
};

/// TV distance between the laws of eta_horizon(o) on two graphs. Runs on the
/// two graphs use independent streams.
TruncationResult truncation_diagnostic(const Graph& small, const Graph& large, const RateModel& model,
                                       const InfectionRate& infection, Load init_load, double horizon,
                                       std::size_t replicas, std::uint64_t seed, unsigned threads = 0);

}  // namespace cpvl
