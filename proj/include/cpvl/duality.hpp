#pragma once

#include <cstdint>
#include <vector>

#include "cpvl/engine.hpp"
#include "cpvl/stats.hpp"

namespace cpvl {

struct IndicatorChange {
    double time = 0.0;
    Vertex vertex = 0;  ///< vertex touched by the point at which the indicator flipped
};

struct DualRunReport {
    double horizon = 0.0;
    std::vector<double> checkpoints;
    std::vector<int> indicator;  ///< 1{eta_s <= xi_{t-s}} at each checkpoint
    bool constant = true;        ///< indicator never changed, at checkpoints or at any point
    int initial_value = 1;
    std::uint64_t evaluations = 0;
    std::vector<IndicatorChange> changes;
};

/// Replays eta forward over [0, t] and the CPLI xi backward from t over the
/// same log, evaluating 1{eta_s <= xi_{t-s}} between every pair of points and
/// at the checkpoints. At a point S the forward process is compared before
/// the point against the dual after it, and vice versa. Needs constant
/// Lambda and t <= log horizon; points after t are ignored.
DualRunReport pathwise_duality_check(const Graph& g, const RateModel& model, const InfectionRate& infection,
                                     const Configuration& eta0, const Configuration& xi0, double t,
                                     const EventLog& log, std::vector<double> checkpoints = {});

struct McDualityResult {
    stats::Proportion lhs;  ///< P(eta_t <= xi0), CPVL from eta0
    stats::Proportion rhs;  ///< P(xi_t >= eta0), CPLI from xi0
    double combined_std_error = 0.0;
    double difference() const { return lhs.estimate - rhs.estimate; }
};

/// Both sides estimated with independent Gillespie runs (different stream tags).
McDualityResult mc_duality_check(const Graph& g, const RateModel& model, double lambda, const Configuration& eta0,
                                 const Configuration& xi0, double t, std::size_t replicas, std::uint64_t seed,
                                 unsigned threads = 0);

struct DualSurvival {
    stats::Proportion extinction;  ///< CPVL from delta_x extinct by the horizon
    stats::Proportion dormant;     ///< CPLI from 0 has xi(x) > 0 at the horizon
};

/// Finite-horizon proxies for the two sides of
/// P(CPVL from delta_x dies out) = lim_t P(xi_t^0(x) > 0).
DualSurvival survival_via_duality(const Graph& g, const RateModel& model, double lambda, Vertex x, double horizon,
                                  std::size_t replicas, std::uint64_t seed, unsigned threads = 0);

/// P(xi_horizon^0(x) > 0) for every lambda, all lambdas sharing one event
/// stream per replica. Needs a capped model. The estimates are exactly
/// non-increasing in lambda.
std::vector<stats::Proportion> dormancy_sweep(const Graph& g, const RateModel& model,
                                              const std::vector<double>& lambdas, Vertex x, double horizon,
                                              std::size_t replicas, std::uint64_t seed, unsigned threads = 0);

}  // namespace cpvl
