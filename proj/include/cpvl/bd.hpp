#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cpvl/rates.hpp"
#include "cpvl/rng.hpp"

namespace cpvl {

/// Path of the single-site birth-death chain X with up-rate b and down-rate d.
struct BDPath {
    std::vector<double> times;   ///< jump times; times[0] = 0 is the start
    std::vector<Load> states;    ///< states[i] holds on [times[i], times[i+1])
    bool absorbed = false;
    std::optional<double> absorption_time;
};

/// Exact next-event simulation from x0 until absorption at 0 or `horizon`.
BDPath simulate_bd(const RateModel& model, Load x0, double horizon, Rng& rng);

/// Same dynamics without recording the path: the absorption time, or empty
/// if the chain is still alive at `horizon`. Consumes the stream exactly as
/// simulate_bd does.
std::optional<double> sample_absorption_time(const RateModel& model, Load x0, double horizon, Rng& rng);

enum class SeriesStatus { converged, divergent, inconclusive };
std::string to_string(SeriesStatus status);

struct SeriesResult {
    SeriesStatus status = SeriesStatus::inconclusive;
    double value = 0.0;          ///< partial sum plus tail estimate when converged
    std::size_t terms = 0;       ///< number of terms summed explicitly
    double tail_estimate = 0.0;  ///< extrapolated remainder included in value
    double decay_exponent = 0.0; ///< last local power-law exponent estimate (0 if unused)
    std::string note;

    bool converged() const { return status == SeriesStatus::converged; }
};

struct SeriesOptions {
    double tol = 1e-12;                       ///< relative accuracy target
    std::size_t max_terms = std::size_t{1} << 24;
    std::optional<std::size_t> last_nonzero;  ///< terms beyond this index vanish
};

/// Sums a positive series sum_{n>=1} t_n whose terms are produced in order by
/// `next_term(n)`. Geometric decay is closed with a ratio tail bound;
/// algebraic decay n^-p is closed with an Euler-Maclaurin tail once the local
/// exponent stabilises above 1. Divergence is declared when the term ratio
/// stays >= 1 for 10^3 consecutive terms after n = 10^3, or when the local
/// exponent settles at or below 1.
SeriesResult sum_positive_series(const std::function<double(std::size_t)>& next_term,
                                 const SeriesOptions& options = {});

/// E[tau_rec] from X_0 = 1: sum_n (1/d(n)) prod_{j<n} b(j)/d(j).
SeriesResult mean_tau_rec(const RateModel& model, double tol = 1e-12);

/// E[int_0^tau_rec Lambda(X_s) ds] from X_0 = 1:
/// sum_n (Lambda(n)/d(n)) prod_{j<n} b(j)/d(j).
SeriesResult expected_integral_lambda(const RateModel& model, const InfectionRate& infection,
                                      double tol = 1e-12);

/// Stationary law of the chain reflected at 1 (0 removed):
/// pi(k) = pi(1) b(1)...b(k-1) / (d(2)...d(k)).
class ReflectedStationary {
public:
    /// Throws std::domain_error if the normaliser diverges.
    ReflectedStationary(const RateModel& model, double tol = 1e-12);

    double pi(Load k) const;
    double pi1() const { return pi1_; }
    const SeriesResult& normalizer() const { return normalizer_; }

private:
    RateModel model_;
    SeriesResult normalizer_;
    double pi1_ = 0.0;
};

double reflected_stationary(const RateModel& model, Load n, double tol = 1e-12);

/// First ring of a clock with instantaneous rate Lambda(X_t), X started at 1
/// and the clock running only while X > 0.
struct FirstInfection {
    std::optional<double> time;
    bool absorbed_first = false;  ///< X hit 0 before the clock rang
};

FirstInfection sample_first_infection_time(const RateModel& model, const InfectionRate& infection,
                                           Rng& rng, double horizon = 1e12);

enum class TailModel { power_law, exponential };
std::string to_string(TailModel model);

struct TailEstimate {
    TailModel model = TailModel::power_law;
    double exponent = 0.0;         ///< a-hat (power law) or B-hat (exponential)
    double std_error = 0.0;
    std::size_t sample_count = 0;
    std::size_t tail_count = 0;    ///< samples used by the estimator
    double fit_lo = 0.0;
    double fit_hi = 0.0;
    /// Log-survival regressions on a shared grid of survival levels.
    double regression_power_exponent = 0.0;
    double regression_power_rss = 0.0;
    double regression_exp_rate = 0.0;
    double regression_exp_rss = 0.0;
    TailModel preferred = TailModel::power_law;  ///< smaller residual sum of squares
};

struct TailOptions {
    TailModel mode = TailModel::power_law;
    std::optional<std::size_t> k;  ///< top order statistics for Hill; default floor(sqrt N)
    std::size_t min_samples = 1000;
};

/// Estimates the tail exponent of a sample of recovery times. Samples at or
/// beyond `censoring_horizon` are treated as right-censored there.
/// Power-law mode: Hill estimator on the top k order statistics; with
/// censoring, the Pareto likelihood with right-censoring on [u, horizon).
/// Exponential mode: slope of log-survival against t.
TailEstimate estimate_tail(std::vector<double> samples, double censoring_horizon,
                           const TailOptions& options = {});

}  // namespace cpvl
