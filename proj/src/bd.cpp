#include "cpvl/bd.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cpvl/stats.hpp"

namespace cpvl {

namespace {

template <bool Record>
void run_bd(const RateModel& m, Load x0, double horizon, Rng& rng, BDPath* path, std::optional<double>& absorbed_at) {
    Load x = x0;
    double t = 0.0;
    if (x == 0) {
        absorbed_at = 0.0;
        return;
    }
    while (true) {
        const double b = m.birth(x);
        const double total = b + m.death(x);
        if (total <= 0.0) return;  // frozen; never absorbs
        const double dt = rng.exponential(total);
        if (t + dt > horizon) return;
        t += dt;
        x = rng.uniform(total) < b ? x + 1 : x - 1;
        if constexpr (Record) {
            path->times.push_back(t);
            path->states.push_back(x);
        }
        if (x == 0) {
            absorbed_at = t;
            return;
        }
    }
}

struct Kahan {
    double sum = 0.0;
    double carry = 0.0;
    void add(double v) {
        double y = v - carry;
        double s = sum + y;
        carry = (s - sum) - y;
        sum = s;
    }
};

}  // namespace

BDPath simulate_bd(const RateModel& model, Load x0, double horizon, Rng& rng) {
    BDPath path;
    path.times.push_back(0.0);
    path.states.push_back(x0);
    std::optional<double> absorbed_at;
    run_bd<true>(model, x0, horizon, rng, &path, absorbed_at);
    path.absorbed = absorbed_at.has_value();
    path.absorption_time = absorbed_at;
    return path;
}

std::optional<double> sample_absorption_time(const RateModel& model, Load x0, double horizon, Rng& rng) {
    std::optional<double> absorbed_at;
    run_bd<false>(model, x0, horizon, rng, nullptr, absorbed_at);
    return absorbed_at;
}

std::string to_string(SeriesStatus status) {
    switch (status) {
        case SeriesStatus::converged: return "converged";
        case SeriesStatus::divergent: return "divergent";
        case SeriesStatus::inconclusive: return "inconclusive";
    }
    return "unknown";
}

SeriesResult sum_positive_series(const std::function<double(std::size_t)>& next_term, const SeriesOptions& opt) {
    constexpr std::size_t ratio_run_start = 1000;
    constexpr std::size_t ratio_run_length = 1000;
    constexpr std::size_t algebraic_start = 1024;
    constexpr double exponent_margin = 1e-3;

    SeriesResult result;
    Kahan sum;
    double prev = 0.0;
    double half_term = 0.0;  // term at index n/2 for the next power of two n
    double prev_exponent = std::numeric_limits<double>::quiet_NaN();
    std::size_t ratio_run = 0;

    for (std::size_t n = 1; n <= opt.max_terms; ++n) {
        const double t = next_term(n);
        if (std::isnan(t) || t < 0.0) throw std::domain_error("series term is negative or NaN");
        result.terms = n;
        if (std::isinf(t)) {
            result.status = SeriesStatus::divergent;
            result.value = t;
            result.note = "infinite term";
            return result;
        }
        sum.add(t);

        if ((opt.last_nonzero && n >= *opt.last_nonzero) || (t == 0.0 && prev > 0.0)) {
            result.status = SeriesStatus::converged;
            result.value = sum.sum;
            result.note = "finite support";
            return result;
        }

        if (prev > 0.0) {
            const double r = t / prev;
            ratio_run = r >= 1.0 ? ratio_run + 1 : 0;
            if (n > ratio_run_start && ratio_run >= ratio_run_length) {
                result.status = SeriesStatus::divergent;
                result.value = sum.sum;
                result.note = "term ratio >= 1 for 1000 consecutive terms";
                return result;
            }
            // Geometric regime: n (1 - r) grows, so the ratio is bounded away from 1.
            if (r < 1.0 - 1e-3 && static_cast<double>(n) * (1.0 - r) > 50.0) {
                const double rho = r + 0.1 * (1.0 - r);
                const double bound = t * rho / (1.0 - rho);
                if (bound <= opt.tol * sum.sum) {
                    result.status = SeriesStatus::converged;
                    result.value = sum.sum;
                    result.note = "geometric tail bound";
                    return result;
                }
            }
        }

        if (std::has_single_bit(n) && n >= algebraic_start && t > 0.0 && half_term > 0.0) {
            const double p = std::log2(half_term / t);
            result.decay_exponent = p;
            if (p > 1.0 + exponent_margin) {
                const double nn = static_cast<double>(n);
                const double tail = t * (nn / (p - 1.0) - 0.5 + p / (12.0 * nn));
                double err = tail * 4.0 / nn;
                err += std::isnan(prev_exponent) ? std::numeric_limits<double>::infinity()
                                                 : tail * std::abs(p - prev_exponent) / (p - 1.0);
                if (err <= opt.tol * (sum.sum + tail)) {
                    result.status = SeriesStatus::converged;
                    result.tail_estimate = tail;
                    result.value = sum.sum + tail;
                    result.note = "algebraic tail extrapolation";
                    return result;
                }
            } else if (n >= 4 * algebraic_start && p < 1.0 - exponent_margin) {
                result.status = SeriesStatus::divergent;
                result.value = sum.sum;
                result.note = "terms decay like n^-p with p < 1";
                return result;
            } else if (n >= 64 * algebraic_start && prev_exponent <= 1.0 + exponent_margin) {
                result.status = SeriesStatus::divergent;
                result.value = sum.sum;
                result.note = "terms decay like n^-1";
                return result;
            }
            prev_exponent = p;
        }
        if (std::has_single_bit(n)) half_term = t;
        prev = t;
    }
    result.status = SeriesStatus::inconclusive;
    result.value = sum.sum;
    result.note = "term budget exhausted";
    return result;
}

namespace {

SeriesResult hitting_series(const RateModel& m, const std::function<double(Load)>& weight, double tol) {
    double product = 1.0;  // prod_{j<n} b(j)/d(j)
    auto next = [&](std::size_t n) {
        const auto k = static_cast<Load>(n);
        const double dn = m.death(k);
        if (!(dn > 0.0)) {
            if (product == 0.0) return 0.0;
            throw std::domain_error("d(n) = 0 on a reachable state; support condition violated");
        }
        const double term = weight(k) / dn * product;
        product *= m.birth(k) / dn;
        return term;
    };
    SeriesOptions opt;
    opt.tol = tol;
    if (auto ml = m.max_load()) opt.last_nonzero = *ml;
    return sum_positive_series(next, opt);
}

}  // namespace

SeriesResult mean_tau_rec(const RateModel& model, double tol) {
    return hitting_series(model, [](Load) { return 1.0; }, tol);
}

SeriesResult expected_integral_lambda(const RateModel& model, const InfectionRate& infection, double tol) {
    return hitting_series(model, [&](Load n) { return infection(n); }, tol);
}

ReflectedStationary::ReflectedStationary(const RateModel& model, double tol) : model_(model) {
    double product = 1.0;  // prod_{i<=n} b(i)/d(i+1)
    auto next = [&](std::size_t n) {
        const auto k = static_cast<Load>(n);
        const double b = model_.birth(k);
        if (b == 0.0) {
            product = 0.0;
            return 0.0;
        }
        const double d = model_.death(k + 1);
        if (!(d > 0.0)) throw std::domain_error("d(n+1) = 0 while b(n) > 0; support condition violated");
        product *= b / d;
        return product;
    };
    SeriesOptions opt;
    opt.tol = tol;
    if (auto ml = model_.max_load()) opt.last_nonzero = std::max<Load>(*ml, 2) - 1;
    normalizer_ = sum_positive_series(next, opt);
    if (!normalizer_.converged())
        throw std::domain_error("reflected chain is not positive recurrent (normaliser " +
                                to_string(normalizer_.status) + ")");
    pi1_ = 1.0 / (1.0 + normalizer_.value);
}

double ReflectedStationary::pi(Load k) const {
    if (k == 0) return 0.0;
    double p = pi1_;
    for (Load i = 1; i < k && p > 0.0; ++i) p *= model_.birth(i) / model_.death(i + 1);
    return p;
}

double reflected_stationary(const RateModel& model, Load n, double tol) {
    return ReflectedStationary(model, tol).pi(n);
}

FirstInfection sample_first_infection_time(const RateModel& m, const InfectionRate& infection, Rng& rng,
                                           double horizon) {
    FirstInfection out;
    const double threshold = rng.exponential(1.0);
    double hazard = 0.0;
    double t = 0.0;
    Load x = 1;
    while (true) {
        const double lam = infection(x);
        const double b = m.birth(x);
        const double total = b + m.death(x);
        const double dt = total > 0.0 ? rng.exponential(total) : std::numeric_limits<double>::infinity();
        if (lam > 0.0 && hazard + lam * dt >= threshold) {
            const double ring = t + (threshold - hazard) / lam;
            if (ring <= horizon) out.time = ring;
            return out;
        }
        hazard += lam * dt;
        t += dt;
        if (t > horizon) return out;
        x = rng.uniform(total) < b ? x + 1 : x - 1;
        if (x == 0) {
            out.absorbed_first = true;
            return out;
        }
    }
}

std::string to_string(TailModel model) {
    return model == TailModel::power_law ? "power_law" : "exponential";
}

TailEstimate estimate_tail(std::vector<double> samples, double horizon, const TailOptions& opt) {
    const std::size_t n = samples.size();
    if (n < opt.min_samples)
        throw std::invalid_argument("estimate_tail needs at least " + std::to_string(opt.min_samples) + " samples");
    std::sort(samples.begin(), samples.end());
    if (samples.front() == samples.back()) throw std::invalid_argument("estimate_tail: degenerate sample (all equal)");

    auto first_censored = std::lower_bound(samples.begin(), samples.end(), horizon);
    const auto uncensored = static_cast<std::size_t>(first_censored - samples.begin());
    const std::size_t censored = n - uncensored;
    if (uncensored == 0) throw std::invalid_argument("estimate_tail: all samples censored");

    std::size_t k = opt.k.value_or(static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n)))));
    k = std::clamp<std::size_t>(k, 2, uncensored - 1);

    TailEstimate est;
    est.model = opt.mode;
    est.sample_count = n;

    // Threshold u: the k-th largest value, or with censoring the lower of
    // horizon/10 and the (censored + k)-th largest value.
    double u = samples[n - k - 1];
    if (censored > 0) {
        u = std::min(horizon / 10.0, samples[uncensored - k]);
    }
    if (!(u > 0.0)) throw std::invalid_argument("estimate_tail: threshold is not positive");
    est.fit_lo = u;
    est.fit_hi = censored > 0 ? horizon : samples.back();

    std::size_t m = 0;
    double log_excess = 0.0, excess = 0.0;
    for (std::size_t i = 0; i < uncensored; ++i) {
        if (samples[i] > u) {
            ++m;
            log_excess += std::log(samples[i] / u);
            excess += samples[i] - u;
        }
    }
    if (censored > 0) {
        log_excess += static_cast<double>(censored) * std::log(horizon / u);
        excess += static_cast<double>(censored) * (horizon - u);
    }
    if (m < 2) throw std::invalid_argument("estimate_tail: too few uncensored exceedances");
    est.tail_count = m;
    const double rate = static_cast<double>(m) / (opt.mode == TailModel::power_law ? log_excess : excess);
    est.exponent = rate;
    est.std_error = rate / std::sqrt(static_cast<double>(m));

    // Regressions of log S(t) on log t and on t at shared survival levels.
    const double s_hi = 0.3;
    const double s_lo = std::max(20.0 / static_cast<double>(n), 1.5 * static_cast<double>(censored) / static_cast<double>(n));
    std::vector<double> log_t, t_pts, log_s;
    if (s_lo < s_hi) {
        constexpr int levels = 25;
        for (int j = 0; j < levels; ++j) {
            const double s = s_hi * std::pow(s_lo / s_hi, static_cast<double>(j) / (levels - 1));
            const auto above = static_cast<std::size_t>(std::ceil(s * static_cast<double>(n)));
            const double t = samples[n - above];
            if (!(t > 0.0) || t >= horizon) continue;
            if (!t_pts.empty() && t <= t_pts.back()) continue;
            t_pts.push_back(t);
            log_t.push_back(std::log(t));
            log_s.push_back(std::log(static_cast<double>(above) / static_cast<double>(n)));
        }
    }
    if (t_pts.size() >= 3) {
        auto pf = stats::linear_fit(log_t, log_s);
        auto ef = stats::linear_fit(t_pts, log_s);
        est.regression_power_exponent = -pf.slope;
        est.regression_power_rss = pf.residual_ss;
        est.regression_exp_rate = -ef.slope;
        est.regression_exp_rss = ef.residual_ss;
        est.preferred = pf.residual_ss <= ef.residual_ss ? TailModel::power_law : TailModel::exponential;
    } else {
        est.preferred = opt.mode;
    }
    return est;
}

}  // namespace cpvl
