#include "cpvl/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "cpvl/farm.hpp"

namespace cpvl {

std::string to_string(SurvivalProxy proxy) {
    switch (proxy) {
        case SurvivalProxy::alive_at_horizon: return "alive-at-horizon";
        case SurvivalProxy::reached_boundary: return "reached-boundary";
        case SurvivalProxy::population_threshold: return "population-threshold";
    }
    return "?";
}

SurvivalProxy survival_proxy_from_string(const std::string& name) {
    if (name == "alive-at-horizon") return SurvivalProxy::alive_at_horizon;
    if (name == "reached-boundary") return SurvivalProxy::reached_boundary;
    if (name == "population-threshold") return SurvivalProxy::population_threshold;
    throw std::invalid_argument("unknown survival proxy '" + name +
                                "' (expected alive-at-horizon, reached-boundary or population-threshold)");
}

SurvivalProxy default_proxy(const Graph& g) {
    return g.kind() == GraphKind::tree_ball ? SurvivalProxy::reached_boundary : SurvivalProxy::alive_at_horizon;
}

InfectionRate infection_with_gamma(double lambda, double gamma) {
    return gamma == 0.0 ? InfectionRate::constant(lambda) : InfectionRate::power(lambda, gamma);
}

namespace {

SurvivalEstimate make_estimate(const Graph& g, const InfectionRate& infection, const SurvivalOptions& opt,
                               std::size_t survivors) {
    SurvivalEstimate est;
    est.lambda = infection.lambda();
    est.gamma = infection.is_power() ? infection.gamma() : 0.0;
    est.proxy = opt.proxy;
    est.horizon = opt.horizon;
    est.graph = g.describe();
    est.replicas = opt.replicas;
    est.survivors = survivors;
    const auto p = stats::proportion(survivors, opt.replicas);
    est.estimate = p.estimate;
    est.std_error = p.std_error;
    return est;
}

void check_survival_options(const SurvivalOptions& opt, const Configuration& init) {
    if (opt.replicas == 0) throw std::invalid_argument("replicas must be positive");
    if (init.is_zero()) throw std::invalid_argument("survival needs a nonzero initial configuration");
    if (opt.proxy == SurvivalProxy::population_threshold && opt.population_threshold == 0)
        throw std::invalid_argument("population-threshold proxy needs a positive threshold");
}

}  // namespace

SurvivalEstimate estimate_survival(const Graph& g, const RateModel& model, const InfectionRate& infection,
                                   const Configuration& init, const SurvivalOptions& opt) {
    check_survival_options(opt, init);
    auto alive = run_replicas(opt.replicas, opt.threads, [&](std::size_t i) -> char {
        RunOptions o;
        o.horizon = opt.horizon;
        o.master_seed = opt.seed;
        o.replica = i;
        o.stop_at_boundary = opt.proxy == SurvivalProxy::reached_boundary;
        if (opt.proxy == SurvivalProxy::population_threshold) o.population_threshold = opt.population_threshold;
        Rng rng(opt.seed, i, StreamTag::simulation);
        return !run_cpvl_gillespie(g, model, infection, init, o, rng).extinction_time.has_value();
    });
    std::size_t survivors = 0;
    for (char a : alive) survivors += a;
    return make_estimate(g, infection, opt, survivors);
}

std::vector<SurvivalEstimate> estimate_survival_shared(const Graph& g, const std::vector<ModelSpec>& specs,
                                                       const std::vector<Configuration>& inits,
                                                       const SurvivalOptions& opt) {
    if (specs.size() != inits.size()) throw std::invalid_argument("need one initial configuration per model");
    if (specs.empty()) return {};
    for (const auto& c : inits) check_survival_options(opt, c);
    Envelopes env = Envelopes::covering(specs[0].rates, specs[0].infection);
    for (const auto& s : specs) env = env.max(Envelopes::covering(s.rates, s.infection));
    const DirectedEdges edges(g);

    auto outcomes = run_replicas(opt.replicas, opt.threads, [&](std::size_t i) {
        std::vector<CpvlReplay> runs;
        runs.reserve(specs.size());
        for (std::size_t k = 0; k < specs.size(); ++k)
            runs.emplace_back(g, edges, specs[k].rates, specs[k].infection, inits[k], env);
        std::vector<char> hit(specs.size(), 0);
        for (std::size_t k = 0; k < specs.size(); ++k) {
            if (opt.proxy == SurvivalProxy::reached_boundary)
                for (Vertex v : g.boundary_vertices()) hit[k] |= inits[k][v] > 0;
            if (opt.proxy == SurvivalProxy::population_threshold)
                hit[k] = inits[k].positive_count() >= opt.population_threshold;
        }
        EventStream stream(g, env, opt.horizon, replica_seed(opt.seed, i, StreamTag::event_log));
        Event e;
        std::size_t alive = specs.size();
        while (alive > 0 && stream.next(e)) {
            for (std::size_t k = 0; k < runs.size(); ++k) {
                auto& r = runs[k];
                if (r.state().is_zero() || !r.apply(e)) continue;
                if (r.state().is_zero()) {
                    --alive;
                    continue;
                }
                const Vertex x = r.target(e);
                if (opt.proxy == SurvivalProxy::reached_boundary && r.state()[x] > 0 && g.is_boundary(x)) hit[k] = 1;
                if (opt.proxy == SurvivalProxy::population_threshold &&
                    r.state().positive_count() >= opt.population_threshold)
                    hit[k] = 1;
            }
        }
        std::vector<char> out(specs.size());
        for (std::size_t k = 0; k < runs.size(); ++k) out[k] = hit[k] || !runs[k].state().is_zero();
        return out;
    });

    std::vector<SurvivalEstimate> est;
    for (std::size_t k = 0; k < specs.size(); ++k) {
        std::size_t c = 0;
        for (const auto& o : outcomes) c += o[k];
        est.push_back(make_estimate(g, specs[k].infection, opt, c));
    }
    return est;
}

LambdaCResult estimate_lambda_c(const Graph& g, const RateModel& model, double gamma, const Configuration& init,
                                const SurvivalOptions& survival, const LambdaCOptions& options) {
    if (!(options.lo > 0.0) || !(options.hi > options.lo)) throw std::invalid_argument("need 0 < lo < hi");
    if (!(options.resolution > 0.0)) throw std::invalid_argument("resolution must be positive");
    const std::size_t budget = options.max_replicas ? options.max_replicas : 8 * survival.replicas;
    LambdaCResult res;
    auto eval = [&](double lambda, std::size_t replicas) {
        SurvivalOptions o = survival;
        o.replicas = replicas;
        auto e = estimate_survival(g, model, infection_with_gamma(lambda, gamma), init, o);
        res.evaluations.push_back(e);
        return e;
    };

    double lo = options.lo, hi = options.hi;
    SurvivalEstimate at_lo = eval(lo, survival.replicas);
    SurvivalEstimate at_hi = eval(hi, survival.replicas);
    while (at_lo.estimate >= options.threshold && lo > 1e-4) {
        hi = lo;
        at_hi = at_lo;
        lo *= 0.5;
        at_lo = eval(lo, survival.replicas);
    }
    while (at_hi.estimate <= options.threshold && hi < 1e4) {
        lo = hi;
        at_lo = at_hi;
        hi *= 2.0;
        at_hi = eval(hi, survival.replicas);
    }
    if (at_lo.estimate >= options.threshold || at_hi.estimate <= options.threshold) {
        res.inconclusive = true;
        res.note = "could not bracket the threshold";
    }

    auto separated = [&](double lambda) {
        std::size_t n = survival.replicas;
        SurvivalEstimate e = eval(lambda, n);
        while (std::abs(e.estimate - options.threshold) < options.separation * e.std_error && 2 * n <= budget) {
            n *= 2;
            e = eval(lambda, n);
        }
        return std::make_pair(e, std::abs(e.estimate - options.threshold) >= options.separation * e.std_error);
    };
    auto move_to = [&](double lambda, const SurvivalEstimate& e) {
        if (e.estimate > options.threshold) {
            hi = lambda;
            at_hi = e;
        } else {
            lo = lambda;
            at_lo = e;
        }
    };

    while (!res.inconclusive && hi - lo > options.resolution) {
        const double mid = 0.5 * (lo + hi);
        auto [e, ok] = separated(mid);
        if (ok) {
            move_to(mid, e);
            continue;
        }
        // mid sits on the crossing within noise: probe half a resolution to each side instead
        const double step = 0.5 * options.resolution;
        const double below = std::max(lo, mid - step), above = std::min(hi, mid + step);
        bool moved = false;
        for (double probe : {below, above}) {
            if (probe <= lo || probe >= hi) continue;
            auto [pe, pok] = separated(probe);
            if (!pok) continue;
            move_to(probe, pe);
            moved = true;
        }
        if (!moved) {
            res.inconclusive = true;
            res.note = "proxy near lambda = " + std::to_string(mid) + " not separable from the threshold within " +
                       std::to_string(budget) + " replicas";
        }
    }
    res.lambda_lo = lo;
    res.lambda_hi = hi;
    res.at_lo = at_lo;
    res.at_hi = at_hi;
    if (res.note.empty()) res.note = "finite-size proxy estimate";
    return res;
}

std::string to_string(CriterionVerdict verdict) {
    return verdict == CriterionVerdict::guaranteed_extinction ? "guaranteed-extinction" : "no-conclusion";
}

CriterionResult extinction_criterion(int D, const RateModel& model, const InfectionRate& infection) {
    if (D < 1) throw std::invalid_argument("degree D must be >= 1");
    CriterionResult r;
    r.series = expected_integral_lambda(model, infection);
    r.divergent = r.series.status == SeriesStatus::divergent;
    if (r.series.converged()) {
        r.value = D * r.series.value;
        if (r.value <= 1.0) r.verdict = CriterionVerdict::guaranteed_extinction;
    } else {
        r.value = std::numeric_limits<double>::infinity();
    }
    return r;
}

RegimeResult corollary_regimes(const RateModel& model, double gamma) {
    if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
    RegimeResult r;
    // only the convergence verdict matters here; slow algebraic tails need a looser target
    r.series = expected_integral_lambda(model, InfectionRate::power(1.0, gamma), 1e-6);
    r.converges = r.series.converged();
    switch (model.family()) {
        case RateFamily::power_law:
            r.condition_holds = gamma < model.a() - 1.0;
            r.condition = "gamma < a - 1";
            break;
        case RateFamily::linear:
            r.condition_holds = true;
            r.condition = "linear family: all gamma >= 0";
            break;
        case RateFamily::table:
            r.condition_holds = r.converges;
            r.condition = "table: series only";
            break;
    }
    return r;
}

InvariantSample sample_upper_invariant_cpli(const Graph& g, const RateModel& model, double lambda,
                                            const InvariantOptions& opt) {
    if (opt.samples < 4) throw std::invalid_argument("need at least 4 sample times");
    if (opt.replicas == 0) throw std::invalid_argument("replicas must be positive");
    if (!(opt.spacing > 0.0) || !(opt.burn_in >= 0.0)) throw std::invalid_argument("bad sample schedule");
    if (opt.origin >= g.vertex_count()) throw std::invalid_argument("origin out of range");
    InvariantSample out;
    for (std::size_t k = 0; k < opt.samples; ++k) out.times.push_back(opt.burn_in + static_cast<double>(k) * opt.spacing);
    const Configuration zero = Configuration::zero(g.vertex_count());

    auto paths = run_replicas(opt.replicas, opt.threads, [&](std::size_t i) {
        RunOptions o;
        o.horizon = out.times.back();
        o.snapshot_times = out.times;
        o.master_seed = opt.seed;
        o.replica = i;
        Rng rng(opt.seed, i, StreamTag::simulation);
        auto tr = run_cpli_gillespie(g, model, lambda, zero, o, rng);
        std::vector<long> v;
        for (const auto& s : tr.snapshots) v.push_back(s.state[opt.origin]);
        return v;
    });

    std::vector<long> pooled;
    for (std::size_t k = 0; k < opt.samples; ++k) {
        std::vector<double> col;
        for (const auto& p : paths) {
            col.push_back(static_cast<double>(p.at(k)));
            pooled.push_back(p[k]);
        }
        out.median.push_back(stats::median(col));
    }
    out.histogram = stats::empirical_law(pooled);
    const std::size_t half = opt.samples / 2;
    std::span<const double> t(out.times), m(out.median);
    out.second_half = stats::linear_fit(t.subspan(half), m.subspan(half));
    const double slope = out.second_half.slope, se = out.second_half.slope_stderr;
    out.flat = std::abs(slope) <= 3.0 * se;
    out.growing = slope > 0.0 && slope > 3.0 * se;
    out.verdict = out.flat ? "flat (tight, supercritical-like; heuristic)"
                           : out.growing ? "growing (subcritical-like; heuristic)" : "undetermined (heuristic)";
    return out;
}

TruncationResult truncation_diagnostic(const Graph& small, const Graph& large, const RateModel& model,
                                       const InfectionRate& infection, Load init_load, double horizon,
                                       std::size_t replicas, std::uint64_t seed, unsigned threads) {
    if (replicas == 0) throw std::invalid_argument("replicas must be positive");
    if (init_load == 0) throw std::invalid_argument("initial load at the origin must be positive");
    auto sample = [&](const Graph& g, std::uint64_t offset) {
        const Configuration init = Configuration::single(g.vertex_count(), 0, init_load);
        auto loads = run_replicas(replicas, threads, [&](std::size_t i) -> long {
            RunOptions o;
            o.horizon = horizon;
            o.master_seed = seed;
            o.replica = offset + i;
            Rng rng(seed, offset + i, StreamTag::simulation);
            return run_cpvl_gillespie(g, model, infection, init, o, rng).final_state[0];
        });
        return stats::empirical_law(loads);
    };
    TruncationResult r;
    r.replicas = replicas;
    r.small_law = sample(small, 0);
    r.large_law = sample(large, replicas);
    r.tv = stats::tv_distance(r.small_law, r.large_law);
    std::map<long, double> pooled;
    for (auto [k, p] : r.small_law) pooled[k] += 0.5 * p;
    for (auto [k, p] : r.large_law) pooled[k] += 0.5 * p;
    for (auto [k, p] : pooled) r.noise_floor += std::sqrt(p * (1.0 - p) / (std::numbers::pi * replicas));
    for (auto d : small.distances_from(0))
        if (d != UINT32_MAX) r.origin_eccentricity = std::max(r.origin_eccentricity, d);
    r.growth_constant = large.growth_constant();
    return r;
}

}  // namespace cpvl
