#include "cpvl/duality.hpp"

#include <algorithm>
#include <cmath>

#include "cpvl/farm.hpp"

namespace cpvl {

DualRunReport pathwise_duality_check(const Graph& g, const RateModel& model, const InfectionRate& infection,
                                     const Configuration& eta0, const Configuration& xi0, double t,
                                     const EventLog& log, std::vector<double> checkpoints) {
    if (!infection.is_constant()) throw std::invalid_argument("pathwise duality needs a constant infection rate");
    if (!(t >= 0.0) || t > log.horizon()) throw std::invalid_argument("duality horizon must lie in [0, log horizon]");
    if (log.vertex_count() != g.vertex_count() || log.edge_count() != g.directed_edge_count())
        throw std::invalid_argument("event log was generated for a different graph");
    std::sort(checkpoints.begin(), checkpoints.end());
    for (double c : checkpoints)
        if (c < 0.0 || c > t) throw std::invalid_argument("checkpoints must lie in [0, t]");

    const double lambda = infection(1);
    const DirectedEdges edges(g);
    auto all = log.events();
    const std::size_t n =
        std::upper_bound(all.begin(), all.end(), t, [](double x, const Event& e) { return x < e.time; }) - all.begin();
    auto events = all.first(n);

    // Dual pass from t down to 0, remembering every accepted move.
    struct Undo {
        std::size_t event;
        Vertex vertex;
        Load old;
    };
    std::vector<Undo> undo;
    CpliReplay dual(g, edges, model, lambda, xi0, log.envelopes(), true);
    for (std::size_t k = n; k-- > 0;) {
        const Vertex v = dual.target(events[k]);
        const Load old = dual.state()[v];
        if (dual.apply(events[k])) undo.push_back({k, v, old});
    }

    CpvlReplay fwd(g, edges, model, infection, eta0, log.envelopes());
    std::vector<std::uint8_t> bad(g.vertex_count(), 0);
    std::size_t bad_count = 0;
    auto refresh = [&](Vertex v) {
        const std::uint8_t now = fwd.state()[v] > dual.state()[v];
        bad_count += now;
        bad_count -= bad[v];
        bad[v] = now;
    };
    for (Vertex v = 0; v < g.vertex_count(); ++v) refresh(v);

    DualRunReport rep;
    rep.horizon = t;
    rep.checkpoints = checkpoints;
    int value = bad_count == 0;
    rep.initial_value = value;
    rep.evaluations = 1;
    std::size_t next_cp = 0;
    auto record_until = [&](double time) {
        while (next_cp < checkpoints.size() && checkpoints[next_cp] <= time) {
            rep.indicator.push_back(value);
            ++next_cp;
        }
    };

    for (std::size_t k = 0; k < n; ++k) {
        const Event& e = events[k];
        record_until(e.time);
        fwd.apply(e);
        const Vertex x = fwd.target(e);
        refresh(x);
        if (!undo.empty() && undo.back().event == k) {
            dual.restore(undo.back().vertex, undo.back().old);
            refresh(undo.back().vertex);
            undo.pop_back();
        }
        ++rep.evaluations;
        const int now = bad_count == 0;
        if (now != value) {
            rep.constant = false;
            rep.changes.push_back({e.time, x});
            value = now;
        }
    }
    record_until(t);
    return rep;
}

McDualityResult mc_duality_check(const Graph& g, const RateModel& model, double lambda, const Configuration& eta0,
                                 const Configuration& xi0, double t, std::size_t replicas, std::uint64_t seed,
                                 unsigned threads) {
    const InfectionRate infection = InfectionRate::constant(lambda);
    RunOptions opt;
    opt.horizon = t;
    opt.master_seed = seed;
    auto outcomes = run_replicas(replicas, threads, [&](std::size_t i) {
        RunOptions o = opt;
        o.replica = i;
        Rng fwd(seed, i, StreamTag::simulation);
        Rng back(seed, i, StreamTag::dual);
        const auto a = run_cpvl_gillespie(g, model, infection, eta0, o, fwd);
        const auto b = run_cpli_gillespie(g, model, lambda, xi0, o, back);
        return std::pair<bool, bool>{a.final_state.dominated_by(xi0), eta0.dominated_by(b.final_state)};
    });
    std::size_t l = 0, r = 0;
    for (auto [a, b] : outcomes) {
        l += a;
        r += b;
    }
    McDualityResult res;
    res.lhs = stats::proportion(l, replicas);
    res.rhs = stats::proportion(r, replicas);
    res.combined_std_error = std::hypot(res.lhs.std_error, res.rhs.std_error);
    return res;
}

DualSurvival survival_via_duality(const Graph& g, const RateModel& model, double lambda, Vertex x, double horizon,
                                  std::size_t replicas, std::uint64_t seed, unsigned threads) {
    const InfectionRate infection = InfectionRate::constant(lambda);
    const std::size_t n = g.vertex_count();
    const Configuration single = Configuration::single(n, x);
    const Configuration zero = Configuration::zero(n);
    auto outcomes = run_replicas(replicas, threads, [&](std::size_t i) {
        RunOptions o;
        o.horizon = horizon;
        o.master_seed = seed;
        o.replica = i;
        Rng fwd(seed, i, StreamTag::simulation);
        Rng back(seed, i, StreamTag::dual);
        const auto a = run_cpvl_gillespie(g, model, infection, single, o, fwd);
        const auto b = run_cpli_gillespie(g, model, lambda, zero, o, back);
        return std::pair<bool, bool>{a.extinction_time.has_value(), b.final_state[x] > 0};
    });
    std::size_t e = 0, d = 0;
    for (auto [a, b] : outcomes) {
        e += a;
        d += b;
    }
    return {stats::proportion(e, replicas), stats::proportion(d, replicas)};
}

std::vector<stats::Proportion> dormancy_sweep(const Graph& g, const RateModel& model,
                                              const std::vector<double>& lambdas, Vertex x, double horizon,
                                              std::size_t replicas, std::uint64_t seed, unsigned threads) {
    if (lambdas.empty()) return {};
    for (double l : lambdas)
        if (!(l >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
    const double top = *std::max_element(lambdas.begin(), lambdas.end());
    const Envelopes env = Envelopes::covering(model, InfectionRate::constant(top));
    const DirectedEdges edges(g);
    const Configuration zero = Configuration::zero(g.vertex_count());
    auto outcomes = run_replicas(replicas, threads, [&](std::size_t i) {
        std::vector<CpliReplay> runs;
        runs.reserve(lambdas.size());
        for (double l : lambdas) runs.emplace_back(g, edges, model, l, zero, env, false);
        EventStream stream(g, env, horizon, replica_seed(seed, i, StreamTag::dual));
        Event e;
        while (stream.next(e))
            for (auto& r : runs) r.apply(e);
        std::vector<char> dormant(lambdas.size());
        for (std::size_t k = 0; k < runs.size(); ++k) dormant[k] = runs[k].state()[x] > 0;
        return dormant;
    });
    std::vector<stats::Proportion> out;
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
        std::size_t c = 0;
        for (const auto& o : outcomes) c += o[k];
        out.push_back(stats::proportion(c, replicas));
    }
    return out;
}

}  // namespace cpvl
