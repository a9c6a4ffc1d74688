#include "cpvl/engine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <sstream>

namespace cpvl {

namespace {

/// Binary sum tree over per-vertex rates. Parent sums are recomputed from
/// their children on every update, so no drift accumulates.
class RateTree {
public:
    explicit RateTree(std::size_t n) : size_(std::bit_ceil(std::max<std::size_t>(n, 1))), tree_(2 * size_, 0.0) {}

    void set(std::size_t i, double rate) {
        std::size_t k = size_ + i;
        tree_[k] = rate;
        for (k >>= 1; k >= 1; k >>= 1) tree_[k] = tree_[2 * k] + tree_[2 * k + 1];
    }

    double total() const { return tree_[1]; }

    /// Leaf i with prefix(i) <= u < prefix(i + 1), for u in [0, total).
    std::size_t sample(double u) const {
        std::size_t k = 1;
        while (k < size_) {
            const double left = tree_[2 * k];
            if (u < left || tree_[2 * k + 1] <= 0.0) {
                k = 2 * k;
                u = std::min(u, left);
            } else {
                u -= left;
                k = 2 * k + 1;
            }
        }
        return k - size_;
    }

private:
    std::size_t size_;
    std::vector<double> tree_;
};

/// Grow-on-demand table of a rate function, owned by a single run.
class RateTable {
public:
    template <class F>
    explicit RateTable(F f) : f_(std::move(f)) {}

    double operator()(Load n) {
        if (n >= values_.size()) {
            std::size_t old = values_.size();
            values_.resize(std::max<std::size_t>(n + 1, 2 * old + 8));
            for (std::size_t k = old; k < values_.size(); ++k) values_[k] = f_(static_cast<Load>(k));
        }
        return values_[n];
    }

private:
    std::function<double(Load)> f_;
    std::vector<double> values_;
};

struct CpvlDynamics {
    const Graph& g;
    RateTable birth, death, infect;

    static bool occupied(Load n) { return n > 0; }
    static std::size_t occupied_count(const Configuration& s) { return s.positive_count(); }

    double rate(Vertex x, const Configuration& s) {
        const Load n = s[x];
        if (n > 0) return birth(n) + death(n);
        double r = 0.0;
        for (Vertex y : g.neighbors(x))
            if (s[y] > 0) r += infect(s[y]);
        return r;
    }

    void fire(Vertex x, double u, Configuration& s) {
        const Load n = s[x];
        if (n == 0) {
            s.set(x, 1);
            return;
        }
        const double b = birth(n);
        s.set(x, u < b ? n + 1 : n - 1);
    }
};

struct CpliDynamics {
    const Graph& g;
    RateTable birth, death;
    double lambda;

    static bool occupied(Load n) { return n == 0; }
    static std::size_t occupied_count(const Configuration& s) { return s.size() - s.positive_count(); }

    double rate(Vertex x, const Configuration& s) {
        const Load n = s[x];
        double r = death(n + 1) + birth(n);
        if (n > 0 && lambda > 0.0) {
            std::size_t active = 0;
            for (Vertex y : g.neighbors(x)) active += s[y] == 0;
            r += lambda * static_cast<double>(active);
        }
        return r;
    }

    void fire(Vertex x, double u, Configuration& s) {
        const Load n = s[x];
        const double up = death(n + 1);
        if (u < up) {
            s.set(x, n + 1);
            return;
        }
        const double down = birth(n);
        if (u < up + down) s.set(x, n - 1);
        else s.set(x, 0);
    }
};

template <class Dynamics>
Trajectory run_gillespie(const Graph& g, Dynamics& dyn, const Configuration& init, const RunOptions& opt, Rng& rng) {
    if (init.size() != g.vertex_count()) throw std::invalid_argument("initial configuration does not match graph");
    if (!(opt.horizon >= 0.0)) throw std::invalid_argument("horizon must be >= 0");

    Trajectory tr;
    tr.initial = init;
    tr.master_seed = opt.master_seed;
    tr.replica = opt.replica;
    Configuration state = init;
    const std::size_t n = g.vertex_count();
    RateTree tree(n);
    for (Vertex v = 0; v < n; ++v) tree.set(v, dyn.rate(v, state));

    std::size_t next_snapshot = 0;
    auto take_snapshots_before = [&](double t, bool inclusive) {
        while (next_snapshot < opt.snapshot_times.size() &&
               (opt.snapshot_times[next_snapshot] < t || (inclusive && opt.snapshot_times[next_snapshot] == t))) {
            tr.snapshots.push_back({opt.snapshot_times[next_snapshot], state});
            ++next_snapshot;
        }
    };

    auto boundary_occupied = [&] {
        for (Vertex v : g.boundary_vertices())
            if (Dynamics::occupied(state[v])) return true;
        return false;
    };

    double t = 0.0;
    bool stopped_early = false;
    tr.reached_boundary = boundary_occupied();
    if (tr.reached_boundary && opt.stop_at_boundary) stopped_early = true;
    if (opt.population_threshold && Dynamics::occupied_count(state) >= *opt.population_threshold) {
        tr.hit_population_threshold = true;
        stopped_early = true;
    }

    while (!stopped_early) {
        const double total = tree.total();
        if (total <= 0.0) {
            tr.extinction_time = t;
            break;
        }
        const double dt = rng.exponential(total);
        if (t + dt > opt.horizon) {
            t = opt.horizon;
            break;
        }
        t += dt;
        take_snapshots_before(t, false);
        const Vertex x = static_cast<Vertex>(tree.sample(rng.uniform(total)));
        const double rx = dyn.rate(x, state);
        dyn.fire(x, rng.uniform(rx), state);
        ++tr.event_count;
        tree.set(x, dyn.rate(x, state));
        for (Vertex y : g.neighbors(x)) tree.set(y, dyn.rate(y, state));

        if (Dynamics::occupied(state[x]) && g.is_boundary(x)) {
            tr.reached_boundary = true;
            if (opt.stop_at_boundary) stopped_early = true;
        }
        if (opt.population_threshold && Dynamics::occupied_count(state) >= *opt.population_threshold) {
            tr.hit_population_threshold = true;
            stopped_early = true;
        }
    }
    tr.end_time = t;
    // A frozen state persists to the horizon; an early stop leaves later times unobserved.
    take_snapshots_before(stopped_early ? t : opt.horizon, true);
    tr.final_state = std::move(state);
    return tr;
}

void check_envelope(const char* stream, double required, double envelope, Load at) {
    if (required > envelope) {
        std::ostringstream os;
        os << stream << " stream envelope " << envelope << " is below the reachable rate " << required
           << " at level " << at;
        throw EnvelopeViolation(os.str());
    }
}

Load require_max_load(const RateModel& m, const Configuration& init) {
    auto ml = m.max_load();
    if (!ml) throw std::invalid_argument("event-log replay requires a capped model (finite max load)");
    if (init.max_entry() > *ml)
        throw std::invalid_argument("initial configuration exceeds the model's max load " + std::to_string(*ml));
    return *ml;
}

}  // namespace

Trajectory run_cpvl_gillespie(const Graph& g, const RateModel& model, const InfectionRate& infection,
                              const Configuration& init, const RunOptions& options, Rng& rng) {
    CpvlDynamics dyn{g,
                     RateTable([&](Load n) { return model.birth(n); }),
                     RateTable([&](Load n) { return model.death(n); }),
                     RateTable([&](Load n) { return infection(n); })};
    return run_gillespie(g, dyn, init, options, rng);
}

Trajectory run_cpli_gillespie(const Graph& g, const RateModel& model, double lambda, const Configuration& init,
                              const RunOptions& options, Rng& rng) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
    CpliDynamics dyn{g, RateTable([&](Load n) { return model.birth(n); }),
                     RateTable([&](Load n) { return model.death(n); }), lambda};
    return run_gillespie(g, dyn, init, options, rng);
}

// ---------------------------------------------------------------------------

Envelopes Envelopes::covering(const RateModel& model, const InfectionRate& infection) {
    auto ml = model.max_load();
    if (!ml) throw std::invalid_argument("envelopes need a capped model (finite max load)");
    Envelopes env;
    for (Load n = 0; n <= *ml; ++n) env.birth = std::max(env.birth, model.birth(n));
    for (Load n = 0; n <= *ml + 1; ++n) env.death = std::max(env.death, model.death(n));
    for (Load n = 1; n <= *ml; ++n) env.infection = std::max(env.infection, infection(n));
    return env;
}

Envelopes Envelopes::max(const Envelopes& o) const {
    return {std::max(birth, o.birth), std::max(death, o.death), std::max(infection, o.infection)};
}

EventStream::EventStream(const Graph& g, const Envelopes& env, double horizon, std::uint64_t seed)
    : env_(env), horizon_(horizon), rng_(seed), vertices_(g.vertex_count()), edges_(g.directed_edge_count()) {
    for (double e : {env.birth, env.death, env.infection})
        if (!(e >= 0.0) || !std::isfinite(e)) throw std::invalid_argument("envelopes must be finite and >= 0");
    if (!(horizon >= 0.0)) throw std::invalid_argument("horizon must be >= 0");
    birth_mass_ = static_cast<double>(vertices_) * env.birth;
    death_mass_ = static_cast<double>(vertices_) * env.death;
    total_rate_ = birth_mass_ + death_mass_ + static_cast<double>(edges_) * env.infection;
}

bool EventStream::next(Event& out) {
    if (!(total_rate_ > 0.0) || time_ > horizon_) return false;
    double t;
    do {
        t = time_ + rng_.exponential(total_rate_);
    } while (t == time_);  // ties are re-drawn
    time_ = t;
    if (time_ > horizon_) return false;
    out.time = time_;
    const double u = rng_.uniform(total_rate_);
    if (u < birth_mass_) {
        out.kind = EventKind::birth;
        out.index = static_cast<std::uint32_t>(rng_.below(vertices_));
        out.mark = rng_.uniform(env_.birth);
    } else if (u < birth_mass_ + death_mass_ || edges_ == 0) {
        out.kind = EventKind::death;
        out.index = static_cast<std::uint32_t>(rng_.below(vertices_));
        out.mark = rng_.uniform(env_.death);
    } else {
        out.kind = EventKind::infection;
        out.index = static_cast<std::uint32_t>(rng_.below(edges_));
        out.mark = rng_.uniform(env_.infection);
    }
    return true;
}

EventLog EventLog::generate(const Graph& g, const Envelopes& envelopes, double horizon, std::uint64_t seed) {
    EventLog log;
    log.env_ = envelopes;
    log.horizon_ = horizon;
    log.vertices_ = g.vertex_count();
    log.edges_ = g.directed_edge_count();
    EventStream stream(g, envelopes, horizon, seed);
    Event e;
    while (stream.next(e)) log.events_.push_back(e);
    return log;
}

std::vector<Event> EventLog::stream(EventKind kind, std::uint32_t index) const {
    std::vector<Event> out;
    for (const Event& e : events_)
        if (e.kind == kind && e.index == index) out.push_back(e);
    return out;
}

// ---------------------------------------------------------------------------

CpvlReplay::CpvlReplay(const Graph& g, const DirectedEdges& edges, const RateModel& model,
                       const InfectionRate& infection, Configuration init, const Envelopes& env)
    : edges_(&edges), state_(std::move(init)) {
    if (state_.size() != g.vertex_count()) throw std::invalid_argument("initial configuration does not match graph");
    const Load ml = require_max_load(model, state_);
    birth_.resize(ml + 2);
    death_.resize(ml + 2);
    infect_.resize(ml + 2, 0.0);
    for (Load n = 0; n <= ml + 1; ++n) {
        birth_[n] = model.birth(n);
        death_[n] = model.death(n);
        if (n >= 1) infect_[n] = infection(n);
    }
    for (Load n = 0; n <= ml; ++n) {
        check_envelope("birth", birth_[n], env.birth, n);
        check_envelope("death", death_[n], env.death, n);
        if (n >= 1) check_envelope("infection", infect_[n], env.infection, n);
    }
}

Vertex CpvlReplay::target(const Event& e) const {
    return e.kind == EventKind::infection ? edges_->target[e.index] : e.index;
}

bool CpvlReplay::apply(const Event& e) {
    switch (e.kind) {
        case EventKind::birth: {
            const Load n = state_[e.index];
            if (e.mark < birth_[n]) {
                state_.set(e.index, n + 1);
                return true;
            }
            return false;
        }
        case EventKind::death: {
            const Load n = state_[e.index];
            if (e.mark < death_[n]) {
                state_.set(e.index, n - 1);
                return true;
            }
            return false;
        }
        case EventKind::infection: {
            const Load src = state_[edges_->source[e.index]];
            const Vertex x = edges_->target[e.index];
            if (src > 0 && e.mark < infect_[src] && state_[x] == 0) {
                state_.set(x, 1);
                return true;
            }
            return false;
        }
    }
    return false;
}

CpliReplay::CpliReplay(const Graph& g, const DirectedEdges& edges, const RateModel& model, double lambda,
                       Configuration init, const Envelopes& env, bool dual)
    : edges_(&edges), lambda_(lambda), dual_(dual), state_(std::move(init)) {
    if (state_.size() != g.vertex_count()) throw std::invalid_argument("initial configuration does not match graph");
    const Load ml = require_max_load(model, state_);
    if (model.death(ml + 1) > 0.0)
        throw std::invalid_argument("CPLI replay needs d(max_load + 1) = 0 to keep dormancy bounded");
    birth_.resize(ml + 2);
    death_.resize(ml + 2);
    for (Load n = 0; n <= ml + 1; ++n) {
        birth_[n] = model.birth(n);
        death_[n] = model.death(n);
    }
    for (Load n = 0; n <= ml; ++n) {
        check_envelope("birth", birth_[n], env.birth, n);
        check_envelope("death", death_[n + 1], env.death, n + 1);
    }
    check_envelope("infection", lambda, env.infection, 0);
}

Vertex CpliReplay::target(const Event& e) const {
    if (e.kind != EventKind::infection) return e.index;
    return dual_ ? edges_->source[e.index] : edges_->target[e.index];
}

bool CpliReplay::apply(const Event& e) {
    switch (e.kind) {
        case EventKind::death: {  // deepens dormancy
            const Load n = state_[e.index];
            if (e.mark < death_[n + 1]) {
                state_.set(e.index, n + 1);
                return true;
            }
            return false;
        }
        case EventKind::birth: {  // lowers dormancy
            const Load n = state_[e.index];
            if (e.mark < birth_[n]) {
                state_.set(e.index, n - 1);
                return true;
            }
            return false;
        }
        case EventKind::infection: {
            Vertex src = edges_->source[e.index];
            Vertex dst = edges_->target[e.index];
            if (dual_) std::swap(src, dst);
            if (state_[src] == 0 && e.mark < lambda_ && state_[dst] > 0) {
                state_.set(dst, 0);
                return true;
            }
            return false;
        }
    }
    return false;
}

DominatingReplay::DominatingReplay(const RateModel& model, const Configuration& init, const Envelopes& env) {
    const Load ml = require_max_load(model, init);
    birth_.resize(ml + 2);
    death_.resize(ml + 2);
    for (Load n = 0; n <= ml + 1; ++n) {
        birth_[n] = model.birth(n);
        death_[n] = n >= 2 ? model.death(n) : 0.0;
    }
    for (Load n = 1; n <= ml; ++n) {
        check_envelope("birth", birth_[n], env.birth, n);
        check_envelope("death", death_[n], env.death, n);
    }
    std::vector<Load> z(init.size());
    for (std::size_t v = 0; v < z.size(); ++v) z[v] = std::max<Load>(init[static_cast<Vertex>(v)], 1);
    state_ = Configuration(std::move(z));
}

bool DominatingReplay::apply(const Event& e) {
    if (e.kind == EventKind::infection) return false;
    const Load n = state_[e.index];
    if (e.kind == EventKind::birth && e.mark < birth_[n]) {
        state_.set(e.index, n + 1);
        return true;
    }
    if (e.kind == EventKind::death && e.mark < death_[n]) {
        state_.set(e.index, n - 1);
        return true;
    }
    return false;
}

// ---------------------------------------------------------------------------

namespace {

void check_log_matches(const Graph& g, const EventLog& log) {
    if (log.vertex_count() != g.vertex_count() || log.edge_count() != g.directed_edge_count())
        throw std::invalid_argument("event log was generated for a different graph");
}

}  // namespace

Trajectory run_cpvl_from_log(const Graph& g, const RateModel& model, const InfectionRate& infection,
                             const Configuration& init, const EventLog& log) {
    check_log_matches(g, log);
    DirectedEdges edges(g);
    CpvlReplay replay(g, edges, model, infection, init, log.envelopes());
    Trajectory tr;
    tr.initial = init;
    tr.end_time = log.horizon();
    if (init.is_zero()) tr.extinction_time = 0.0;
    else {
        for (const Event& e : log.events()) {
            if (!replay.apply(e)) continue;
            ++tr.event_count;
            if (replay.state().is_zero()) {
                tr.extinction_time = e.time;
                tr.end_time = e.time;
                break;
            }
        }
    }
    tr.final_state = replay.state();
    return tr;
}

Trajectory run_cpli_from_log(const Graph& g, const RateModel& model, double lambda, const Configuration& init,
                             const EventLog& log, Direction direction) {
    check_log_matches(g, log);
    DirectedEdges edges(g);
    const bool reverse = direction == Direction::reverse;
    CpliReplay replay(g, edges, model, lambda, init, log.envelopes(), reverse);
    Trajectory tr;
    tr.initial = init;
    tr.end_time = log.horizon();
    auto events = log.events();
    if (reverse) {
        for (auto it = events.rbegin(); it != events.rend(); ++it) tr.event_count += replay.apply(*it);
    } else {
        for (const Event& e : events) tr.event_count += replay.apply(e);
    }
    tr.final_state = replay.state();
    return tr;
}

CoupledRun run_coupled_pair(const Graph& g, const ModelSpec& lo, const ModelSpec& hi, const Configuration& init_lo,
                            const Configuration& init_hi, const EventLog& log) {
    check_log_matches(g, log);
    if (!init_lo.dominated_by(init_hi)) throw std::invalid_argument("run_coupled_pair requires init_lo <= init_hi");
    const auto ml_lo = lo.rates.max_load(), ml_hi = hi.rates.max_load();
    if (!ml_lo || !ml_hi) throw std::invalid_argument("run_coupled_pair requires capped models");
    const Load top = std::max(*ml_lo, *ml_hi) + 1;
    for (Load n = 0; n <= top; ++n) {
        if (hi.rates.birth(n) < lo.rates.birth(n) || hi.rates.death(n) > lo.rates.death(n) ||
            (n >= 1 && hi.infection(n) < lo.infection(n)))
            throw std::invalid_argument("rate ordering Lambda' >= Lambda, b' >= b, d' <= d fails at n = " +
                                        std::to_string(n));
    }
    DirectedEdges edges(g);
    CpvlReplay a(g, edges, lo.rates, lo.infection, init_lo, log.envelopes());
    CpvlReplay b(g, edges, hi.rates, hi.infection, init_hi, log.envelopes());
    CoupledRun run;
    run.lower.initial = init_lo;
    run.upper.initial = init_hi;
    for (const Event& e : log.events()) {
        run.lower.event_count += a.apply(e);
        run.upper.event_count += b.apply(e);
        const Vertex x = a.target(e);
        if (a.state()[x] > b.state()[x]) ++run.ordering_violations;
        if (!run.lower.extinction_time && a.state().is_zero()) run.lower.extinction_time = e.time;
        if (!run.upper.extinction_time && b.state().is_zero()) run.upper.extinction_time = e.time;
    }
    if (init_lo.is_zero()) run.lower.extinction_time = 0.0;
    if (init_hi.is_zero()) run.upper.extinction_time = 0.0;
    run.lower.final_state = a.state();
    run.upper.final_state = b.state();
    run.lower.end_time = run.upper.end_time = log.horizon();
    return run;
}

Load check_additivity(const Graph& g, const RateModel& model, const InfectionRate& infection,
                      const Configuration& eta1, const Configuration& eta2, const EventLog& log) {
    check_log_matches(g, log);
    DirectedEdges edges(g);
    CpvlReplay p1(g, edges, model, infection, eta1, log.envelopes());
    CpvlReplay p2(g, edges, model, infection, eta2, log.envelopes());
    CpvlReplay pj(g, edges, model, infection, eta1.join(eta2), log.envelopes());
    auto deviation = [&](Vertex x) {
        const Load joined = std::max(p1.state()[x], p2.state()[x]);
        const Load direct = pj.state()[x];
        return joined > direct ? joined - direct : direct - joined;
    };
    Load worst = 0;
    for (Vertex v = 0; v < g.vertex_count(); ++v) worst = std::max(worst, deviation(v));
    for (const Event& e : log.events()) {
        p1.apply(e);
        p2.apply(e);
        pj.apply(e);
        worst = std::max(worst, deviation(pj.target(e)));
    }
    return worst;
}

std::uint64_t check_domination(const Graph& g, const RateModel& model, const InfectionRate& infection,
                               const Configuration& init, const EventLog& log) {
    check_log_matches(g, log);
    DirectedEdges edges(g);
    CpvlReplay eta(g, edges, model, infection, init, log.envelopes());
    DominatingReplay z(model, init, log.envelopes());
    std::uint64_t violations = 0;
    for (const Event& e : log.events()) {
        eta.apply(e);
        z.apply(e);
        const Vertex x = eta.target(e);
        violations += eta.state()[x] > z.state()[x];
    }
    return violations;
}

std::uint64_t check_cpli_order(const Graph& g, const RateModel& model, double lambda_a, const Configuration& xi_a,
                               double lambda_b, const Configuration& xi_b, const EventLog& log) {
    check_log_matches(g, log);
    if (lambda_a < lambda_b) throw std::invalid_argument("check_cpli_order requires lambda_a >= lambda_b");
    if (!xi_a.dominated_by(xi_b)) throw std::invalid_argument("check_cpli_order requires xi_a <= xi_b");
    DirectedEdges edges(g);
    CpliReplay a(g, edges, model, lambda_a, xi_a, log.envelopes(), false);
    CpliReplay b(g, edges, model, lambda_b, xi_b, log.envelopes(), false);
    std::uint64_t violations = 0;
    for (const Event& e : log.events()) {
        a.apply(e);
        b.apply(e);
        const Vertex x = a.target(e);
        violations += a.state()[x] > b.state()[x];
    }
    return violations;
}

std::string trajectory_csv_header() { return "replica,extinct,extinction_time,final_infected,final_total_load"; }

std::string trajectory_csv_row(const Trajectory& t) {
    std::ostringstream os;
    os.precision(17);
    os << t.replica << ',' << (t.extinction_time ? 1 : 0) << ',';
    if (t.extinction_time) os << *t.extinction_time;
    else os << "";
    os << ',' << t.final_state.positive_count() << ',' << t.final_state.total();
    return os.str();
}

}  // namespace cpvl
