#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cpvl/bd.hpp"
#include "cpvl/engine.hpp"
#include "cpvl/stats.hpp"

using namespace cpvl;

namespace {

Configuration random_config(std::size_t n, Load top, Rng& rng) {
    std::vector<Load> v(n);
    for (auto& x : v) x = static_cast<Load>(rng.below(top + 1));
    return Configuration(std::move(v));
}

}  // namespace

TEST_CASE("zero initial state has no events") {
    auto g = Graph::cycle(5);
    Rng rng(1);
    RunOptions o;
    o.horizon = 10;
    auto t = run_cpvl_gillespie(g, RateModel::power_law(2), InfectionRate::constant(1), Configuration::zero(5), o, rng);
    CHECK(t.event_count == 0);
    REQUIRE(t.extinction_time);
    CHECK(*t.extinction_time == 0.0);
}

TEST_CASE("gillespie is a pure function of the seed") {
    auto g = Graph::torus(2, 5);
    RunOptions o;
    o.horizon = 5;
    o.snapshot_times = {1, 2, 3};
    auto init = Configuration::single(25, 0, 2);
    Rng a(42), b(42);
    auto ta = run_cpvl_gillespie(g, RateModel::power_law(2), InfectionRate::constant(2), init, o, a);
    auto tb = run_cpvl_gillespie(g, RateModel::power_law(2), InfectionRate::constant(2), init, o, b);
    CHECK(ta.final_state == tb.final_state);
    CHECK(ta.event_count == tb.event_count);
    CHECK(trajectory_csv_row(ta) == trajectory_csv_row(tb));
    if (!ta.extinction_time) CHECK(ta.snapshots.size() == 3);
}

TEST_CASE("isolated vertex recovers like the birth-death chain") {
    auto g = Graph::empty(1);
    auto m = RateModel::power_law(2);
    std::vector<double> sim, bd;
    RunOptions o;
    o.horizon = 1e9;
    for (std::size_t i = 0; i < 4000; ++i) {
        Rng r1(1, i), r2(2, i);
        sim.push_back(*run_cpvl_gillespie(g, m, InfectionRate::constant(1), Configuration::single(1, 0), o, r1).extinction_time);
        bd.push_back(*sample_absorption_time(m, 1, 1e9, r2));
    }
    CHECK(stats::ks_two_sample(sim, bd).p_value > 0.01);
}

TEST_CASE("cpli capped top level is absorbing without reactivation") {
    const Load K = 2;
    auto m = cap_model(RateModel::power_law(2), K);
    auto g = Graph::cycle(4);
    Rng rng(3);
    RunOptions o;
    o.horizon = 100;
    auto t = run_cpli_gillespie(g, m, 0.0, Configuration::constant(4, K + 1), o, rng);
    CHECK(t.event_count == 0);
    CHECK(t.extinction_time.has_value());
}

TEST_CASE("cpli from all active: infection on active vertices is a no-op") {
    auto g = Graph::cycle(6);
    Rng rng(8);
    RunOptions o;
    o.horizon = 1e-6;
    auto t = run_cpli_gillespie(g, RateModel::power_law(2), 5.0, Configuration::zero(6), o, rng);
    CHECK(t.final_state.is_zero());
}

TEST_CASE("event streams") {
    auto g = Graph::empty(1);
    Envelopes env{2.0, 0.0, 0.0};
    std::vector<double> counts;
    for (std::uint64_t s = 0; s < 1000; ++s) counts.push_back(static_cast<double>(EventLog::generate(g, env, 10, s).events().size()));
    auto m = stats::mean_and_stderr(counts);
    CHECK(std::abs(m.mean - 20.0) < 3 * m.std_error);

    auto c = Graph::cycle(5);
    Envelopes e{1.0, 2.0, 0.5};
    auto l1 = EventLog::generate(c, e, 20, 9), l2 = EventLog::generate(c, e, 20, 9);
    REQUIRE(l1.events().size() == l2.events().size());
    for (std::size_t i = 0; i < l1.events().size(); ++i) {
        CHECK(l1.events()[i].time == l2.events()[i].time);
        CHECK(l1.events()[i].mark == l2.events()[i].mark);
    }
    CHECK(EventLog::generate(c, e, 0, 9).events().empty());
    for (std::size_t i = 1; i < l1.events().size(); ++i) CHECK(l1.events()[i].time > l1.events()[i - 1].time);
    for (const auto& ev : l1.events()) {
        const double env_k = ev.kind == EventKind::birth ? 1.0 : ev.kind == EventKind::death ? 2.0 : 0.5;
        CHECK(ev.mark >= 0.0);
        CHECK(ev.mark <= env_k);
    }
}

TEST_CASE("replay is pure and changes one vertex per point") {
    auto g = Graph::cycle(10);
    auto m = cap_model(RateModel::power_law(2), 3);
    auto inf = InfectionRate::constant(1);
    auto log = EventLog::generate(g, Envelopes::covering(m, inf), 10, 77);
    Rng rng(4);
    auto init = random_config(10, 4, rng);
    auto a = run_cpvl_from_log(g, m, inf, init, log), b = run_cpvl_from_log(g, m, inf, init, log);
    CHECK(a.final_state == b.final_state);

    DirectedEdges edges(g);
    CpvlReplay r(g, edges, m, inf, init, log.envelopes());
    for (const auto& e : log.events()) {
        auto before = r.state();
        const bool changed = r.apply(e);
        std::size_t diffs = 0;
        for (Vertex v = 0; v < 10; ++v) {
            if (before[v] == r.state()[v]) continue;
            ++diffs;
            CHECK(v == r.target(e));
            const long d = static_cast<long>(r.state()[v]) - static_cast<long>(before[v]);
            CHECK((d == 1 || d == -1));
        }
        CHECK(diffs == (changed ? 1u : 0u));
    }
}

TEST_CASE("envelope violations are named") {
    auto g = Graph::cycle(4);
    auto m = cap_model(RateModel::power_law(2), 3);
    DirectedEdges edges(g);
    Envelopes small{1.0, 10.0, 10.0};
    CHECK_THROWS_WITH_AS(CpvlReplay(g, edges, m, InfectionRate::constant(1), Configuration::zero(4), small),
                         doctest::Contains("birth"), EnvelopeViolation);
    CHECK_THROWS_AS(CpvlReplay(g, edges, RateModel::power_law(2), InfectionRate::constant(1), Configuration::zero(4),
                               small),
                    std::invalid_argument);
    auto cov = Envelopes::covering(m, InfectionRate::constant(1));
    CHECK_THROWS_AS(CpliReplay(g, edges, m, 2.0, Configuration::zero(4), cov, false), EnvelopeViolation);
}

TEST_CASE("coupled pairs stay ordered") {
    auto g = Graph::cycle(20);
    auto m = cap_model(RateModel::power_law(2), 3);
    ModelSpec lo{m, InfectionRate::constant(1)}, hi{m, InfectionRate::constant(2)};
    auto env = Envelopes::covering(m, hi.infection);
    const auto d0 = Configuration::single(20, 0);
    std::vector<Load> two(20, 0);
    two[0] = 1;
    two[7] = 1;
    const Configuration d0x(two);
    std::uint64_t v = 0;
    bool identical = true;
    for (std::uint64_t s = 0; s < 200; ++s) {
        auto log = EventLog::generate(g, env, 10, s);
        v += run_coupled_pair(g, lo, hi, d0, d0, log).ordering_violations;
        v += run_coupled_pair(g, lo, lo, d0, d0x, log).ordering_violations;
        auto same = run_coupled_pair(g, lo, lo, d0, d0, log);
        identical = identical && same.lower.final_state == same.upper.final_state;
    }
    CHECK(v == 0);
    CHECK(identical);
    CHECK_THROWS(run_coupled_pair(g, hi, lo, d0, d0, EventLog::generate(g, env, 1, 0)));
    CHECK_THROWS(run_coupled_pair(g, lo, hi, d0x, d0, EventLog::generate(g, env, 1, 0)));
}

TEST_CASE("additivity and domination") {
    auto g = Graph::cycle(10);
    auto m = cap_model(RateModel::power_law(2), 3);
    auto inf = InfectionRate::constant(1);
    auto env = Envelopes::covering(m, inf);
    Load worst = 0;
    std::uint64_t dom = 0;
    for (std::uint64_t s = 0; s < 200; ++s) {
        Rng rng(s, 0, StreamTag::initial_state);
        auto a = random_config(10, 4, rng), b = random_config(10, 4, rng);
        auto log = EventLog::generate(g, env, 10, s);
        worst = std::max(worst, check_additivity(g, m, inf, a, b, log));
        worst = std::max(worst, check_additivity(g, m, inf, a, Configuration::zero(10), log));
        worst = std::max(worst, check_additivity(g, m, inf, a, a, log));
        dom += check_domination(g, m, inf, a, log);
    }
    CHECK(worst == 0);
    CHECK(dom == 0);
}

TEST_CASE("cpli order under shared logs") {
    auto g = Graph::cycle(8);
    auto m = cap_model(RateModel::power_law(2), 2);
    auto env = Envelopes::covering(m, InfectionRate::constant(2));
    std::uint64_t v = 0;
    for (std::uint64_t s = 0; s < 200; ++s) {
        Rng rng(s);
        auto lo = random_config(8, 3, rng);
        auto hi = lo.join(random_config(8, 3, rng));
        auto log = EventLog::generate(g, env, 10, s);
        v += check_cpli_order(g, m, 2.0, lo, 1.0, hi, log);
        v += check_cpli_order(g, m, 1.0, lo, 1.0, hi, log);
    }
    CHECK(v == 0);
    CHECK_THROWS(check_cpli_order(g, m, 1.0, Configuration::zero(8), 2.0, Configuration::zero(8),
                                  EventLog::generate(g, env, 1, 0)));
}

TEST_CASE("reverse replay of an empty log and swapped roles") {
    auto g = Graph::edge_pair();
    auto m = cap_model(RateModel::power_law(2), 2);
    auto env = Envelopes::covering(m, InfectionRate::constant(1));
    auto empty = EventLog::generate(g, env, 0, 1);
    Configuration xi(std::vector<Load>{2, 1});
    CHECK(run_cpli_from_log(g, m, 1.0, xi, empty, Direction::reverse).final_state == xi);

    // a death point accepted at CPVL load n + 1 is accepted as a CPLI up-move at n
    DirectedEdges edges(g);
    auto log = EventLog::generate(g, env, 50, 3);
    for (const auto& e : log.events()) {
        if (e.kind != EventKind::death) continue;
        for (Load n = 0; n + 1 <= *m.max_load(); ++n) {
            CpvlReplay fwd(g, edges, m, InfectionRate::constant(1), Configuration(std::vector<Load>{n + 1, n + 1}), env);
            CpliReplay dual(g, edges, m, 1.0, Configuration(std::vector<Load>{n, n}), env, false);
            CHECK(fwd.apply(e) == dual.apply(e));
        }
    }
}

TEST_CASE("gillespie and log replay agree in law") {
    auto g = Graph::edge_pair();
    auto m = cap_model(RateModel::power_law(2), 2);
    auto inf = InfectionRate::constant(1.5);
    auto env = Envelopes::covering(m, inf);
    auto init = Configuration::single(2, 0);
    std::vector<double> a, b;
    RunOptions o;
    o.horizon = 200;
    for (std::size_t i = 0; i < 4000; ++i) {
        Rng rng(5, i);
        auto t = run_cpvl_gillespie(g, m, inf, init, o, rng);
        a.push_back(t.extinction_time.value_or(o.horizon));
        auto l = run_cpvl_from_log(g, m, inf, init, EventLog::generate(g, env, o.horizon, replica_seed(6, i)));
        b.push_back(l.extinction_time.value_or(o.horizon));
    }
    CHECK(stats::ks_two_sample(a, b).p_value > 0.01);
}

TEST_CASE("boundary and population stops") {
    auto g = Graph::tree_ball(3, 3);
    Rng rng(2);
    RunOptions o;
    o.horizon = 1000;
    o.stop_at_boundary = true;
    auto t = run_cpvl_gillespie(g, RateModel::power_law(2), InfectionRate::constant(20), Configuration::single(g.vertex_count(), 0),
                                o, rng);
    if (t.reached_boundary) {
        bool any = false;
        for (Vertex v : g.boundary_vertices()) any = any || t.final_state[v] > 0;
        CHECK(any);
    }
    RunOptions p;
    p.horizon = 1000;
    p.population_threshold = 5;
    Rng r2(3);
    auto u = run_cpvl_gillespie(Graph::cycle(30), RateModel::power_law(2), InfectionRate::constant(20),
                                Configuration::single(30, 0), p, r2);
    if (u.hit_population_threshold) CHECK(u.final_state.positive_count() == 5);
}

TEST_CASE("csv row") {
    Trajectory t;
    t.replica = 3;
    t.final_state = Configuration(std::vector<Load>{0, 2, 1});
    CHECK(trajectory_csv_header() == "replica,extinct,extinction_time,final_infected,final_total_load");
    CHECK(trajectory_csv_row(t) == "3,0,,2,3");
}
