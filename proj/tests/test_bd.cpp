#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cpvl/bd.hpp"
#include "cpvl/stats.hpp"

using namespace cpvl;

namespace {

/// E_1[tau_0] for a chain on {0..M} by solving the first-step equations
/// (b + d) h(n) = 1 + b h(n+1) + d h(n-1), h(0) = 0, with the Thomas algorithm.
double hitting_time_oracle(const RateModel& m, Load M, const std::function<double(Load)>& reward) {
    std::vector<double> lo(M + 1), di(M + 1), up(M + 1), rhs(M + 1);
    for (Load n = 1; n <= M; ++n) {
        lo[n] = -m.death(n);
        di[n] = m.birth(n) + m.death(n);
        up[n] = n < M ? -m.birth(n) : 0.0;
        rhs[n] = reward(n);
    }
    for (Load n = 2; n <= M; ++n) {
        const double w = lo[n] / di[n - 1];
        di[n] -= w * up[n - 1];
        rhs[n] -= w * rhs[n - 1];
    }
    std::vector<double> h(M + 2, 0.0);
    for (Load n = M; n >= 1; --n) h[n] = (rhs[n] - up[n] * h[n + 1]) / di[n];
    return h[1];
}

}  // namespace

TEST_CASE("telescoping series values") {
    auto t2 = mean_tau_rec(RateModel::power_law(2.0));
    REQUIRE(t2.converged());
    CHECK(t2.value == doctest::Approx(1.0).epsilon(1e-8));

    auto i3 = expected_integral_lambda(RateModel::power_law(3.0), InfectionRate::constant(1.0));
    REQUIRE(i3.converged());
    CHECK(i3.value == doctest::Approx(0.5).epsilon(1e-8));

    auto lin = mean_tau_rec(RateModel::linear(1.0, 2.0));
    REQUIRE(lin.converged());
    CHECK(lin.value == doctest::Approx(std::numbers::ln2).epsilon(1e-10));
}

TEST_CASE("series agree with the first-step oracle on capped chains") {
    for (Load K : {1u, 2u, 5u, 20u}) {
        for (const auto& base : {RateModel::power_law(2.0), RateModel::power_law(0.5), RateModel::linear(1.0, 2.0)}) {
            auto m = cap_model(base, K);
            auto s = mean_tau_rec(m);
            REQUIRE(s.converged());
            CHECK(s.value == doctest::Approx(hitting_time_oracle(m, *m.max_load(), [](Load) { return 1.0; })).epsilon(1e-10));
            auto lam = InfectionRate::power(0.7, 1.5);
            auto e = expected_integral_lambda(m, lam);
            CHECK(e.value == doctest::Approx(hitting_time_oracle(m, *m.max_load(), [&](Load n) { return lam(n); })).epsilon(1e-10));
        }
    }
}

TEST_CASE("uncapped series approach the large-cap oracle") {
    // truncation at K leaves a tail of order 1/K for power_law(2)
    auto m = cap_model(RateModel::power_law(2.0), 100000);
    CHECK(hitting_time_oracle(m, *m.max_load(), [](Load) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("divergent and finite series") {
    CHECK(mean_tau_rec(RateModel::power_law(1.0)).status == SeriesStatus::divergent);
    CHECK(mean_tau_rec(RateModel::power_law(0.5)).status == SeriesStatus::divergent);
    CHECK(expected_integral_lambda(RateModel::power_law(2.0), InfectionRate::power(1.0, 1.0)).status ==
          SeriesStatus::divergent);
    auto cp = mean_tau_rec(RateModel::classical_contact());
    REQUIRE(cp.converged());
    CHECK(cp.value == doctest::Approx(1.0));
    // geometric growth of terms
    CHECK(mean_tau_rec(cap_model(RateModel::linear(1.0, 2.0), 3)).converged());
    auto grow = sum_positive_series([](std::size_t n) { return std::pow(1.01, static_cast<double>(n)); });
    CHECK(grow.status == SeriesStatus::divergent);
}

TEST_CASE("reflected stationary law") {
    ReflectedStationary r(RateModel::power_law(2.0));
    CHECK(r.pi1() == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(r.pi(2) == doctest::Approx(1.0 / 6.0).epsilon(1e-8));
    // pi(k) = 1 / (k (k + 1)), so the first N masses sum to 1 - 1/(N+1)
    double total = 0;
    for (Load k = 1; k <= 2000; ++k) {
        total += r.pi(k);
        if (k <= 50) CHECK(r.pi(k) == doctest::Approx(1.0 / (k * (k + 1.0))).epsilon(1e-8));
    }
    CHECK(total == doctest::Approx(1.0 - 1.0 / 2001.0).epsilon(1e-8));
    CHECK_THROWS_AS(ReflectedStationary(RateModel::power_law(0.5)), std::domain_error);
}

TEST_CASE("simulated paths") {
    Rng rng(11);
    auto m = RateModel::power_law(2.0);
    auto p = simulate_bd(m, 3, 1e3, rng);
    REQUIRE(p.times.size() == p.states.size());
    CHECK(p.states.front() == 3);
    for (std::size_t i = 1; i < p.times.size(); ++i) {
        CHECK(p.times[i] > p.times[i - 1]);
        const long step = static_cast<long>(p.states[i]) - static_cast<long>(p.states[i - 1]);
        CHECK(std::abs(step) == 1);
    }
    REQUIRE(p.absorbed);
    CHECK(p.states.back() == 0);
    CHECK(*p.absorption_time == p.times.back());

    Rng a(5), b(5);
    auto pa = simulate_bd(m, 1, 1e3, a);
    auto tb = sample_absorption_time(m, 1, 1e3, b);
    CHECK(pa.absorption_time == tb);
}

TEST_CASE("empirical mean recovery time") {
    std::vector<double> xs;
    for (std::size_t i = 0; i < 20000; ++i) {
        Rng rng(3, i, StreamTag::bd);
        xs.push_back(*sample_absorption_time(RateModel::power_law(2.0), 1, 1e9, rng));
    }
    auto m = stats::mean_and_stderr(xs);
    CHECK(std::abs(m.mean - 1.0) < 4 * m.std_error);
}

TEST_CASE("first infection before recovery") {
    // classical CP: recovery Exp(1) against a clock of rate lambda
    const double lambda = 1.5;
    std::size_t first = 0;
    const std::size_t n = 20000;
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng(9, i);
        first += sample_first_infection_time(RateModel::classical_contact(), InfectionRate::constant(lambda), rng)
                     .time.has_value();
    }
    auto p = stats::proportion(first, n);
    CHECK(std::abs(p.estimate - lambda / (1 + lambda)) < 4 * p.std_error);
}

TEST_CASE("tail estimator on synthetic samples") {
    Rng rng(21);
    std::vector<double> pareto, expo;
    for (int i = 0; i < 20000; ++i) {
        pareto.push_back(std::pow(rng.uniform(), -1.0 / 0.5));  // P(X > x) = x^-0.5
        expo.push_back(rng.exponential(2.0));
    }
    auto p = estimate_tail(pareto, 1e300);
    CHECK(p.exponent == doctest::Approx(0.5).epsilon(0.1));
    CHECK(p.preferred == TailModel::power_law);
    TailOptions o;
    o.mode = TailModel::exponential;
    auto e = estimate_tail(expo, 1e300, o);
    CHECK(e.exponent == doctest::Approx(2.0).epsilon(0.1));
    CHECK(e.preferred == TailModel::exponential);

    // censoring at 100: the censored Pareto likelihood still finds 0.5
    std::vector<double> cens;
    for (double x : pareto) cens.push_back(std::min(x, 100.0));
    CHECK(estimate_tail(cens, 100.0).exponent == doctest::Approx(0.5).epsilon(0.1));

    CHECK_THROWS(estimate_tail({1.0, 2.0}, 10.0));
    CHECK_THROWS(estimate_tail(std::vector<double>(2000, 1.0), 10.0));
}
