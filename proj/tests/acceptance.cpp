// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Pass criterion numbers as arguments to run a subset.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cpvl/analysis.hpp"
#include "cpvl/bd.hpp"
#include "cpvl/cli.hpp"
#include "cpvl/duality.hpp"
#include "cpvl/engine.hpp"
#include "cpvl/farm.hpp"
#include "cpvl/oracle.hpp"
#include "cpvl/stats.hpp"

using namespace cpvl;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double x, int digits = 4) {
    std::ostringstream s;
    s << std::setprecision(digits) << x;
    return s.str();
}

Configuration random_config(std::size_t n, Load top, Rng& rng) {
    std::vector<Load> v(n);
    for (auto& x : v) x = static_cast<Load>(rng.below(top + 1));
    return Configuration(std::move(v));
}

// 1. additivity
Outcome additivity() {
    auto g = Graph::cycle(10);
    auto m = cap_model(RateModel::power_law(2), 3);
    auto inf = InfectionRate::constant(1);
    auto env = Envelopes::covering(m, inf);
    Load worst = 0;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        Rng rng(101, s, StreamTag::initial_state);
        auto a = random_config(10, 4, rng), b = random_config(10, 4, rng);
        worst = std::max(worst, check_additivity(g, m, inf, a, b, EventLog::generate(g, env, 10, replica_seed(101, s, StreamTag::event_log))));
    }
    return {worst == 0, "max deviation " + std::to_string(worst) + " over 1000 seeds"};
}

// 2. monotone couplings in Lambda and in the initial state
Outcome couplings() {
    auto g = Graph::cycle(10);
    auto m = cap_model(RateModel::power_law(2), 3);
    ModelSpec lo{m, InfectionRate::constant(1)}, hi{m, InfectionRate::constant(2)};
    auto env = Envelopes::covering(m, hi.infection);
    std::uint64_t lambda_violations = 0, init_violations = 0;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        Rng rng(202, s, StreamTag::initial_state);
        auto a = random_config(10, 4, rng);
        auto b = a.join(random_config(10, 4, rng));
        auto log = EventLog::generate(g, env, 10, replica_seed(202, s, StreamTag::event_log));
        lambda_violations += run_coupled_pair(g, lo, hi, a, a, log).ordering_violations;
        init_violations += run_coupled_pair(g, lo, lo, a, b, log).ordering_violations;
    }
    return {lambda_violations == 0 && init_violations == 0,
            "violations: Lambda' = 2 Lambda " + std::to_string(lambda_violations) + ", init order " +
                std::to_string(init_violations) + " over 1000 seeds each"};
}

// 3. pathwise duality
Outcome pathwise() {
    auto g = Graph::cycle(8);
    const Load K = 2;
    auto m = cap_model(RateModel::power_law(2), K);
    auto inf = InfectionRate::constant(1);
    auto env = Envelopes::covering(m, inf);
    std::size_t broken = 0;
    std::uint64_t evaluations = 0;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        Rng rng(303, s, StreamTag::initial_state);
        auto eta = random_config(8, K + 1, rng), xi = random_config(8, K + 1, rng);
        auto r = pathwise_duality_check(g, m, inf, eta, xi, 5, EventLog::generate(g, env, 5, replica_seed(303, s, StreamTag::event_log)),
                                        {1, 2, 3, 4});
        broken += r.constant ? 0 : 1;
        evaluations += r.evaluations;
    }
    return {broken == 0, std::to_string(broken) + " non-constant paths of 1000, " + std::to_string(evaluations) +
                             " indicator evaluations"};
}

struct OraclePoint {
    Graph graph;
    std::string name;
    Load cap;
    double lambda;
    double t;
};

std::vector<OraclePoint> oracle_points() {
    std::vector<OraclePoint> pts;
    for (int which = 0; which < 2; ++which)
        for (Load cap : {1u, 2u})
            for (double lambda : {0.5, 1.0, 2.0})
                for (double t : {0.3, 1.0, 3.0})
                    pts.push_back({which ? Graph::cycle(3) : Graph::edge_pair(), which ? "cycle(3)" : "edge_pair", cap,
                                   lambda, t});
    return pts;
}

// 4. exact duality on every oracle point, several (eta0, xi0) pairs each
Outcome exact_duality() {
    double worst = 0.0;
    std::size_t cases = 0;
    for (const auto& p : oracle_points()) {
        auto m = cap_model(RateModel::power_law(2), p.cap);
        for (std::uint64_t s = 0; s < 5; ++s) {
            Rng rng(404, cases, StreamTag::initial_state);
            auto eta = random_config(p.graph.vertex_count(), p.cap + 1, rng);
            auto xi = random_config(p.graph.vertex_count(), p.cap + 1, rng);
            worst = std::max(worst, exact_duality_gap(p.graph, m, p.lambda, eta, xi, p.t, 1e-13).gap);
            ++cases;
        }
    }
    return {worst <= 1e-8, "max gap " + fmt(worst, 3) + " over " + std::to_string(cases) + " cases"};
}

// 5. oracle marginals vs 1e5-replica Gillespie marginals, both processes
Outcome oracle_vs_mc() {
    const std::size_t replicas = 100000;
    double worst = 0.0;
    std::string where;
    std::size_t point = 0;
    for (const auto& p : oracle_points()) {
        auto m = cap_model(RateModel::power_law(2), p.cap);
        const std::size_t n = p.graph.vertex_count();
        for (auto kind : {ProcessKind::cpvl, ProcessKind::cpli}) {
            auto gen = build_generator(p.graph, m, InfectionRate::constant(p.lambda), kind);
            std::vector<Load> init_loads(n, 0);
            init_loads[0] = 1;
            if (kind == ProcessKind::cpli) init_loads[1] = p.cap + 1;
            const Configuration init(init_loads);
            const auto exact = transient_distribution(gen, point_mass(gen, init), p.t, 1e-12);
            RunOptions o;
            o.horizon = p.t;
            const std::uint64_t master = 505 + point;
            auto finals = run_replicas(replicas, 0, [&](std::size_t i) {
                Rng rng(master, i);
                auto tr = kind == ProcessKind::cpvl
                              ? run_cpvl_gillespie(p.graph, m, InfectionRate::constant(p.lambda), init, o, rng)
                              : run_cpli_gillespie(p.graph, m, p.lambda, init, o, rng);
                return tr.final_state;
            });
            for (Vertex v = 0; v < n; ++v) {
                std::map<long, double> exact_law, mc_law;
                const auto marg = vertex_marginal(gen, exact, v);
                for (std::size_t k = 0; k < marg.size(); ++k) exact_law[static_cast<long>(k)] = marg[k];
                for (const auto& f : finals) mc_law[static_cast<long>(f[v])] += 1.0 / replicas;
                const double tv = stats::tv_distance(exact_law, mc_law);
                if (tv > worst) {
                    worst = tv;
                    where = to_string(kind) + " " + p.name + " K=" + std::to_string(p.cap) + " lambda=" + fmt(p.lambda) +
                            " t=" + fmt(p.t) + " vertex " + std::to_string(v);
                }
            }
            ++point;
        }
    }
    return {worst <= 0.01, "max per-vertex TV " + fmt(worst, 3) + " over " + std::to_string(point) + " points (" + where + ")"};
}

// 6. birth-death series against closed forms and Monte Carlo
Outcome bd_analytics() {
    struct Case {
        std::string name;
        RateModel model;
        double exact;
        SeriesResult series;
    };
    std::vector<Case> cases = {
        {"mean_tau_rec(power_law(2))", RateModel::power_law(2), 1.0, mean_tau_rec(RateModel::power_law(2))},
        {"E int Lambda, power_law(3), Lambda = 1", RateModel::power_law(3), 0.5,
         expected_integral_lambda(RateModel::power_law(3), InfectionRate::constant(1))},
        {"mean_tau_rec(linear(1,2))", RateModel::linear(1, 2), std::log(2.0), mean_tau_rec(RateModel::linear(1, 2))},
    };
    bool ok = true;
    std::string detail;
    std::uint64_t master = 606;
    for (auto& c : cases) {
        const double rel = std::abs(c.series.value - c.exact) / c.exact;
        auto samples = run_replicas(100000, 0, [&](std::size_t i) {
            Rng rng(master, i, StreamTag::bd);
            return sample_absorption_time(c.model, 1, 1e300, rng).value();
        });
        const auto mc = stats::mean_and_stderr(samples);
        const double z = std::abs(mc.mean - c.series.value) / mc.std_error;
        const bool pass = c.series.converged() && rel <= 1e-8 && z <= 3.0;
        ok = ok && pass;
        detail += (detail.empty() ? "" : "; ") + c.name + " rel err " + fmt(rel, 2) + ", MC " + fmt(mc.mean, 5) + " (" +
                  fmt(z, 2) + " se)";
        ++master;
    }
    return {ok, detail};
}

// 7. tail regimes
Outcome tail_regimes() {
    const double horizon = 100;
    auto sample = [&](const RateModel& m, std::uint64_t master) {
        return run_replicas(100000, 0, [&](std::size_t i) {
            Rng rng(master, i, StreamTag::bd);
            return sample_absorption_time(m, 1, horizon, rng).value_or(horizon);
        });
    };
    TailOptions power;
    auto heavy = estimate_tail(sample(RateModel::power_law(0.5), 707), horizon, power);
    TailOptions expo;
    expo.mode = TailModel::exponential;
    auto light = estimate_tail(sample(RateModel::linear(1, 2), 708), horizon, expo);
    const bool ok = heavy.exponent >= 0.35 && heavy.exponent <= 0.65 && light.preferred == TailModel::exponential;
    return {ok, "power_law(0.5) exponent " + fmt(heavy.exponent) + " +- " + fmt(heavy.std_error, 2) +
                    "; linear(1,2) preferred " + to_string(light.preferred) + " (rss power " +
                    fmt(light.regression_power_rss, 3) + ", exp " + fmt(light.regression_exp_rss, 3) + ")"};
}

// 8. extinction criterion against simulation
Outcome extinction_check() {
    auto m = RateModel::power_law(2);
    auto inf = InfectionRate::constant(0.4);
    auto crit = extinction_criterion(2, m, inf);
    SurvivalOptions o;
    o.horizon = 50;
    o.replicas = 1000;
    o.seed = 808;
    auto s = estimate_survival(Graph::torus(1, 500), m, inf, Configuration::single(500, 0), o);
    const bool ok = crit.verdict == CriterionVerdict::guaranteed_extinction && s.estimate <= 0.05;
    return {ok, "criterion value " + fmt(crit.value) + " (" + to_string(crit.verdict) + "), survival proxy " +
                    fmt(s.estimate, 3) + " +- " + fmt(s.std_error, 2)};
}

struct Sandwich {
    LambdaCResult cpvl;
    LambdaCResult cp;
};

std::optional<Sandwich> sandwich_cache;

const Sandwich& sandwich() {
    if (sandwich_cache) return *sandwich_cache;
    const auto g = Graph::torus(1, 500);
    const auto init = Configuration::constant(500, 1);
    SurvivalOptions s;
    s.horizon = 100;
    s.replicas = 200;
    s.seed = 909;
    LambdaCOptions o;
    o.lo = 0.25;
    o.hi = 4;
    o.resolution = 0.05;
    o.max_replicas = 1600;
    Sandwich r;
    r.cpvl = estimate_lambda_c(g, RateModel::power_law(2), 0, init, s, o);
    // d(1) = 2 for the viral-load chain, so the classical process runs on twice the horizon
    s.horizon = 200;
    s.seed = 910;
    r.cp = estimate_lambda_c(g, RateModel::classical_contact(), 0, init, s, o);
    sandwich_cache = r;
    return *sandwich_cache;
}

// 9. lambda_c sandwich
Outcome lambda_c_sandwich() {
    const auto& r = sandwich();
    if (r.cpvl.inconclusive || r.cp.inconclusive)
        return {false, "inconclusive bisection: " + r.cpvl.note + " " + r.cp.note};
    const double tau = mean_tau_rec(RateModel::power_law(2)).value;
    const double lower = 1.0 / (2 * tau);
    const double upper = 2 * r.cp.midpoint();
    const double se_lo = r.cpvl.half_width();
    const double se_hi = std::hypot(r.cpvl.half_width(), 2 * r.cp.half_width());
    const bool ok = r.cpvl.lambda_lo >= lower - 2 * se_lo && r.cpvl.lambda_hi <= upper + 2 * se_hi;
    return {ok, "CPVL bracket [" + fmt(r.cpvl.lambda_lo) + ", " + fmt(r.cpvl.lambda_hi) + "], CP bracket [" +
                    fmt(r.cp.lambda_lo) + ", " + fmt(r.cp.lambda_hi) + "], bounds [" + fmt(lower) + ", " + fmt(upper) + "]"};
}

// 10. series regimes
Outcome regimes() {
    std::size_t mismatches = 0, checked = 0;
    for (double a : {0.5, 1.5, 2.5, 3.5, 4.5})
        for (double gamma : {0.0, 1.0, 2.0, 3.0, 4.0}) {
            ++checked;
            if (corollary_regimes(RateModel::power_law(a), gamma).converges != (gamma < a - 1)) ++mismatches;
        }
    for (double gamma : {0.0, 2.0, 5.0}) {
        ++checked;
        if (!corollary_regimes(RateModel::linear(1, 2), gamma).converges) ++mismatches;
    }
    return {mismatches == 0, std::to_string(mismatches) + " mismatches over " + std::to_string(checked) + " points"};
}

// 11. CPLI dormancy at the origin
Outcome cpli_phases() {
    const auto& r = sandwich();
    const double lambda = 4 * r.cpvl.lambda_hi;
    auto g = Graph::cycle(100);
    auto m = RateModel::power_law(2);
    InvariantOptions o;
    o.burn_in = 10;
    o.spacing = 1;
    o.samples = 40;
    o.replicas = 200;
    o.seed = 1111;
    auto high = sample_upper_invariant_cpli(g, m, lambda, o);
    o.seed = 1112;
    auto zero = sample_upper_invariant_cpli(g, m, 0.0, o);
    const bool ok = high.flat && zero.growing;
    return {ok, "lambda " + fmt(lambda) + ": slope " + fmt(high.second_half.slope, 3) + " +- " +
                    fmt(high.second_half.slope_stderr, 2) + " (" + high.verdict + "); lambda 0: slope " +
                    fmt(zero.second_half.slope, 3) + " +- " + fmt(zero.second_half.slope_stderr, 2) + " (" +
                    zero.verdict + ")"};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// 12. byte-identical artifacts
Outcome determinism() {
    const char* env = std::getenv("CPVL_TEST_TMP");
    const fs::path root = fs::path(env ? env : fs::temp_directory_path().string()) / "determinism";
    fs::remove_all(root);
    fs::create_directories(root);
    const auto cfg = root / "run.toml";
    std::ofstream(cfg) << "[graph]\nkind = \"cycle\"\nsize = 20\n\n[rates]\nfamily = \"power_law\"\na = 2\ncap = 4\n\n"
                          "[infection]\nlambda = 1.5\n\n[run]\nhorizon = 10\nreplicas = 100\nseed = 12\n"
                          "snapshots = [2, 5]\n\n[sweep]\nlambdas = [0.5, 1, 2]\n\n[duality]\ncases = 20\n";
    std::size_t files = 0, differing = 0;
    for (const char* sub : {"simulate", "survival", "sweep", "duality", "criteria", "tail", "invariant", "truncation"}) {
        std::ostringstream out, err;
        for (const char* run : {"a", "b"}) {
            const std::string threads = run[0] == 'a' ? "1" : "2";
            const int code = run_cli({"--config", cfg.string(), "--out", (root / run / sub).string(), "--threads", threads,
                                      "--set", "invariant.samples=8", "--set", "run.replicas=50", sub},
                                     out, err);
            if (code != exit_ok && code != exit_inconclusive) return {false, std::string(sub) + " failed: " + err.str()};
        }
        for (const auto& entry : fs::directory_iterator(root / "a" / sub)) {
            ++files;
            if (slurp(entry.path()) != slurp(root / "b" / sub / entry.path().filename())) ++differing;
        }
    }
    return {differing == 0 && files > 0,
            std::to_string(differing) + " differing of " + std::to_string(files) + " artifacts over 8 subcommands"};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"pathwise additivity", additivity},
        {"monotone couplings", couplings},
        {"pathwise duality", pathwise},
        {"exact duality via oracle", exact_duality},
        {"oracle vs Monte Carlo marginals", oracle_vs_mc},
        {"birth-death analytics", bd_analytics},
        {"tail regimes", tail_regimes},
        {"extinction criterion", extinction_check},
        {"lambda_c sandwich", lambda_c_sandwich},
        {"series regimes", regimes},
        {"CPLI phase behaviour", cpli_phases},
        {"determinism", determinism},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && !only.count(id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome r;
        try {
            r = criteria[i].second();
        } catch (const std::exception& e) {
            r = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += r.pass ? 0 : 1;
        std::cout << (r.pass ? "PASS" : "FAIL") << " " << id << " " << criteria[i].first << ": " << r.detail << " ["
                  << fmt(secs, 3) << " s]" << std::endl;
    }
    return failures ? 1 : 0;
}
