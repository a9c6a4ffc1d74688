#include "cpvl/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "cpvl/analysis.hpp"
#include "cpvl/config.hpp"
#include "cpvl/duality.hpp"
#include "cpvl/farm.hpp"
#include "cpvl/oracle.hpp"

namespace cpvl {

namespace {

using json = nlohmann::ordered_json;
constexpr int schema_version = 1;

/// Verdict that maps to exit code 3.
struct Inconclusive : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string hex(std::uint64_t h) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

std::string num(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

class Artifacts {
public:
    Artifacts(const RunConfig& cfg, std::string subcommand) : cfg_(cfg), sub_(std::move(subcommand)) {
        std::filesystem::create_directories(cfg.output_dir);
    }

    json header() const {
        json j;
        j["schema_version"] = schema_version;
        j["subcommand"] = sub_;
        j["config_hash"] = hex(cfg_.hash());
        j["seed"] = cfg_.seed;
        return j;
    }

    void write_json(const std::string& name, const json& body) const {
        json j = header();
        for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
        write(name, j.dump(2) + "\n");
    }

    /// Metadata comment line, header row, then rows.
    void write_csv(const std::string& name, const std::string& columns, const std::vector<std::string>& rows) const {
        std::string s = "# schema_version=" + std::to_string(schema_version) + " subcommand=" + sub_ +
                        " config_hash=" + hex(cfg_.hash()) + " seed=" + std::to_string(cfg_.seed) + "\n";
        s += columns + "\n";
        for (const auto& r : rows) s += r + "\n";
        write(name, s);
    }

private:
    void write(const std::string& name, const std::string& content) const {
        const auto path = std::filesystem::path(cfg_.output_dir) / name;
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + path.string());
        f << content;
    }

    const RunConfig& cfg_;
    std::string sub_;
};

json series_json(const SeriesResult& s) {
    return {{"status", to_string(s.status)},
            {"value", s.converged() ? json(s.value) : json(nullptr)},
            {"terms", s.terms},
            {"tail_estimate", s.tail_estimate},
            {"note", s.note}};
}

json survival_json(const SurvivalEstimate& e) {
    return {{"lambda", e.lambda},       {"gamma", e.gamma},         {"proxy", to_string(e.proxy)},
            {"horizon", e.horizon},     {"replicas", e.replicas},   {"survivors", e.survivors},
            {"estimate", e.estimate},   {"std_error", e.std_error}, {"graph", e.graph}};
}

std::string survival_row(const SurvivalEstimate& e) {
    return num(e.lambda) + "," + num(e.gamma) + "," + to_string(e.proxy) + "," + num(e.horizon) + "," +
           std::to_string(e.replicas) + "," + std::to_string(e.survivors) + "," + num(e.estimate) + "," +
           num(e.std_error);
}

const char* survival_columns = "lambda,gamma,proxy,horizon,replicas,survivors,estimate,std_error";

SurvivalOptions survival_options(const RunConfig& cfg, const Graph& g) {
    SurvivalOptions o;
    o.horizon = cfg.horizon;
    o.replicas = cfg.replicas;
    o.proxy = cfg.proxy.empty() ? default_proxy(g) : survival_proxy_from_string(cfg.proxy);
    o.population_threshold = cfg.population_threshold;
    o.seed = cfg.seed;
    o.threads = cfg.threads;
    return o;
}

/// Model for shared-randomness work: the configured cap, else `fallback`.
RateModel capped_model(const RunConfig& cfg, Load fallback) {
    RateModel m = cfg.rate_model();
    if (m.max_load()) return m;
    return cap_model(m, fallback);
}

void require_constant_infection(const RunConfig& cfg) {
    if (cfg.gamma != 0.0) throw ConfigError({"infection.gamma: this subcommand needs a constant infection rate (gamma = 0)"});
}

// ---------------------------------------------------------------------------

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
    const Graph g = cfg.build_graph();
    const RateModel m = cfg.rate_model();
    const Configuration init = cfg.initial_configuration(g);
    const bool cpli = cfg.process == "cpli";
    if (cpli) require_constant_infection(cfg);
    const InfectionRate inf = cfg.infection();
    auto runs = run_replicas(cfg.replicas, cfg.threads, [&](std::size_t i) {
        RunOptions o;
        o.horizon = cfg.horizon;
        o.snapshot_times = cfg.snapshots;
        o.master_seed = cfg.seed;
        o.replica = i;
        Rng rng(cfg.seed, i, StreamTag::simulation);
        return cpli ? run_cpli_gillespie(g, m, cfg.lambda, init, o, rng) : run_cpvl_gillespie(g, m, inf, init, o, rng);
    });
    std::vector<std::string> rows, snaps;
    std::size_t extinct = 0;
    std::uint64_t events = 0;
    for (const auto& t : runs) {
        rows.push_back(trajectory_csv_row(t));
        extinct += t.extinction_time.has_value();
        events += t.event_count;
        for (const auto& s : t.snapshots)
            snaps.push_back(std::to_string(t.replica) + "," + num(s.time) + "," + std::to_string(s.state.positive_count()) +
                            "," + std::to_string(s.state.total()));
    }
    Artifacts a(cfg, "simulate");
    a.write_csv("simulate.csv", trajectory_csv_header(), rows);
    if (!cfg.snapshots.empty()) a.write_csv("snapshots.csv", "replica,time,positive,total_load", snaps);
    a.write_json("simulate.json", {{"process", cfg.process},
                                   {"graph", g.describe()},
                                   {"rates", m.describe()},
                                   {"infection", inf.describe()},
                                   {"horizon", cfg.horizon},
                                   {"replicas", cfg.replicas},
                                   {"absorbed", extinct},
                                   {"events", events}});
    out << "simulate: " << extinct << "/" << cfg.replicas << " runs absorbed by t = " << cfg.horizon << "\n";
    return exit_ok;
}

int cmd_survival(const RunConfig& cfg, std::ostream& out) {
    const Graph g = cfg.build_graph();
    const auto est = estimate_survival(g, cfg.rate_model(), cfg.infection(), cfg.initial_configuration(g),
                                       survival_options(cfg, g));
    Artifacts a(cfg, "survival");
    a.write_csv("survival.csv", survival_columns, {survival_row(est)});
    a.write_json("survival.json", {{"estimate", survival_json(est)}, {"caveat", "finite-size proxy"}});
    out << "survival: " << est.estimate << " +- " << est.std_error << "\n";
    return exit_ok;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
    const Graph g = cfg.build_graph();
    const RateModel m = cfg.rate_model();
    const Configuration init = cfg.initial_configuration(g);
    const SurvivalOptions opt = survival_options(cfg, g);
    std::vector<SurvivalEstimate> grid;
    std::string coupling;
    if (!cfg.sweep_lambdas.empty()) {
        if (m.max_load()) {
            // Capped: one shared stream per replica, exactly monotone in lambda.
            std::vector<ModelSpec> specs;
            for (double l : cfg.sweep_lambdas) specs.push_back({m, infection_with_gamma(l, cfg.gamma)});
            grid = estimate_survival_shared(g, specs, std::vector<Configuration>(specs.size(), init), opt);
            coupling = "shared event stream";
        } else {
            for (double l : cfg.sweep_lambdas)
                grid.push_back(estimate_survival(g, m, infection_with_gamma(l, cfg.gamma), init, opt));
            coupling = "common seeds (Gillespie)";
        }
    }
    std::vector<std::string> rows;
    json points = json::array();
    for (const auto& e : grid) {
        rows.push_back(survival_row(e));
        points.push_back(survival_json(e));
    }
    json body = {{"graph", g.describe()}, {"rates", m.describe()}, {"coupling", coupling}, {"grid", points}};
    bool inconclusive = false;
    if (cfg.sweep_bisect) {
        LambdaCOptions lo;
        lo.lo = cfg.sweep_lo;
        lo.hi = cfg.sweep_hi;
        lo.resolution = cfg.sweep_resolution;
        lo.threshold = cfg.sweep_threshold;
        lo.max_replicas = cfg.sweep_max_replicas;
        const auto r = estimate_lambda_c(g, m, cfg.gamma, init, opt, lo);
        inconclusive = r.inconclusive;
        body["lambda_c"] = {{"lambda_lo", r.lambda_lo},         {"lambda_hi", r.lambda_hi},
                            {"half_width", r.half_width()},     {"proxy_at_lo", survival_json(r.at_lo)},
                            {"proxy_at_hi", survival_json(r.at_hi)}, {"inconclusive", r.inconclusive},
                            {"note", r.note},                   {"caveat", "finite-size proxy"}};
        for (const auto& e : r.evaluations) rows.push_back(survival_row(e));
        out << "sweep: lambda_c in [" << r.lambda_lo << ", " << r.lambda_hi << "]" << (r.inconclusive ? " (inconclusive)" : "")
            << "\n";
    }
    Artifacts a(cfg, "sweep");
    a.write_csv("sweep.csv", survival_columns, rows);
    a.write_json("sweep.json", body);
    if (inconclusive) throw Inconclusive("lambda_c bisection inconclusive");
    return exit_ok;
}

int cmd_duality(const RunConfig& cfg, std::ostream& out) {
    require_constant_infection(cfg);
    const Graph g = cfg.build_graph();
    const RateModel m = capped_model(cfg, cfg.duality_cap);
    const InfectionRate inf = InfectionRate::constant(cfg.lambda);
    Artifacts a(cfg, "duality");
    json body = {{"mode", cfg.duality_mode}, {"graph", g.describe()}, {"rates", m.describe()}, {"lambda", cfg.lambda}};

    if (cfg.duality_mode == "pathwise") {
        const Load top = *m.max_load();
        const double t = cfg.duality_t;
        const Envelopes env = Envelopes::covering(m, inf);
        auto reports = run_replicas(cfg.duality_cases, cfg.threads, [&](std::size_t i) {
            Rng rng(cfg.seed, i, StreamTag::initial_state);
            std::vector<Load> e(g.vertex_count()), x(g.vertex_count());
            for (auto& v : e) v = static_cast<Load>(rng.below(top + 1));
            for (auto& v : x) v = static_cast<Load>(rng.below(top + 1));
            const auto log = EventLog::generate(g, env, t, replica_seed(cfg.seed, i, StreamTag::event_log));
            return pathwise_duality_check(g, m, inf, Configuration(e), Configuration(x), t, log, {0.0, 0.5 * t, t});
        });
        json cases = json::array();
        std::vector<std::string> rows;
        std::size_t bad = 0;
        for (std::size_t i = 0; i < reports.size(); ++i) {
            const auto& r = reports[i];
            bad += !r.constant;
            cases.push_back({{"case", i},
                             {"constant_flag", r.constant},
                             {"initial_value", r.initial_value},
                             {"indicator", r.indicator},
                             {"evaluations", r.evaluations},
                             {"changes", r.changes.size()}});
            rows.push_back(std::to_string(i) + "," + (r.constant ? "1" : "0") + "," + std::to_string(r.initial_value) +
                           "," + std::to_string(r.evaluations));
        }
        body["t"] = t;
        body["all_constant"] = bad == 0;
        body["cases"] = cases;
        a.write_csv("duality.csv", "case,constant,initial_value,evaluations", rows);
        a.write_json("duality.json", body);
        out << "duality pathwise: " << reports.size() - bad << "/" << reports.size() << " constant\n";
        if (bad) throw std::runtime_error("duality indicator changed along " + std::to_string(bad) + " path(s)");
        return exit_ok;
    }
    if (cfg.duality_mode == "mc") {
        const Configuration eta0 = cfg.initial_configuration(g);
        const Configuration xi0 = Configuration::zero(g.vertex_count());
        const auto r = mc_duality_check(g, m, cfg.lambda, eta0, xi0, cfg.duality_t, cfg.replicas, cfg.seed, cfg.threads);
        body["t"] = cfg.duality_t;
        body["lhs"] = {{"estimate", r.lhs.estimate}, {"std_error", r.lhs.std_error}};
        body["rhs"] = {{"estimate", r.rhs.estimate}, {"std_error", r.rhs.std_error}};
        body["combined_std_error"] = r.combined_std_error;
        a.write_csv("duality.csv", "side,estimate,std_error",
                    {"lhs," + num(r.lhs.estimate) + "," + num(r.lhs.std_error),
                     "rhs," + num(r.rhs.estimate) + "," + num(r.rhs.std_error)});
        a.write_json("duality.json", body);
        out << "duality mc: lhs " << r.lhs.estimate << " rhs " << r.rhs.estimate << "\n";
        return exit_ok;
    }
    const auto r = survival_via_duality(g, cfg.rate_model(), cfg.lambda, 0, cfg.horizon, cfg.replicas, cfg.seed,
                                        cfg.threads);
    body["horizon"] = cfg.horizon;
    body["extinction"] = {{"estimate", r.extinction.estimate}, {"std_error", r.extinction.std_error}};
    body["dormant"] = {{"estimate", r.dormant.estimate}, {"std_error", r.dormant.std_error}};
    body["caveat"] = "finite-horizon proxies for both limits";
    a.write_csv("duality.csv", "side,estimate,std_error",
                {"extinction," + num(r.extinction.estimate) + "," + num(r.extinction.std_error),
                 "dormant," + num(r.dormant.estimate) + "," + num(r.dormant.std_error)});
    a.write_json("duality.json", body);
    out << "duality survival: extinction " << r.extinction.estimate << " dormant " << r.dormant.estimate << "\n";
    return exit_ok;
}

int cmd_oracle(const RunConfig& cfg, std::ostream& out) {
    require_constant_infection(cfg);
    const Graph g = cfg.build_graph();
    const RateModel m = capped_model(cfg, cfg.oracle_cap);
    const std::size_t n = g.vertex_count();
    auto pick = [&](const std::vector<Load>& v, Configuration fallback) {
        if (v.empty()) return fallback;
        if (v.size() != n) throw ConfigError({"oracle.eta0/xi0: need one entry per vertex"});
        return Configuration(v);
    };
    const Configuration eta0 = pick(cfg.oracle_eta0, Configuration::single(n, 0));
    const Configuration xi0 = pick(cfg.oracle_xi0, Configuration::zero(n));
    const auto gap = exact_duality_gap(g, m, cfg.lambda, eta0, xi0, cfg.oracle_t, cfg.oracle_tol);
    const auto gen = build_generator(g, m, InfectionRate::constant(cfg.lambda), ProcessKind::cpvl);
    const double ext = exact_extinction_probability(gen, eta0, cfg.oracle_t, cfg.oracle_tol);
    Artifacts a(cfg, "oracle");
    a.write_csv("oracle.csv", "lhs,rhs,gap,state_space_size,extinction_probability",
                {num(gap.lhs) + "," + num(gap.rhs) + "," + num(gap.gap) + "," + std::to_string(gap.state_space_size) +
                 "," + num(ext)});
    a.write_json("oracle.json", {{"graph", g.describe()},
                                 {"rates", m.describe()},
                                 {"lambda", cfg.lambda},
                                 {"t", cfg.oracle_t},
                                 {"eta0", eta0.loads()},
                                 {"xi0", xi0.loads()},
                                 {"lhs", gap.lhs},
                                 {"rhs", gap.rhs},
                                 {"gap", gap.gap},
                                 {"state_space_size", gap.state_space_size},
                                 {"extinction_probability", ext}});
    out << "oracle: gap " << gap.gap << "\n";
    return exit_ok;
}

int cmd_tail(const RunConfig& cfg, std::ostream& out) {
    const RateModel m = cfg.rate_model();
    const double horizon = cfg.tail_horizon;
    auto samples = run_replicas(cfg.replicas, cfg.threads, [&](std::size_t i) {
        Rng rng(cfg.seed, i, StreamTag::bd);
        return sample_absorption_time(m, 1, horizon, rng).value_or(horizon);
    });
    TailOptions opt;
    opt.mode = cfg.tail_mode == "exponential" ? TailModel::exponential : TailModel::power_law;
    if (cfg.tail_k) opt.k = cfg.tail_k;
    opt.min_samples = std::min<std::size_t>(opt.min_samples, cfg.replicas);
    const auto est = estimate_tail(samples, horizon, opt);
    std::vector<std::string> rows;
    for (std::size_t i = 0; i < samples.size(); ++i)
        rows.push_back(std::to_string(i) + "," + num(samples[i]) + "," + (samples[i] >= horizon ? "1" : "0"));
    Artifacts a(cfg, "tail");
    a.write_csv("tail.csv", "replica,tau_rec,censored", rows);
    a.write_json("tail.json", {{"rates", m.describe()},
                               {"mode", to_string(est.model)},
                               {"exponent", est.exponent},
                               {"std_error", est.std_error},
                               {"sample_count", est.sample_count},
                               {"tail_count", est.tail_count},
                               {"fit_range", {est.fit_lo, est.fit_hi}},
                               {"regression_power_exponent", est.regression_power_exponent},
                               {"regression_power_rss", est.regression_power_rss},
                               {"regression_exp_rate", est.regression_exp_rate},
                               {"regression_exp_rss", est.regression_exp_rss},
                               {"preferred", to_string(est.preferred)}});
    out << "tail: " << to_string(est.model) << " exponent " << est.exponent << " +- " << est.std_error
        << ", preferred " << to_string(est.preferred) << "\n";
    return exit_ok;
}

int cmd_criteria(const RunConfig& cfg, std::ostream& out) {
    const Graph g = cfg.build_graph();
    const RateModel m = cfg.rate_model();
    const int D = cfg.criteria_degree ? cfg.criteria_degree : g.degree();
    const auto crit = extinction_criterion(D, m, cfg.infection());
    const auto tau = mean_tau_rec(m);
    json regimes = json::array();
    std::vector<std::string> rows;
    const std::vector<double> gammas = cfg.criteria_gammas.empty() ? std::vector<double>{cfg.gamma} : cfg.criteria_gammas;
    for (double gm : gammas) {
        const auto r = corollary_regimes(m, gm);
        regimes.push_back({{"gamma", gm},
                           {"converges", r.converges},
                           {"condition", r.condition},
                           {"condition_holds", r.condition_holds},
                           {"series", series_json(r.series)}});
        rows.push_back(num(gm) + "," + to_string(r.series.status) + "," + (r.condition_holds ? "1" : "0"));
    }
    json body = {{"rates", m.describe()},
                 {"infection", cfg.infection().describe()},
                 {"D", D},
                 {"value", crit.series.converged() ? json(crit.value) : json(nullptr)},
                 {"verdict", to_string(crit.verdict)},
                 {"divergent", crit.divergent},
                 {"series", series_json(crit.series)},
                 {"mean_tau_rec", series_json(tau)}};
    if (tau.converged()) body["lambda_c_lower_bound"] = 1.0 / (D * tau.value);
    body["regimes"] = regimes;
    Artifacts a(cfg, "criteria");
    a.write_csv("criteria.csv", "gamma,series_status,condition_holds", rows);
    a.write_json("criteria.json", body);
    out << "criteria: value " << crit.value << " -> " << to_string(crit.verdict) << "\n";
    return exit_ok;
}

int cmd_invariant(const RunConfig& cfg, std::ostream& out) {
    require_constant_infection(cfg);
    const Graph g = cfg.build_graph();
    InvariantOptions o;
    o.burn_in = cfg.invariant_burn_in;
    o.spacing = cfg.invariant_spacing;
    o.samples = cfg.invariant_samples;
    o.replicas = cfg.replicas;
    o.seed = cfg.seed;
    o.threads = cfg.threads;
    const auto r = sample_upper_invariant_cpli(g, cfg.rate_model(), cfg.lambda, o);
    std::vector<std::string> rows;
    for (std::size_t k = 0; k < r.times.size(); ++k) rows.push_back(num(r.times[k]) + "," + num(r.median[k]));
    json hist = json::object();
    for (auto [k, p] : r.histogram) hist[std::to_string(k)] = p;
    Artifacts a(cfg, "invariant");
    a.write_csv("invariant.csv", "time,median_dormancy", rows);
    a.write_json("invariant.json", {{"graph", g.describe()},
                                    {"lambda", cfg.lambda},
                                    {"slope", r.second_half.slope},
                                    {"slope_std_error", r.second_half.slope_stderr},
                                    {"flat", r.flat},
                                    {"growing", r.growing},
                                    {"verdict", r.verdict},
                                    {"histogram", hist}});
    out << "invariant: " << r.verdict << "\n";
    if (!r.flat && !r.growing) throw Inconclusive("dormancy trend undetermined");
    return exit_ok;
}

int cmd_truncation(const RunConfig& cfg, std::ostream& out) {
    const Graph small = cfg.build_graph();
    GraphParams p = cfg.graph;
    p.size = cfg.truncation_large_size ? cfg.truncation_large_size : 2 * cfg.graph.size;
    if (cfg.graph.kind == GraphKind::tree_ball && !cfg.truncation_large_size) p.depth = cfg.graph.depth + 1;
    const Graph large = Graph::build(p);
    const auto r = truncation_diagnostic(small, large, cfg.rate_model(), cfg.infection(), cfg.init_level, cfg.horizon,
                                         cfg.replicas, cfg.seed, cfg.threads);
    std::vector<std::string> rows;
    std::map<long, std::pair<double, double>> both;
    for (auto [k, q] : r.small_law) both[k].first = q;
    for (auto [k, q] : r.large_law) both[k].second = q;
    for (auto [k, pq] : both) rows.push_back(std::to_string(k) + "," + num(pq.first) + "," + num(pq.second));
    Artifacts a(cfg, "truncation");
    a.write_csv("truncation.csv", "load,p_small,p_large", rows);
    a.write_json("truncation.json", {{"small", small.describe()},
                                     {"large", large.describe()},
                                     {"horizon", cfg.horizon},
                                     {"replicas", r.replicas},
                                     {"tv", r.tv},
                                     {"noise_floor", r.noise_floor},
                                     {"origin_eccentricity", r.origin_eccentricity},
                                     {"growth_constant", r.growth_constant},
                                     {"context",
                                      "disagreement at the origin needs influence from distance >= eccentricity; "
                                      "expected to decay exponentially in that distance"}});
    out << "truncation: tv " << r.tv << " (noise floor " << r.noise_floor << ")\n";
    return exit_ok;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError({"cannot read config file '" + path + "'"});
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Contact process with viral load / lingering infections simulator", "cpvl"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path, out_dir, mode;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> replicas;
    std::optional<unsigned> threads;
    std::optional<unsigned> cap;
    std::optional<double> dual_t;
    app.add_option("--config", config_path, "Config file")->required();
    app.add_option("--out", out_dir, "Output directory (overrides output.dir)");
    app.add_option("--seed", seed, "Master seed (overrides run.seed)");
    app.add_option("--replicas", replicas, "Replica count (overrides run.replicas)");
    app.add_option("--set", sets, "Override key=value (repeatable)");
    app.add_option("--threads", threads, "Worker threads, 0 = auto (overrides run.threads)");

    const std::vector<std::pair<const char*, const char*>> subs = {
        {"simulate", "Gillespie trajectories"},
        {"survival", "Survival proxy estimate"},
        {"sweep", "Survival over a lambda grid and lambda_c bisection"},
        {"duality", "Pathwise, Monte Carlo or survival duality checks"},
        {"oracle", "Exact duality gap and extinction probability on tiny graphs"},
        {"tail", "Recovery-time tail exponent"},
        {"criteria", "Extinction criterion and series regimes"},
        {"invariant", "CPLI dormancy at the origin from all-active"},
        {"truncation", "Finite-volume truncation diagnostic"},
    };
    for (auto [name, help] : subs) {
        auto* s = app.add_subcommand(name, help);
        if (std::string(name) == "duality") {
            s->add_option("--mode", mode, "pathwise | mc | survival");
            s->add_option("--cap", cap, "Capacity K for uncapped rate families");
            s->add_option("--t", dual_t, "Duality time horizon");
        }
    }

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return exit_ok;
        }
        err << "error: " << e.what() << "\n";
        return exit_validation;
    }
    const std::string sub = app.get_subcommands().front()->get_name();

    std::vector<std::string> overrides = sets;
    if (!out_dir.empty()) overrides.push_back("output.dir=\"" + out_dir + "\"");
    if (seed) overrides.push_back("run.seed=" + std::to_string(*seed));
    if (replicas) overrides.push_back("run.replicas=" + std::to_string(*replicas));
    if (threads) overrides.push_back("run.threads=" + std::to_string(*threads));
    if (!mode.empty()) overrides.push_back("duality.mode=\"" + mode + "\"");
    if (cap) overrides.push_back("duality.cap=" + std::to_string(*cap));
    if (dual_t) overrides.push_back("duality.t=" + num(*dual_t));

    try {
        const RunConfig cfg = parse_config(read_file(config_path), overrides);
        if (sub == "simulate") return cmd_simulate(cfg, out);
        if (sub == "survival") return cmd_survival(cfg, out);
        if (sub == "sweep") return cmd_sweep(cfg, out);
        if (sub == "duality") return cmd_duality(cfg, out);
        if (sub == "oracle") return cmd_oracle(cfg, out);
        if (sub == "tail") return cmd_tail(cfg, out);
        if (sub == "criteria") return cmd_criteria(cfg, out);
        if (sub == "invariant") return cmd_invariant(cfg, out);
        return cmd_truncation(cfg, out);
    } catch (const ConfigError& e) {
        for (const auto& m : e.errors()) err << "config error: " << m << "\n";
        return exit_validation;
    } catch (const Inconclusive& e) {
        err << "inconclusive: " << e.what() << "\n";
        return exit_inconclusive;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_runtime;
    }
}

}  // namespace cpvl
