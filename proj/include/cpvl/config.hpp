#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpvl/configuration.hpp"
#include "cpvl/graph.hpp"
#include "cpvl/rates.hpp"

namespace cpvl {

/// One parsed right-hand side of `key = value`.
struct ConfigValue {
    enum class Kind { boolean, number, text, number_list, text_list };
    Kind kind = Kind::number;
    bool flag = false;
    double number = 0.0;
    std::string text;
    std::vector<double> numbers;
    std::vector<std::string> texts;
    std::string raw;  ///< source spelling, used for hashing and messages
    int line = 0;
};

/// Thrown with every problem found, one per line of what().
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> errors);
    const std::vector<std::string>& errors() const { return errors_; }

private:
    std::vector<std::string> errors_;
};

/// Validated run configuration. Field names mirror the dotted keys of the
/// config file (section.key).
struct RunConfig {
    // [graph]
    GraphParams graph;
    // [rates]
    std::string family = "power_law";
    double a = 2.0;
    double alpha = 1.0;
    double beta = 2.0;
    std::vector<double> table_b, table_d;
    bool allow_degenerate = false;
    Load cap = 0;  ///< 0 = uncapped
    // [infection]
    double lambda = 1.0;
    double gamma = 0.0;
    // [run]
    double horizon = 10.0;
    std::size_t replicas = 100;
    std::uint64_t seed = 1;
    std::vector<double> snapshots;
    unsigned threads = 0;
    std::string process = "cpvl";
    std::string init = "single";  ///< single | all | zero | list
    std::vector<Load> init_loads;
    Load init_level = 1;
    std::string proxy;  ///< empty = graph default
    std::size_t population_threshold = 0;
    // [duality]
    std::string duality_mode = "pathwise";
    Load duality_cap = 2;
    double duality_t = 5.0;
    std::size_t duality_cases = 100;
    // [oracle]
    double oracle_t = 1.0;
    double oracle_tol = 1e-10;
    Load oracle_cap = 1;
    std::vector<Load> oracle_eta0, oracle_xi0;
    // [sweep]
    std::vector<double> sweep_lambdas;
    bool sweep_bisect = false;
    double sweep_lo = 0.25;
    double sweep_hi = 4.0;
    double sweep_resolution = 0.05;
    double sweep_threshold = 0.5;
    std::size_t sweep_max_replicas = 0;
    // [criteria]
    int criteria_degree = 0;  ///< 0 = degree of the configured graph
    std::vector<double> criteria_gammas;
    // [tail]
    std::string tail_mode = "power-law";
    std::size_t tail_k = 0;
    double tail_horizon = 1e6;
    // [invariant]
    double invariant_burn_in = 10.0;
    double invariant_spacing = 1.0;
    std::size_t invariant_samples = 40;
    // [truncation]
    int truncation_large_size = 0;  ///< 0 = twice graph.size
    // [output]
    std::string output_dir = "out";

    /// Dotted key -> source spelling of every key that was set, after overrides.
    std::map<std::string, std::string> explicit_keys;

    RateModel rate_model() const;  ///< with the cap applied when cap > 0
    InfectionRate infection() const;
    Graph build_graph() const;
    Configuration initial_configuration(const Graph& g) const;
    /// FNV-1a over the sorted explicit keys, except output.dir and run.threads.
    std::uint64_t hash() const;
};

/// Parses the config text (sections, `key = value`, numbers, quoted strings,
/// booleans, flat lists, # comments), applies `overrides` ("a.b=value"),
/// and validates everything. Throws ConfigError listing all problems.
RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});

/// Every key the schema knows, sorted.
std::vector<std::string> config_keys();

std::size_t edit_distance(const std::string& a, const std::string& b);

}  // namespace cpvl
