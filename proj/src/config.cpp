#include "cpvl/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>

#include "cpvl/analysis.hpp"

namespace cpvl {

namespace {

std::string join_lines(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& e : v) s += (s.empty() ? "" : "\n") + e;
    return s;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

bool parse_number(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

bool is_key_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-'; }

/// Splits a list body on commas outside quotes.
std::vector<std::string> split_list(const std::string& body) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (char c : body) {
        if (c == '"') quoted = !quoted;
        if (c == ',' && !quoted) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
    return out;
}

bool parse_string_literal(const std::string& s, std::string& out) {
    if (s.size() < 2 || s.front() != '"' || s.back() != '"') return false;
    out.clear();
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        if (s[i] == '\\' && i + 2 < s.size()) {
            out += s[++i];
        } else if (s[i] == '"') {
            return false;
        } else {
            out += s[i];
        }
    }
    return true;
}

/// Parses a scalar or list. Bare words are accepted as text only when
/// `bare_words` is set (command-line overrides).
std::optional<ConfigValue> parse_value(const std::string& raw, bool bare_words, std::string& why) {
    ConfigValue v;
    v.raw = raw;
    std::string text;
    if (raw.empty()) {
        why = "missing value";
        return std::nullopt;
    }
    if (raw == "true" || raw == "false") {
        v.kind = ConfigValue::Kind::boolean;
        v.flag = raw == "true";
        return v;
    }
    if (parse_number(raw, v.number)) {
        v.kind = ConfigValue::Kind::number;
        return v;
    }
    if (parse_string_literal(raw, text)) {
        v.kind = ConfigValue::Kind::text;
        v.text = text;
        return v;
    }
    if (raw.front() == '[') {
        if (raw.back() != ']') {
            why = "unterminated list";
            return std::nullopt;
        }
        auto items = split_list(raw.substr(1, raw.size() - 2));
        v.kind = ConfigValue::Kind::number_list;
        bool numbers = true, texts = true;
        for (const auto& item : items) {
            double d;
            std::string t;
            if (parse_number(item, d)) {
                v.numbers.push_back(d);
                texts = false;
            } else if (parse_string_literal(item, t)) {
                v.texts.push_back(t);
                numbers = false;
            } else {
                why = "cannot parse list element '" + item + "'";
                return std::nullopt;
            }
        }
        if (!numbers && !texts) {
            why = "lists must not mix numbers and strings";
            return std::nullopt;
        }
        if (!texts || items.empty()) return v;
        v.kind = ConfigValue::Kind::text_list;
        return v;
    }
    if (bare_words && std::all_of(raw.begin(), raw.end(), [](char c) { return is_key_char(c) || c == '/'; })) {
        v.kind = ConfigValue::Kind::text;
        v.text = raw;
        return v;
    }
    why = "cannot parse value '" + raw + "' (strings need double quotes)";
    return std::nullopt;
}

// --- typed readers; throw std::invalid_argument with a short reason ---

double as_real(const ConfigValue& v) {
    if (v.kind != ConfigValue::Kind::number) throw std::invalid_argument("expected a number");
    return v.number;
}

long long as_int(const ConfigValue& v, long long min) {
    const double d = as_real(v);
    if (d != std::floor(d) || std::abs(d) > 9.0e15) throw std::invalid_argument("expected an integer");
    if (d < static_cast<double>(min)) throw std::invalid_argument("must be >= " + std::to_string(min));
    return static_cast<long long>(d);
}

std::string as_text(const ConfigValue& v) {
    if (v.kind != ConfigValue::Kind::text) throw std::invalid_argument("expected a string");
    return v.text;
}

bool as_bool(const ConfigValue& v) {
    if (v.kind != ConfigValue::Kind::boolean) throw std::invalid_argument("expected true or false");
    return v.flag;
}

std::vector<double> as_reals(const ConfigValue& v) {
    if (v.kind == ConfigValue::Kind::number) return {v.number};
    if (v.kind != ConfigValue::Kind::number_list) throw std::invalid_argument("expected a list of numbers");
    return v.numbers;
}

std::vector<Load> as_loads(const ConfigValue& v) {
    std::vector<Load> out;
    for (double d : as_reals(v)) {
        if (d < 0 || d != std::floor(d) || d > 1e9) throw std::invalid_argument("expected non-negative integers");
        out.push_back(static_cast<Load>(d));
    }
    return out;
}

struct Field {
    const char* key;
    std::function<void(RunConfig&, const ConfigValue&)> set;
};

const std::vector<Field>& schema() {
    static const std::vector<Field> fields = {
        {"graph.kind", [](RunConfig& c, const ConfigValue& v) { c.graph.kind = graph_kind_from_string(as_text(v)); }},
        {"graph.dim", [](RunConfig& c, const ConfigValue& v) { c.graph.dim = static_cast<int>(as_int(v, 1)); }},
        {"graph.size", [](RunConfig& c, const ConfigValue& v) { c.graph.size = static_cast<int>(as_int(v, 1)); }},
        {"graph.degree", [](RunConfig& c, const ConfigValue& v) { c.graph.degree = static_cast<int>(as_int(v, 1)); }},
        {"graph.depth", [](RunConfig& c, const ConfigValue& v) { c.graph.depth = static_cast<int>(as_int(v, 0)); }},
        {"rates.family", [](RunConfig& c, const ConfigValue& v) { c.family = as_text(v); }},
        {"rates.a", [](RunConfig& c, const ConfigValue& v) { c.a = as_real(v); }},
        {"rates.alpha", [](RunConfig& c, const ConfigValue& v) { c.alpha = as_real(v); }},
        {"rates.beta", [](RunConfig& c, const ConfigValue& v) { c.beta = as_real(v); }},
        {"rates.b", [](RunConfig& c, const ConfigValue& v) { c.table_b = as_reals(v); }},
        {"rates.d", [](RunConfig& c, const ConfigValue& v) { c.table_d = as_reals(v); }},
        {"rates.allow_degenerate", [](RunConfig& c, const ConfigValue& v) { c.allow_degenerate = as_bool(v); }},
        {"rates.cap", [](RunConfig& c, const ConfigValue& v) { c.cap = static_cast<Load>(as_int(v, 0)); }},
        {"infection.lambda", [](RunConfig& c, const ConfigValue& v) { c.lambda = as_real(v); }},
        {"infection.gamma", [](RunConfig& c, const ConfigValue& v) { c.gamma = as_real(v); }},
        {"run.horizon", [](RunConfig& c, const ConfigValue& v) { c.horizon = as_real(v); }},
        {"run.replicas", [](RunConfig& c, const ConfigValue& v) { c.replicas = as_int(v, 1); }},
        {"run.seed", [](RunConfig& c, const ConfigValue& v) { c.seed = static_cast<std::uint64_t>(as_int(v, 0)); }},
        {"run.snapshots", [](RunConfig& c, const ConfigValue& v) { c.snapshots = as_reals(v); }},
        {"run.threads", [](RunConfig& c, const ConfigValue& v) { c.threads = static_cast<unsigned>(as_int(v, 0)); }},
        {"run.process", [](RunConfig& c, const ConfigValue& v) { c.process = as_text(v); }},
        {"run.init",
         [](RunConfig& c, const ConfigValue& v) {
             if (v.kind == ConfigValue::Kind::text) {
                 c.init = v.text;
             } else {
                 c.init = "list";
                 c.init_loads = as_loads(v);
             }
         }},
        {"run.init_level", [](RunConfig& c, const ConfigValue& v) { c.init_level = static_cast<Load>(as_int(v, 1)); }},
        {"run.proxy", [](RunConfig& c, const ConfigValue& v) { c.proxy = as_text(v); }},
        {"run.population_threshold",
         [](RunConfig& c, const ConfigValue& v) { c.population_threshold = as_int(v, 1); }},
        {"duality.mode", [](RunConfig& c, const ConfigValue& v) { c.duality_mode = as_text(v); }},
        {"duality.cap", [](RunConfig& c, const ConfigValue& v) { c.duality_cap = static_cast<Load>(as_int(v, 1)); }},
        {"duality.t", [](RunConfig& c, const ConfigValue& v) { c.duality_t = as_real(v); }},
        {"duality.cases", [](RunConfig& c, const ConfigValue& v) { c.duality_cases = as_int(v, 1); }},
        {"oracle.t", [](RunConfig& c, const ConfigValue& v) { c.oracle_t = as_real(v); }},
        {"oracle.tol", [](RunConfig& c, const ConfigValue& v) { c.oracle_tol = as_real(v); }},
        {"oracle.cap", [](RunConfig& c, const ConfigValue& v) { c.oracle_cap = static_cast<Load>(as_int(v, 1)); }},
        {"oracle.eta0", [](RunConfig& c, const ConfigValue& v) { c.oracle_eta0 = as_loads(v); }},
        {"oracle.xi0", [](RunConfig& c, const ConfigValue& v) { c.oracle_xi0 = as_loads(v); }},
        {"sweep.lambdas", [](RunConfig& c, const ConfigValue& v) { c.sweep_lambdas = as_reals(v); }},
        {"sweep.bisect", [](RunConfig& c, const ConfigValue& v) { c.sweep_bisect = as_bool(v); }},
        {"sweep.lo", [](RunConfig& c, const ConfigValue& v) { c.sweep_lo = as_real(v); }},
        {"sweep.hi", [](RunConfig& c, const ConfigValue& v) { c.sweep_hi = as_real(v); }},
        {"sweep.resolution", [](RunConfig& c, const ConfigValue& v) { c.sweep_resolution = as_real(v); }},
        {"sweep.threshold", [](RunConfig& c, const ConfigValue& v) { c.sweep_threshold = as_real(v); }},
        {"sweep.max_replicas", [](RunConfig& c, const ConfigValue& v) { c.sweep_max_replicas = as_int(v, 0); }},
        {"criteria.degree", [](RunConfig& c, const ConfigValue& v) { c.criteria_degree = static_cast<int>(as_int(v, 0)); }},
        {"criteria.gammas", [](RunConfig& c, const ConfigValue& v) { c.criteria_gammas = as_reals(v); }},
        {"tail.mode", [](RunConfig& c, const ConfigValue& v) { c.tail_mode = as_text(v); }},
        {"tail.k", [](RunConfig& c, const ConfigValue& v) { c.tail_k = as_int(v, 0); }},
        {"tail.horizon", [](RunConfig& c, const ConfigValue& v) { c.tail_horizon = as_real(v); }},
        {"invariant.burn_in", [](RunConfig& c, const ConfigValue& v) { c.invariant_burn_in = as_real(v); }},
        {"invariant.spacing", [](RunConfig& c, const ConfigValue& v) { c.invariant_spacing = as_real(v); }},
        {"invariant.samples", [](RunConfig& c, const ConfigValue& v) { c.invariant_samples = as_int(v, 4); }},
        {"truncation.large_size",
         [](RunConfig& c, const ConfigValue& v) { c.truncation_large_size = static_cast<int>(as_int(v, 0)); }},
        {"output.dir", [](RunConfig& c, const ConfigValue& v) { c.output_dir = as_text(v); }},
    };
    return fields;
}

const char* const required_keys[] = {"graph.kind", "rates.family", "infection.lambda", "run.horizon"};

std::string suggest(const std::string& key) {
    std::string best;
    std::size_t best_d = 4;
    for (const auto& f : schema()) {
        const std::size_t d = edit_distance(key, f.key);
        if (d < best_d) {
            best_d = d;
            best = f.key;
        }
    }
    return best.empty() ? "" : " (did you mean '" + best + "'?)";
}

void check_constraints(const RunConfig& c, std::vector<std::string>& errors) {
    auto attempt = [&](const char* what, auto&& f) {
        try {
            f();
        } catch (const std::exception& e) {
            errors.push_back(std::string(what) + ": " + e.what());
        }
    };
    attempt("graph", [&] { (void)c.build_graph(); });
    attempt("rates", [&] { (void)c.rate_model(); });
    attempt("infection", [&] { (void)c.infection(); });
    if (!(c.horizon >= 0.0)) errors.push_back("run.horizon: must be >= 0");
    if (!std::is_sorted(c.snapshots.begin(), c.snapshots.end()))
        errors.push_back("run.snapshots: must be sorted");
    if (c.process != "cpvl" && c.process != "cpli") errors.push_back("run.process: expected \"cpvl\" or \"cpli\"");
    if (c.init != "single" && c.init != "all" && c.init != "zero" && c.init != "list")
        errors.push_back("run.init: expected \"single\", \"all\", \"zero\" or a list of loads");
    if (!c.proxy.empty()) attempt("run.proxy", [&] { (void)survival_proxy_from_string(c.proxy); });
    if (c.duality_mode != "pathwise" && c.duality_mode != "mc" && c.duality_mode != "survival")
        errors.push_back("duality.mode: expected \"pathwise\", \"mc\" or \"survival\"");
    if (!(c.duality_t >= 0.0)) errors.push_back("duality.t: must be >= 0");
    if (!(c.oracle_t >= 0.0)) errors.push_back("oracle.t: must be >= 0");
    if (!(c.oracle_tol > 0.0 && c.oracle_tol < 1.0)) errors.push_back("oracle.tol: must lie in (0, 1)");
    if (!(c.sweep_lo > 0.0 && c.sweep_lo < c.sweep_hi)) errors.push_back("sweep.lo/sweep.hi: need 0 < lo < hi");
    if (!(c.sweep_resolution > 0.0)) errors.push_back("sweep.resolution: must be > 0");
    if (!(c.sweep_threshold > 0.0 && c.sweep_threshold < 1.0)) errors.push_back("sweep.threshold: must lie in (0, 1)");
    for (double l : c.sweep_lambdas)
        if (!(l >= 0.0)) errors.push_back("sweep.lambdas: values must be >= 0");
    for (double gm : c.criteria_gammas)
        if (!(gm >= 0.0)) errors.push_back("criteria.gammas: values must be >= 0");
    if (c.tail_mode != "power-law" && c.tail_mode != "exponential")
        errors.push_back("tail.mode: expected \"power-law\" or \"exponential\"");
    if (!(c.tail_horizon > 0.0)) errors.push_back("tail.horizon: must be > 0");
    if (!(c.invariant_spacing > 0.0)) errors.push_back("invariant.spacing: must be > 0");
    if (!(c.invariant_burn_in >= 0.0)) errors.push_back("invariant.burn_in: must be >= 0");
    if (errors.empty()) attempt("run.init", [&] { (void)c.initial_configuration(c.build_graph()); });
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors) : std::runtime_error(join_lines(errors)), errors_(std::move(errors)) {}

std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j)
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] != b[j - 1])});
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    for (const auto& f : schema()) keys.push_back(f.key);
    std::sort(keys.begin(), keys.end());
    return keys;
}

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
    std::vector<std::string> errors;
    std::map<std::string, ConfigValue> values;

    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // strip comments outside quotes
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') quoted = !quoted;
            if (line[i] == '#' && !quoted) {
                line.resize(i);
                break;
            }
        }
        const std::string s = trim(line);
        if (s.empty()) continue;
        const std::string where = "line " + std::to_string(lineno) + ": ";
        if (s.front() == '[') {
            if (s.back() != ']' || s.size() < 3) {
                errors.push_back(where + "malformed section header");
                continue;
            }
            section = trim(s.substr(1, s.size() - 2));
            if (!std::all_of(section.begin(), section.end(), is_key_char))
                errors.push_back(where + "malformed section name '" + section + "'");
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            errors.push_back(where + "expected 'key = value'");
            continue;
        }
        const std::string key = trim(s.substr(0, eq));
        if (key.empty() || !std::all_of(key.begin(), key.end(), is_key_char)) {
            errors.push_back(where + "malformed key '" + key + "'");
            continue;
        }
        const std::string full = section.empty() ? key : section + "." + key;
        std::string why;
        auto v = parse_value(trim(s.substr(eq + 1)), false, why);
        if (!v) {
            errors.push_back(where + full + ": " + why);
            continue;
        }
        v->line = lineno;
        if (values.count(full)) {
            errors.push_back(where + "duplicate key '" + full + "'");
            continue;
        }
        values[full] = *v;
    }

    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) {
            errors.push_back("override '" + o + "': expected key=value");
            continue;
        }
        const std::string key = trim(o.substr(0, eq));
        std::string why;
        auto v = parse_value(trim(o.substr(eq + 1)), true, why);
        if (!v) {
            errors.push_back("override '" + key + "': " + why);
            continue;
        }
        values[key] = *v;
    }

    RunConfig cfg;
    std::map<std::string, const Field*> by_key;
    for (const auto& f : schema()) by_key[f.key] = &f;
    for (const auto& [key, v] : values) {
        const std::string where = v.line ? "line " + std::to_string(v.line) + ": " : "override: ";
        auto it = by_key.find(key);
        if (it == by_key.end()) {
            errors.push_back(where + "unknown key '" + key + "'" + suggest(key));
            continue;
        }
        try {
            it->second->set(cfg, v);
            cfg.explicit_keys[key] = v.raw;
        } catch (const std::exception& e) {
            errors.push_back(where + key + ": " + e.what());
        }
    }
    for (const char* k : required_keys)
        if (!values.count(k)) errors.push_back(std::string("missing required key '") + k + "'");
    check_constraints(cfg, errors);
    if (!errors.empty()) throw ConfigError(std::move(errors));
    return cfg;
}

RateModel RunConfig::rate_model() const {
    RateModel base = [&] {
        if (family == "power_law") return RateModel::power_law(a);
        if (family == "linear") return RateModel::linear(alpha, beta);
        if (family == "table") return RateModel::table(table_b, table_d, allow_degenerate);
        if (family == "classical") return RateModel::classical_contact();
        throw std::invalid_argument("unknown rates.family '" + family +
                                    "' (expected power_law, linear, table or classical)");
    }();
    if (cap == 0) return base;
    return cap_model(base, cap);
}

InfectionRate RunConfig::infection() const {
    return infection_with_gamma(lambda, gamma);
}

Graph RunConfig::build_graph() const { return Graph::build(graph); }

Configuration RunConfig::initial_configuration(const Graph& g) const {
    const std::size_t n = g.vertex_count();
    if (init == "single") return Configuration::single(n, 0, init_level);
    if (init == "all") return Configuration::constant(n, init_level);
    if (init == "zero") return Configuration::zero(n);
    if (init_loads.size() != n)
        throw std::invalid_argument("init list has " + std::to_string(init_loads.size()) + " entries, graph has " +
                                    std::to_string(n) + " vertices");
    return Configuration(init_loads);
}

std::uint64_t RunConfig::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const auto& [k, v] : explicit_keys) {
        // where results go and how many workers compute them do not change them
        if (k == "output.dir" || k == "run.threads") continue;
        for (char c : k + "=" + v + "\n") {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ull;
        }
    }
    return h;
}

}  // namespace cpvl
