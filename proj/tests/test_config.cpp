#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "cpvl/config.hpp"

using namespace cpvl;

namespace {

const char* minimal = R"(
# smallest useful config
[graph]
kind = "cycle"
size = 12

[rates]
family = "power_law"
a = 2

[infection]
lambda = 1.5

[run]
horizon = 10
)";

std::vector<std::string> errors_of(const std::string& text, const std::vector<std::string>& overrides = {}) {
    try {
        parse_config(text, overrides);
    } catch (const ConfigError& e) {
        return e.errors();
    }
    return {};
}

bool any_contains(const std::vector<std::string>& errs, const std::string& what) {
    return std::any_of(errs.begin(), errs.end(), [&](const std::string& e) { return e.find(what) != std::string::npos; });
}

}  // namespace

TEST_CASE("minimal config") {
    auto c = parse_config(minimal);
    CHECK(c.build_graph().vertex_count() == 12);
    CHECK(c.lambda == 1.5);
    CHECK(c.horizon == 10);
    CHECK(c.rate_model().birth(3) == doctest::Approx(RateModel::power_law(2).birth(3)));
    CHECK(c.initial_configuration(c.build_graph()) == Configuration::single(12, 0));
    CHECK_FALSE(c.rate_model().max_load());
}

TEST_CASE("alpha equal to beta is rejected with the constraint named") {
    auto errs = errors_of(std::string(minimal), {"rates.family=\"linear\"", "rates.alpha=2", "rates.beta=2"});
    REQUIRE(errs.size() == 1);
    CHECK(any_contains(errs, "alpha < beta"));
}

TEST_CASE("misspelled keys get a suggestion") {
    std::string t = minimal;
    t += "\n[run]\nreplicsa = 5\n";
    auto errs = errors_of(t);
    REQUIRE(errs.size() == 1);
    CHECK(any_contains(errs, "did you mean 'run.replicas'"));
}

TEST_CASE("all problems are reported at once") {
    const char* t = "[graph]\nkind = \"cycle\"\nsize = 10\n[rates]\nfamily = \"linear\"\nalpha = 2\nbeta = 2\n"
                    "[infection]\nlamda = 1\n[run]\nhorizon = \"ten\"\n";
    auto errs = errors_of(t);
    CHECK(errs.size() == 4);
    CHECK(any_contains(errs, "unknown key 'infection.lamda'"));
    CHECK(any_contains(errs, "missing required key 'infection.lambda'"));
    CHECK(any_contains(errs, "run.horizon: expected a number"));
    CHECK(any_contains(errs, "alpha < beta"));
}

TEST_CASE("type and syntax errors") {
    CHECK(any_contains(errors_of(minimal, {"run.replicas=2.5"}), "expected an integer"));
    CHECK(any_contains(errors_of(minimal, {"run.replicas=0"}), "must be >= 1"));
    CHECK(any_contains(errors_of(minimal, {"rates.allow_degenerate=1"}), "expected true or false"));
    CHECK(any_contains(errors_of(minimal, {"run.snapshots=[3, 1]"}), "must be sorted"));
    CHECK(any_contains(errors_of(minimal, {"graph.kind=\"moebius\""}), "graph"));
    CHECK_FALSE(errors_of(std::string(minimal) + "\n[run]\nseed = [1, \"x\"]\n").empty());
    CHECK_FALSE(errors_of("[graph\nkind = \"cycle\"\n").empty());
    CHECK_FALSE(errors_of(minimal, {"no_equals_sign"}).empty());
}

TEST_CASE("overrides replace file values") {
    auto c = parse_config(minimal, {"infection.lambda=3", "run.init=\"all\"", "rates.cap=4"});
    CHECK(c.lambda == 3);
    CHECK(c.initial_configuration(c.build_graph()) == Configuration::constant(12, 1));
    REQUIRE(c.rate_model().max_load());
    CHECK(*c.rate_model().max_load() == 5);
    auto l = parse_config(minimal, {"run.init=[0, 2, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0]"});
    CHECK(l.initial_configuration(l.build_graph())[1] == 2);
    CHECK_FALSE(errors_of(minimal, {"run.init=[1, 2]"}).empty());
}

TEST_CASE("hash tracks content but not output location or threads") {
    auto a = parse_config(minimal), b = parse_config(minimal, {"output.dir=\"elsewhere\"", "run.threads=3"});
    CHECK(a.hash() == b.hash());
    CHECK(a.hash() != parse_config(minimal, {"run.seed=2"}).hash());
    CHECK(a.hash() != parse_config(minimal, {"infection.lambda=1.25"}).hash());
}

TEST_CASE("keys and edit distance") {
    auto keys = config_keys();
    CHECK(std::is_sorted(keys.begin(), keys.end()));
    CHECK(std::find(keys.begin(), keys.end(), "infection.lambda") != keys.end());
    CHECK(edit_distance("kitten", "sitting") == 3);
    CHECK(edit_distance("", "abc") == 3);
    CHECK(edit_distance("same", "same") == 0);
}
