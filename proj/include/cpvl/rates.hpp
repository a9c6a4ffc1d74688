#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cpvl {

using Load = std::uint32_t;

enum class RateFamily { power_law, linear, table };

std::string to_string(RateFamily family);

/// Birth and death rate functions b, d : N0 -> [0, inf) of the on-site
/// birth-death dynamics, with an optional capacity K (b vanishes above K and
/// d above K + 1). Rates are closed-form and cheap, so the model is a plain
/// value type and safe to share across threads.
class RateModel {
public:
    /// b(n) = (n + (1-a)_+) 1{n>0},  d(n) = (n + (a-1)_+) 1{n>0}.
    static RateModel power_law(double a);
    /// b(n) = alpha n,  d(n) = beta n, with 0 <= alpha < beta.
    static RateModel linear(double alpha, double beta);
    /// Explicit values for n = 0 .. size-1; both functions vanish beyond the
    /// table. Tables with b == 0 everywhere require `allow_degenerate`.
    static RateModel table(std::vector<double> b, std::vector<double> d, bool allow_degenerate = false);
    /// Classical contact process: b == 0, d(1) = 1, d(n) = 0 for n >= 2.
    static RateModel classical_contact();

    double birth(Load n) const;
    double death(Load n) const;

    RateFamily family() const { return family_; }
    double a() const { return a_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    const std::vector<double>& table_birth() const { return table_b_; }
    const std::vector<double>& table_death() const { return table_d_; }

    /// Capacity K if the model was capped.
    std::optional<Load> cap() const { return cap_; }
    /// Largest load reachable from below, i.e. (max supp b) + 1, when supp b
    /// is finite. Empty when supp b = N.
    std::optional<Load> max_load() const;
    /// Constant C with b(n), d(n) <= C n for all n.
    double linear_growth_constant() const;
    /// b == 0 (the model cannot grow a load above 1).
    bool pure_death() const;
    bool allow_degenerate() const { return allow_degenerate_; }

    std::string describe() const;

private:
    friend RateModel cap_model(const RateModel& base, Load K);
    RateModel() = default;

    double raw_birth(Load n) const;
    double raw_death(Load n) const;

    RateFamily family_ = RateFamily::power_law;
    double a_ = 1.0;
    double alpha_ = 0.0;
    double beta_ = 1.0;
    std::vector<double> table_b_;
    std::vector<double> table_d_;
    std::optional<Load> cap_;
    bool allow_degenerate_ = false;
};

/// Capacity-K variant: b(n) = 0 for n > K, d unchanged up to K + 1 and zero
/// above. Loads started at or below K + 1 never exceed K + 1.
RateModel cap_model(const RateModel& base, Load K);

/// Infection rate Lambda(n): either constant lambda or lambda n^gamma.
class InfectionRate {
public:
    static InfectionRate constant(double lambda);
    static InfectionRate power(double lambda, double gamma);

    double operator()(Load n) const;
    double lambda() const { return lambda_; }
    double gamma() const { return gamma_; }
    bool is_power() const { return power_; }
    /// True when Lambda(n) takes the same value for every n >= 1.
    bool is_constant() const { return !power_ || gamma_ == 0.0; }
    InfectionRate scaled(double factor) const;
    std::string describe() const;

private:
    InfectionRate(double lambda, double gamma, bool power) : lambda_(lambda), gamma_(gamma), power_(power) {}
    double lambda_;
    double gamma_;
    bool power_;
};

/// Outcome of checking one bullet of the standing rate assumption.
struct AssumptionCheck {
    std::string name;
    bool passed = true;
    std::optional<Load> first_violation;
    std::string detail;
};

struct ValidationReport {
    std::vector<AssumptionCheck> checks;
    Load probe_limit = 0;

    bool all_passed() const;
    const AssumptionCheck* find(const std::string& name) const;
};

/// Probes n <= probe_limit (default 10^6) for: b(0) = d(0) = 0; the support
/// condition supp d(.+1) = supp b U {0} with supp b an initial segment of N;
/// linear growth against the stored constant; and, when `infection` is
/// given, monotonicity of Lambda. The growth check is analytic for the
/// parametric families and heuristic for tables.
ValidationReport validate_assumption(const RateModel& model,
                                     const std::optional<InfectionRate>& infection = std::nullopt,
                                     Load probe_limit = 1'000'000);

}  // namespace cpvl
