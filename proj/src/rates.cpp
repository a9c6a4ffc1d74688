#include "cpvl/rates.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cpvl {

std::string to_string(RateFamily family) {
    switch (family) {
        case RateFamily::power_law: return "power_law";
        case RateFamily::linear: return "linear";
        case RateFamily::table: return "table";
    }
    return "unknown";
}

RateModel RateModel::power_law(double a) {
    if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("power_law requires a > 0");
    RateModel m;
    m.family_ = RateFamily::power_law;
    m.a_ = a;
    return m;
}

RateModel RateModel::linear(double alpha, double beta) {
    if (!(alpha >= 0.0) || !std::isfinite(beta)) throw std::invalid_argument("linear requires alpha >= 0");
    if (!(alpha < beta)) throw std::invalid_argument("linear requires alpha < beta");
    RateModel m;
    m.family_ = RateFamily::linear;
    m.alpha_ = alpha;
    m.beta_ = beta;
    m.allow_degenerate_ = alpha == 0.0;
    return m;
}

RateModel RateModel::table(std::vector<double> b, std::vector<double> d, bool allow_degenerate) {
    for (double v : b)
        if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("table rates must be finite and >= 0");
    for (double v : d)
        if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("table rates must be finite and >= 0");
    bool b_zero = std::all_of(b.begin(), b.end(), [](double v) { return v == 0.0; });
    if (b_zero && !allow_degenerate)
        throw std::invalid_argument("table with b == 0 requires allow_degenerate");
    RateModel m;
    m.family_ = RateFamily::table;
    m.table_b_ = std::move(b);
    m.table_d_ = std::move(d);
    m.allow_degenerate_ = allow_degenerate;
    return m;
}

RateModel RateModel::classical_contact() { return table({0.0}, {0.0, 1.0}, true); }

double RateModel::raw_birth(Load n) const {
    if (n == 0) return 0.0;
    switch (family_) {
        case RateFamily::power_law: return n + std::max(1.0 - a_, 0.0);
        case RateFamily::linear: return alpha_ * n;
        case RateFamily::table: return n < table_b_.size() ? table_b_[n] : 0.0;
    }
    return 0.0;
}

double RateModel::raw_death(Load n) const {
    if (n == 0) return 0.0;
    switch (family_) {
        case RateFamily::power_law: return n + std::max(a_ - 1.0, 0.0);
        case RateFamily::linear: return beta_ * n;
        case RateFamily::table: return n < table_d_.size() ? table_d_[n] : 0.0;
    }
    return 0.0;
}

double RateModel::birth(Load n) const {
    if (cap_ && n > *cap_) return 0.0;
    return raw_birth(n);
}

double RateModel::death(Load n) const {
    if (cap_ && n > *cap_ + 1) return 0.0;
    return raw_death(n);
}

std::optional<Load> RateModel::max_load() const {
    if (cap_) return *cap_ + 1;
    switch (family_) {
        case RateFamily::power_law: return std::nullopt;
        case RateFamily::linear:
            if (alpha_ == 0.0) return Load{1};
            return std::nullopt;
        case RateFamily::table: {
            Load last = 0;
            for (Load n = 1; n < table_b_.size(); ++n)
                if (table_b_[n] > 0.0) last = n;
            return last + 1;
        }
    }
    return std::nullopt;
}

double RateModel::linear_growth_constant() const {
    switch (family_) {
        case RateFamily::power_law: return 1.0 + std::abs(1.0 - a_);
        case RateFamily::linear: return std::max(alpha_, beta_);
        case RateFamily::table: {
            double c = 0.0;
            for (Load n = 1; n < table_b_.size(); ++n) c = std::max(c, table_b_[n] / n);
            for (Load n = 1; n < table_d_.size(); ++n) c = std::max(c, table_d_[n] / n);
            return c;
        }
    }
    return 0.0;
}

bool RateModel::pure_death() const {
    switch (family_) {
        case RateFamily::power_law: return false;
        case RateFamily::linear: return alpha_ == 0.0;
        case RateFamily::table:
            return std::all_of(table_b_.begin(), table_b_.end(), [](double v) { return v == 0.0; });
    }
    return false;
}

std::string RateModel::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (family_) {
        case RateFamily::power_law: os << "power_law(a=" << a_ << ")"; break;
        case RateFamily::linear: os << "linear(alpha=" << alpha_ << ",beta=" << beta_ << ")"; break;
        case RateFamily::table: os << "table(len_b=" << table_b_.size() << ",len_d=" << table_d_.size() << ")"; break;
    }
    if (cap_) os << ".cap(" << *cap_ << ")";
    return os.str();
}

RateModel cap_model(const RateModel& base, Load K) {
    if (K < 1) throw std::invalid_argument("cap_model requires K >= 1");
    if (base.max_load()) throw std::invalid_argument("cap_model requires a base model with supp(b) = N");
    RateModel m = base;
    m.cap_ = K;
    return m;
}

InfectionRate InfectionRate::constant(double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be finite and >= 0");
    return InfectionRate(lambda, 0.0, false);
}

InfectionRate InfectionRate::power(double lambda, double gamma) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be finite and >= 0");
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be finite and >= 0");
    return InfectionRate(lambda, gamma, true);
}

double InfectionRate::operator()(Load n) const {
    if (!power_ || gamma_ == 0.0) return lambda_;
    if (n == 0) return 0.0;
    if (gamma_ == 1.0) return lambda_ * n;
    return lambda_ * std::pow(static_cast<double>(n), gamma_);
}

InfectionRate InfectionRate::scaled(double factor) const {
    return InfectionRate(lambda_ * factor, gamma_, power_);
}

std::string InfectionRate::describe() const {
    std::ostringstream os;
    os.precision(17);
    if (power_) os << "power(lambda=" << lambda_ << ",gamma=" << gamma_ << ")";
    else os << "constant(lambda=" << lambda_ << ")";
    return os.str();
}

bool ValidationReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const AssumptionCheck& c) { return c.passed; });
}

const AssumptionCheck* ValidationReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

ValidationReport validate_assumption(const RateModel& m, const std::optional<InfectionRate>& infection,
                                     Load probe_limit) {
    ValidationReport report;
    report.probe_limit = probe_limit;

    AssumptionCheck origin{"zero_at_origin"};
    if (m.birth(0) != 0.0 || m.death(0) != 0.0) {
        origin.passed = false;
        origin.first_violation = 0;
    }
    report.checks.push_back(origin);

    // supp d(.+1) = supp b U {0}, and supp b is {1..K} or N.
    AssumptionCheck support{"support"};
    if (m.pure_death()) {
        // b == 0: the load never leaves {0, 1}; only d(1) > 0 is required.
        if (!m.allow_degenerate()) {
            support.passed = false;
            support.detail = "b == 0 requires allow_degenerate";
        } else if (!(m.death(1) > 0.0)) {
            support.passed = false;
            support.first_violation = 1;
            support.detail = "d(1) must be positive";
        } else {
            support.detail = "degenerate (b == 0): checked d(1) > 0 only";
        }
    } else {
        bool seen_gap = false;
        for (Load n = 0; n <= probe_limit; ++n) {
            bool in_b = n == 0 || m.birth(n) > 0.0;
            bool in_d = m.death(n + 1) > 0.0;
            if (in_b != in_d) {
                support.passed = false;
                support.first_violation = n;
                support.detail = "d(n+1) > 0 must hold exactly on supp(b) U {0}";
                break;
            }
            if (n > 0 && m.birth(n) == 0.0) seen_gap = true;
            else if (seen_gap && m.birth(n) > 0.0) {
                support.passed = false;
                support.first_violation = n;
                support.detail = "supp(b) must be {1..K} or N";
                break;
            }
        }
    }
    report.checks.push_back(support);

    AssumptionCheck growth{"linear_growth"};
    const double c = m.linear_growth_constant();
    if (m.family() == RateFamily::table) {
        growth.detail = "probe-based (heuristic for tables)";
        for (Load n = 1; n <= probe_limit; ++n) {
            if (m.birth(n) > c * n * (1 + 1e-12) || m.death(n) > c * n * (1 + 1e-12)) {
                growth.passed = false;
                growth.first_violation = n;
                break;
            }
        }
    } else {
        growth.detail = "analytic: family is affine in n";
    }
    report.checks.push_back(growth);

    if (infection) {
        AssumptionCheck mono{"lambda_monotone"};
        const InfectionRate& lam = *infection;
        if (!lam.is_power()) {
            mono.detail = "constant";
        } else {
            // lambda n^gamma with lambda, gamma >= 0 is non-decreasing on N; 0^0 = 1 at the origin.
            double prev = lam(0);
            for (Load n = 1; n <= std::min<Load>(probe_limit, 100000); ++n) {
                double cur = lam(n);
                if (cur < prev) {
                    mono.passed = false;
                    mono.first_violation = n;
                    break;
                }
                prev = cur;
            }
        }
        report.checks.push_back(mono);
    }
    return report;
}

}  // namespace cpvl
