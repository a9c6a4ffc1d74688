#include "cpvl/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cpvl {

std::string to_string(ProcessKind kind) { return kind == ProcessKind::cpvl ? "cpvl" : "cpli"; }

std::size_t GeneratorModel::encode(const Configuration& c) const {
    if (c.size() != vertices_) throw std::invalid_argument("configuration size does not match generator");
    std::size_t idx = 0;
    for (Vertex v = 0; v < vertices_; ++v) {
        if (c[v] > top_) throw std::invalid_argument("configuration exceeds the generator's top level");
        idx += c[v] * stride_[v];
    }
    return idx;
}

Load GeneratorModel::digit(std::size_t index, Vertex v) const {
    return static_cast<Load>((index / stride_[v]) % (top_ + 1));
}

Configuration GeneratorModel::decode(std::size_t index) const {
    std::vector<Load> loads(vertices_);
    for (Vertex v = 0; v < vertices_; ++v) loads[v] = digit(index, v);
    return Configuration(std::move(loads));
}

std::span<const std::uint32_t> GeneratorModel::row_columns(std::size_t i) const {
    return std::span<const std::uint32_t>(cols_).subspan(row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]);
}

std::span<const double> GeneratorModel::row_rates(std::size_t i) const {
    return std::span<const double>(vals_).subspan(row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]);
}

double GeneratorModel::rate(std::size_t from, std::size_t to) const {
    if (from == to) return diag_[from];
    auto cols = row_columns(from);
    auto vals = row_rates(from);
    for (std::size_t k = 0; k < cols.size(); ++k)
        if (cols[k] == to) return vals[k];
    return 0.0;
}

double GeneratorModel::max_exit_rate() const {
    double q = 0.0;
    for (double d : diag_) q = std::max(q, -d);
    return q;
}

GeneratorModel build_generator(const Graph& g, const RateModel& model, const InfectionRate& infection,
                               ProcessKind kind) {
    const auto ml = model.max_load();
    if (!ml) throw std::invalid_argument("oracle needs a capped model (finite max load)");
    if (g.vertex_count() > GeneratorModel::max_vertices)
        throw std::invalid_argument("oracle supports at most 6 vertices");
    if (*ml > GeneratorModel::max_top) throw std::invalid_argument("oracle supports max load <= 4");
    if (kind == ProcessKind::cpli && !infection.is_constant())
        throw std::invalid_argument("CPLI generator needs a constant infection rate");
    if (kind == ProcessKind::cpli && model.death(*ml + 1) > 0.0)
        throw std::invalid_argument("CPLI generator needs d(max_load + 1) = 0");

    GeneratorModel gen;
    gen.kind_ = kind;
    gen.vertices_ = g.vertex_count();
    gen.top_ = *ml;
    std::size_t states = 1;
    gen.stride_.resize(gen.vertices_);
    for (std::size_t v = 0; v < gen.vertices_; ++v) {
        gen.stride_[v] = states;
        states *= gen.top_ + 1;
        if (states > 1'000'000) throw std::invalid_argument("oracle state space exceeds 10^6 states");
    }
    const double lambda = infection(1);

    gen.row_ptr_.assign(1, 0);
    gen.diag_.assign(states, 0.0);
    std::vector<std::pair<std::uint32_t, double>> row;
    for (std::size_t i = 0; i < states; ++i) {
        row.clear();
        auto add = [&](std::size_t to, double r) {
            if (r > 0.0) row.emplace_back(static_cast<std::uint32_t>(to), r);
        };
        for (Vertex x = 0; x < gen.vertices_; ++x) {
            const Load n = gen.digit(i, x);
            const std::size_t s = gen.stride_[x];
            if (kind == ProcessKind::cpvl) {
                if (n < gen.top_) add(i + s, model.birth(n));
                if (n > 0) add(i - s, model.death(n));
                if (n == 0) {
                    double r = 0.0;
                    for (Vertex y : g.neighbors(x)) {
                        const Load m = gen.digit(i, y);
                        if (m > 0) r += infection(m);
                    }
                    add(i + s, r);
                }
            } else {
                if (n < gen.top_) add(i + s, model.death(n + 1));
                if (n > 0) {
                    add(i - s, model.birth(n));
                    std::size_t active = 0;
                    for (Vertex y : g.neighbors(x)) active += gen.digit(i, y) == 0;
                    add(i - n * s, lambda * static_cast<double>(active));
                }
            }
        }
        // A down-move from 1 and a reset to 0 can hit the same column.
        std::sort(row.begin(), row.end());
        double exit = 0.0;
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (k > 0 && row[k].first == row[k - 1].first) {
                gen.vals_.back() += row[k].second;
            } else {
                gen.cols_.push_back(row[k].first);
                gen.vals_.push_back(row[k].second);
            }
            exit += row[k].second;
        }
        gen.diag_[i] = -exit;
        gen.row_ptr_.push_back(gen.cols_.size());
    }
    return gen;
}

std::vector<double> transient_distribution(const GeneratorModel& gen, const std::vector<double>& init, double t,
                                           double tol) {
    if (init.size() != gen.state_count()) throw std::invalid_argument("initial distribution has wrong size");
    if (!(t >= 0.0)) throw std::invalid_argument("t must be >= 0");
    const double q = gen.max_exit_rate();
    if (t == 0.0 || q == 0.0) return init;

    const double qt = q * t;
    const std::size_t n = gen.state_count();
    std::vector<double> v = init, next(n), out(n, 0.0);
    const double log_qt = std::log(qt);
    const auto hard_cap = static_cast<std::size_t>(qt + 40.0 * std::sqrt(qt) + 100.0);
    double mass = 0.0;
    for (std::size_t k = 0;; ++k) {
        const double w = std::exp(-qt + static_cast<double>(k) * log_qt - std::lgamma(static_cast<double>(k) + 1.0));
        if (w > 0.0)
            for (std::size_t i = 0; i < n; ++i) out[i] += w * v[i];
        mass += w;
        if ((static_cast<double>(k) >= qt && 1.0 - mass <= tol) || k >= hard_cap) break;
        // next = v (I + Q / q)
        for (std::size_t i = 0; i < n; ++i) next[i] = v[i] * (1.0 + gen.diagonal(i) / q);
        for (std::size_t i = 0; i < n; ++i) {
            if (v[i] == 0.0) continue;
            auto cols = gen.row_columns(i);
            auto vals = gen.row_rates(i);
            for (std::size_t k2 = 0; k2 < cols.size(); ++k2) next[cols[k2]] += v[i] * vals[k2] / q;
        }
        v.swap(next);
    }
    for (double& x : out) x = std::max(x, 0.0);
    return out;
}

std::vector<double> point_mass(const GeneratorModel& gen, const Configuration& c) {
    std::vector<double> p(gen.state_count(), 0.0);
    p[gen.encode(c)] = 1.0;
    return p;
}

std::vector<double> vertex_marginal(const GeneratorModel& gen, const std::vector<double>& dist, Vertex v) {
    std::vector<double> m(gen.top() + 1, 0.0);
    for (std::size_t i = 0; i < dist.size(); ++i) m[gen.digit(i, v)] += dist[i];
    return m;
}

DualityGap exact_duality_gap(const Graph& g, const RateModel& model, double lambda, const Configuration& eta0,
                             const Configuration& xi0, double t, double tol) {
    const InfectionRate infection = InfectionRate::constant(lambda);
    const GeneratorModel fwd = build_generator(g, model, infection, ProcessKind::cpvl);
    const GeneratorModel dual = build_generator(g, model, infection, ProcessKind::cpli);
    const auto p = transient_distribution(fwd, point_mass(fwd, eta0), t, tol);
    const auto q = transient_distribution(dual, point_mass(dual, xi0), t, tol);
    DualityGap gap;
    gap.state_space_size = fwd.state_count();
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0 && fwd.decode(i).dominated_by(xi0)) gap.lhs += p[i];
        if (q[i] > 0.0 && eta0.dominated_by(dual.decode(i))) gap.rhs += q[i];
    }
    gap.gap = std::abs(gap.lhs - gap.rhs);
    return gap;
}

double exact_extinction_probability(const GeneratorModel& gen, const Configuration& init, double t, double tol) {
    if (gen.kind() != ProcessKind::cpvl) throw std::invalid_argument("extinction probability needs a CPVL generator");
    return transient_distribution(gen, point_mass(gen, init), t, tol)[0];
}

}  // namespace cpvl
