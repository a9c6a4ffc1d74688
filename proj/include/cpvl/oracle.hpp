#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cpvl/configuration.hpp"
#include "cpvl/graph.hpp"
#include "cpvl/rates.hpp"

namespace cpvl {

enum class ProcessKind { cpvl, cpli };
std::string to_string(ProcessKind kind);

/// Generator of a capped CPVL or CPLI on a tiny graph. States are the load
/// vectors in {0..top}^V in mixed-radix order: vertex 0 is the least
/// significant digit, so the all-zero state has index 0.
class GeneratorModel {
public:
    static constexpr std::size_t max_vertices = 6;
    static constexpr Load max_top = 4;

    ProcessKind kind() const { return kind_; }
    std::size_t vertex_count() const { return vertices_; }
    Load top() const { return top_; }
    std::size_t state_count() const { return diag_.size(); }

    std::size_t encode(const Configuration& c) const;
    Configuration decode(std::size_t index) const;
    Load digit(std::size_t index, Vertex v) const;

    /// Off-diagonal entries of row i: columns and rates.
    std::span<const std::uint32_t> row_columns(std::size_t i) const;
    std::span<const double> row_rates(std::size_t i) const;
    /// Q(i, i) = -(sum of the off-diagonal rates of row i).
    double diagonal(std::size_t i) const { return diag_[i]; }
    double rate(std::size_t from, std::size_t to) const;
    double max_exit_rate() const;

private:
    friend GeneratorModel build_generator(const Graph&, const RateModel&, const InfectionRate&, ProcessKind);
    ProcessKind kind_ = ProcessKind::cpvl;
    std::size_t vertices_ = 0;
    Load top_ = 0;
    std::vector<std::size_t> stride_;
    std::vector<std::size_t> row_ptr_;
    std::vector<std::uint32_t> cols_;
    std::vector<double> vals_;
    std::vector<double> diag_;
};

/// Assembles Q on {0..max_load}^V. For the CPLI the infection rate must be
/// constant and lambda = infection(1). Requires |V| <= 6 and max_load <= 4.
GeneratorModel build_generator(const Graph& g, const RateModel& model, const InfectionRate& infection,
                               ProcessKind kind);

/// init * exp(tQ) by uniformization, Poisson weights cut once the remaining
/// mass is below tol. Negative round-off is clamped to 0.
std::vector<double> transient_distribution(const GeneratorModel& gen, const std::vector<double>& init, double t,
                                           double tol = 1e-10);

std::vector<double> point_mass(const GeneratorModel& gen, const Configuration& c);

/// Law of the load at vertex v under a distribution on the state space.
std::vector<double> vertex_marginal(const GeneratorModel& gen, const std::vector<double>& dist, Vertex v);

struct DualityGap {
    double lhs = 0.0;  ///< P(xi0 >= eta_t)
    double rhs = 0.0;  ///< P(xi_t >= eta0)
    double gap = 0.0;
    std::size_t state_space_size = 0;
};

DualityGap exact_duality_gap(const Graph& g, const RateModel& model, double lambda, const Configuration& eta0,
                             const Configuration& xi0, double t, double tol = 1e-10);

/// Mass at the all-zero configuration at time t (CPVL generator).
double exact_extinction_probability(const GeneratorModel& gen, const Configuration& init, double t,
                                    double tol = 1e-10);

}  // namespace cpvl
