#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cpvl/graph.hpp"
#include "cpvl/rates.hpp"

namespace cpvl {

/// Dense vertex -> N0 map (viral loads for the CPVL, dormancy levels for the
/// CPLI) with cached count of positive entries and total mass.
class Configuration {
public:
    Configuration() = default;
    explicit Configuration(std::size_t vertex_count) : loads_(vertex_count, 0) {}
    explicit Configuration(std::vector<Load> loads);

    static Configuration zero(std::size_t n) { return Configuration(n); }
    static Configuration constant(std::size_t n, Load level);
    /// level on every vertex of `set`, zero elsewhere.
    static Configuration indicator(std::size_t n, std::span<const Vertex> set, Load level = 1);
    static Configuration single(std::size_t n, Vertex v, Load level = 1);

    std::size_t size() const { return loads_.size(); }
    Load operator[](Vertex v) const { return loads_[v]; }
    void set(Vertex v, Load value);

    std::size_t positive_count() const { return positive_; }
    std::uint64_t total() const { return total_; }
    bool is_zero() const { return positive_ == 0; }
    Load max_entry() const;
    const std::vector<Load>& loads() const { return loads_; }

    /// Pointwise order: this(v) <= other(v) for all v.
    bool dominated_by(const Configuration& other) const;
    Configuration join(const Configuration& other) const;

    std::string to_string() const;

    friend bool operator==(const Configuration& a, const Configuration& b) { return a.loads_ == b.loads_; }

private:
    std::vector<Load> loads_;
    std::size_t positive_ = 0;
    std::uint64_t total_ = 0;
};

}  // namespace cpvl
