#include "cpvl/configuration.hpp"

#include <algorithm>
#include <stdexcept>

namespace cpvl {

Configuration::Configuration(std::vector<Load> loads) : loads_(std::move(loads)) {
    for (Load l : loads_) {
        positive_ += l > 0;
        total_ += l;
    }
}

Configuration Configuration::constant(std::size_t n, Load level) {
    return Configuration(std::vector<Load>(n, level));
}

Configuration Configuration::indicator(std::size_t n, std::span<const Vertex> set, Load level) {
    Configuration c(n);
    for (Vertex v : set) {
        if (v >= n) throw std::out_of_range("indicator vertex out of range");
        c.set(v, level);
    }
    return c;
}

Configuration Configuration::single(std::size_t n, Vertex v, Load level) {
    return indicator(n, std::span<const Vertex>(&v, 1), level);
}

void Configuration::set(Vertex v, Load value) {
    Load old = loads_[v];
    positive_ += static_cast<std::size_t>(value > 0) - static_cast<std::size_t>(old > 0);
    total_ += value;
    total_ -= old;
    loads_[v] = value;
}

Load Configuration::max_entry() const {
    return loads_.empty() ? 0 : *std::max_element(loads_.begin(), loads_.end());
}

bool Configuration::dominated_by(const Configuration& other) const {
    if (other.size() != size()) throw std::invalid_argument("configurations differ in size");
    for (std::size_t v = 0; v < loads_.size(); ++v)
        if (loads_[v] > other.loads_[v]) return false;
    return true;
}

Configuration Configuration::join(const Configuration& other) const {
    if (other.size() != size()) throw std::invalid_argument("configurations differ in size");
    std::vector<Load> out(size());
    for (std::size_t v = 0; v < out.size(); ++v) out[v] = std::max(loads_[v], other.loads_[v]);
    return Configuration(std::move(out));
}

std::string Configuration::to_string() const {
    std::string s = "[";
    for (std::size_t v = 0; v < loads_.size(); ++v) {
        if (v) s += ' ';
        s += std::to_string(loads_[v]);
    }
    return s + "]";
}

}  // namespace cpvl
