#include "cpvl/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cpvl::stats {

MeanEstimate mean_and_stderr(std::span<const double> xs) {
    MeanEstimate r;
    r.count = xs.size();
    if (xs.empty()) return r;
    // Welford.
    double mean = 0.0, m2 = 0.0;
    std::size_t n = 0;
    for (double x : xs) {
        ++n;
        double delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (x - mean);
    }
    r.mean = mean;
    if (n > 1) r.std_error = std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
    return r;
}

Proportion proportion(std::size_t successes, std::size_t trials) {
    Proportion p;
    p.successes = successes;
    p.trials = trials;
    if (trials == 0) return p;
    p.estimate = static_cast<double>(successes) / static_cast<double>(trials);
    p.std_error = std::sqrt(p.estimate * (1.0 - p.estimate) / static_cast<double>(trials));
    return p;
}

double kolmogorov_survival(double x) {
    if (x <= 0.0) return 1.0;
    if (x < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 200; ++k) {
        double term = std::exp(-2.0 * k * k * x * x);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-18) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample needs non-empty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    KsResult r;
    r.statistic = d;
    double en = std::sqrt(na * nb / (na + nb));
    r.p_value = kolmogorov_survival((en + 0.12 + 0.11 / en) * d);
    return r;
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit needs >= 2 paired points");
    LinearFit f;
    f.count = x.size();
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("linear_fit: x values are all equal");
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - f.intercept - f.slope * x[i];
        f.residual_ss += r * r;
    }
    if (x.size() > 2) f.slope_stderr = std::sqrt(f.residual_ss / (n - 2.0) / sxx);
    return f;
}

double tv_distance(const std::map<long, double>& p, const std::map<long, double>& q) {
    double sum = 0.0;
    auto ip = p.begin();
    auto iq = q.begin();
    while (ip != p.end() || iq != q.end()) {
        if (iq == q.end() || (ip != p.end() && ip->first < iq->first)) {
            sum += std::abs(ip->second);
            ++ip;
        } else if (ip == p.end() || iq->first < ip->first) {
            sum += std::abs(iq->second);
            ++iq;
        } else {
            sum += std::abs(ip->second - iq->second);
            ++ip;
            ++iq;
        }
    }
    return 0.5 * sum;
}

std::map<long, double> empirical_law(std::span<const long> samples) {
    std::map<long, double> law;
    if (samples.empty()) return law;
    for (long s : samples) law[s] += 1.0;
    for (auto& [k, v] : law) v /= static_cast<double>(samples.size());
    return law;
}

double median(std::vector<double> xs) {
    if (xs.empty()) throw std::invalid_argument("median of empty sample");
    auto mid = xs.begin() + static_cast<std::ptrdiff_t>(xs.size() / 2);
    std::nth_element(xs.begin(), mid, xs.end());
    double hi = *mid;
    if (xs.size() % 2 == 1) return hi;
    double lo = *std::max_element(xs.begin(), mid);
    return 0.5 * (lo + hi);
}

}  // namespace cpvl::stats
