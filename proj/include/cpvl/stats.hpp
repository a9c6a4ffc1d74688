#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

namespace cpvl::stats {

struct MeanEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t count = 0;
};

MeanEstimate mean_and_stderr(std::span<const double> xs);

/// Binomial proportion with its plug-in standard error.
struct Proportion {
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t successes = 0;
    std::size_t trials = 0;
};

Proportion proportion(std::size_t successes, std::size_t trials);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic Kolmogorov
/// distribution for the p-value.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Survival function of the Kolmogorov distribution, P(K > x).
double kolmogorov_survival(double x);

struct LinearFit {
    double intercept = 0.0;
    double slope = 0.0;
    double slope_stderr = 0.0;
    double residual_ss = 0.0;
    std::size_t count = 0;
};

/// Ordinary least squares y = intercept + slope x.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Total-variation distance between two empirical laws on the integers.
double tv_distance(const std::map<long, double>& p, const std::map<long, double>& q);

/// Normalised histogram of integer samples.
std::map<long, double> empirical_law(std::span<const long> samples);

double median(std::vector<double> xs);

}  // namespace cpvl::stats
