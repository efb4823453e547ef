#pragma once

#include <cstddef>
#include <vector>

namespace lerw {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;   // standard error of the mean
    double sd = 0.0;
    std::size_t n = 0;
};

MeanSe mean_se(const std::vector<double>& x);

// Two-sample Kolmogorov-Smirnov statistic sup |F_x - F_y|.
double ks_statistic(std::vector<double> x, std::vector<double> y);
// Asymptotic p-value from the Kolmogorov distribution with the
// effective-size correction (sqrt(n_e) + 0.12 + 0.11 / sqrt(n_e)) D.
double ks_pvalue(double d, std::size_t n, std::size_t m);
// Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);
// Half-width of the 95% band for the KS statistic: 1.358 sqrt((n + m) / (n m)).
double ks_band95(std::size_t n, std::size_t m);

double total_variation(const std::vector<double>& p, const std::vector<double>& q);

double median(std::vector<double> x);

}  // namespace lerw
