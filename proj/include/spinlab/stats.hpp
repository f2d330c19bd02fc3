#pragma once

#include <vector>

namespace spinlab {

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a,x) / Gamma(a).
double gamma_q(double a, double x);

/// Upper tail of the chi-square distribution with k degrees of freedom.
double chi2_sf(double x, int dof);

/// Empirical-Bernstein confidence half-width for a mean of n samples in
/// [0, range] with sample variance `var`, at confidence 1 - delta.
double bernstein_halfwidth(double var, double range, int n, double delta);

/// Multinomial TV-estimation bias bound sqrt(|support| / (4 n)).
double tv_bias_bound(int support_size, long long n);

struct RunningStats {
    long long n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }
    double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
};

}  // namespace spinlab
