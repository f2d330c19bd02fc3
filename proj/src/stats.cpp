#include "spinlab/stats.hpp"

#include <cmath>
#include <limits>

#include "spinlab/errors.hpp"

namespace spinlab {

namespace {

// Lower regularized incomplete gamma P(a,x) by series expansion (x < a+1).
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 1000; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized incomplete gamma Q(a,x) by Lentz continued fraction
// (x >= a+1).
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw DomainError("gamma_q: need a > 0, x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double chi2_sf(double x, int dof) {
    if (dof < 1) throw DomainError("chi2_sf: dof must be >= 1");
    if (!(x >= 0.0)) return 1.0;
    if (std::isinf(x)) return 0.0;
    return gamma_q(0.5 * dof, 0.5 * x);
}

double bernstein_halfwidth(double var, double range, int n, double delta) {
    if (n <= 0) throw DomainError("bernstein: n must be positive");
    double L = std::log(3.0 / delta);
    return std::sqrt(2.0 * std::max(0.0, var) * L / n) + 3.0 * range * L / n;
}

double tv_bias_bound(int support_size, long long n) {
    if (n <= 0) return 1.0;
    return std::sqrt(static_cast<double>(support_size) / (4.0 * static_cast<double>(n)));
}

}  // namespace spinlab
