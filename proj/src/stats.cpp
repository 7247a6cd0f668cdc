#include "noisykmpp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace noisykmpp::stats {

MeanCi mean_ci(double sum, double sumsq, std::uint64_t n, double z) {
    MeanCi out;
    if (n == 0) return out;
    const double dn = static_cast<double>(n);
    out.mean = sum / dn;
    double var = 0.0;
    if (n > 1) {
        var = (sumsq - dn * out.mean * out.mean) / (dn - 1.0);
        var = std::max(var, 0.0);
    }
    out.se = std::sqrt(var / dn);
    out.lo = out.mean - z * out.se;
    out.hi = out.mean + z * out.se;
    return out;
}

namespace {

double ibeta_cf(double a, double b, double x) {
    // Lentz continued fraction for the incomplete beta.
    constexpr int kMaxIter = 300;
    constexpr double kEps = 1e-15;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

} // namespace

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete_beta: a, b must be > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * ibeta_cf(a, b, x) / a;
    }
    return 1.0 - front * ibeta_cf(b, a, 1.0 - x) / b;
}

namespace {

// Smallest x with I_x(a, b) >= target, by bisection. Monotone, so this is
// exact to the bracket width.
double inverse_incomplete_beta(double a, double b, double target) {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (incomplete_beta(a, b, mid) < target) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

Interval clopper_pearson(std::uint64_t successes, std::uint64_t trials, double confidence) {
    if (trials == 0) throw std::invalid_argument("clopper_pearson: trials == 0");
    if (successes > trials) throw std::invalid_argument("clopper_pearson: successes > trials");
    const double alpha = 1.0 - confidence;
    const double x = static_cast<double>(successes);
    const double n = static_cast<double>(trials);
    Interval out;
    out.lo = (successes == 0) ? 0.0 : inverse_incomplete_beta(x, n - x + 1.0, alpha / 2.0);
    out.hi = (successes == trials) ? 1.0 : inverse_incomplete_beta(x + 1.0, n - x, 1.0 - alpha / 2.0);
    return out;
}

double binomial_cdf(long m, long n, double p) {
    if (n < 0) throw std::invalid_argument("binomial_cdf: n < 0");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binomial_cdf: p outside [0,1]");
    if (m < 0) return 0.0;
    if (m >= n) return 1.0;
    if (p == 0.0) return 1.0;
    if (p == 1.0) return 0.0;
    const double lp = std::log(p);
    const double lq = std::log1p(-p);
    double acc = 0.0;
    for (long j = 0; j <= m; ++j) {
        const double lpmf = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) -
                            std::lgamma(n - j + 1.0) + j * lp + (n - j) * lq;
        acc += std::exp(lpmf);
    }
    return std::min(acc, 1.0);
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("inverse_normal_cdf: p outside (0,1)");

    // Acklam's rational approximation, then one Newton step against the
    // erfc-based CDF to pull the error to ~1e-15.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};

    const double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    const double e = normal_cdf(x) - p;
    const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * 3.14159265358979323846);
    if (pdf > 0.0) x -= e / pdf;
    return x;
}

} // namespace noisykmpp::stats
