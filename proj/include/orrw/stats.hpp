#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace orrw {

// Inverse standard normal CDF: rational approximation (Acklam) polished by
// one Halley step against erfc, giving near machine precision.
inline double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("inverse_normal_cdf: p in (0,1)");
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
        double q = std::sqrt(-2 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    } else if (p <= 1 - plow) {
        double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
    } else {
        double q = std::sqrt(-2 * std::log(1 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    // Halley refinement.
    double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    double u = e * std::sqrt(2 * M_PI) * std::exp(x * x / 2);
    x = x - u / (1 + x * u / 2);
    return x;
}

struct ConfidenceInterval {
    double low = 0, high = 1;
};

// Wilson score interval for a binomial proportion; behaves correctly for
// counts at or near 0 and n.
inline ConfidenceInterval wilson_interval(std::uint64_t successes, std::uint64_t trials,
                                          double confidence) {
    if (trials == 0) throw std::invalid_argument("wilson_interval: no trials");
    if (!(confidence > 0 && confidence < 1))
        throw std::invalid_argument("wilson_interval: confidence in (0,1)");
    double z = inverse_normal_cdf(0.5 + confidence / 2);
    double n = static_cast<double>(trials);
    double p = static_cast<double>(successes) / n;
    double z2 = z * z;
    double denom = 1 + z2 / n;
    double center = (p + z2 / (2 * n)) / denom;
    double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

struct SampleSummary {
    std::uint64_t count = 0;
    double mean = 0;
    double variance = 0; // unbiased
    double standard_error = 0;
};

inline SampleSummary summarize(const std::vector<double>& xs) {
    SampleSummary s;
    s.count = xs.size();
    if (xs.empty()) return s;
    double sum = 0;
    for (double x : xs) sum += x;
    s.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.variance = ss / static_cast<double>(xs.size() - 1);
        s.standard_error = std::sqrt(s.variance / static_cast<double>(xs.size()));
    }
    return s;
}

namespace detail_stats {

// Regularized incomplete beta via the continued fraction (Lentz).
inline double incomplete_beta(double a, double b, double x) {
    if (x <= 0) return 0;
    if (x >= 1) return 1;
    double log_beta = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                      b * std::log(1 - x);
    auto cont_fraction = [](double a, double b, double x) {
        const double eps = 1e-15, tiny = 1e-300;
        double qab = a + b, qap = a + 1, qam = a - 1;
        double c = 1, d = 1 - qab * x / qap;
        if (std::abs(d) < tiny) d = tiny;
        d = 1 / d;
        double h = d;
        for (int m = 1; m <= 300; ++m) {
            int m2 = 2 * m;
            double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
            d = 1 + aa * d;
            if (std::abs(d) < tiny) d = tiny;
            c = 1 + aa / c;
            if (std::abs(c) < tiny) c = tiny;
            d = 1 / d;
            h *= d * c;
            aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
            d = 1 + aa * d;
            if (std::abs(d) < tiny) d = tiny;
            c = 1 + aa / c;
            if (std::abs(c) < tiny) c = tiny;
            d = 1 / d;
            double del = d * c;
            h *= del;
            if (std::abs(del - 1) < eps) break;
        }
        return h;
    };
    if (x < (a + 1) / (a + b + 2)) return std::exp(log_beta) * cont_fraction(a, b, x) / a;
    return 1 - std::exp(log_beta) * cont_fraction(b, a, 1 - x) / b;
}

} // namespace detail_stats

inline double student_t_cdf(double t, double dof) {
    double x = dof / (dof + t * t);
    double p = 0.5 * detail_stats::incomplete_beta(dof / 2, 0.5, x);
    return t > 0 ? 1 - p : p;
}

// Upper-tail quantile by bisection on the CDF.
inline double student_t_quantile(double p, double dof) {
    if (!(p > 0 && p < 1)) throw std::invalid_argument("student_t_quantile: p in (0,1)");
    double lo = -1e6, hi = 1e6;
    for (int it = 0; it < 200; ++it) {
        double mid = (lo + hi) / 2;
        if (student_t_cdf(mid, dof) < p)
            lo = mid;
        else
            hi = mid;
    }
    return (lo + hi) / 2;
}

struct RegressionFit {
    double slope = 0, intercept = 0;
    double slope_se = 0;
    double slope_ci_low = 0, slope_ci_high = 0;
    std::size_t points = 0;
};

// Ordinary least squares y = intercept + slope * x with a t-based confidence
// interval on the slope.
inline RegressionFit fit_line(const std::vector<double>& x, const std::vector<double>& y,
                              double confidence) {
    if (x.size() != y.size() || x.size() < 3)
        throw std::invalid_argument("fit_line: need at least 3 matched points");
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0) throw std::invalid_argument("fit_line: x values are constant");
    RegressionFit fit;
    fit.points = n;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double rss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = y[i] - (fit.intercept + fit.slope * x[i]);
        rss += r * r;
    }
    double dof = static_cast<double>(n - 2);
    double sigma2 = dof > 0 ? rss / dof : 0.0;
    fit.slope_se = std::sqrt(sigma2 / sxx);
    double tq = dof > 0 ? student_t_quantile(0.5 + confidence / 2, dof)
                        : std::numeric_limits<double>::infinity();
    fit.slope_ci_low = fit.slope - tq * fit.slope_se;
    fit.slope_ci_high = fit.slope + tq * fit.slope_se;
    return fit;
}

} // namespace orrw
