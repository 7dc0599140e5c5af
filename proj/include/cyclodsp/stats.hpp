#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace cyclodsp {

inline double mean(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("mean: empty");
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

/// Sample standard deviation (n - 1 normalization); 0 for a single value.
inline double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

struct ConfidenceInterval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Normal-approximation 95% confidence interval for the mean.
inline ConfidenceInterval ci95(const std::vector<double>& v) {
    const double m = mean(v);
    const double half = 1.96 * sample_std(v) / std::sqrt(static_cast<double>(v.size()));
    return {m - half, m + half};
}

namespace detail {

// regularized incomplete beta I_x(a, b) via the Lentz continued fraction
inline double betacf(double a, double b, double x) {
    const double eps = 3e-14;
    const double fpmin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

inline double betai(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                         b * std::log(1.0 - x);
    const double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return bt * betacf(a, b, x) / a;
    }
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

} // namespace detail

/// Upper-tail probability of Student's t with the given degrees of freedom.
inline double student_t_sf(double t, double dof) {
    const double x = dof / (dof + t * t);
    const double p = 0.5 * detail::betai(dof / 2.0, 0.5, x);
    return t >= 0.0 ? p : 1.0 - p;
}

struct PairedTTest {
    double mean_diff = 0.0;
    double t_stat = 0.0;
    double p_value = 1.0; ///< one-sided, H1: mean(a - b) > 0
    std::size_t n = 0;
};

/// One-sided paired t test for mean(a) > mean(b).
inline PairedTTest paired_t_test(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2) {
        throw std::invalid_argument("paired_t_test: need matched samples, n >= 2");
    }
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    PairedTTest r;
    r.n = d.size();
    r.mean_diff = mean(d);
    const double sd = sample_std(d);
    if (sd == 0.0) {
        r.t_stat = r.mean_diff > 0.0 ? 1e30 : (r.mean_diff < 0.0 ? -1e30 : 0.0);
        r.p_value = r.mean_diff > 0.0 ? 0.0 : 1.0;
        return r;
    }
    r.t_stat = r.mean_diff / (sd / std::sqrt(static_cast<double>(r.n)));
    r.p_value = student_t_sf(r.t_stat, static_cast<double>(r.n - 1));
    return r;
}

} // namespace cyclodsp
