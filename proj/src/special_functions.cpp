#include "anomgait/special_functions.hpp"

#include <cmath>
#include <stdexcept>

namespace anomgait::stats {

namespace {

// Lentz continued fraction for the incomplete beta.
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 500;
    constexpr double kEps = 3e-16;
    constexpr double kFpMin = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

// Series form of P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
    constexpr int kMaxIter = 1000;
    constexpr double kEps = 3e-16;
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < kMaxIter; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction form of Q(a, x), valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
    constexpr int kMaxIter = 1000;
    constexpr double kEps = 3e-16;
    constexpr double kFpMin = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / kFpMin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = b + an / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// Generic upper-critical inversion by bracketed bisection on a monotone CDF.
template <typename Cdf>
double invert_upper(double alpha, const Cdf& cdf, const char* what) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument(std::string(what) + ": alpha must be in (0,1)");
    const double target = 1.0 - alpha;
    double lo = 0.0, hi = 1.0;
    while (cdf(hi) < target) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) throw std::runtime_error(std::string(what) + ": bracket failed");
    }
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double v = cdf(mid);
        if (std::abs(v - target) <= 1e-12 && it > 60) return mid;
        if (v < target)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-14 * std::max(1.0, hi)) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double reg_inc_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::invalid_argument("reg_inc_beta: parameters must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log(1.0 - x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double reg_lower_gamma(double a, double x) {
    if (!(a > 0.0)) throw std::invalid_argument("reg_lower_gamma: a must be positive");
    if (x <= 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double f_cdf(double x, double d1, double d2) {
    if (!(d1 >= 1.0) || !(d2 >= 1.0))
        throw std::invalid_argument("f_cdf: degrees of freedom must be >= 1");
    if (x <= 0.0) return 0.0;
    const double t = d1 * x / (d1 * x + d2);
    return reg_inc_beta(d1 / 2.0, d2 / 2.0, t);
}

double chi2_cdf(double x, double k) {
    if (!(k >= 1.0)) throw std::invalid_argument("chi2_cdf: dof must be >= 1");
    if (x <= 0.0) return 0.0;
    return reg_lower_gamma(k / 2.0, x / 2.0);
}

double f_critical(double alpha, double d1, double d2) {
    if (!(d1 >= 1.0) || !(d2 >= 1.0))
        throw std::invalid_argument("f_critical: degrees of freedom must be >= 1");
    return invert_upper(alpha, [&](double q) { return f_cdf(q, d1, d2); }, "f_critical");
}

double chi2_critical(double alpha, double dof) {
    if (!(dof >= 1.0))
        throw std::invalid_argument("chi2_critical: dof must be >= 1");
    return invert_upper(alpha, [&](double q) { return chi2_cdf(q, dof); },
                        "chi2_critical");
}

}  // namespace anomgait::stats
