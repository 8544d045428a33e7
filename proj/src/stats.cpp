#include "usleep/stats.hpp"

#include <algorithm>
#include <cmath>

#include "usleep/errors.hpp"

namespace usleep {

namespace {

constexpr double kEps = 3e-16;
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 500;

// Modified Lentz continued fraction for the incomplete beta.
double beta_cf(double a, double b, double x) {
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

double gamma_p_series(double a, double x) {
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int n = 1; n <= kMaxIter; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double quantile_linear(const std::vector<double>& sorted, double q) {
    const auto n = sorted.size();
    if (n == 1) return sorted[0];
    const double pos = q * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= n) return sorted[n - 1];
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double bt =
        std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                 b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * beta_cf(a, b, x) / a;
    return 1.0 - bt * beta_cf(b, a, 1.0 - x) / b;
}

double incomplete_gamma_p(double a, double x) {
    require(a > 0.0 && x >= 0.0, "incomplete_gamma_p: domain error");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double chi_square_sf(double x, int k) {
    require(k >= 1, "chi_square_sf: dof must be >= 1");
    if (x <= 0.0) return 1.0;
    return 1.0 - incomplete_gamma_p(static_cast<double>(k) / 2.0, x / 2.0);
}

double student_t_two_sided_p(double t, double df) {
    require(df > 0.0, "student_t_two_sided_p: df must be positive");
    return incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

TTestResult paired_ttest(const std::vector<double>& scores_a, const std::vector<double>& scores_b,
                         TTestSides sides) {
    require(scores_a.size() == scores_b.size(), "paired_ttest: unequal score vectors");
    const auto n = scores_a.size();
    require(n >= 2, "paired_ttest: need at least 2 pairs");

    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += scores_a[i] - scores_b[i];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = scores_a[i] - scores_b[i] - mean;
        ss += d * d;
    }
    const double var = ss / static_cast<double>(n - 1);

    TTestResult r;
    if (var == 0.0) {
        r.degenerate = true;
        r.t = 0.0;
        r.p = 1.0;
        return r;
    }
    const double df = static_cast<double>(n - 1);
    r.t = mean / std::sqrt(var / static_cast<double>(n));
    const double two = student_t_two_sided_p(r.t, df);
    r.p = sides == TTestSides::two ? two : (r.t > 0.0 ? two / 2.0 : 1.0 - two / 2.0);
    return r;
}

double chi_square_gof_p(const std::vector<std::int64_t>& observed,
                        const std::vector<double>& expected_probs) {
    require(observed.size() == expected_probs.size() && observed.size() >= 2,
            "chi_square_gof_p: need matching categories >= 2");
    std::int64_t total = 0;
    for (auto o : observed) total += o;
    require(total > 0, "chi_square_gof_p: empty sample");

    double chi2 = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double exp_count = expected_probs[i] * static_cast<double>(total);
        require(exp_count > 0.0, "chi_square_gof_p: zero expected count");
        const double d = static_cast<double>(observed[i]) - exp_count;
        chi2 += d * d / exp_count;
    }
    return chi_square_sf(chi2, static_cast<int>(observed.size()) - 1);
}

double median(std::vector<double> values) {
    require(!values.empty(), "median: empty input");
    std::sort(values.begin(), values.end());
    return quantile_linear(values, 0.5);
}

double interquartile_range(std::vector<double> values) {
    require(!values.empty(), "interquartile_range: empty input");
    std::sort(values.begin(), values.end());
    return quantile_linear(values, 0.75) - quantile_linear(values, 0.25);
}

}  // namespace usleep
