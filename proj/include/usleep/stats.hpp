#ifndef USLEEP_STATS_HPP_
#define USLEEP_STATS_HPP_

#include <cstdint>
#include <vector>

namespace usleep {

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

// Regularized lower incomplete gamma P(a, x), series + continued fraction.
double incomplete_gamma_p(double a, double x);

// Survival function of the chi-square distribution with k dof.
double chi_square_sf(double x, int k);

// Two-sided tail probability of Student's t with df degrees of freedom.
double student_t_two_sided_p(double t, double df);

enum class TTestSides { one, two };

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
    bool degenerate = false;  // zero difference variance
};

// Paired t-test on per-recording score vectors. One-sided tests the
// alternative mean(a - b) > 0.
TTestResult paired_ttest(const std::vector<double>& scores_a, const std::vector<double>& scores_b,
                         TTestSides sides);

// Pearson chi-square goodness-of-fit p-value for observed counts against
// expected probabilities.
double chi_square_gof_p(const std::vector<std::int64_t>& observed,
                        const std::vector<double>& expected_probs);

double median(std::vector<double> values);
// Interquartile range with linear interpolation between order statistics.
double interquartile_range(std::vector<double> values);

}  // namespace usleep

#endif  // USLEEP_STATS_HPP_
