#ifndef ENTREL_STATS_HPP
#define ENTREL_STATS_HPP

// Two-sample location / distribution tests on real-valued samples.

#include <span>

namespace entrel::twosample {

struct TestOutcome {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Kolmogorov-Smirnov: statistic D = sup |F_a - F_b|. Two-sided p from the
// tie-aware permutation distribution of D while n_a * n_b <= 4e6, from the
// asymptotic Kolmogorov law beyond.
TestOutcome ks_two_sample(std::span<const double> a, std::span<const double> b);

// Survival function of the Kolmogorov distribution, P(K > lambda).
double kolmogorov_sf(double lambda);

// Wilcoxon rank-sum / Mann-Whitney: statistic U of `a`, two-sided p from the
// normal approximation with tie-corrected variance and continuity correction.
TestOutcome wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b);

// Welch two-sample t: statistic t, two-sided p with Welch-Satterthwaite df.
TestOutcome welch_t(std::span<const double> a, std::span<const double> b);

}  // namespace entrel::twosample

#endif  // ENTREL_STATS_HPP
