#include "entrel/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "entrel/error.hpp"

namespace entrel::twosample {

namespace {

void require_samples(std::span<const double> a, std::span<const double> b, std::size_t min_size) {
  if (a.size() < min_size || b.size() < min_size) {
    throw Error("two-sample test needs at least " + std::to_string(min_size) + " observations per sample");
  }
}

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

}  // namespace

double kolmogorov_sf(double lambda) {
  if (lambda <= 0.0) return 1.0;
  constexpr double kPi = 3.14159265358979323846;
  if (lambda < 1.18) {
    // CDF series in exp(-(2k-1)^2 pi^2 / (8 lambda^2)); converges fast for small lambda.
    const double y = -kPi * kPi / (8.0 * lambda * lambda);
    double sum = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double odd = 2.0 * k - 1.0;
      const double term = std::exp(odd * odd * y);
      sum += term;
      if (term < 1e-17) break;
    }
    return clamp01(1.0 - std::sqrt(2.0 * kPi) / lambda * sum);
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-17) break;
  }
  return clamp01(2.0 * sum);
}

namespace {

constexpr long long kExactKsCells = 4'000'000;

// P(D >= observed) under random relabelling of the pooled sample, ties kept
// together. Lattice walk over (i from a, j from b) in probability form; only
// tie-group ends are checked, since D can only be read there.
double ks_conditional_sf(const std::vector<bool>& group_end, long long n, long long m, long long d_scaled) {
  std::vector<double> row(static_cast<std::size_t>(m + 1), 0.0);
  for (long long i = 0; i <= n; ++i) {
    for (long long j = 0; j <= m; ++j) {
      double u;
      if (i == 0 && j == 0) {
        u = 1.0;
      } else {
        const double up = i > 0 ? row[static_cast<std::size_t>(j)] : 0.0;
        const double left = j > 0 ? row[static_cast<std::size_t>(j - 1)] : 0.0;
        u = (static_cast<double>(i) * up + static_cast<double>(j) * left) / static_cast<double>(i + j);
      }
      if (group_end[static_cast<std::size_t>(i + j)] && std::llabs(i * m - j * n) >= d_scaled) u = 0.0;
      row[static_cast<std::size_t>(j)] = u;
    }
  }
  return clamp01(1.0 - row[static_cast<std::size_t>(m)]);
}

}  // namespace

TestOutcome ks_two_sample(std::span<const double> a, std::span<const double> b) {
  require_samples(a, b, 1);
  const long long n = static_cast<long long>(a.size());
  const long long m = static_cast<long long>(b.size());
  std::vector<std::pair<double, bool>> all;
  all.reserve(a.size() + b.size());
  for (double v : a) all.emplace_back(v, true);
  for (double v : b) all.emplace_back(v, false);
  std::sort(all.begin(), all.end(), [](const auto& l, const auto& r) { return l.first < r.first; });

  // D scaled by n*m stays integral, so comparisons are exact.
  std::vector<bool> group_end(all.size() + 1, false);
  long long i = 0, j = 0, d_scaled = 0;
  for (std::size_t k = 0; k < all.size(); ++k) {
    (all[k].second ? i : j) += 1;
    if (k + 1 == all.size() || all[k + 1].first != all[k].first) {
      group_end[k + 1] = true;
      d_scaled = std::max(d_scaled, std::llabs(i * m - j * n));
    }
  }
  TestOutcome out;
  out.statistic = static_cast<double>(d_scaled) / static_cast<double>(n * m);
  if (d_scaled == 0) {
    out.p_value = 1.0;
    return out;
  }
  if (n * m <= kExactKsCells) {
    out.p_value = ks_conditional_sf(group_end, n, m, d_scaled);
    return out;
  }
  const double en = std::sqrt(static_cast<double>(n * m) / static_cast<double>(n + m));
  out.p_value = kolmogorov_sf((en + 0.12 + 0.11 / en) * out.statistic);
  return out;
}

TestOutcome wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b) {
  require_samples(a, b, 1);
  const std::size_t n1 = a.size();
  const std::size_t n2 = b.size();
  const std::size_t n = n1 + n2;
  std::vector<std::pair<double, bool>> all;
  all.reserve(n);
  for (double v : a) all.emplace_back(v, true);
  for (double v : b) all.emplace_back(v, false);
  std::sort(all.begin(), all.end(), [](const auto& l, const auto& r) { return l.first < r.first; });

  double rank_sum_a = 0.0;
  double tie_term = 0.0;  // sum of t^3 - t over tie groups
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && all[j].first == all[i].first) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (all[k].second) rank_sum_a += avg_rank;
    }
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }

  const double dn1 = static_cast<double>(n1);
  const double dn2 = static_cast<double>(n2);
  const double dn = static_cast<double>(n);
  TestOutcome out;
  out.statistic = rank_sum_a - dn1 * (dn1 + 1.0) / 2.0;
  const double mean = dn1 * dn2 / 2.0;
  const double var = dn1 * dn2 / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
  if (var <= 0.0) {
    out.p_value = 1.0;
    return out;
  }
  const double diff = std::abs(out.statistic - mean);
  const double z = std::max(0.0, diff - 0.5) / std::sqrt(var);
  const boost::math::normal_distribution<double> nd;
  out.p_value = clamp01(2.0 * boost::math::cdf(boost::math::complement(nd, z)));
  return out;
}

TestOutcome welch_t(std::span<const double> a, std::span<const double> b) {
  require_samples(a, b, 2);
  auto mean_var = [](std::span<const double> s) {
    const double n = static_cast<double>(s.size());
    const double mean = std::accumulate(s.begin(), s.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : s) ss += (v - mean) * (v - mean);
    return std::pair{mean, ss / (n - 1.0)};
  };
  const auto [ma, va] = mean_var(a);
  const auto [mb, vb] = mean_var(b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double sa = va / na;
  const double sb = vb / nb;
  TestOutcome out;
  if (sa + sb == 0.0) {
    if (ma == mb) return out;  // t = 0, p = 1
    out.statistic = ma > mb ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    out.p_value = 0.0;
    return out;
  }
  out.statistic = (ma - mb) / std::sqrt(sa + sb);
  const double df = (sa + sb) * (sa + sb) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
  const boost::math::students_t_distribution<double> td(df);
  out.p_value = clamp01(2.0 * boost::math::cdf(boost::math::complement(td, std::abs(out.statistic))));
  return out;
}

}  // namespace entrel::twosample
