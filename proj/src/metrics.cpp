#include "eazy/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace eazy {

EvaluationResult evaluate(std::span<const Label> predictions, std::span<const Label> truth) {
  if (predictions.size() != truth.size())
    throw DataError("evaluate: prediction/truth length mismatch (" +
                    std::to_string(predictions.size()) + " vs " +
                    std::to_string(truth.size()) + ")");
  if (truth.empty()) throw DataError("evaluate: empty input");

  EvaluationResult r;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == Label::BonaFide) {
      if (predictions[i] == Label::BonaFide)
        ++r.true_bonafide;
      else
        ++r.false_attack;
    } else {
      if (predictions[i] == Label::Attack)
        ++r.true_attack;
      else
        ++r.false_bonafide;
    }
  }
  r.accuracy = static_cast<double>(r.true_bonafide + r.true_attack) /
               static_cast<double>(r.total());
  std::size_t attacks = r.true_attack + r.false_bonafide;
  if (attacks > 0)
    r.apcer = static_cast<double>(r.false_bonafide) / static_cast<double>(attacks);
  return r;
}

namespace {

constexpr int kGammaMaxIter = 500;
constexpr double kGammaEps = 1e-15;

// Lower regularized incomplete gamma by power series (x < a + 1).
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double term = sum;
  for (int i = 0; i < kGammaMaxIter; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kGammaEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized incomplete gamma by Lentz continued fraction (x >= a + 1).
double gamma_q_continued_fraction(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kGammaMaxIter; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kGammaEps) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0 || !std::isfinite(a) || !std::isfinite(x))
    throw DataError("regularized_gamma_q: requires a > 0 and x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_continued_fraction(a, x);
}

double chi_square_upper_tail(double x, std::size_t df) {
  if (df == 0) throw DataError("chi_square_upper_tail: df must be >= 1");
  return regularized_gamma_q(0.5 * static_cast<double>(df), 0.5 * x);
}

namespace {

// Ranks for one row, 1 = best; exact ties share the average of the rank
// positions they occupy.
std::vector<double> row_ranks(const std::vector<double>& scores, bool lower_is_better) {
  const std::size_t k = scores.size();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return lower_is_better ? scores[a] < scores[b] : scores[a] > scores[b];
  });
  std::vector<double> ranks(k, 0.0);
  std::size_t i = 0;
  while (i < k) {
    std::size_t j = i;
    while (j + 1 < k && scores[order[j + 1]] == scores[order[i]]) ++j;
    double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

FriedmanResult friedman_test(const std::vector<std::vector<double>>& scores,
                             bool lower_is_better) {
  const std::size_t n = scores.size();
  if (n < 2) throw DataError("friedman_test: needs >= 2 datasets (rows)");
  const std::size_t k = scores.front().size();
  if (k < 2) throw DataError("friedman_test: needs >= 2 methods (columns)");
  for (const auto& row : scores) {
    if (row.size() != k) throw DataError("friedman_test: ragged score matrix");
    for (double v : row)
      if (!std::isfinite(v)) throw DataError("friedman_test: non-finite score");
  }

  std::vector<double> rank_sums(k, 0.0);
  for (const auto& row : scores) {
    auto ranks = row_ranks(row, lower_is_better);
    for (std::size_t j = 0; j < k; ++j) rank_sums[j] += ranks[j];
  }

  double nd = static_cast<double>(n);
  double kd = static_cast<double>(k);
  double sum_sq = 0.0;
  for (double rj : rank_sums) sum_sq += rj * rj;
  double chi2 = 12.0 / (nd * kd * (kd + 1.0)) * sum_sq - 3.0 * nd * (kd + 1.0);
  chi2 = std::max(chi2, 0.0);  // full-tie matrices land at -0.0 numerically

  FriedmanResult result;
  result.chi2_r = chi2;
  result.p_value = chi_square_upper_tail(chi2, k - 1);
  result.average_ranks.resize(k);
  for (std::size_t j = 0; j < k; ++j) result.average_ranks[j] = rank_sums[j] / nd;
  result.n_datasets = n;
  result.k_methods = k;
  return result;
}

}  // namespace eazy
