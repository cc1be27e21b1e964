#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "eazy/dataset.hpp"

namespace eazy {

// Confusion counts and the two headline rates. APCER is the fraction of
// attack presentations misclassified as bona fide; it is absent when the
// truth contains no attack rows.
struct EvaluationResult {
  double accuracy = 0.0;
  std::optional<double> apcer;
  std::size_t true_bonafide = 0;   // bona fide predicted bona fide
  std::size_t false_bonafide = 0;  // attack predicted bona fide
  std::size_t true_attack = 0;     // attack predicted attack
  std::size_t false_attack = 0;    // bona fide predicted attack

  std::size_t total() const {
    return true_bonafide + false_bonafide + true_attack + false_attack;
  }
};

EvaluationResult evaluate(std::span<const Label> predictions, std::span<const Label> truth);

struct FriedmanResult {
  double chi2_r = 0.0;
  double p_value = 1.0;
  std::vector<double> average_ranks;  // per method, each in [1, k]
  std::size_t n_datasets = 0;
  std::size_t k_methods = 0;
};

// Friedman rank test over an n-datasets x k-methods score matrix. Rank 1 is
// the best score per row (smallest when lower_is_better); exact ties share
// their average rank. chi2_r uses the classical (tie-uncorrected) statistic
//   chi2_r = 12 / (n k (k+1)) * sum_j R_j^2 - 3 n (k+1)
// and the p-value is the chi-square upper tail with k-1 degrees of freedom.
FriedmanResult friedman_test(const std::vector<std::vector<double>>& scores,
                             bool lower_is_better);

// Regularized upper incomplete gamma Q(a, x); series/continued-fraction
// evaluation, relative accuracy well below 1e-8 on the tested range.
double regularized_gamma_q(double a, double x);

// P(X >= x) for a chi-square variable with df degrees of freedom.
double chi_square_upper_tail(double x, std::size_t df);

}  // namespace eazy
