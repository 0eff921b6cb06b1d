// Community-preference classification: TF-IDF-weighted visit counts over a
// popularity-filtered community vocabulary, a 3-class softmax regression
// trained by deterministic full-batch gradient descent, and the usual
// precision/recall/F1 report.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "comob/core.hpp"
#include "comob/matrix.hpp"
#include "comob/patterns.hpp"

namespace comob {

struct FeatureSpace {
  std::vector<std::string> communities;  // lexicographic order
  std::vector<std::uint64_t> user_counts;  // distinct visitors, parallel array
};

// Communities visited by at least `min_users` distinct users. Throws when
// nothing survives.
FeatureSpace build_feature_space(const TrajectorySet& set,
                                 std::uint32_t min_users = 50);

struct SparseRow {
  std::vector<std::pair<std::uint32_t, double>> items;  // (feature index, weight)
};

struct WeightedFeatures {
  std::vector<Id> users;        // row order follows the input trajectory order
  std::vector<SparseRow> rows;
  std::vector<Id> dropped;      // users with no surviving communities
  std::size_t n_features = 0;
  std::size_t n_users_input = 0;        // the N in idf = ln(N / df)
  std::vector<std::uint64_t> df;        // per-feature document frequency
};

// weight(u, c) = count(u, c) * ln(N / df(c)), raw counts, no smoothing.
WeightedFeatures tfidf_weight(const TrajectorySet& set, const FeatureSpace& space);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Seeded shuffle, then train gets floor(train_fraction * n) rows. With
// `stratify` the floor rule applies per class instead.
SplitIndices split_train_test(std::size_t n_rows, double train_fraction,
                              std::uint64_t seed,
                              const std::vector<PatternLabel>* stratify = nullptr);

struct LogisticOptions {
  double l2_strength = 1.0;
  int max_iter = 500;
  double grad_tol = 1e-6;
  std::uint64_t seed = 0;  // recorded; training itself is deterministic
};

struct ClassifierModel {
  Matrix weights;             // 3 x n_features
  std::array<double, 3> bias{};
  bool converged = false;
  int iterations = 0;
  double final_loss = 0;
  std::vector<double> loss_history;
  double l2_strength = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;  // e.g. class absent from training data
};

// Multinomial logistic regression with L2 penalty on the weights (bias
// unpenalized), minimized by full-batch gradient descent with Armijo
// backtracking, so the loss history is non-increasing.
ClassifierModel train_classifier(const WeightedFeatures& features,
                                 const std::vector<PatternLabel>& labels,
                                 std::span<const std::size_t> train_rows,
                                 const LogisticOptions& opts = {});

PatternLabel predict_one(const ClassifierModel& model, const SparseRow& row);
std::vector<PatternLabel> predict(const ClassifierModel& model,
                                  const WeightedFeatures& features,
                                  std::span<const std::size_t> rows,
                                  int threads = 1);

struct EvalReport {
  std::array<std::array<std::uint64_t, 3>, 3> confusion{};  // [truth][predicted]
  std::array<double, 3> precision{};
  std::array<double, 3> recall{};
  std::array<double, 3> f1{};
  double macro_precision = 0, macro_recall = 0, macro_f1 = 0;
  double weighted_precision = 0, weighted_recall = 0, weighted_f1 = 0;
  std::uint64_t n_test = 0;
  std::vector<std::string> warnings;
};

EvalReport evaluate(const ClassifierModel& model, const WeightedFeatures& features,
                    const std::vector<PatternLabel>& labels,
                    std::span<const std::size_t> test_rows);

struct RankedCoefficients {
  std::vector<std::pair<std::string, double>> top_positive;
  std::vector<std::pair<std::string, double>> top_negative;
};

// Communities ranked by the class's coefficient, descending / ascending,
// ties by community name. Lists are truncated to at most n entries.
RankedCoefficients top_coefficients(const ClassifierModel& model,
                                    const FeatureSpace& space, PatternLabel label,
                                    std::size_t n);

}  // namespace comob
