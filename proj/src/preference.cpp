#include "comob/preference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace comob {

FeatureSpace build_feature_space(const TrajectorySet& set, std::uint32_t min_users) {
  require(min_users >= 1, "build_feature_space: min_users must be >= 1");
  std::vector<std::uint64_t> visitors(set.communities.size(), 0);
  {
    std::vector<std::uint32_t> stamp(set.communities.size(), 0);
    std::uint32_t epoch = 0;
    for (const Trajectory& traj : set.trajectories) {
      ++epoch;
      for (const Visit& v : traj.visits)
        if (stamp[v.community] != epoch) {
          stamp[v.community] = epoch;
          visitors[v.community]++;
        }
    }
  }
  FeatureSpace space;
  for (std::size_t c = 0; c < visitors.size(); ++c)
    if (visitors[c] >= min_users) {
      space.communities.push_back(set.communities.name(static_cast<Id>(c)));
      space.user_counts.push_back(visitors[c]);
    }
  if (space.communities.empty())
    throw std::invalid_argument("build_feature_space: no community meets the threshold");

  std::vector<std::size_t> order(space.communities.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return space.communities[a] < space.communities[b];
  });
  FeatureSpace sorted;
  sorted.communities.reserve(order.size());
  sorted.user_counts.reserve(order.size());
  for (std::size_t i : order) {
    sorted.communities.push_back(std::move(space.communities[i]));
    sorted.user_counts.push_back(space.user_counts[i]);
  }
  return sorted;
}

WeightedFeatures tfidf_weight(const TrajectorySet& set, const FeatureSpace& space) {
  // Community id -> feature column, for communities in the space.
  std::vector<std::uint32_t> column(set.communities.size(),
                                    std::numeric_limits<std::uint32_t>::max());
  for (std::size_t f = 0; f < space.communities.size(); ++f) {
    const Id id = set.communities.find(space.communities[f]);
    if (id != StringPool::npos) column[id] = static_cast<std::uint32_t>(f);
  }

  const std::size_t n_features = space.communities.size();
  std::vector<std::uint64_t> df(n_features, 0);
  std::vector<std::vector<std::pair<std::uint32_t, std::uint64_t>>> counts(
      set.trajectories.size());

  for (std::size_t r = 0; r < set.trajectories.size(); ++r) {
    std::unordered_map<std::uint32_t, std::uint64_t> local;
    for (const Visit& v : set.trajectories[r].visits) {
      const std::uint32_t f = column[v.community];
      if (f != std::numeric_limits<std::uint32_t>::max()) local[f]++;
    }
    auto& row = counts[r];
    row.assign(local.begin(), local.end());
    std::sort(row.begin(), row.end());
    for (const auto& [f, c] : row) df[f]++;
  }

  for (std::size_t f = 0; f < n_features; ++f)
    if (df[f] == 0)
      throw std::invalid_argument(
          "tfidf_weight: community '" + space.communities[f] +
          "' is in the feature space but visited by nobody here");

  WeightedFeatures out;
  out.n_features = n_features;
  out.n_users_input = set.trajectories.size();
  out.df = df;
  const double n = static_cast<double>(out.n_users_input);
  for (std::size_t r = 0; r < set.trajectories.size(); ++r) {
    SparseRow row;
    row.items.reserve(counts[r].size());
    for (const auto& [f, c] : counts[r]) {
      const double idf = std::log(n / static_cast<double>(df[f]));
      const double w = static_cast<double>(c) * idf;
      if (w != 0.0) row.items.emplace_back(f, w);
    }
    if (row.items.empty())
      out.dropped.push_back(set.trajectories[r].user);
    else {
      out.users.push_back(set.trajectories[r].user);
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

SplitIndices split_train_test(std::size_t n_rows, double train_fraction,
                              std::uint64_t seed,
                              const std::vector<PatternLabel>* stratify) {
  require(train_fraction > 0.0 && train_fraction < 1.0,
          "split_train_test: fraction must be in (0,1)");
  std::mt19937_64 rng(seed);
  SplitIndices split;
  if (stratify == nullptr) {
    std::vector<std::size_t> order(n_rows);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t n_train =
        static_cast<std::size_t>(train_fraction * static_cast<double>(n_rows));
    split.train.assign(order.begin(), order.begin() + n_train);
    split.test.assign(order.begin() + n_train, order.end());
  } else {
    require(stratify->size() == n_rows, "split_train_test: label size mismatch");
    for (int cls = 0; cls < 3; ++cls) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < n_rows; ++i)
        if (static_cast<int>((*stratify)[i]) == cls) members.push_back(i);
      std::shuffle(members.begin(), members.end(), rng);
      const std::size_t n_train = static_cast<std::size_t>(
          train_fraction * static_cast<double>(members.size()));
      split.train.insert(split.train.end(), members.begin(), members.begin() + n_train);
      split.test.insert(split.test.end(), members.begin() + n_train, members.end());
    }
  }
  return split;
}

namespace {

struct LossGrad {
  double loss = 0;
  Matrix grad_w;  // 3 x n_features
  std::array<double, 3> grad_b{};
};

std::array<double, 3> scores_of(const Matrix& w, const std::array<double, 3>& b,
                                const SparseRow& row) {
  std::array<double, 3> s = b;
  for (const auto& [f, v] : row.items)
    for (int c = 0; c < 3; ++c) s[c] += w(c, f) * v;
  return s;
}

std::array<double, 3> softmax(std::array<double, 3> s) {
  const double m = std::max({s[0], s[1], s[2]});
  double z = 0;
  for (double& v : s) {
    v = std::exp(v - m);
    z += v;
  }
  for (double& v : s) v /= z;
  return s;
}

LossGrad loss_and_grad(const Matrix& w, const std::array<double, 3>& b,
                       const WeightedFeatures& features,
                       const std::vector<PatternLabel>& labels,
                       std::span<const std::size_t> rows, double l2) {
  LossGrad out;
  out.grad_w = Matrix(3, features.n_features);
  const double inv_n = 1.0 / static_cast<double>(rows.size());
  for (std::size_t i : rows) {
    const SparseRow& row = features.rows[i];
    const auto p = softmax(scores_of(w, b, row));
    const int y = static_cast<int>(labels[i]);
    out.loss -= std::log(std::max(p[y], 1e-300)) * inv_n;
    for (int c = 0; c < 3; ++c) {
      const double delta = (p[c] - (c == y ? 1.0 : 0.0)) * inv_n;
      out.grad_b[c] += delta;
      for (const auto& [f, v] : row.items) out.grad_w(c, f) += delta * v;
    }
  }
  for (std::size_t i = 0; i < out.grad_w.data().size(); ++i) {
    out.loss += 0.5 * l2 * w.data()[i] * w.data()[i];
    out.grad_w.data()[i] += l2 * w.data()[i];
  }
  return out;
}

}  // namespace

ClassifierModel train_classifier(const WeightedFeatures& features,
                                 const std::vector<PatternLabel>& labels,
                                 std::span<const std::size_t> train_rows,
                                 const LogisticOptions& opts) {
  require(labels.size() == features.rows.size(),
          "train_classifier: label/row count mismatch");
  require(!train_rows.empty(), "train_classifier: empty training set");

  ClassifierModel model;
  model.weights = Matrix(3, features.n_features);
  model.l2_strength = opts.l2_strength;
  model.seed = opts.seed;

  std::array<std::uint64_t, 3> class_counts{};
  for (std::size_t i : train_rows) class_counts[static_cast<int>(labels[i])]++;
  int present = 0;
  for (int c = 0; c < 3; ++c) {
    if (class_counts[c] > 0)
      ++present;
    else
      model.warnings.push_back(std::string("class absent from training data: ") +
                               to_string(static_cast<PatternLabel>(c)));
  }
  require(present >= 2, "train_classifier: need at least 2 classes in training data");

  LossGrad lg = loss_and_grad(model.weights, model.bias, features, labels,
                              train_rows, opts.l2_strength);
  model.loss_history.push_back(lg.loss);
  double step = 1.0;

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    double gnorm2 = 0;
    for (double g : lg.grad_w.data()) gnorm2 += g * g;
    for (double g : lg.grad_b) gnorm2 += g * g;
    const double gnorm = std::sqrt(gnorm2);
    if (gnorm <= opts.grad_tol) {
      model.converged = true;
      break;
    }

    // Armijo backtracking on the full-batch loss.
    Matrix w_next;
    std::array<double, 3> b_next{};
    LossGrad lg_next;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      w_next = model.weights;
      for (std::size_t i = 0; i < w_next.data().size(); ++i)
        w_next.data()[i] -= step * lg.grad_w.data()[i];
      for (int c = 0; c < 3; ++c)
        b_next[c] = model.bias[c] - step * lg.grad_b[c];
      lg_next = loss_and_grad(w_next, b_next, features, labels, train_rows,
                              opts.l2_strength);
      if (lg_next.loss <= lg.loss - 1e-4 * step * gnorm2) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // step underflowed; nothing more to gain

    model.weights = std::move(w_next);
    model.bias = b_next;
    lg = std::move(lg_next);
    model.loss_history.push_back(lg.loss);
    model.iterations = iter + 1;
    step = std::min(step * 1.5, 1e6);
  }

  model.final_loss = lg.loss;
  return model;
}

PatternLabel predict_one(const ClassifierModel& model, const SparseRow& row) {
  const auto s = scores_of(model.weights, model.bias, row);
  int best = 0;
  for (int c = 1; c < 3; ++c)
    if (s[c] > s[best]) best = c;
  return static_cast<PatternLabel>(best);
}

std::vector<PatternLabel> predict(const ClassifierModel& model,
                                  const WeightedFeatures& features,
                                  std::span<const std::size_t> rows, int threads) {
  std::vector<PatternLabel> out(rows.size());
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(rows.size()); ++i)
    out[i] = predict_one(model, features.rows[rows[i]]);
  return out;
}

EvalReport evaluate(const ClassifierModel& model, const WeightedFeatures& features,
                    const std::vector<PatternLabel>& labels,
                    std::span<const std::size_t> test_rows) {
  require(!test_rows.empty(), "evaluate: empty test set");
  EvalReport report;
  report.n_test = test_rows.size();
  const auto predictions = predict(model, features, test_rows);
  for (std::size_t i = 0; i < test_rows.size(); ++i) {
    const int truth = static_cast<int>(labels[test_rows[i]]);
    const int pred = static_cast<int>(predictions[i]);
    report.confusion[truth][pred]++;
  }

  double weighted_p = 0, weighted_r = 0, weighted_f = 0;
  for (int c = 0; c < 3; ++c) {
    std::uint64_t tp = report.confusion[c][c], fp = 0, fn = 0;
    for (int o = 0; o < 3; ++o)
      if (o != c) {
        fp += report.confusion[o][c];
        fn += report.confusion[c][o];
      }
    const std::uint64_t support = tp + fn;
    if (tp + fp == 0) {
      report.precision[c] = 0.0;
      report.warnings.push_back(std::string("no predicted positives for class ") +
                                to_string(static_cast<PatternLabel>(c)));
    } else {
      report.precision[c] = static_cast<double>(tp) / static_cast<double>(tp + fp);
    }
    report.recall[c] =
        support == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(support);
    const double pr = report.precision[c] + report.recall[c];
    report.f1[c] = pr == 0.0 ? 0.0 : 2.0 * report.precision[c] * report.recall[c] / pr;

    report.macro_precision += report.precision[c] / 3.0;
    report.macro_recall += report.recall[c] / 3.0;
    report.macro_f1 += report.f1[c] / 3.0;
    const double w = static_cast<double>(support) / static_cast<double>(report.n_test);
    weighted_p += w * report.precision[c];
    weighted_r += w * report.recall[c];
    weighted_f += w * report.f1[c];
  }
  report.weighted_precision = weighted_p;
  report.weighted_recall = weighted_r;
  report.weighted_f1 = weighted_f;
  for (const std::string& w : model.warnings) report.warnings.push_back(w);
  return report;
}

RankedCoefficients top_coefficients(const ClassifierModel& model,
                                    const FeatureSpace& space, PatternLabel label,
                                    std::size_t n) {
  require(space.communities.size() == model.weights.cols(),
          "top_coefficients: feature space does not match model");
  const std::size_t cls = static_cast<std::size_t>(label);
  std::vector<std::pair<std::string, double>> coefs;
  coefs.reserve(space.communities.size());
  for (std::size_t f = 0; f < space.communities.size(); ++f)
    coefs.emplace_back(space.communities[f], model.weights(cls, f));

  RankedCoefficients out;
  auto desc = [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  };
  auto asc = [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second < b.second;
    return a.first < b.first;
  };
  const std::size_t take = std::min(n, coefs.size());
  std::sort(coefs.begin(), coefs.end(), desc);
  out.top_positive.assign(coefs.begin(), coefs.begin() + take);
  std::sort(coefs.begin(), coefs.end(), asc);
  out.top_negative.assign(coefs.begin(), coefs.begin() + take);
  return out;
}

}  // namespace comob
