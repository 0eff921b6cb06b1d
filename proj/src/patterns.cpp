#include "comob/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <unordered_set>

namespace comob {

const char* to_string(PatternLabel label) {
  switch (label) {
    case PatternLabel::ExploratoryI: return "exploratory_i";
    case PatternLabel::ExploratoryII: return "exploratory_ii";
    case PatternLabel::Concentrated: return "concentrated";
  }
  return "?";
}

PatternLabel pattern_from_string(const std::string& s) {
  if (s == "exploratory_i") return PatternLabel::ExploratoryI;
  if (s == "exploratory_ii") return PatternLabel::ExploratoryII;
  if (s == "concentrated") return PatternLabel::Concentrated;
  throw std::invalid_argument("unknown pattern label: " + s);
}

void select_departed_users(TrajectorySet& set, std::int64_t cutoff_ts,
                           std::uint32_t min_distinct, std::uint64_t min_visits) {
  std::erase_if(set.trajectories, [&](const Trajectory& traj) {
    if (traj.visits.back().ts >= cutoff_ts) return true;
    if (traj.visits.size() <= min_visits) return true;
    std::unordered_set<Id> distinct;
    for (const Visit& v : traj.visits) distinct.insert(v.community);
    return distinct.size() <= min_distinct;
  });
}

std::vector<std::span<const Visit>> segment_stages(const Trajectory& traj,
                                                   int num_stages) {
  require(num_stages >= 1, "segment_stages: num_stages must be >= 1");
  const std::size_t total = traj.visits.size();
  if (total < static_cast<std::size_t>(num_stages))
    throw std::invalid_argument("segment_stages: fewer visits than stages");
  std::vector<std::span<const Visit>> stages;
  stages.reserve(num_stages);
  for (int i = 1; i <= num_stages; ++i) {
    const std::size_t begin = (static_cast<std::size_t>(i) - 1) * total /
                              static_cast<std::size_t>(num_stages);
    const std::size_t end =
        static_cast<std::size_t>(i) * total / static_cast<std::size_t>(num_stages);
    stages.emplace_back(traj.visits.data() + begin, end - begin);
  }
  return stages;
}

namespace {

struct StageCounts {
  double entropy = 0;
  double max_frq = 0;
};

StageCounts stage_randomness(std::span<const Visit> stage) {
  std::vector<Id> ids;
  ids.reserve(stage.size());
  for (const Visit& v : stage) ids.push_back(v.community);
  std::sort(ids.begin(), ids.end());
  const double total = static_cast<double>(ids.size());
  StageCounts out;
  double h = 0.0;
  std::size_t max_count = 0;
  for (std::size_t i = 0; i < ids.size();) {
    std::size_t j = i;
    while (j < ids.size() && ids[j] == ids[i]) ++j;
    const double p = static_cast<double>(j - i) / total;
    h -= p * std::log2(p);
    max_count = std::max(max_count, j - i);
    i = j;
  }
  out.entropy = std::max(h, 0.0);
  out.max_frq = static_cast<double>(max_count) / total;
  return out;
}

}  // namespace

StageMetrics stage_metrics(const Trajectory& traj, int num_stages) {
  const auto stages = segment_stages(traj, num_stages);
  StageMetrics metrics;
  metrics.user = traj.user;
  metrics.entropy.reserve(num_stages);
  metrics.max_frq.reserve(num_stages);
  metrics.p_new.reserve(num_stages - 1);

  std::unordered_set<Id> seen;
  for (int i = 0; i < num_stages; ++i) {
    const auto& stage = stages[i];
    if (stage.empty())
      throw std::invalid_argument("stage_metrics: empty stage");
    const StageCounts sc = stage_randomness(stage);
    metrics.entropy.push_back(sc.entropy);
    metrics.max_frq.push_back(sc.max_frq);
    if (i > 0) {
      std::size_t new_visits = 0;
      for (const Visit& v : stage)
        if (!seen.contains(v.community)) ++new_visits;
      metrics.p_new.push_back(static_cast<double>(new_visits) /
                              static_cast<double>(stage.size()));
    }
    for (const Visit& v : stage) seen.insert(v.community);
  }
  return metrics;
}

std::vector<StageMetrics> stage_metrics_all(const TrajectorySet& set,
                                            int num_stages, int threads) {
  std::vector<StageMetrics> out(set.trajectories.size());
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(set.trajectories.size());
       ++i)
    out[i] = stage_metrics(set.trajectories[i], num_stages);
  return out;
}

std::vector<std::string> mobility_column_names(int num_stages) {
  std::vector<std::string> names;
  names.reserve(3 * num_stages - 1);
  char buf[16];
  for (int i = 1; i <= num_stages; ++i) {
    std::snprintf(buf, sizeof buf, "ent%02d", i);
    names.emplace_back(buf);
  }
  for (int i = 1; i <= num_stages; ++i) {
    std::snprintf(buf, sizeof buf, "mf%02d", i);
    names.emplace_back(buf);
  }
  for (int i = 2; i <= num_stages; ++i) {
    std::snprintf(buf, sizeof buf, "pn%02d", i);
    names.emplace_back(buf);
  }
  return names;
}

Matrix build_matrix(const std::vector<StageMetrics>& metrics, ScalingMode mode,
                    const StringPool* users) {
  require(!metrics.empty(), "build_matrix: no rows");
  const std::size_t ns = metrics.front().entropy.size();
  const std::size_t dim = 3 * ns - 1;
  const auto names = mobility_column_names(static_cast<int>(ns));

  Matrix x(metrics.size(), dim);
  for (std::size_t r = 0; r < metrics.size(); ++r) {
    const StageMetrics& sm = metrics[r];
    require(sm.entropy.size() == ns && sm.max_frq.size() == ns &&
                sm.p_new.size() == ns - 1,
            "build_matrix: inconsistent stage count");
    double* row = x.row(r);
    std::size_t c = 0;
    for (double v : sm.entropy) row[c++] = v;
    for (double v : sm.max_frq) row[c++] = v;
    for (double v : sm.p_new) row[c++] = v;
    for (c = 0; c < dim; ++c)
      if (!std::isfinite(row[c])) {
        const std::string who =
            users != nullptr ? users->name(sm.user) : std::to_string(sm.user);
        throw std::invalid_argument("build_matrix: non-finite value for user '" +
                                    who + "' column " + names[c]);
      }
  }

  if (mode == ScalingMode::PerFeatureMax) {
    for (std::size_t c = 0; c < dim; ++c) {
      double max = 0.0;
      for (std::size_t r = 0; r < x.rows(); ++r) max = std::max(max, x(r, c));
      if (max > 0.0)
        for (std::size_t r = 0; r < x.rows(); ++r) x(r, c) /= max;
    }
  }
  return x;
}

namespace {

double ols_slope(const double* y, std::size_t n, double x0) {
  // x values are x0, x0+1, ...
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x0 + static_cast<double>(i);
    sy += y[i];
  }
  const double mx = sx / static_cast<double>(n), my = sy / static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x0 + static_cast<double>(i) - mx;
    sxx += dx * dx;
    sxy += dx * (y[i] - my);
  }
  return sxy / sxx;
}

}  // namespace

ComponentStats component_stats(const Matrix& h, std::size_t component,
                               int num_stages) {
  const std::size_t ns = static_cast<std::size_t>(num_stages);
  require(h.cols() == 3 * ns - 1, "component_stats: column count mismatch");
  const double* row = h.row(component);
  ComponentStats stats;
  stats.entropy_slope = ols_slope(row, ns, 1.0);
  double mf_sum = 0.0;
  for (std::size_t i = 0; i < ns; ++i) mf_sum += row[ns + i];
  stats.max_frq_mean = mf_sum / static_cast<double>(ns);
  stats.p_new_slope = ols_slope(row + 2 * ns, ns - 1, 2.0);
  return stats;
}

std::array<PatternLabel, 3> label_components(const Matrix& h, int num_stages) {
  require(h.rows() == 3, "label_components: needs exactly 3 components");
  double slopes[3];
  for (std::size_t c = 0; c < 3; ++c)
    slopes[c] = component_stats(h, c, num_stages).entropy_slope;

  std::array<std::size_t, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return slopes[a] > slopes[b]; });
  if (slopes[order[0]] - slopes[order[1]] < 1e-9 ||
      slopes[order[1]] - slopes[order[2]] < 1e-9)
    throw std::runtime_error(
        "label_components: entropy slopes too close to rank, label manually");

  std::array<PatternLabel, 3> labels{};
  labels[order[0]] = PatternLabel::ExploratoryI;
  labels[order[1]] = PatternLabel::Concentrated;
  labels[order[2]] = PatternLabel::ExploratoryII;
  return labels;
}

std::vector<PatternLabel> assign_patterns(const Matrix& w,
                                          const std::array<PatternLabel, 3>& labels) {
  require(w.cols() == 3, "assign_patterns: weight matrix must have 3 columns");

  // Component visit order by label precedence, so exact weight ties pick
  // the earlier label.
  std::array<std::size_t, 3> by_label{};
  for (std::size_t c = 0; c < 3; ++c)
    by_label[static_cast<std::size_t>(labels[c])] = c;

  std::vector<PatternLabel> out(w.rows());
  for (std::size_t r = 0; r < w.rows(); ++r) {
    const double* row = w.row(r);
    double best = -1.0;
    int best_label = -1;
    for (int l = 0; l < 3; ++l) {
      const double weight = row[by_label[static_cast<std::size_t>(l)]];
      if (weight > best) {
        best = weight;
        best_label = l;
      }
    }
    if (best <= 0.0)
      throw std::runtime_error("assign_patterns: all-zero weight row " +
                               std::to_string(r));
    out[r] = static_cast<PatternLabel>(best_label);
  }
  return out;
}

}  // namespace comob
