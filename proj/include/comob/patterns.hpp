// Lifespan-stage mobility vectors and NMF-based pattern extraction.
//
// A user's visit history is cut into `num_stages` equal-count stages; per
// stage we take entropy, max_frq, and (from stage 2 on) the share of
// visits going to communities never seen in earlier stages. With 20
// stages this is the 59-dimensional mobility vector. NMF over the stacked
// vectors yields component profiles that are labeled by the trend of
// their entropy sub-vector.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "comob/core.hpp"
#include "comob/matrix.hpp"
#include "comob/nmf.hpp"

namespace comob {

enum class PatternLabel { ExploratoryI = 0, ExploratoryII = 1, Concentrated = 2 };

const char* to_string(PatternLabel label);
PatternLabel pattern_from_string(const std::string& s);  // throws on junk

// Users whose last visit predates `cutoff_ts` and who pass the activity
// thresholds (strict >, as in active_filter).
void select_departed_users(TrajectorySet& set, std::int64_t cutoff_ts,
                           std::uint32_t min_distinct = 2,
                           std::uint64_t min_visits = 1000);

// Stage i (1-based) covers visit indices [floor((i-1)*T/n), floor(i*T/n)).
// The slices partition the trajectory. Throws when T < num_stages.
std::vector<std::span<const Visit>> segment_stages(const Trajectory& traj,
                                                   int num_stages = 20);

struct StageMetrics {
  Id user = 0;
  std::vector<double> entropy;   // num_stages
  std::vector<double> max_frq;   // num_stages
  std::vector<double> p_new;     // num_stages - 1, stages 2..num_stages
};

StageMetrics stage_metrics(const Trajectory& traj, int num_stages = 20);

std::vector<StageMetrics> stage_metrics_all(const TrajectorySet& set,
                                            int num_stages = 20, int threads = 1);

enum class ScalingMode { Raw, PerFeatureMax };

// Canonical column names: ent01..entNN, mf01..mfNN, pn02..pnNN.
std::vector<std::string> mobility_column_names(int num_stages = 20);

// Rows are users in input order; throws (naming user and column) on a
// non-finite value.
Matrix build_matrix(const std::vector<StageMetrics>& metrics, ScalingMode mode,
                    const StringPool* users = nullptr);

struct ComponentStats {
  double entropy_slope = 0;
  double p_new_slope = 0;
  double max_frq_mean = 0;
};

ComponentStats component_stats(const Matrix& h, std::size_t component,
                               int num_stages = 20);

// Requires k = 3. Most positive entropy slope -> Exploratory I, most
// negative -> Exploratory II, remaining -> Concentrated. Throws when two
// slopes tie within 1e-9 (manual labeling needed).
std::array<PatternLabel, 3> label_components(const Matrix& h, int num_stages = 20);

// Argmax over the user's component weights; exact ties resolve in label
// order (I, II, Concentrated). Throws on an all-zero weight row.
std::vector<PatternLabel> assign_patterns(const Matrix& w,
                                          const std::array<PatternLabel, 3>& labels);

}  // namespace comob
