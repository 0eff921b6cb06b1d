// comob: community-mobility analytics over event logs.
//
// Subcommands wire the library into file-to-file pipelines. Every run
// writes a manifest.json into the output directory recording the tool
// version, the configuration it ran with, input digests, and per-step row
// counts and timings; the manifest is written even when the run fails.
//
// Exit codes: 0 success, 2 usage or configuration error, 1 runtime failure.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "comob/distributions.hpp"
#include "comob/ingest.hpp"
#include "comob/io_util.hpp"
#include "comob/nmf.hpp"
#include "comob/patterns.hpp"
#include "comob/preference.hpp"
#include "comob/randomness.hpp"
#include "comob/randomwalk.hpp"
#include "comob/synth.hpp"
#include "comob/temporal.hpp"
#include "comob/timezones.hpp"

using namespace comob;
using nlohmann::json;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Manifest {
  std::string subcommand;
  json config = json::object();
  json inputs = json::array();
  json outputs = json::array();
  json steps = json::array();

  void add_input(const std::string& path) {
    inputs.push_back({{"path", path},
                      {"digest_fnv1a64", file_digest_hex(path)},
                      {"bytes", fs::file_size(path)}});
  }
  void add_step(const std::string& name, std::uint64_t rows, double seconds) {
    steps.push_back({{"step", name}, {"rows", rows}, {"seconds", seconds}});
  }
  void write(const std::string& out_dir, const std::string& error = "") const {
    json j;
    j["tool"] = "comob";
    j["version"] = COMOB_VERSION;
    j["subcommand"] = subcommand;
    j["config"] = config;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    j["steps"] = steps;
    if (!error.empty()) j["error"] = error;
    write_text_file((fs::path(out_dir) / "manifest.json").string(), j.dump(2) + "\n");
  }
};

class StepTimer {
 public:
  StepTimer(Manifest& manifest, std::string name)
      : manifest_(manifest), name_(std::move(name)), start_(Clock::now()) {}
  void done(std::uint64_t rows) {
    manifest_.add_step(name_, rows,
                       std::chrono::duration<double>(Clock::now() - start_).count());
  }

 private:
  Manifest& manifest_;
  std::string name_;
  Clock::time_point start_;
};

void write_output(Manifest& manifest, const std::string& out_dir,
                  const std::string& name, const std::string& content) {
  const std::string path = (fs::path(out_dir) / name).string();
  write_text_file(path, content);
  manifest.outputs.push_back(name);
}

// ---------------------------------------------------------------- options

struct IngestOptions {
  std::string user_field = "author";
  std::string community_field = "subreddit";
  std::string ts_field = "created_utc";
  bool strict = false;
  std::int64_t min_ts = std::numeric_limits<std::int64_t>::min();
  std::int64_t max_ts = std::numeric_limits<std::int64_t>::max();

  ParseOptions parse_options() const {
    ParseOptions opt;
    opt.fields = {user_field, community_field, ts_field};
    opt.strict = strict;
    opt.min_ts = min_ts;
    opt.max_ts = max_ts;
    return opt;
  }
  void attach(CLI::App* cmd) {
    cmd->add_option("--user-field", user_field, "input field holding the user id");
    cmd->add_option("--community-field", community_field,
                    "input field holding the community id");
    cmd->add_option("--ts-field", ts_field, "input field holding the UTC timestamp");
    cmd->add_flag("--strict", strict, "abort on the first malformed line");
    cmd->add_option("--min-ts", min_ts, "reject events before this timestamp");
    cmd->add_option("--max-ts", max_ts, "reject events after this timestamp");
  }
};

struct CleanParams {
  std::string deleted_token = "[deleted]";
  std::vector<std::string> id_terms{"-bot", "_transcriber", "Moderator"};
  bool case_insensitive = false;
  std::uint64_t hf_threshold = 50000;
  std::int64_t slice_start = 0, slice_end = 0;  // both zero = no slicing

  void attach(CLI::App* cmd) {
    cmd->add_option("--deleted-token", deleted_token,
                    "user id marking deleted accounts");
    cmd->add_option("--id-terms", id_terms,
                    "substrings marking non-human account ids");
    cmd->add_flag("--case-insensitive", case_insensitive,
                  "match id terms ignoring case");
    cmd->add_option("--hf-threshold", hf_threshold,
                    "post count that flags a user for review");
    cmd->add_option("--slice-start", slice_start,
                    "keep events at or after this timestamp");
    cmd->add_option("--slice-end", slice_end, "keep events before this timestamp");
  }
};

// ----------------------------------------------------------- file loading

EventLog load_events(Manifest& manifest, const std::string& path,
                     const IngestOptions& ingest, int threads,
                     ParseStats* stats_out = nullptr) {
  manifest.add_input(path);
  StepTimer timer(manifest, "parse_events");
  const std::string text = slurp_file(path);
  EventLog log;
  const ParseStats stats = parse_events(text, ingest.parse_options(), log, threads);
  if (stats_out != nullptr) *stats_out = stats;
  timer.done(stats.parsed);
  return log;
}

TrajectorySet load_trajectories(Manifest& manifest, const std::string& path) {
  manifest.add_input(path);
  StepTimer timer(manifest, "read_trajectories");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  TrajectorySet set = read_trajectories_ndjson(in);
  timer.done(set.trajectories.size());
  return set;
}

// -------------------------------------------------------------- csv bits

std::string curve_csv(const CcdfCurve& curve) {
  std::ostringstream out;
  out << "value,prob\n";
  for (const CcdfPoint& p : curve.points)
    out << p.value << ',' << fmt_double(p.prob) << '\n';
  return out.str();
}

std::string fit_csv(const PowerLawFit& fit) {
  std::ostringstream out;
  out << "exponent,intercept,r_squared,min,max,n\n";
  out << fmt_double(fit.exponent) << ',' << fmt_double(fit.intercept) << ','
      << fmt_double(fit.r_squared) << ',' << fmt_double(fit.range_min) << ','
      << fmt_double(fit.range_max) << ',' << fit.n_points << '\n';
  return out.str();
}

std::string value_ccdf_csv(const ValueCcdf& curve) {
  std::ostringstream out;
  out << "value,prob\n";
  for (const auto& [v, p] : curve.points)
    out << fmt_double(v) << ',' << fmt_double(p) << '\n';
  return out.str();
}

// ------------------------------------------------------------- overlays

// Physical-space reference values for plot overlays. The exponents are the
// published physical-mobility estimates; the hourly curves are stylized
// from the published qualitative description (weekday peaks near 9h and
// 19h, weekend plateau from 14h to 21h) and are for visual comparison
// only.
void emit_reference_overlays(Manifest& manifest, const std::string& out_dir) {
  std::ostringstream exps;
  exps << "quantity,value,uncertainty,source\n";
  exps << "mu,0.6,0.02,physical_space_literature\n";
  exps << "zeta,1.2,0.1,physical_space_literature\n";
  write_output(manifest, out_dir, "reference_exponents.csv", exps.str());

  static const double weekday[24] = {
      0.6, 0.4, 0.3, 0.25, 0.3, 0.6, 1.4, 2.6, 3.6, 4.0, 3.4, 3.0,
      3.0, 3.2, 3.0, 3.2,  3.6, 4.0, 4.4, 4.6, 4.0, 3.0, 2.0, 1.2};
  static const double weekend[24] = {
      1.2, 0.8, 0.6, 0.4, 0.4, 0.5, 0.8, 1.4, 2.2, 3.0, 3.6, 3.8,
      4.0, 4.2, 4.4, 4.4, 4.4, 4.4, 4.4, 4.4, 4.2, 3.6, 2.8, 2.0};
  double wd = 0, we = 0;
  for (int h = 0; h < 24; ++h) {
    wd += weekday[h];
    we += weekend[h];
  }
  std::ostringstream hourly;
  hourly << "hour,weekday_level,weekend_level,source\n";
  for (int h = 0; h < 24; ++h)
    hourly << h << ',' << fmt_double(weekday[h] / wd) << ','
           << fmt_double(weekend[h] / we) << ",stylized_physical_reference\n";
  write_output(manifest, out_dir, "reference_hourly_physical.csv", hourly.str());
}

// ---------------------------------------------------------- subcommands

struct Ctx {
  std::string out_dir = ".";
  int threads = 1;
};

void run_clean(Manifest& manifest, const Ctx& ctx, const std::string& input,
               const IngestOptions& ingest, const CleanParams& params) {
  CleaningReport report;
  EventLog log = load_events(manifest, input, ingest, ctx.threads, &report.parse);
  report.total_events = log.events.size();

  {
    StepTimer timer(manifest, "filter_deleted");
    report.removed_deleted = filter_deleted(log, params.deleted_token);
    timer.done(report.removed_deleted);
  }
  {
    StepTimer timer(manifest, "flag_high_frequency");
    const auto flagged =
        high_frequency_candidates(log, params.hf_threshold, ctx.threads);
    for (const auto& [id, count] : flagged)
      report.flagged_candidates.emplace_back(log.users.name(id), count);
    timer.done(flagged.size());
  }
  {
    StepTimer timer(manifest, "filter_nonhuman");
    TermFilter filter;
    filter.id_terms = params.id_terms;
    filter.case_insensitive = params.case_insensitive;
    const NonhumanRemoval removed = filter_nonhuman(log, filter);
    report.removed_nonhuman = removed.removed_events;
    report.removed_accounts = removed.removed_accounts;
    timer.done(removed.removed_events);
  }
  if (params.slice_start != 0 || params.slice_end != 0) {
    StepTimer timer(manifest, "slice_by_time");
    slice_by_time(log, params.slice_start,
                  params.slice_end == 0 ? std::numeric_limits<std::int64_t>::max()
                                        : params.slice_end);
    timer.done(log.events.size());
  }

  StepTimer timer(manifest, "write_events");
  std::ostringstream out;
  write_events_ndjson(out, log,
                      {ingest.user_field, ingest.community_field, ingest.ts_field});
  write_output(manifest, ctx.out_dir, "events_clean.ndjson", out.str());
  write_output(manifest, ctx.out_dir, "cleaning_report.json",
               cleaning_report_json(report));
  timer.done(log.events.size());
}

void run_trajectories(Manifest& manifest, const Ctx& ctx, const std::string& input,
                      const IngestOptions& ingest) {
  EventLog log = load_events(manifest, input, ingest, ctx.threads);
  StepTimer timer(manifest, "build_trajectories");
  const TrajectorySet set = build_trajectories(std::move(log), ctx.threads);
  std::ostringstream out;
  write_trajectories_ndjson(out, set);
  write_output(manifest, ctx.out_dir, "trajectories.ndjson", out.str());
  timer.done(set.trajectories.size());
}

struct FitRangeOpt {
  double fit_min = 0;
  double fit_max = 1e300;
  void attach(CLI::App* cmd) {
    cmd->add_option("--fit-min", fit_min, "lower bound of the fit range");
    cmd->add_option("--fit-max", fit_max, "upper bound of the fit range");
  }
  FitRange range() const { return {fit_min, fit_max}; }
};

void run_dist(Manifest& manifest, const Ctx& ctx, const TrajectorySet& set,
              const FitRangeOpt& fit_opt) {
  StepTimer timer(manifest, "distributions");
  const CountHistogram by_comm = community_visit_counts(set, ctx.threads);
  const CountHistogram by_user = user_visit_counts(set, ctx.threads);
  const CcdfCurve comm_curve = ccdf(by_comm);
  const CcdfCurve user_curve = ccdf(by_user);
  write_output(manifest, ctx.out_dir, "ccdf_communities.csv", curve_csv(comm_curve));
  write_output(manifest, ctx.out_dir, "ccdf_users.csv", curve_csv(user_curve));
  write_output(manifest, ctx.out_dir, "fit_communities.csv",
               fit_csv(fit_loglog(ccdf_points(comm_curve), fit_opt.range())));
  write_output(manifest, ctx.out_dir, "fit_users.csv",
               fit_csv(fit_loglog(ccdf_points(user_curve), fit_opt.range())));
  timer.done(by_comm.entries.size() + by_user.entries.size());
}

void run_explore(Manifest& manifest, const Ctx& ctx, const TrajectorySet& set,
                 std::uint32_t horizon, const FitRangeOpt& fit_opt, bool overlays) {
  StepTimer timer(manifest, "exploration_curve");
  const ExplorationCurve curve = exploration_curve(set, horizon, ctx.threads);
  std::ostringstream out;
  out << "t,S\n";
  for (std::size_t i = 0; i < curve.s_of_t.size(); ++i)
    out << (i + 1) << ',' << fmt_double(curve.s_of_t[i]) << '\n';
  write_output(manifest, ctx.out_dir, "exploration.csv", out.str());
  write_output(manifest, ctx.out_dir, "fit_mu.csv",
               fit_csv(fit_mu(curve, fit_opt.range())));
  timer.done(curve.n_users);
  if (overlays) emit_reference_overlays(manifest, ctx.out_dir);
}

void run_zipf(Manifest& manifest, const Ctx& ctx, const TrajectorySet& set,
              const std::vector<std::uint32_t>& s_values, const FitRangeOpt& fit_opt,
              bool overlays) {
  for (std::uint32_t s : s_values) {
    StepTimer timer(manifest, "zipf_curve_s" + std::to_string(s));
    const RankFrequencyCurve curve = zipf_curve(set, s, ctx.threads);
    std::ostringstream out;
    out << "k,f\n";
    for (std::size_t k = 0; k < curve.f.size(); ++k)
      out << (k + 1) << ',' << fmt_double(curve.f[k]) << '\n';
    write_output(manifest, ctx.out_dir, "zipf_s" + std::to_string(s) + ".csv",
                 out.str());
    write_output(manifest, ctx.out_dir, "fit_zeta_s" + std::to_string(s) + ".csv",
                 fit_csv(fit_zeta(curve, fit_opt.range())));
    timer.done(curve.n_users);
  }
  if (overlays) emit_reference_overlays(manifest, ctx.out_dir);
}

struct HourlyOpts {
  std::string events_path;
  std::string tz_map_path;
  std::vector<std::string> communities;
};

void run_temporal(Manifest& manifest, const Ctx& ctx, const TrajectorySet* set,
                  std::uint32_t max_hours, const HourlyOpts& hourly,
                  const IngestOptions& ingest, bool overlays) {
  if (set != nullptr) {
    StepTimer timer(manifest, "return_probability");
    const ReturnHistogram hist = return_probability(*set, max_hours, ctx.threads);
    std::ostringstream out;
    out << "t_hours,prob\n";
    for (std::size_t b = 1; b <= hist.bin_counts.size(); ++b)
      out << b << ',' << fmt_double(hist.mass(b)) << '\n';
    write_output(manifest, ctx.out_dir, "return_probability.csv", out.str());
    timer.done(hist.n_gaps);
  }
  if (!hourly.events_path.empty()) {
    EventLog log = load_events(manifest, hourly.events_path, ingest, ctx.threads);
    manifest.add_input(hourly.tz_map_path);
    StepTimer timer(manifest, "hourly_profile");
    const TimezoneMap tz = TimezoneMap::load_file(hourly.tz_map_path);
    const HourlyProfile profile = hourly_profile(log, tz, hourly.communities);
    std::ostringstream out;
    out << "hour,weekday_share,weekend_share\n";
    for (int h = 0; h < 24; ++h)
      out << h << ',' << fmt_double(profile.weekday[h]) << ','
          << fmt_double(profile.weekend[h]) << '\n';
    write_output(manifest, ctx.out_dir, "hourly_profile.csv", out.str());
    timer.done(log.events.size());
  }
  if (overlays) emit_reference_overlays(manifest, ctx.out_dir);
}

void run_randomness(Manifest& manifest, const Ctx& ctx, TrajectorySet set,
                    std::uint32_t min_distinct, std::uint64_t min_visits) {
  StepTimer timer(manifest, "randomness");
  active_filter(set, min_distinct, min_visits);
  const std::vector<UserRandomness> users = user_randomness(set, ctx.threads);
  const RandomnessDistribution dist = randomness_distribution(users);

  std::ostringstream out;
  out << "user,entropy,max_frq\n";
  for (const UserRandomness& u : users)
    out << set.users.name(u.user) << ',' << fmt_double(u.entropy) << ','
        << fmt_double(u.max_frq) << '\n';
  write_output(manifest, ctx.out_dir, "randomness.csv", out.str());
  write_output(manifest, ctx.out_dir, "entropy_ccdf.csv",
               value_ccdf_csv(dist.entropy_ccdf));
  write_output(manifest, ctx.out_dir, "max_frq_ccdf.csv",
               value_ccdf_csv(dist.max_frq_ccdf));

  json summary;
  summary["n_users"] = dist.n_users;
  summary["min_distinct_exclusive"] = min_distinct;
  summary["min_visits_exclusive"] = min_visits;
  summary["frac_entropy_gt_4"] = dist.frac_entropy_gt_4;
  summary["frac_entropy_lt_1"] = dist.frac_entropy_lt_1;
  summary["frac_max_frq_gt_0.8"] = dist.frac_max_frq_gt_08;
  summary["frac_max_frq_gt_0.9"] = dist.frac_max_frq_gt_09;
  summary["frac_max_frq_lt_0.3"] = dist.frac_max_frq_lt_03;
  write_output(manifest, ctx.out_dir, "randomness_summary.json",
               summary.dump(2) + "\n");
  timer.done(users.size());
}

struct PatternsParams {
  std::int64_t cutoff = 0;  // 0 = no departed-user selection
  std::uint32_t min_distinct = 2;
  std::uint64_t min_visits = 1000;
  int stages = 20;
  int k = 3;
  int max_iter = 500;
  double tol = 1e-5;
  std::uint64_t seed = 1;
  std::string scaling = "raw";
};

// Returns the per-user labels (empty when k != 3, where automatic
// labeling is undefined).
std::vector<std::pair<std::string, PatternLabel>> run_patterns(
    Manifest& manifest, const Ctx& ctx, TrajectorySet set,
    const PatternsParams& params) {
  StepTimer select_timer(manifest, "select_users");
  if (params.cutoff != 0)
    select_departed_users(set, params.cutoff, params.min_distinct,
                          params.min_visits);
  else
    active_filter(set, params.min_distinct, params.min_visits);
  select_timer.done(set.trajectories.size());

  StepTimer metrics_timer(manifest, "stage_metrics");
  const auto metrics = stage_metrics_all(set, params.stages, ctx.threads);
  const ScalingMode mode =
      params.scaling == "max" ? ScalingMode::PerFeatureMax : ScalingMode::Raw;
  const Matrix x = build_matrix(metrics, mode, &set.users);
  metrics_timer.done(metrics.size());

  StepTimer nmf_timer(manifest, "nmf");
  NmfOptions opts;
  opts.k = params.k;
  opts.max_iter = params.max_iter;
  opts.tol = params.tol;
  opts.seed = params.seed;
  opts.threads = ctx.threads;
  const NmfModel model = nmf_factorize(x, opts);
  nmf_timer.done(static_cast<std::uint64_t>(model.iterations));

  {
    std::ostringstream out;
    out << "user";
    for (int c = 1; c <= params.k; ++c) out << ",w" << c;
    out << '\n';
    for (std::size_t r = 0; r < model.w.rows(); ++r) {
      out << set.users.name(metrics[r].user);
      for (std::size_t c = 0; c < model.w.cols(); ++c)
        out << ',' << fmt_double(model.w(r, c));
      out << '\n';
    }
    write_output(manifest, ctx.out_dir, "W.csv", out.str());
  }
  {
    std::ostringstream out;
    out << "component";
    for (const std::string& name : mobility_column_names(params.stages))
      out << ',' << name;
    out << '\n';
    for (std::size_t c = 0; c < model.h.rows(); ++c) {
      out << c;
      for (std::size_t j = 0; j < model.h.cols(); ++j)
        out << ',' << fmt_double(model.h(c, j));
      out << '\n';
    }
    write_output(manifest, ctx.out_dir, "H.csv", out.str());
  }
  {
    std::ostringstream out;
    out << "iteration,frobenius_error\n";
    for (std::size_t i = 0; i < model.error_history.size(); ++i)
      out << i << ',' << fmt_double(model.error_history[i]) << '\n';
    write_output(manifest, ctx.out_dir, "nmf_error_history.csv", out.str());
  }

  std::vector<std::pair<std::string, PatternLabel>> labeled;
  if (params.k == 3) {
    StepTimer label_timer(manifest, "label_patterns");
    const auto component_labels = label_components(model.h, params.stages);
    const auto assigned = assign_patterns(model.w, component_labels);
    std::ostringstream out;
    out << "user,pattern\n";
    for (std::size_t r = 0; r < assigned.size(); ++r) {
      const std::string& name = set.users.name(metrics[r].user);
      out << name << ',' << to_string(assigned[r]) << '\n';
      labeled.emplace_back(name, assigned[r]);
    }
    write_output(manifest, ctx.out_dir, "labels.csv", out.str());
    label_timer.done(assigned.size());
  }
  return labeled;
}

struct ClassifyParams {
  std::uint32_t min_users = 50;
  double train_fraction = 0.8;
  double l2 = 1.0;
  int max_iter = 500;
  std::uint64_t seed = 1;
  bool stratify = false;
  std::size_t top_n = 5;
};

void run_classify(Manifest& manifest, const Ctx& ctx, const TrajectorySet& set,
                  const std::vector<std::pair<std::string, PatternLabel>>& labels,
                  const ClassifyParams& params) {
  StepTimer feature_timer(manifest, "features");
  const FeatureSpace space = build_feature_space(set, params.min_users);
  const WeightedFeatures feats = tfidf_weight(set, space);

  std::unordered_map<std::string, PatternLabel> by_name;
  for (const auto& [name, label] : labels) by_name.emplace(name, label);
  std::vector<PatternLabel> y;
  std::vector<std::size_t> usable;
  y.reserve(feats.rows.size());
  for (std::size_t r = 0; r < feats.rows.size(); ++r) {
    auto it = by_name.find(set.users.name(feats.users[r]));
    if (it == by_name.end()) {
      y.push_back(PatternLabel::Concentrated);  // placeholder, row unused
    } else {
      y.push_back(it->second);
      usable.push_back(r);
    }
  }
  feature_timer.done(feats.rows.size());
  if (usable.size() < 10)
    throw std::runtime_error("classify: too few labeled users with features");

  // Split over the labeled rows only.
  StepTimer train_timer(manifest, "train");
  std::vector<PatternLabel> usable_labels;
  for (std::size_t r : usable) usable_labels.push_back(y[r]);
  const SplitIndices relative =
      split_train_test(usable.size(), params.train_fraction, params.seed,
                       params.stratify ? &usable_labels : nullptr);
  std::vector<std::size_t> train_rows, test_rows;
  for (std::size_t i : relative.train) train_rows.push_back(usable[i]);
  for (std::size_t i : relative.test) test_rows.push_back(usable[i]);

  LogisticOptions lopt;
  lopt.l2_strength = params.l2;
  lopt.max_iter = params.max_iter;
  lopt.seed = params.seed;
  const ClassifierModel model = train_classifier(feats, y, train_rows, lopt);
  train_timer.done(train_rows.size());

  StepTimer eval_timer(manifest, "evaluate");
  const EvalReport report = evaluate(model, feats, y, test_rows);
  eval_timer.done(test_rows.size());

  static const char* kLabels[3] = {"exploratory_i", "exploratory_ii",
                                   "concentrated"};
  json j;
  j["n_train"] = train_rows.size();
  j["n_test"] = report.n_test;
  j["n_features"] = feats.n_features;
  j["dropped_zero_feature_users"] = feats.dropped.size();
  j["tfidf"] = "count * ln(N/df), no smoothing";
  j["l2_strength"] = params.l2;
  j["seed"] = params.seed;
  j["iterations"] = model.iterations;
  j["converged"] = model.converged;
  json per_class = json::object();
  for (int c = 0; c < 3; ++c)
    per_class[kLabels[c]] = {{"precision", report.precision[c]},
                             {"recall", report.recall[c]},
                             {"f1", report.f1[c]}};
  j["per_class"] = per_class;
  j["macro"] = {{"precision", report.macro_precision},
                {"recall", report.macro_recall},
                {"f1", report.macro_f1}};
  j["weighted"] = {{"precision", report.weighted_precision},
                   {"recall", report.weighted_recall},
                   {"f1", report.weighted_f1}};
  json confusion = json::array();
  for (int t = 0; t < 3; ++t) {
    json row = json::array();
    for (int p = 0; p < 3; ++p) row.push_back(report.confusion[t][p]);
    confusion.push_back(row);
  }
  j["confusion"] = confusion;
  j["label_order"] = {kLabels[0], kLabels[1], kLabels[2]};
  j["warnings"] = report.warnings;
  write_output(manifest, ctx.out_dir, "report.json", j.dump(2) + "\n");

  std::unordered_map<std::string, std::uint64_t> sizes;
  for (std::size_t f = 0; f < space.communities.size(); ++f)
    sizes.emplace(space.communities[f], space.user_counts[f]);
  std::ostringstream coef;
  coef << "class,community,coefficient,community_user_count\n";
  for (int c = 0; c < 3; ++c) {
    const RankedCoefficients ranked =
        top_coefficients(model, space, static_cast<PatternLabel>(c), params.top_n);
    for (const auto& [community, value] : ranked.top_positive)
      coef << kLabels[c] << ',' << community << ',' << fmt_double(value) << ','
           << sizes.at(community) << '\n';
    for (const auto& [community, value] : ranked.top_negative)
      coef << kLabels[c] << ',' << community << ',' << fmt_double(value) << ','
           << sizes.at(community) << '\n';
  }
  write_output(manifest, ctx.out_dir, "coefficients.csv", coef.str());
}

struct SimulateParams {
  std::string model;
  std::uint32_t users = 1000;
  std::uint32_t steps = 2000;
  double rho = 0.6;
  double gamma = 1.5;
  std::int64_t spacing = 3600;
  bool poisson = false;
  std::uint32_t s = 50;
  double zeta = 1.12;
  std::uint32_t visits = 10000;
  std::uint32_t period_hours = 24;
  std::int64_t jitter = 0;
  double attend = 0.7;
  std::uint64_t seed = 1;
};

void run_simulate(Manifest& manifest, const Ctx& ctx, const SimulateParams& params) {
  StepTimer timer(manifest, "simulate_" + params.model);
  EventLog log;
  if (params.model == "epr") {
    EprParams p;
    p.rho = params.rho;
    p.gamma = params.gamma;
    p.n_steps = params.steps;
    p.inter_event_seconds = params.spacing;
    p.poisson_arrivals = params.poisson;
    p.seed = params.seed;
    log = simulate_epr(p, params.users, ctx.threads);
  } else if (params.model == "zipf") {
    log = simulate_zipf_users(params.s, params.zeta, params.visits, params.users,
                              params.seed);
  } else if (params.model == "periodic") {
    PeriodicParams p;
    p.n_users = params.users;
    p.period_hours = params.period_hours;
    p.jitter_seconds = params.jitter;
    p.n_visits = params.visits;
    p.attend_prob = params.attend;
    p.seed = params.seed;
    log = simulate_periodic_returners(p);
  } else {
    CohortData data = simulate_pattern_cohorts(
        default_cohort_specs(params.users, params.seed), params.visits);
    std::ostringstream labels;
    labels << "user,pattern\n";
    for (const auto& [user, label] : data.labels)
      labels << user << ',' << to_string(label) << '\n';
    write_output(manifest, ctx.out_dir, "cohort_labels.csv", labels.str());
    log = std::move(data.events);
  }
  std::ostringstream out;
  write_events_ndjson(out, log);
  write_output(manifest, ctx.out_dir, "events.ndjson", out.str());
  timer.done(log.events.size());
}

std::vector<std::pair<std::string, PatternLabel>> read_labels_csv(
    Manifest& manifest, const std::string& path) {
  manifest.add_input(path);
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open labels file: " + path);
  std::vector<std::pair<std::string, PatternLabel>> labels;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line == "user,pattern") continue;
    }
    const std::size_t comma = line.rfind(',');
    if (comma == std::string::npos)
      throw std::runtime_error("labels: malformed line: " + line);
    labels.emplace_back(line.substr(0, comma),
                        pattern_from_string(line.substr(comma + 1)));
  }
  return labels;
}

// ------------------------------------------------------------ config file

// Flat key=value files; keys are long option names without dashes. Values
// given on the command line win.
std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot open config: " + path);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto strip = [](std::string s) {
      const auto a = s.find_first_not_of(" \t");
      if (a == std::string::npos) return std::string();
      const auto b = s.find_last_not_of(" \t");
      return s.substr(a, b - a + 1);
    };
    const std::string stripped = strip(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--config", "expected key=value: " + stripped);
    const std::string key = strip(stripped.substr(0, eq));
    const std::string value = strip(stripped.substr(eq + 1));
    if (value == "true")
      tokens.push_back("--" + key);
    else
      tokens.push_back("--" + key + "=" + value);
  }
  return tokens;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"community-mobility analytics"};
  app.set_version_flag("--version", std::string(COMOB_VERSION));
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.option_defaults()->always_capture_default();

  Ctx ctx;
  std::string config_path;
  IngestOptions ingest;
  CleanParams clean_params;
  FitRangeOpt fit_opt;
  std::string input, labels_path;
  HourlyOpts hourly;
  std::uint32_t horizon = 720, max_hours = 720;
  std::vector<std::uint32_t> s_values{10, 25, 50};
  std::uint32_t min_distinct = 2;
  std::uint64_t min_visits = 1000;
  bool overlays = false;
  PatternsParams pattern_params;
  ClassifyParams classify_params;
  SimulateParams sim_params;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    cmd->add_option("--config", config_path, "flat key=value config file");
    cmd->add_option("--out", ctx.out_dir, "output directory");
    cmd->add_option("--threads", ctx.threads, "worker threads (1 = reference mode)")
        ->check(CLI::Range(1, 256));
    return cmd;
  };

  CLI::App* clean_cmd =
      add_common(app.add_subcommand("clean", "parse and clean raw events"));
  clean_cmd->add_option("--input", input, "raw events, one JSON object per line")
      ->required();
  ingest.attach(clean_cmd);
  clean_params.attach(clean_cmd);

  CLI::App* traj_cmd =
      add_common(app.add_subcommand("trajectories", "build per-user trajectories"));
  traj_cmd->add_option("--input", input, "cleaned events file")->required();
  ingest.attach(traj_cmd);

  CLI::App* dist_cmd =
      add_common(app.add_subcommand("dist", "visit-count CCDFs and tail fits"));
  dist_cmd->add_option("--input", input, "trajectories file")->required();
  fit_opt.attach(dist_cmd);

  CLI::App* explore_cmd =
      add_common(app.add_subcommand("explore", "exploration curve S(t) and mu"));
  explore_cmd->add_option("--input", input, "trajectories file")->required();
  explore_cmd->add_option("--horizon", horizon, "hours per user to track");
  explore_cmd->add_flag("--overlays", overlays, "also write reference overlays");
  fit_opt.attach(explore_cmd);

  CLI::App* zipf_cmd =
      add_common(app.add_subcommand("zipf", "rank-frequency curves and zeta"));
  zipf_cmd->add_option("--input", input, "trajectories file")->required();
  zipf_cmd->add_option("--s-values", s_values, "distinct-community counts to select");
  zipf_cmd->add_flag("--overlays", overlays, "also write reference overlays");
  fit_opt.attach(zipf_cmd);

  CLI::App* temporal_cmd =
      add_common(app.add_subcommand("temporal", "return times and hourly profiles"));
  temporal_cmd->add_option("--input", input, "trajectories file (return times)");
  temporal_cmd->add_option("--max-hours", max_hours, "largest return bin, in hours");
  temporal_cmd->add_option("--events", hourly.events_path,
                           "events file for the hourly profile");
  temporal_cmd->add_option("--tz-map", hourly.tz_map_path, "community<TAB>zone file");
  temporal_cmd->add_option("--communities", hourly.communities,
                           "city communities for the hourly profile");
  temporal_cmd->add_flag("--overlays", overlays, "also write reference overlays");
  ingest.attach(temporal_cmd);

  CLI::App* randomness_cmd =
      add_common(app.add_subcommand("randomness", "entropy and max_frq per user"));
  randomness_cmd->add_option("--input", input, "trajectories file")->required();
  randomness_cmd->add_option("--min-distinct", min_distinct,
                             "keep users with more distinct communities than this");
  randomness_cmd->add_option("--min-visits", min_visits,
                             "keep users with more visits than this");

  CLI::App* patterns_cmd =
      add_common(app.add_subcommand("patterns", "stage vectors, NMF, pattern labels"));
  patterns_cmd->add_option("--input", input, "trajectories file")->required();
  patterns_cmd->add_option("--cutoff", pattern_params.cutoff,
                           "keep users whose last visit predates this timestamp");
  patterns_cmd->add_option("--min-distinct", pattern_params.min_distinct,
                           "activity threshold on distinct communities");
  patterns_cmd->add_option("--min-visits", pattern_params.min_visits,
                           "activity threshold on total visits");
  patterns_cmd->add_option("--stages", pattern_params.stages, "lifespan stages");
  patterns_cmd->add_option("--k", pattern_params.k, "NMF components");
  patterns_cmd->add_option("--max-iter", pattern_params.max_iter, "NMF iterations");
  patterns_cmd->add_option("--tol", pattern_params.tol,
                           "NMF relative-improvement stop");
  patterns_cmd->add_option("--seed", pattern_params.seed, "NMF init seed");
  patterns_cmd->add_option("--scaling", pattern_params.scaling, "raw or max")
      ->check(CLI::IsMember({"raw", "max"}));

  CLI::App* classify_cmd =
      add_common(app.add_subcommand("classify", "pattern preference classifier"));
  classify_cmd->add_option("--input", input, "trajectories file")->required();
  classify_cmd->add_option("--labels", labels_path, "labels.csv (user,pattern)")
      ->required();
  classify_cmd->add_option("--min-users", classify_params.min_users,
                           "drop communities with fewer distinct visitors");
  classify_cmd->add_option("--train-frac", classify_params.train_fraction,
                           "training fraction of labeled users");
  classify_cmd->add_option("--l2", classify_params.l2, "L2 penalty strength");
  classify_cmd->add_option("--max-iter", classify_params.max_iter,
                           "gradient iterations");
  classify_cmd->add_option("--seed", classify_params.seed, "split seed");
  classify_cmd->add_flag("--stratify", classify_params.stratify,
                         "stratify the split by class");
  classify_cmd->add_option("--top-n", classify_params.top_n,
                           "coefficients to report per class and sign");

  CLI::App* simulate_cmd =
      add_common(app.add_subcommand("simulate", "seeded synthetic event logs"));
  simulate_cmd->add_option("--model", sim_params.model,
                           "epr, zipf, periodic, cohorts")
      ->required()
      ->check(CLI::IsMember({"epr", "zipf", "periodic", "cohorts"}));
  simulate_cmd->add_option("--users", sim_params.users,
                           "users (per cohort for the cohorts model)");
  simulate_cmd->add_option("--steps", sim_params.steps, "epr: steps per user");
  simulate_cmd->add_option("--rho", sim_params.rho, "epr: exploration scale");
  simulate_cmd->add_option("--gamma", sim_params.gamma, "epr: exploration decay");
  simulate_cmd->add_option("--spacing", sim_params.spacing,
                           "epr: seconds between visits");
  simulate_cmd->add_flag("--poisson", sim_params.poisson,
                         "epr: exponential inter-event gaps");
  simulate_cmd->add_option("--s", sim_params.s, "zipf: communities per user");
  simulate_cmd->add_option("--zeta", sim_params.zeta, "zipf: rank exponent");
  simulate_cmd->add_option("--visits", sim_params.visits,
                           "visits per user (zipf, periodic, cohorts)");
  simulate_cmd->add_option("--period-hours", sim_params.period_hours,
                           "periodic: return period");
  simulate_cmd->add_option("--jitter", sim_params.jitter,
                           "periodic: max seconds a visit comes early");
  simulate_cmd->add_option("--attend", sim_params.attend,
                           "periodic: probability of keeping a slot");
  simulate_cmd->add_option("--seed", sim_params.seed, "generator seed");

  CLI::App* all_cmd =
      add_common(app.add_subcommand("all", "full pipeline over raw events"));
  all_cmd->add_option("--input", input, "raw events file")->required();
  ingest.attach(all_cmd);
  clean_params.attach(all_cmd);
  fit_opt.attach(all_cmd);
  all_cmd->add_option("--horizon", horizon, "exploration horizon in hours");
  all_cmd->add_option("--s-values", s_values, "zipf selections");
  all_cmd->add_option("--max-hours", max_hours, "largest return bin");
  all_cmd->add_option("--tz-map", hourly.tz_map_path, "community<TAB>zone file");
  all_cmd->add_option("--communities", hourly.communities,
                      "city communities for the hourly profile");
  all_cmd->add_option("--cutoff", pattern_params.cutoff,
                      "departed-user cutoff timestamp");
  all_cmd->add_option("--min-distinct", min_distinct,
                      "activity threshold on distinct communities");
  all_cmd->add_option("--min-visits", min_visits,
                      "activity threshold on total visits");
  all_cmd->add_option("--stages", pattern_params.stages, "lifespan stages");
  all_cmd->add_option("--k", pattern_params.k, "NMF components");
  all_cmd->add_option("--seed", pattern_params.seed, "NMF and split seed");
  all_cmd->add_option("--min-users", classify_params.min_users,
                      "classifier community threshold");
  all_cmd->add_option("--train-frac", classify_params.train_fraction,
                      "classifier training fraction");

  // Phase 1: find --config and splice its tokens in right after the
  // subcommand name, so explicit command-line flags override the file.
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    for (std::size_t i = 0; i < args.size(); ++i) {
      std::string path;
      if (args[i] == "--config" && i + 1 < args.size())
        path = args[i + 1];
      else if (args[i].rfind("--config=", 0) == 0)
        path = args[i].substr(9);
      if (!path.empty()) {
        const auto tokens = config_tokens(path);
        args.insert(args.begin() + 1, tokens.begin(), tokens.end());
        break;
      }
    }
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  std::vector<const char*> cargs{argv[0]};
  for (const std::string& a : args) cargs.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargs.size()),
              const_cast<char**>(cargs.data()));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CLI::App* active = app.get_subcommands().front();
  Manifest manifest;
  manifest.subcommand = active->get_name();
  for (const CLI::Option* opt : active->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (name == "help") continue;
    if (opt->count() > 0)
      manifest.config[name] = opt->results().back();
    else if (!opt->get_default_str().empty())
      manifest.config[name] = opt->get_default_str();
  }

  try {
    fs::create_directories(ctx.out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: cannot create output directory: " << e.what() << "\n";
    return 2;
  }

  try {
    const std::string name = active->get_name();
    if (name == "clean") {
      run_clean(manifest, ctx, input, ingest, clean_params);
    } else if (name == "trajectories") {
      run_trajectories(manifest, ctx, input, ingest);
    } else if (name == "dist") {
      run_dist(manifest, ctx, load_trajectories(manifest, input), fit_opt);
    } else if (name == "explore") {
      run_explore(manifest, ctx, load_trajectories(manifest, input), horizon,
                  fit_opt, overlays);
    } else if (name == "zipf") {
      run_zipf(manifest, ctx, load_trajectories(manifest, input), s_values, fit_opt,
               overlays);
    } else if (name == "temporal") {
      if (input.empty() && hourly.events_path.empty())
        throw CLI::ValidationError("temporal",
                                   "need --input and/or --events to do anything");
      if (!hourly.events_path.empty() &&
          (hourly.tz_map_path.empty() || hourly.communities.empty()))
        throw CLI::ValidationError("temporal",
                                   "--events needs --tz-map and --communities");
      std::optional<TrajectorySet> set;
      if (!input.empty()) set = load_trajectories(manifest, input);
      run_temporal(manifest, ctx, set ? &*set : nullptr, max_hours, hourly, ingest,
                   overlays);
    } else if (name == "randomness") {
      run_randomness(manifest, ctx, load_trajectories(manifest, input), min_distinct,
                     min_visits);
    } else if (name == "patterns") {
      run_patterns(manifest, ctx, load_trajectories(manifest, input), pattern_params);
    } else if (name == "classify") {
      const TrajectorySet set = load_trajectories(manifest, input);
      const auto labels = read_labels_csv(manifest, labels_path);
      run_classify(manifest, ctx, set, labels, classify_params);
    } else if (name == "simulate") {
      run_simulate(manifest, ctx, sim_params);
    } else if (name == "all") {
      CleaningReport report;
      EventLog log = load_events(manifest, input, ingest, ctx.threads, &report.parse);
      report.total_events = log.events.size();
      report.removed_deleted = filter_deleted(log, clean_params.deleted_token);
      const auto flagged =
          high_frequency_candidates(log, clean_params.hf_threshold, ctx.threads);
      for (const auto& [id, count] : flagged)
        report.flagged_candidates.emplace_back(log.users.name(id), count);
      TermFilter filter;
      filter.id_terms = clean_params.id_terms;
      filter.case_insensitive = clean_params.case_insensitive;
      const NonhumanRemoval removed = filter_nonhuman(log, filter);
      report.removed_nonhuman = removed.removed_events;
      report.removed_accounts = removed.removed_accounts;
      write_output(manifest, ctx.out_dir, "cleaning_report.json",
                   cleaning_report_json(report));
      if (log.events.empty())
        throw std::runtime_error("all: no events after cleaning");

      StepTimer traj_timer(manifest, "build_trajectories");
      const TrajectorySet set = build_trajectories(std::move(log), ctx.threads);
      {
        std::ostringstream out;
        write_trajectories_ndjson(out, set);
        write_output(manifest, ctx.out_dir, "trajectories.ndjson", out.str());
      }
      traj_timer.done(set.trajectories.size());

      run_dist(manifest, ctx, set, fit_opt);
      run_explore(manifest, ctx, set, horizon, fit_opt, false);
      run_zipf(manifest, ctx, set, s_values, fit_opt, false);
      HourlyOpts all_hourly;
      if (!hourly.tz_map_path.empty() && !hourly.communities.empty()) {
        all_hourly = hourly;
        all_hourly.events_path = input;  // the hourly profile reads raw events
      }
      run_temporal(manifest, ctx, &set, max_hours, all_hourly, ingest, false);
      {
        TrajectorySet copy = set;
        run_randomness(manifest, ctx, std::move(copy), min_distinct, min_visits);
      }
      pattern_params.min_distinct = min_distinct;
      pattern_params.min_visits = min_visits;
      classify_params.seed = pattern_params.seed;
      const auto labels = run_patterns(manifest, ctx, set, pattern_params);
      if (!labels.empty()) run_classify(manifest, ctx, set, labels, classify_params);
      emit_reference_overlays(manifest, ctx.out_dir);
    }
    manifest.write(ctx.out_dir);
  } catch (const CLI::Error& e) {
    manifest.write(ctx.out_dir, e.what());
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    manifest.write(ctx.out_dir, e.what());
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
