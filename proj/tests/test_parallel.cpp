// The OpenMP kernels must reproduce the serial reference bit for bit at
// any thread count: integer accumulators merge commutatively and float
// reductions run in a fixed order.
#include <random>
#include <sstream>

#include "comob/distributions.hpp"
#include "comob/ingest.hpp"
#include "comob/io_util.hpp"
#include "comob/nmf.hpp"
#include "comob/patterns.hpp"
#include "comob/randomness.hpp"
#include "comob/randomwalk.hpp"
#include "comob/synth.hpp"
#include "comob/temporal.hpp"
#include "doctest.h"

using namespace comob;

namespace {

TrajectorySet fixture_set() {
  EprParams params;
  params.n_steps = 400;
  params.rho = 0.7;
  params.gamma = 1.0;
  params.seed = 31;
  return build_trajectories(simulate_epr(params, 300));
}

}  // namespace

TEST_CASE("counting kernels agree across thread counts") {
  const TrajectorySet set = fixture_set();
  const CountHistogram ref = community_visit_counts(set, 1);
  for (int threads : {2, 3, 8}) {
    const CountHistogram par = community_visit_counts(set, threads);
    CHECK(ref.total == par.total);
    REQUIRE(ref.entries == par.entries);
  }
}

TEST_CASE("exploration sums agree across thread counts") {
  const TrajectorySet set = fixture_set();
  const auto [ref_sums, ref_users] = serial::exploration_sums(set, 400);
  const ExplorationCurve ref = exploration_curve(set, 400, 1);
  for (int threads : {2, 5}) {
    const ExplorationCurve par = exploration_curve(set, 400, threads);
    CHECK(par.n_users == ref_users);
    REQUIRE(par.s_of_t == ref.s_of_t);  // bitwise: integer sums, one division
  }
  CHECK(ref.n_users == ref_users);
  (void)ref_sums;
}

TEST_CASE("return gap binning agrees across thread counts") {
  const TrajectorySet set = fixture_set();
  const ReturnHistogram ref = return_probability(set, 300, 1);
  for (int threads : {2, 7}) {
    const ReturnHistogram par = return_probability(set, 300, threads);
    CHECK(par.n_gaps == ref.n_gaps);
    CHECK(par.binned == ref.binned);
    REQUIRE(par.bin_counts == ref.bin_counts);
  }
}

TEST_CASE("per-user randomness agrees across thread counts") {
  const TrajectorySet set = fixture_set();
  const auto ref = user_randomness(set, 1);
  const auto par = user_randomness(set, 4);
  REQUIRE(ref.size() == par.size());
  for (std::size_t i = 0; i < ref.size(); ++i) {
    CHECK(ref[i].entropy == par[i].entropy);
    CHECK(ref[i].max_frq == par[i].max_frq);
  }
}

TEST_CASE("zipf rank curves agree across thread counts") {
  const TrajectorySet set =
      build_trajectories(simulate_zipf_users(20, 1.1, 500, 50, 17));
  const RankFrequencyCurve ref = zipf_curve(set, 20, 1);
  const RankFrequencyCurve par = zipf_curve(set, 20, 3);
  REQUIRE(ref.f == par.f);  // fixed-order reduction keeps bits equal
}

TEST_CASE("stage metrics agree across thread counts") {
  const TrajectorySet set = fixture_set();
  const auto ref = stage_metrics_all(set, 20, 1);
  const auto par = stage_metrics_all(set, 20, 2);
  REQUIRE(ref.size() == par.size());
  for (std::size_t i = 0; i < ref.size(); ++i) {
    CHECK(ref[i].entropy == par[i].entropy);
    CHECK(ref[i].max_frq == par[i].max_frq);
    CHECK(ref[i].p_new == par[i].p_new);
  }
}

TEST_CASE("matrix kernels agree with the serial reference") {
  std::mt19937_64 rng(9);
  Matrix a(123, 17), b(17, 31);
  for (double& v : a.data()) v = static_cast<double>(rng() % 1000) / 997.0;
  for (double& v : b.data()) v = static_cast<double>(rng() % 1000) / 997.0;

  Matrix ref, par;
  serial::matmul(a, b, ref);
  matmul(a, b, par, 3);
  REQUIRE(ref.data() == par.data());

  Matrix at_ref, at_par;
  serial::matmul_at_b(a, a, at_ref);
  matmul_at_b(a, a, at_par, 3);
  REQUIRE(at_ref.data() == at_par.data());

  Matrix bt_ref, bt_par;
  Matrix c(29, 17);
  for (double& v : c.data()) v = static_cast<double>(rng() % 500) / 499.0;
  serial::matmul_a_bt(a, c, bt_ref);
  matmul_a_bt(a, c, bt_par, 4);
  REQUIRE(bt_ref.data() == bt_par.data());

  Matrix w(123, 3, 0.5), h(3, 31, 0.25), x(123, 31, 1.0);
  CHECK(serial::frobenius_residual(x, w, h) == frobenius_residual(x, w, h, 4));
}

TEST_CASE("nmf is thread-count independent") {
  std::mt19937_64 rng(27);
  Matrix x(80, 59);
  for (double& v : x.data()) v = static_cast<double>(rng() % 1000) / 999.0;
  NmfOptions opts;
  opts.k = 3;
  opts.max_iter = 40;
  opts.seed = 4;
  opts.threads = 1;
  const NmfModel ref = nmf_factorize(x, opts);
  opts.threads = 3;
  const NmfModel par = nmf_factorize(x, opts);
  REQUIRE(ref.w.data() == par.w.data());
  REQUIRE(ref.h.data() == par.h.data());
  REQUIRE(ref.error_history == par.error_history);
}

TEST_CASE("parallel parse and trajectory build reproduce the serial bytes") {
  EprParams params;
  params.n_steps = 120;
  params.seed = 3;
  const EventLog log = simulate_epr(params, 80);
  std::ostringstream text;
  write_events_ndjson(text, log);
  const std::string ndjson = text.str();

  EventLog serial_log, parallel_log;
  parse_events(ndjson, {}, serial_log, 1);
  parse_events(ndjson, {}, parallel_log, 4);

  std::ostringstream s1, s4;
  write_trajectories_ndjson(s1, build_trajectories(std::move(serial_log), 1));
  write_trajectories_ndjson(s4, build_trajectories(std::move(parallel_log), 4));
  REQUIRE(s1.str() == s4.str());
}
