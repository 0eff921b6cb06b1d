// Times the OpenMP kernels against their serial references on synthetic
// workloads and prints a speedup table. Also cross-checks that both paths
// return identical results while it is at it.
//
//   ./comob_bench [threads] [scale]
//
// threads defaults to the hardware count, scale (1..) multiplies the
// workload sizes.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <sstream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "comob/distributions.hpp"
#include "comob/ingest.hpp"
#include "comob/io_util.hpp"
#include "comob/nmf.hpp"
#include "comob/patterns.hpp"
#include "comob/randomness.hpp"
#include "comob/randomwalk.hpp"
#include "comob/synth.hpp"
#include "comob/temporal.hpp"

using namespace comob;
using Clock = std::chrono::steady_clock;

namespace {

double now_seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Row {
  const char* name;
  double serial_s;
  double parallel_s;
  bool equal;
};

void print_row(const Row& row) {
  std::printf("%-28s %9.3fs %9.3fs %7.2fx   %s\n", row.name, row.serial_s,
              row.parallel_s, row.serial_s / row.parallel_s,
              row.equal ? "match" : "MISMATCH");
}

template <typename F>
double timed(F&& f) {
  const auto start = Clock::now();
  f();
  return now_seconds(start);
}

}  // namespace

int main(int argc, char** argv) {
#ifdef _OPENMP
  int threads = omp_get_max_threads();
#else
  int threads = 1;
#endif
  if (argc > 1) threads = std::atoi(argv[1]);
  int scale = 1;
  if (argc > 2) scale = std::atoi(argv[2]);
  if (threads < 1 || scale < 1) {
    std::fprintf(stderr, "usage: %s [threads>=1] [scale>=1]\n", argv[0]);
    return 2;
  }
  std::printf("threads=%d scale=%d\n\n", threads, scale);
  std::printf("%-28s %10s %10s %8s\n", "kernel", "serial", "parallel", "speedup");

  EprParams params;
  params.n_steps = 1500;
  params.rho = 0.6;
  params.gamma = 1.5;
  params.seed = 1234;
  const std::uint32_t n_users = 4000u * static_cast<std::uint32_t>(scale);

  // generator itself (phase 1 is the parallel part)
  EventLog log;
  {
    Row row{"simulate_epr", 0, 0, true};
    EventLog serial_log, parallel_log;
    row.serial_s = timed([&] { serial_log = simulate_epr(params, n_users, 1); });
    row.parallel_s =
        timed([&] { parallel_log = simulate_epr(params, n_users, threads); });
    row.equal = serial_log.events.size() == parallel_log.events.size();
    for (std::size_t i = 0; row.equal && i < serial_log.events.size(); i += 997)
      row.equal = serial_log.events[i].ts == parallel_log.events[i].ts &&
                  serial_log.communities.name(serial_log.events[i].community) ==
                      parallel_log.communities.name(parallel_log.events[i].community);
    print_row(row);
    log = std::move(parallel_log);
  }

  std::string ndjson;
  {
    std::ostringstream out;
    write_events_ndjson(out, log);
    ndjson = out.str();
  }
  {
    Row row{"parse_events", 0, 0, true};
    EventLog a, b;
    row.serial_s = timed([&] { parse_events(ndjson, {}, a, 1); });
    row.parallel_s = timed([&] { parse_events(ndjson, {}, b, threads); });
    row.equal = a.events.size() == b.events.size();
    print_row(row);
  }

  TrajectorySet set;
  {
    Row row{"build_trajectories", 0, 0, true};
    EventLog copy = log;
    TrajectorySet a, b;
    row.serial_s = timed([&] { a = build_trajectories(std::move(copy), 1); });
    row.parallel_s = timed([&] { b = build_trajectories(std::move(log), threads); });
    row.equal = a.trajectories.size() == b.trajectories.size();
    print_row(row);
    set = std::move(b);
  }

  {
    Row row{"community_visit_counts", 0, 0, true};
    CountHistogram a, b;
    row.serial_s = timed([&] { a = community_visit_counts(set, 1); });
    row.parallel_s = timed([&] { b = community_visit_counts(set, threads); });
    row.equal = a.entries == b.entries;
    print_row(row);
  }
  {
    Row row{"exploration_curve", 0, 0, true};
    ExplorationCurve a, b;
    row.serial_s = timed([&] { a = exploration_curve(set, params.n_steps, 1); });
    row.parallel_s =
        timed([&] { b = exploration_curve(set, params.n_steps, threads); });
    row.equal = a.s_of_t == b.s_of_t;
    print_row(row);
  }
  {
    Row row{"return_probability", 0, 0, true};
    ReturnHistogram a, b;
    row.serial_s = timed([&] { a = return_probability(set, 720, 1); });
    row.parallel_s = timed([&] { b = return_probability(set, 720, threads); });
    row.equal = a.bin_counts == b.bin_counts && a.n_gaps == b.n_gaps;
    print_row(row);
  }
  {
    Row row{"user_randomness", 0, 0, true};
    std::vector<UserRandomness> a, b;
    row.serial_s = timed([&] { a = user_randomness(set, 1); });
    row.parallel_s = timed([&] { b = user_randomness(set, threads); });
    row.equal = a.size() == b.size();
    for (std::size_t i = 0; row.equal && i < a.size(); ++i)
      row.equal = a[i].entropy == b[i].entropy && a[i].max_frq == b[i].max_frq;
    print_row(row);
  }
  {
    Row row{"stage_metrics", 0, 0, true};
    TrajectorySet active = set;
    active_filter(active, 2, 1000);
    std::vector<StageMetrics> a, b;
    row.serial_s = timed([&] { a = stage_metrics_all(active, 20, 1); });
    row.parallel_s = timed([&] { b = stage_metrics_all(active, 20, threads); });
    row.equal = a.size() == b.size();
    for (std::size_t i = 0; row.equal && i < a.size(); ++i)
      row.equal = a[i].entropy == b[i].entropy && a[i].p_new == b[i].p_new;
    print_row(row);
  }
  {
    Row row{"nmf_factorize", 0, 0, true};
    std::mt19937_64 rng(5);
    Matrix x(3000u * static_cast<std::size_t>(scale), 59);
    for (double& v : x.data())
      v = static_cast<double>(rng() % 10000) / 9999.0;
    NmfOptions opts;
    opts.k = 3;
    opts.max_iter = 120;
    opts.tol = 0.0;
    opts.seed = 2;
    NmfModel a, b;
    opts.threads = 1;
    row.serial_s = timed([&] { a = nmf_factorize(x, opts); });
    opts.threads = threads;
    row.parallel_s = timed([&] { b = nmf_factorize(x, opts); });
    row.equal = a.w.data() == b.w.data() && a.h.data() == b.h.data();
    print_row(row);
  }
  return 0;
}
