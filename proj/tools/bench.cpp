// Compares the serial reference path against the OpenMP kernels on a
// synthetic workload and reports timings. Exits nonzero if the two paths
// disagree anywhere.

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <string>
#include <vector>

#include "fareval/alignment.hpp"
#include "fareval/dataset_io.hpp"
#include "fareval/eval_task1.hpp"
#include "fareval/eval_task2.hpp"
#include "fareval/parallel.hpp"
#include "fareval/reporting.hpp"
#include "fareval/targets.hpp"

namespace {

using namespace fareval;

struct Rng {
  std::uint64_t state;
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  std::uint64_t below(std::uint64_t n) { return next() % n; }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

MetadataTable make_metadata(std::size_t pages, Rng& rng) {
  MetadataTable meta;
  for (std::size_t i = 1; i <= pages; ++i) {
    PageMetadataRecord rec;
    rec.page_id = static_cast<PageId>(i);
    if (rng.uniform() > 0.35) {
      rec.geo_mask = static_cast<std::uint8_t>(1u << rng.below(kKnownGeo));
      if (rng.uniform() < 0.15) rec.geo_mask |= static_cast<std::uint8_t>(1u << rng.below(kKnownGeo));
    }
    double g = rng.uniform();
    if (g < 0.30) rec.gender_raw = {"male"};
    else if (g < 0.48) rec.gender_raw = {"female"};
    else if (g < 0.50) rec.gender_raw = {"genderqueer"};
    if (rng.uniform() > 0.1) {
      rec.quality_level = static_cast<int>(rng.below(kWorkLevels));
    }
    meta.add(std::move(rec));
  }
  return meta;
}

Qrels make_qrels(int topics, std::size_t pages, std::size_t rel_per_topic, Rng& rng) {
  Qrels qrels;
  for (int t = 1; t <= topics; ++t) {
    std::unordered_set<PageId> rel;
    while (rel.size() < rel_per_topic) {
      rel.insert(static_cast<PageId>(1 + rng.below(pages)));
    }
    qrels.set(t, std::move(rel));
  }
  return qrels;
}

std::vector<PageId> random_ranking(std::size_t pages, std::size_t length, Rng& rng) {
  std::unordered_set<PageId> used;
  std::vector<PageId> ranking;
  ranking.reserve(length);
  while (ranking.size() < length) {
    PageId p = static_cast<PageId>(1 + rng.below(pages));
    if (used.insert(p).second) ranking.push_back(p);
  }
  return ranking;
}

Task1Run make_task1_run(int topics, std::size_t pages, std::size_t length, Rng& rng) {
  Task1Run run;
  run.run_name = "bench-t1";
  for (int t = 1; t <= topics; ++t) {
    run.topic_order.push_back(t);
    run.rankings[t] = random_ranking(pages, length, rng);
  }
  return run;
}

Task2Run make_task2_run(int topics, std::size_t pages, int reps, std::size_t length, Rng& rng) {
  Task2Run run;
  run.run_name = "bench-t2";
  for (int t = 1; t <= topics; ++t) {
    run.topic_order.push_back(t);
    auto& seq = run.rankings[t];
    for (int r = 1; r <= reps; ++r) {
      seq.emplace_back(r, random_ranking(pages, length, rng));
    }
  }
  return run;
}

template <typename F>
double time_ms(F&& f) {
  auto start = std::chrono::steady_clock::now();
  f();
  auto end = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(end - start).count();
}

bool report(const char* name, double serial_ms, double parallel_ms, bool same) {
  std::printf("%-18s serial %9.2f ms   parallel %9.2f ms   speedup %5.2fx   %s\n", name,
              serial_ms, parallel_ms, serial_ms / parallel_ms, same ? "match" : "MISMATCH");
  return same;
}

}  // namespace

int main(int argc, char** argv) {
  int threads = 0;
  std::size_t pages = 20000;
  int topics = 120;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    auto value = [&](const char* flag) -> long {
      return (arg == flag && i + 1 < argc) ? std::atol(argv[++i]) : -1;
    };
    if (long v = value("--threads"); v >= 0) threads = static_cast<int>(v);
    else if (long v = value("--pages"); v > 0) pages = static_cast<std::size_t>(v);
    else if (long v = value("--topics"); v > 0) topics = static_cast<int>(v);
    else {
      std::fprintf(stderr, "usage: %s [--threads N] [--pages N] [--topics N]\n", argv[0]);
      return 2;
    }
  }
  set_thread_count(threads);
  std::printf("workload: %zu pages, %d topics, %d max threads\n\n", pages, topics,
              max_threads());

  Rng rng{7};
  const MetadataTable meta = make_metadata(pages, rng);
  const AlignmentStore store = AlignmentStore::build(meta);
  const Qrels qrels = make_qrels(topics, pages, 400, rng);
  const Task1Run run1 = make_task1_run(topics, pages, 1000, rng);
  const Task2Run run2 = make_task2_run(topics, pages, 100, 50, rng);

  bool ok = true;

  TargetSet t1_serial, t1_parallel;
  double s = time_ms([&] { t1_serial = build_task1_targets(qrels, store, Exec::Serial); });
  double p = time_ms([&] { t1_parallel = build_task1_targets(qrels, store, Exec::Parallel); });
  ok &= report("task1 targets", s, p, t1_serial.by_topic == t1_parallel.by_topic);

  TargetSet t2_serial, t2_parallel;
  s = time_ms([&] { t2_serial = build_task2_targets(qrels, store, meta, Exec::Serial); });
  p = time_ms([&] { t2_parallel = build_task2_targets(qrels, store, meta, Exec::Parallel); });
  ok &= report("task2 targets", s, p, t2_serial.by_topic == t2_parallel.by_topic);

  Task1Result r1_serial, r1_parallel;
  s = time_ms([&] { r1_serial = score_task1(run1, qrels, store, t1_serial, Exec::Serial); });
  p = time_ms([&] { r1_parallel = score_task1(run1, qrels, store, t1_serial, Exec::Parallel); });
  bool same1 = r1_serial.topics.size() == r1_parallel.topics.size();
  for (std::size_t i = 0; same1 && i < r1_serial.topics.size(); ++i) {
    same1 = r1_serial.topics[i].topic_id == r1_parallel.topics[i].topic_id &&
            r1_serial.topics[i].ndcg == r1_parallel.topics[i].ndcg &&
            r1_serial.topics[i].awrf == r1_parallel.topics[i].awrf &&
            r1_serial.topics[i].score == r1_parallel.topics[i].score;
  }
  ok &= report("score task1", s, p, same1);

  Task2Result r2_serial, r2_parallel;
  s = time_ms([&] { r2_serial = score_task2(run2, qrels, store, t2_serial, Exec::Serial); });
  p = time_ms([&] { r2_parallel = score_task2(run2, qrels, store, t2_serial, Exec::Parallel); });
  bool same2 = r2_serial.topics.size() == r2_parallel.topics.size();
  for (std::size_t i = 0; same2 && i < r2_serial.topics.size(); ++i) {
    same2 = r2_serial.topics[i].topic_id == r2_parallel.topics[i].topic_id &&
            r2_serial.topics[i].ee_r == r2_parallel.topics[i].ee_r &&
            r2_serial.topics[i].ee_d == r2_parallel.topics[i].ee_d &&
            r2_serial.topics[i].ee_l == r2_parallel.topics[i].ee_l;
  }
  ok &= report("score task2", s, p, same2);

  std::vector<double> values;
  values.reserve(r1_serial.topics.size());
  for (const auto& t : r1_serial.topics) values.push_back(t.score);
  BootstrapConfig bc{50000, 0.95, 42};
  std::pair<double, double> ci_serial, ci_parallel;
  s = time_ms([&] { ci_serial = bootstrap_ci(values, bc, Statistic::Mean, Exec::Serial); });
  p = time_ms([&] { ci_parallel = bootstrap_ci(values, bc, Statistic::Mean, Exec::Parallel); });
  ok &= report("bootstrap ci", s, p, ci_serial == ci_parallel);

  if (!ok) {
    std::fprintf(stderr, "\nserial and parallel paths disagree\n");
    return 1;
  }
  return 0;
}
