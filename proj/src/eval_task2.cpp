#include "fareval/eval_task2.hpp"

#include <cmath>
#include <stdexcept>

#include "fareval/parallel.hpp"

namespace fareval {

std::unordered_map<PageId, double> doc_exposure(
    const std::vector<std::vector<PageId>>& sequence) {
  if (sequence.empty()) throw std::invalid_argument("doc_exposure: empty ranking sequence");
  std::unordered_map<PageId, double> exposure;
  for (const auto& ranking : sequence) {
    for (std::size_t i = 0; i < ranking.size(); ++i) {
      exposure[ranking[i]] += discount(static_cast<std::int64_t>(i) + 1);
    }
  }
  const double n = static_cast<double>(sequence.size());
  for (auto& [page, value] : exposure) {
    (void)page;
    value /= n;
  }
  return exposure;
}

std::vector<double> group_exposure(const std::unordered_map<PageId, double>& exposure,
                                   const AlignmentStore& store) {
  std::vector<double> cells(kCells, 0.0);
  for (const auto& [page, eps] : exposure) {
    const AlignmentStore::Entry* e = store.find(page);
    if (e == nullptr) continue;
    const int gender = static_cast<int>(e->gender);
    if (e->geo_mask == 0) {
      cells[static_cast<std::size_t>(gender)] += eps;
      continue;
    }
    for (int b = 0; b < kKnownGeo; ++b) {
      if (e->geo_mask & (1u << b)) {
        cells[static_cast<std::size_t>((b + 1) * kGenderGroups + gender)] += eps;
      }
    }
  }
  double total = 0.0;
  for (double v : cells) total += v;
  if (!(total > 0.0)) {
    throw std::runtime_error("group_exposure: zero exposure over every group");
  }
  for (double& v : cells) v /= total;
  return cells;
}

EEMetrics ee_metrics(std::span<const double> system, std::span<const double> target) {
  if (system.size() != target.size()) {
    throw std::invalid_argument("ee_metrics: dimension mismatch");
  }
  EEMetrics m;
  double target_self = 0.0;
  for (std::size_t i = 0; i < system.size(); ++i) {
    m.ee_d += system[i] * system[i];
    m.ee_r += system[i] * target[i];
    target_self += target[i] * target[i];
  }
  m.ee_l = m.ee_d - 2.0 * m.ee_r + target_self;
  return m;
}

Task2Result score_task2(const Task2Run& run, const Qrels& qrels, const AlignmentStore& store,
                        const TargetSet& targets, Exec exec) {
  std::vector<TopicId> topic_ids;
  for (const auto& [topic, docs] : qrels.topics()) {
    (void)docs;
    if (run.rankings.count(topic)) topic_ids.push_back(topic);
  }

  std::vector<TopicScoreT2> scores(topic_ids.size());
  parallel_for_each(topic_ids.size(), exec, [&](std::size_t i) {
    const TopicId topic = topic_ids[i];
    const auto* target = targets.find(topic);
    if (target == nullptr) {
      throw std::runtime_error("topic " + std::to_string(topic) + " has no target distribution");
    }
    const auto& reps = run.rankings.at(topic);
    std::vector<std::vector<PageId>> sequence;
    sequence.reserve(reps.size());
    for (const auto& [rep, ranking] : reps) {
      (void)rep;
      sequence.push_back(ranking);
    }
    const auto exposure = doc_exposure(sequence);
    const auto system = group_exposure(exposure, store);
    const EEMetrics m = ee_metrics(system, *target);
    scores[i] = TopicScoreT2{topic, m.ee_r, m.ee_d, m.ee_l};
  });

  Task2Result result;
  result.run_name = run.run_name;
  result.topics = std::move(scores);
  return result;
}

Task2Aggregate aggregate_task2(const Task2Result& result, AggregateMode mode) {
  if (result.topics.empty()) {
    throw std::runtime_error("aggregate_task2: no scored topics");
  }
  Task2Aggregate agg;
  agg.run_name = result.run_name;
  for (const auto& t : result.topics) {
    agg.ee_r += t.ee_r;
    agg.ee_d += t.ee_d;
    agg.ee_l += t.ee_l;
  }
  if (mode == AggregateMode::Mean) {
    const double n = static_cast<double>(result.topics.size());
    agg.ee_r /= n;
    agg.ee_d /= n;
    agg.ee_l /= n;
  }
  return agg;
}

}  // namespace fareval
