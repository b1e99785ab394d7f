#include "fareval/eval_task1.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "fareval/parallel.hpp"

namespace fareval {

namespace {

constexpr double kDistributionTol = 1e-9;

// Unnormalized discount-weighted group mass over the 31 known cells,
// accumulated straight from the compact store entries.
std::vector<double> attention_mass(const std::vector<PageId>& ranking,
                                   const AlignmentStore& store) {
  std::vector<double> acc(kTask1Dims, 0.0);
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    const AlignmentStore::Entry* e = store.find(ranking[i]);
    if (e == nullptr) continue;
    const double w = discount(static_cast<std::int64_t>(i) + 1);
    const int gender = static_cast<int>(e->gender);
    if (e->geo_mask == 0) {
      if (gender != 0) acc[static_cast<std::size_t>(gender - 1)] += w;
      continue;
    }
    for (int b = 0; b < kKnownGeo; ++b) {
      if (e->geo_mask & (1u << b)) {
        acc[static_cast<std::size_t>((b + 1) * kGenderGroups + gender - 1)] += w;
      }
    }
  }
  return acc;
}

void check_distribution(std::span<const double> p, const char* name) {
  double sum = 0.0;
  for (double v : p) {
    if (v < 0.0) throw std::invalid_argument(std::string(name) + " has a negative entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kDistributionTol) {
    throw std::invalid_argument(std::string(name) + " does not sum to 1 (sum = " +
                                std::to_string(sum) + ")");
  }
}

}  // namespace

std::vector<double> cumulated_attention(const std::vector<PageId>& ranking,
                                        const AlignmentStore& store) {
  if (ranking.empty()) throw std::invalid_argument("cumulated_attention: empty ranking");
  std::vector<double> acc = attention_mass(ranking, store);
  double mass = 0.0;
  for (double v : acc) mass += v;
  if (!(mass > 0.0)) {
    throw std::runtime_error("no known-group exposure: every ranked page is fully unknown");
  }
  for (double& v : acc) v /= mass;
  return acc;
}

double jensen_shannon(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("jensen_shannon: dimension mismatch");
  }
  check_distribution(p, "p");
  check_distribution(q, "q");
  double div = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0.0) div += 0.5 * p[i] * std::log2(p[i] / m);
    if (q[i] > 0.0) div += 0.5 * q[i] * std::log2(q[i] / m);
  }
  return std::clamp(div, 0.0, 1.0);
}

double awrf(const std::vector<PageId>& ranking, const AlignmentStore& store,
            const std::vector<double>& target31) {
  const auto attention = cumulated_attention(ranking, store);
  return 1.0 - jensen_shannon(attention, target31);
}

double ndcg(const std::vector<PageId>& ranking, const std::unordered_set<PageId>& rel_docs) {
  if (rel_docs.empty()) {
    throw std::runtime_error("ndcg: no relevant documents for this topic");
  }
  if (ranking.empty()) throw std::invalid_argument("ndcg: empty ranking");
  double dcg = 0.0;
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    if (rel_docs.count(ranking[i])) dcg += discount(static_cast<std::int64_t>(i) + 1);
  }
  const std::size_t ideal_len = std::min(rel_docs.size(), ranking.size());
  double ideal = 0.0;
  for (std::size_t i = 0; i < ideal_len; ++i) ideal += discount(static_cast<std::int64_t>(i) + 1);
  return dcg / ideal;
}

Task1Result score_task1(const Task1Run& run, const Qrels& qrels, const AlignmentStore& store,
                        const TargetSet& targets, Exec exec) {
  std::vector<TopicId> topic_ids;
  for (const auto& [topic, docs] : qrels.topics()) {
    (void)docs;
    if (run.rankings.count(topic)) topic_ids.push_back(topic);
  }

  struct Outcome {
    std::optional<TopicScoreT1> score;
    std::optional<std::string> drop_reason;
  };
  std::vector<Outcome> outcomes(topic_ids.size());

  parallel_for_each(topic_ids.size(), exec, [&](std::size_t i) {
    const TopicId topic = topic_ids[i];
    const auto& ranking = run.rankings.at(topic);
    const auto* rel = qrels.find(topic);
    const auto* target = targets.find(topic);
    if (target == nullptr) {
      throw std::runtime_error("topic " + std::to_string(topic) + " has no target distribution");
    }
    if (ranking.empty()) {
      throw std::runtime_error("topic " + std::to_string(topic) + " has an empty ranking");
    }
    const double relevance = ndcg(ranking, *rel);
    std::vector<double> attention;
    try {
      attention = cumulated_attention(ranking, store);
    } catch (const std::runtime_error& e) {
      outcomes[i].drop_reason = e.what();
      return;
    }
    const double fairness = 1.0 - jensen_shannon(attention, *target);
    outcomes[i].score = TopicScoreT1{topic, relevance, fairness, relevance * fairness};
  });

  Task1Result result;
  result.run_name = run.run_name;
  for (std::size_t i = 0; i < topic_ids.size(); ++i) {
    if (outcomes[i].score.has_value()) {
      result.topics.push_back(*outcomes[i].score);
    } else if (outcomes[i].drop_reason.has_value()) {
      result.dropped.push_back({topic_ids[i], *outcomes[i].drop_reason});
    }
  }
  return result;
}

Task1Aggregate aggregate_task1(const Task1Result& result) {
  if (result.topics.empty()) {
    throw std::runtime_error("aggregate_task1: no scored topics");
  }
  Task1Aggregate agg;
  agg.run_name = result.run_name;
  for (const auto& t : result.topics) {
    agg.ndcg += t.ndcg;
    agg.awrf += t.awrf;
    agg.score += t.score;
  }
  const double n = static_cast<double>(result.topics.size());
  agg.ndcg /= n;
  agg.awrf /= n;
  agg.score /= n;
  return agg;
}

}  // namespace fareval
