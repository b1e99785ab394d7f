#pragma once

#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "fareval/alignment.hpp"
#include "fareval/dataset_io.hpp"
#include "fareval/targets.hpp"
#include "fareval/types.hpp"

namespace fareval {

// Discount-weighted group attention of a ranking over the 31 known-group
// cells, normalized to a distribution. Fully-unknown pages contribute
// nothing; throws when no ranked page exposes any known group.
std::vector<double> cumulated_attention(const std::vector<PageId>& ranking,
                                        const AlignmentStore& store);

// Jensen-Shannon divergence with base-2 logs, bounded in [0,1]. Inputs
// must be same-dimension distributions (sum 1 within 1e-9).
double jensen_shannon(std::span<const double> p, std::span<const double> q);

double awrf(const std::vector<PageId>& ranking, const AlignmentStore& store,
            const std::vector<double>& target31);

// Binary-relevance nDCG with log discounting; the ideal DCG sums the
// first min(R, |ranking|) weights. Throws when the topic has no relevant
// documents.
double ndcg(const std::vector<PageId>& ranking, const std::unordered_set<PageId>& rel_docs);

struct TopicScoreT1 {
  TopicId topic_id = 0;
  double ndcg = 0.0;
  double awrf = 0.0;
  double score = 0.0;  // ndcg * awrf
};

struct DroppedTopic {
  TopicId topic_id = 0;
  std::string reason;
};

struct Task1Result {
  std::string run_name;
  std::vector<TopicScoreT1> topics;   // ascending topic_id
  std::vector<DroppedTopic> dropped;  // topics excluded from the mean
};

struct Task1Aggregate {
  std::string run_name;
  double ndcg = 0.0;
  double awrf = 0.0;
  double score = 0.0;  // mean over topics of the per-topic products
};

// Scores every topic present in both the run and the qrels. Topics whose
// ranking has no known-group exposure are dropped with a reason instead
// of failing the run; a missing target is an error.
Task1Result score_task1(const Task1Run& run, const Qrels& qrels, const AlignmentStore& store,
                        const TargetSet& targets, Exec exec = Exec::Parallel);

Task1Aggregate aggregate_task1(const Task1Result& result);

}  // namespace fareval
