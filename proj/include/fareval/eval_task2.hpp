#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "fareval/alignment.hpp"
#include "fareval/dataset_io.hpp"
#include "fareval/targets.hpp"
#include "fareval/types.hpp"

namespace fareval {

// Mean positional discount each document receives across a sequence of
// rankings; absence from a ranking contributes zero. Throws on an empty
// sequence.
std::unordered_map<PageId, double> doc_exposure(
    const std::vector<std::vector<PageId>>& sequence);

// Aggregates document exposure into the 32 intersectional cells (cell 0 =
// fully unknown) and normalizes to a distribution. Throws when the
// aggregate is the zero vector.
std::vector<double> group_exposure(const std::unordered_map<PageId, double>& exposure,
                                   const AlignmentStore& store);

struct EEMetrics {
  double ee_r = 0.0;  // system . target
  double ee_d = 0.0;  // system . system
  double ee_l = 0.0;  // squared distance = ee_d - 2 ee_r + target . target
};

EEMetrics ee_metrics(std::span<const double> system, std::span<const double> target);

struct TopicScoreT2 {
  TopicId topic_id = 0;
  double ee_r = 0.0;
  double ee_d = 0.0;
  double ee_l = 0.0;
};

struct Task2Result {
  std::string run_name;
  std::vector<TopicScoreT2> topics;  // ascending topic_id
};

enum class AggregateMode { Sum, Mean };

struct Task2Aggregate {
  std::string run_name;
  double ee_r = 0.0;
  double ee_d = 0.0;
  double ee_l = 0.0;
};

// Scores every topic present in both the run and the qrels against the
// 32-dim intersectional targets; a missing target is an error.
Task2Result score_task2(const Task2Run& run, const Qrels& qrels, const AlignmentStore& store,
                        const TargetSet& targets, Exec exec = Exec::Parallel);

Task2Aggregate aggregate_task2(const Task2Result& result,
                               AggregateMode mode = AggregateMode::Sum);

}  // namespace fareval
