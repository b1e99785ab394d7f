#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "fareval/types.hpp"

namespace fareval {

// One article's fairness/quality attributes as parsed from the metadata
// file. Geography is kept as a bitmask over the seven known continents
// (bit i set => kGeoLabels[i + 1]); gender values stay raw until the
// alignment stage normalizes them.
struct PageMetadataRecord {
  PageId page_id = 0;
  std::optional<double> quality_score;
  std::optional<int> quality_level;  // index into kWorkLabels
  std::uint8_t geo_mask = 0;
  std::vector<std::string> gender_raw;
};

class MetadataTable {
 public:
  // Keeps the first record for a page_id, drops later duplicates.
  void add(PageMetadataRecord rec);

  const PageMetadataRecord* find(PageId id) const;
  const std::vector<PageMetadataRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }

 private:
  std::vector<PageMetadataRecord> records_;
  std::unordered_map<PageId, std::size_t> index_;
};

struct Topic {
  TopicId id = 0;
  std::string title;
  std::vector<std::string> keywords;
  std::string scope;
  std::vector<PageId> rel_docs;  // deduplicated, file order
  std::optional<std::vector<PageId>> assessed_docs;
  std::optional<int> max_tier;
};

// Binary relevance per topic. Topics are kept in ascending id order so
// iteration is deterministic.
class Qrels {
 public:
  void set(TopicId topic, std::unordered_set<PageId> docs);
  bool has_topic(TopicId topic) const;
  const std::unordered_set<PageId>* find(TopicId topic) const;
  const std::map<TopicId, std::unordered_set<PageId>>& topics() const { return rel_; }

 private:
  std::map<TopicId, std::unordered_set<PageId>> rel_;
};

struct Task1Run {
  std::string run_name;
  std::vector<TopicId> topic_order;  // first-appearance order
  std::unordered_map<TopicId, std::vector<PageId>> rankings;
};

struct Task2Run {
  std::string run_name;
  std::vector<TopicId> topic_order;
  // Per topic: (rep_number, ranking), sorted by rep_number ascending.
  std::unordered_map<TopicId, std::vector<std::pair<int, std::vector<PageId>>>> rankings;
};

struct ValidationIssue {
  TopicId topic_id = 0;
  std::string code;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> errors;
  std::vector<ValidationIssue> warnings;
  bool ok() const { return errors.empty(); }
};

struct TaskProfile {
  std::size_t expected_length = 0;
  int expected_reps = 0;  // 0 for single-ranking runs
};

inline constexpr TaskProfile kTask1Profile{1000, 0};
inline constexpr TaskProfile kTask2Profile{50, 100};

struct TierSpec {
  std::size_t task1_depth = 20;
  std::size_t task2_depth = 5;
  int task2_reps = 25;
};

// Loaders accept both gzip-compressed and plain files (detected from the
// stream, not the name). All throw std::runtime_error with the offending
// line number on malformed input.
MetadataTable load_metadata(const std::string& path);
std::vector<Topic> load_topics(const std::string& path);

Qrels qrels_from_topics(const std::vector<Topic>& topics);

Task1Run load_task1_run(const std::string& path, const std::string& run_name);
Task2Run load_task2_run(const std::string& path, const std::string& run_name);
void save_task1_run(const Task1Run& run, const std::string& path);
void save_task2_run(const Task2Run& run, const std::string& path);

ValidationReport validate_run(const Task1Run& run, const TaskProfile& profile,
                              const Qrels& qrels, const MetadataTable* meta = nullptr);
ValidationReport validate_run(const Task2Run& run, const TaskProfile& profile,
                              const Qrels& qrels, const MetadataTable* meta = nullptr);

std::set<std::pair<TopicId, PageId>> build_assessment_pool(
    const std::vector<Task1Run>& task1_runs, const std::vector<Task2Run>& task2_runs,
    const TierSpec& tiers = {});

// TSV `topic_id<TAB>page_id`, sorted by topic then page.
void save_pool(const std::set<std::pair<TopicId, PageId>>& pool, const std::string& path);

}  // namespace fareval
