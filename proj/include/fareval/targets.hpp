#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "fareval/alignment.hpp"
#include "fareval/dataset_io.hpp"
#include "fareval/types.hpp"

namespace fareval {

// Global priors the per-topic empirical distributions are averaged with:
// world population by continent and a near-parity gender split.
inline constexpr std::array<double, kKnownGeo> kWorldPop = {
    0.155070563,  // Africa
    1.54424e-07,  // Antarctica
    0.600202585,  // Asia
    0.103663858,  // Europe
    0.08609797,   // Latin America and the Caribbean
    0.049616733,  // Northern America
    0.005348137,  // Oceania
};

inline constexpr std::array<double, kKnownGender> kGenderTarget = {
    0.495,  // female
    0.495,  // male
    0.01,   // third
};

// kWorldPop[geo] * kGenderTarget[gen]; geo in 0..6, gen in 0..2.
inline constexpr double intersectional_target(int geo, int gen) {
  return kWorldPop[static_cast<std::size_t>(geo)] * kGenderTarget[static_cast<std::size_t>(gen)];
}

// 8x4 geography-by-gender matrix, row 0 / column 0 = unknown.
using GroupMatrix = std::array<std::array<double, kGenderGroups>, kGeoGroups>;

// Mass in each known section of a normalized GroupMatrix: the fully-known
// block, the known-geography/unknown-gender column, and the
// unknown-geography/known-gender row.
struct SectionMasses {
  double known_all = 0.0;
  double known_geo = 0.0;
  double known_gender = 0.0;
};

SectionMasses section_masses(const GroupMatrix& m);

// In-place three-way averaging with the global priors: each known section
// is halved and topped up with 0.5 * prior * section-mass. Cell (0,0) is
// left untouched.
void average_with_priors(GroupMatrix& m);

// Task 1 target from a per-topic intersectional count (or mass) matrix:
// zero cell (0,0), normalize, average with priors, ravel dropping cell 0.
// Throws if nothing remains after the unknown cell is cleared.
std::vector<double> task1_target_from_counts(GroupMatrix counts);

// Task 1 target straight from a topic's relevant set.
std::vector<double> task1_target(const std::unordered_set<PageId>& rel_docs,
                                 const AlignmentStore& store);

// Relevant-document counts per work level; pages missing from the
// metadata or without a quality label are excluded.
std::array<std::int64_t, kWorkLevels> work_level_counts(
    const std::unordered_set<PageId>& rel_docs, const MetadataTable& meta);

// Ideal per-document exposure for each work level: documents sorted by
// work needed (Stub first) share the mean discount of their rank slice.
// Empty levels get nullopt; throws when all counts are zero.
std::array<std::optional<double>, kWorkLevels> work_level_target_exposure(
    const std::array<std::int64_t, kWorkLevels>& counts);

// Per-page ideal exposure; pages without a quality label are absent.
std::unordered_map<PageId, double> page_target_exposure(
    const std::unordered_set<PageId>& rel_docs, const MetadataTable& meta);

// Task 2 geographic target (8-dim): exposure-weighted geography rows,
// known part averaged with world population, unknown mass carried
// through empirically. Throws on zero total exposure.
std::vector<double> task2_geo_target(const std::unordered_set<PageId>& rel_docs,
                                     const AlignmentStore& store,
                                     const std::unordered_map<PageId, double>& page_exposure);

// Task 2 intersectional target (32-dim): exposure-weighted xalign rows,
// normalized without clearing cell (0,0), then prior-averaged.
std::vector<double> task2_intersectional_target(
    const std::unordered_set<PageId>& rel_docs, const AlignmentStore& store,
    const std::unordered_map<PageId, double>& page_exposure);

enum class TargetKind { Task1, Task2, Task2Geo };

struct TargetSet {
  TargetKind kind = TargetKind::Task1;
  std::map<TopicId, std::vector<double>> by_topic;

  const std::vector<double>* find(TopicId topic) const;
};

// Build targets for every topic in the qrels. Parallel over topics.
TargetSet build_task1_targets(const Qrels& qrels, const AlignmentStore& store,
                              Exec exec = Exec::Parallel);
TargetSet build_task2_targets(const Qrels& qrels, const AlignmentStore& store,
                              const MetadataTable& meta, Exec exec = Exec::Parallel);
TargetSet build_task2_geo_targets(const Qrels& qrels, const AlignmentStore& store,
                                  const MetadataTable& meta, Exec exec = Exec::Parallel);

// JSON-lines: {"topic_id": ..., "task": "task1"|"task2"|"task2-geo", "vector": [...]}.
void save_targets(const TargetSet& targets, const std::string& path);
TargetSet load_targets(const std::string& path);

const char* target_kind_name(TargetKind kind);
int target_kind_dims(TargetKind kind);

}  // namespace fareval
