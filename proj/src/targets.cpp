#include "fareval/targets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <stdexcept>

#include <json.hpp>

#include "fareval/parallel.hpp"

namespace fareval {

using nlohmann::json;

SectionMasses section_masses(const GroupMatrix& m) {
  SectionMasses f;
  for (int g = 1; g < kGeoGroups; ++g) {
    f.known_geo += m[static_cast<std::size_t>(g)][0];
    for (int s = 1; s < kGenderGroups; ++s) {
      f.known_all += m[static_cast<std::size_t>(g)][static_cast<std::size_t>(s)];
    }
  }
  for (int s = 1; s < kGenderGroups; ++s) {
    f.known_gender += m[0][static_cast<std::size_t>(s)];
  }
  return f;
}

void average_with_priors(GroupMatrix& m) {
  const SectionMasses f = section_masses(m);
  for (int g = 1; g < kGeoGroups; ++g) {
    auto& row = m[static_cast<std::size_t>(g)];
    for (int s = 1; s < kGenderGroups; ++s) {
      row[static_cast<std::size_t>(s)] =
          0.5 * row[static_cast<std::size_t>(s)] +
          0.5 * intersectional_target(g - 1, s - 1) * f.known_all;
    }
    row[0] = 0.5 * row[0] + 0.5 * kWorldPop[static_cast<std::size_t>(g - 1)] * f.known_geo;
  }
  for (int s = 1; s < kGenderGroups; ++s) {
    m[0][static_cast<std::size_t>(s)] =
        0.5 * m[0][static_cast<std::size_t>(s)] +
        0.5 * kGenderTarget[static_cast<std::size_t>(s - 1)] * f.known_gender;
  }
}

namespace {

double matrix_sum(const GroupMatrix& m) {
  double total = 0.0;
  for (const auto& row : m) {
    for (double v : row) total += v;
  }
  return total;
}

std::vector<double> ravel(const GroupMatrix& m, bool drop_first) {
  std::vector<double> out;
  out.reserve(drop_first ? kTask1Dims : kCells);
  for (int g = 0; g < kGeoGroups; ++g) {
    for (int s = 0; s < kGenderGroups; ++s) {
      if (drop_first && g == 0 && s == 0) continue;
      out.push_back(m[static_cast<std::size_t>(g)][static_cast<std::size_t>(s)]);
    }
  }
  return out;
}

// Sum of per-page intersectional rows, optionally weighted. Pages absent
// from the store contribute nothing.
GroupMatrix accumulate_xalign(const std::unordered_set<PageId>& rel_docs,
                              const AlignmentStore& store,
                              const std::unordered_map<PageId, double>* weights) {
  GroupMatrix acc{};
  for (PageId page : rel_docs) {
    const AlignmentStore::Entry* e = store.find(page);
    if (e == nullptr) continue;
    double w = 1.0;
    if (weights != nullptr) {
      auto it = weights->find(page);
      if (it == weights->end()) continue;
      w = it->second;
    }
    const int gender = static_cast<int>(e->gender);
    if (e->geo_mask == 0) {
      acc[0][static_cast<std::size_t>(gender)] += w;
      continue;
    }
    for (int b = 0; b < kKnownGeo; ++b) {
      if (e->geo_mask & (1u << b)) {
        acc[static_cast<std::size_t>(b + 1)][static_cast<std::size_t>(gender)] += w;
      }
    }
  }
  return acc;
}

}  // namespace

std::vector<double> task1_target_from_counts(GroupMatrix counts) {
  counts[0][0] = 0.0;
  double total = matrix_sum(counts);
  if (!(total > 0.0)) {
    throw std::runtime_error(
        "degenerate topic: every relevant page is fully unknown, no target is defined");
  }
  for (auto& row : counts) {
    for (double& v : row) v /= total;
  }
  average_with_priors(counts);
  return ravel(counts, /*drop_first=*/true);
}

std::vector<double> task1_target(const std::unordered_set<PageId>& rel_docs,
                                 const AlignmentStore& store) {
  return task1_target_from_counts(accumulate_xalign(rel_docs, store, nullptr));
}

std::array<std::int64_t, kWorkLevels> work_level_counts(
    const std::unordered_set<PageId>& rel_docs, const MetadataTable& meta) {
  std::array<std::int64_t, kWorkLevels> counts{};
  for (PageId page : rel_docs) {
    const PageMetadataRecord* rec = meta.find(page);
    if (rec == nullptr || !rec->quality_level.has_value()) continue;
    counts[static_cast<std::size_t>(*rec->quality_level)] += 1;
  }
  return counts;
}

std::array<std::optional<double>, kWorkLevels> work_level_target_exposure(
    const std::array<std::int64_t, kWorkLevels>& counts) {
  std::int64_t total = 0;
  for (std::int64_t c : counts) {
    if (c < 0) throw std::invalid_argument("work level counts must be nonnegative");
    total += c;
  }
  if (total == 0) {
    throw std::runtime_error("no relevant documents with a quality label");
  }
  std::array<std::optional<double>, kWorkLevels> exposures{};
  std::int64_t start = 0;  // 0-based rank offset of the level's slice
  for (int level = 0; level < kWorkLevels; ++level) {
    std::int64_t count = counts[static_cast<std::size_t>(level)];
    if (count > 0) {
      double sum = 0.0;
      for (std::int64_t i = start; i < start + count; ++i) sum += discount(i + 1);
      exposures[static_cast<std::size_t>(level)] = sum / static_cast<double>(count);
    }
    start += count;
  }
  return exposures;
}

std::unordered_map<PageId, double> page_target_exposure(
    const std::unordered_set<PageId>& rel_docs, const MetadataTable& meta) {
  const auto counts = work_level_counts(rel_docs, meta);
  const auto exposures = work_level_target_exposure(counts);
  std::unordered_map<PageId, double> out;
  out.reserve(rel_docs.size());
  for (PageId page : rel_docs) {
    const PageMetadataRecord* rec = meta.find(page);
    if (rec == nullptr || !rec->quality_level.has_value()) continue;
    out.emplace(page, *exposures[static_cast<std::size_t>(*rec->quality_level)]);
  }
  return out;
}

std::vector<double> task2_geo_target(const std::unordered_set<PageId>& rel_docs,
                                     const AlignmentStore& store,
                                     const std::unordered_map<PageId, double>& page_exposure) {
  std::array<double, kGeoGroups> exp{};
  for (PageId page : rel_docs) {
    auto it = page_exposure.find(page);
    if (it == page_exposure.end()) continue;
    const AlignmentStore::Entry* e = store.find(page);
    if (e == nullptr) continue;
    if (e->geo_mask == 0) {
      exp[0] += it->second;
      continue;
    }
    for (int b = 0; b < kKnownGeo; ++b) {
      if (e->geo_mask & (1u << b)) exp[static_cast<std::size_t>(b + 1)] += it->second;
    }
  }

  double known_sum = 0.0;
  for (int g = 1; g < kGeoGroups; ++g) known_sum += exp[static_cast<std::size_t>(g)];
  const double denom = std::max(known_sum, 1.0e-6);
  for (int g = 1; g < kGeoGroups; ++g) {
    double normalized = exp[static_cast<std::size_t>(g)] / denom;
    double averaged = (normalized + kWorldPop[static_cast<std::size_t>(g - 1)]) * 0.5;
    exp[static_cast<std::size_t>(g)] = averaged * known_sum;
  }

  double total = 0.0;
  for (double v : exp) total += v;
  if (!(total > 0.0)) {
    throw std::runtime_error("zero total exposure: no target is defined");
  }
  std::vector<double> out(exp.begin(), exp.end());
  for (double& v : out) v /= total;
  return out;
}

std::vector<double> task2_intersectional_target(
    const std::unordered_set<PageId>& rel_docs, const AlignmentStore& store,
    const std::unordered_map<PageId, double>& page_exposure) {
  GroupMatrix m = accumulate_xalign(rel_docs, store, &page_exposure);
  double total = matrix_sum(m);
  if (!(total > 0.0)) {
    throw std::runtime_error("zero total exposure: no target is defined");
  }
  for (auto& row : m) {
    for (double& v : row) v /= total;
  }
  average_with_priors(m);
  return ravel(m, /*drop_first=*/false);
}

const std::vector<double>* TargetSet::find(TopicId topic) const {
  auto it = by_topic.find(topic);
  return it == by_topic.end() ? nullptr : &it->second;
}

namespace {

TargetSet build_targets_impl(const Qrels& qrels, TargetKind kind, Exec exec,
                             const std::function<std::vector<double>(
                                 const std::unordered_set<PageId>&)>& per_topic) {
  std::vector<TopicId> topic_ids;
  topic_ids.reserve(qrels.topics().size());
  for (const auto& [topic, docs] : qrels.topics()) {
    (void)docs;
    topic_ids.push_back(topic);
  }
  std::vector<std::vector<double>> vectors(topic_ids.size());
  parallel_for_each(topic_ids.size(), exec, [&](std::size_t i) {
    const auto* docs = qrels.find(topic_ids[i]);
    try {
      vectors[i] = per_topic(*docs);
    } catch (const std::exception& e) {
      throw std::runtime_error("topic " + std::to_string(topic_ids[i]) + ": " + e.what());
    }
  });
  TargetSet set;
  set.kind = kind;
  for (std::size_t i = 0; i < topic_ids.size(); ++i) {
    set.by_topic.emplace(topic_ids[i], std::move(vectors[i]));
  }
  return set;
}

}  // namespace

TargetSet build_task1_targets(const Qrels& qrels, const AlignmentStore& store, Exec exec) {
  return build_targets_impl(qrels, TargetKind::Task1, exec,
                            [&](const std::unordered_set<PageId>& docs) {
                              return task1_target(docs, store);
                            });
}

TargetSet build_task2_targets(const Qrels& qrels, const AlignmentStore& store,
                              const MetadataTable& meta, Exec exec) {
  return build_targets_impl(qrels, TargetKind::Task2, exec,
                            [&](const std::unordered_set<PageId>& docs) {
                              auto exposure = page_target_exposure(docs, meta);
                              return task2_intersectional_target(docs, store, exposure);
                            });
}

TargetSet build_task2_geo_targets(const Qrels& qrels, const AlignmentStore& store,
                                  const MetadataTable& meta, Exec exec) {
  return build_targets_impl(qrels, TargetKind::Task2Geo, exec,
                            [&](const std::unordered_set<PageId>& docs) {
                              auto exposure = page_target_exposure(docs, meta);
                              return task2_geo_target(docs, store, exposure);
                            });
}

const char* target_kind_name(TargetKind kind) {
  switch (kind) {
    case TargetKind::Task1: return "task1";
    case TargetKind::Task2: return "task2";
    case TargetKind::Task2Geo: return "task2-geo";
  }
  return "unknown";
}

int target_kind_dims(TargetKind kind) {
  switch (kind) {
    case TargetKind::Task1: return kTask1Dims;
    case TargetKind::Task2: return kCells;
    case TargetKind::Task2Geo: return kGeoGroups;
  }
  return 0;
}

void save_targets(const TargetSet& targets, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  for (const auto& [topic, vec] : targets.by_topic) {
    json rec;
    rec["topic_id"] = topic;
    rec["task"] = target_kind_name(targets.kind);
    rec["vector"] = vec;
    out << rec.dump() << '\n';
  }
}

TargetSet load_targets(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  TargetSet set;
  bool first = true;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": malformed JSON: " + e.what());
    }
    TopicId topic = rec.at("topic_id").get<TopicId>();
    std::string task = rec.at("task").get<std::string>();
    TargetKind kind;
    if (task == "task1") kind = TargetKind::Task1;
    else if (task == "task2") kind = TargetKind::Task2;
    else if (task == "task2-geo") kind = TargetKind::Task2Geo;
    else throw std::runtime_error(path + ": unknown target task: " + task);
    if (first) {
      set.kind = kind;
      first = false;
    } else if (kind != set.kind) {
      throw std::runtime_error(path + ": mixed target kinds in one file");
    }
    std::vector<double> vec = rec.at("vector").get<std::vector<double>>();
    if (static_cast<int>(vec.size()) != target_kind_dims(kind)) {
      throw std::runtime_error(path + ": topic " + std::to_string(topic) + " vector has " +
                               std::to_string(vec.size()) + " entries, expected " +
                               std::to_string(target_kind_dims(kind)));
    }
    set.by_topic[topic] = std::move(vec);
  }
  return set;
}

}  // namespace fareval
