#include "fixtures.hpp"

#include <zlib.h>

#include <atomic>
#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace fixtures {

std::uint8_t geo_mask(const std::vector<std::string>& continents) {
  std::uint8_t mask = 0;
  for (const auto& label : continents) {
    bool found = false;
    for (int i = 1; i < fareval::kGeoGroups; ++i) {
      if (label == fareval::kGeoLabels[static_cast<std::size_t>(i)]) {
        mask |= static_cast<std::uint8_t>(1u << (i - 1));
        found = true;
        break;
      }
    }
    if (!found) throw std::invalid_argument("fixture: unknown continent " + label);
  }
  return mask;
}

PageMetadataRecord page(PageId id, const std::vector<std::string>& continents,
                        const std::optional<std::string>& gender,
                        const std::optional<std::string>& quality) {
  PageMetadataRecord rec;
  rec.page_id = id;
  rec.geo_mask = geo_mask(continents);
  if (gender.has_value()) rec.gender_raw = {*gender};
  if (quality.has_value()) {
    for (int i = 0; i < fareval::kWorkLevels; ++i) {
      if (*quality == fareval::kWorkLabels[static_cast<std::size_t>(i)]) {
        rec.quality_level = i;
        break;
      }
    }
    if (!rec.quality_level.has_value()) {
      throw std::invalid_argument("fixture: unknown quality " + *quality);
    }
    rec.quality_score = 0.1 + 0.15 * *rec.quality_level;
  }
  return rec;
}

namespace {

const char* kContinentPool[] = {"Africa", "Asia", "Europe",
                                "Latin America and the Caribbean", "Northern America",
                                "Oceania", "Antarctica"};
const char* kGenderPool[] = {"male", "female", "genderqueer", "transgender female"};
const char* kQualityPool[] = {"Stub", "Start", "C", "B", "GA", "FA"};

std::vector<PageId> distinct_ranking(std::size_t length, std::size_t pages, Rng& rng) {
  length = std::min(length, pages);  // keep the distinct pool large enough
  std::unordered_set<PageId> used;
  std::vector<PageId> ranking;
  while (ranking.size() < length) {
    // occasionally rank a page that has no metadata at all
    PageId p = rng.uniform() < 0.1 ? static_cast<PageId>(pages + 1 + rng.below(5))
                                   : static_cast<PageId>(1 + rng.below(pages));
    if (used.insert(p).second) ranking.push_back(p);
  }
  return ranking;
}

void force_known_page(std::vector<PageId>& ranking) {
  for (PageId p : ranking) {
    if (p == 1 || p == 2) return;
  }
  ranking.back() = 1;
}

}  // namespace

Instance random_instance(std::uint64_t seed) {
  Rng rng{seed * 2654435761ULL + 1};
  Instance inst;

  const std::size_t n_pages = 8 + rng.below(23);  // up to 30
  inst.meta.add(page(1, {"Asia"}, std::string("male"), std::string("C")));
  inst.meta.add(page(2, {"Europe"}, std::string("female"), std::string("Start")));
  for (std::size_t id = 3; id <= n_pages; ++id) {
    std::vector<std::string> continents;
    if (rng.uniform() < 0.6) {
      continents.push_back(kContinentPool[rng.below(7)]);
      if (rng.uniform() < 0.25) continents.push_back(kContinentPool[rng.below(7)]);
    }
    std::optional<std::string> gender;
    if (rng.uniform() < 0.5) gender = kGenderPool[rng.below(4)];
    std::optional<std::string> quality;
    if (rng.uniform() < 0.85) quality = kQualityPool[rng.below(6)];
    inst.meta.add(page(static_cast<PageId>(id), continents, gender, quality));
  }

  const int n_topics = 2 + static_cast<int>(rng.below(9));  // up to 10
  for (int t = 1; t <= n_topics; ++t) {
    std::unordered_set<PageId> rel{1};
    const std::size_t extra = 1 + rng.below(5);
    while (rel.size() < extra + 1) {
      rel.insert(static_cast<PageId>(1 + rng.below(n_pages)));
    }
    if (rng.uniform() < 0.15) rel.insert(static_cast<PageId>(n_pages + 50));  // no metadata
    inst.qrels.set(t, std::move(rel));

    inst.run1.topic_order.push_back(t);
    auto ranking = distinct_ranking(3 + rng.below(18), n_pages, rng);
    force_known_page(ranking);
    inst.run1.rankings[t] = std::move(ranking);

    inst.run2.topic_order.push_back(t);
    auto& seq = inst.run2.rankings[t];
    const int reps = 1 + static_cast<int>(rng.below(5));
    for (int r = 1; r <= reps; ++r) {
      auto rep_ranking = distinct_ranking(2 + rng.below(7), n_pages, rng);
      force_known_page(rep_ranking);
      seq.emplace_back(r, std::move(rep_ranking));
    }
  }
  inst.run1.run_name = "random-t1";
  inst.run2.run_name = "random-t2";
  return inst;
}

std::filesystem::path temp_dir(const std::string& tag) {
  static std::atomic<std::uint64_t> counter{0};
  auto dir = std::filesystem::temp_directory_path() /
             ("fareval-" + tag + "-" + std::to_string(::getpid()) + "-" +
              std::to_string(counter.fetch_add(1)));
  std::filesystem::create_directories(dir);
  return dir;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("fixture: cannot write " + path.string());
  out << content;
}

void write_gzip(const std::filesystem::path& path, const std::string& content) {
  gzFile f = gzopen(path.c_str(), "wb");
  if (f == nullptr) throw std::runtime_error("fixture: cannot write " + path.string());
  if (gzwrite(f, content.data(), static_cast<unsigned>(content.size())) !=
      static_cast<int>(content.size())) {
    gzclose(f);
    throw std::runtime_error("fixture: gzwrite failed for " + path.string());
  }
  gzclose(f);
}

std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("fixture: cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

DiskFixture write_disk_fixture(const std::filesystem::path& dir) {
  Rng rng{424242};
  std::ostringstream meta;
  // 50 pages: geography and gender cycle through the groups, quality cycles
  // through the six levels with a few gaps.
  for (int id = 1; id <= 50; ++id) {
    meta << "{\"page_id\":" << id << ",\"quality_score\":" << (0.02 * id);
    if (id % 9 != 0) {
      meta << ",\"quality_score_disc\":\"" << kQualityPool[id % 6] << "\"";
    } else {
      meta << ",\"quality_score_disc\":null";
    }
    meta << ",\"geographic_locations\":";
    if (id % 4 == 0) {
      meta << "[]";
    } else if (id % 4 == 1) {
      meta << "[\"" << kContinentPool[id % 7] << "\"]";
    } else {
      meta << "[\"" << kContinentPool[id % 7] << "\",\"" << kContinentPool[(id + 3) % 7]
           << "\"]";
    }
    meta << ",\"gender\":";
    if (id % 3 == 0) {
      meta << "null";
    } else {
      meta << "[\"" << kGenderPool[id % 4] << "\"]";
    }
    meta << "}\n";
  }

  std::ostringstream topics;
  for (int t = 1; t <= 5; ++t) {
    topics << "{\"id\":" << t << ",\"title\":\"Topic " << t
           << "\",\"keywords\":[\"kw\"],\"scope\":\"\",\"rel_docs\":[";
    for (int k = 0; k < 12; ++k) {
      if (k > 0) topics << ',';
      topics << (1 + (t * 7 + k * 3) % 50);
    }
    topics << "]}\n";
  }

  std::ostringstream run1;
  for (int t = 1; t <= 5; ++t) {
    std::unordered_set<PageId> used;
    int emitted = 0;
    while (emitted < 30) {
      PageId p = static_cast<PageId>(1 + rng.below(50));
      if (!used.insert(p).second) continue;
      run1 << t << '\t' << p << '\n';
      ++emitted;
    }
  }

  std::ostringstream run2;
  for (int t = 1; t <= 5; ++t) {
    for (int rep = 1; rep <= 4; ++rep) {
      std::unordered_set<PageId> used;
      int emitted = 0;
      while (emitted < 10) {
        PageId p = static_cast<PageId>(1 + rng.below(50));
        if (!used.insert(p).second) continue;
        run2 << t << '\t' << rep << '\t' << p << '\n';
        ++emitted;
      }
    }
  }

  DiskFixture fx;
  fx.metadata = dir / "metadata.jsonl";
  fx.topics = dir / "topics.jsonl";
  fx.run1 = dir / "run1.tsv";
  fx.run2 = dir / "run2.tsv";
  write_text(fx.metadata, meta.str());
  write_text(fx.topics, topics.str());
  write_text(fx.run1, run1.str());
  write_text(fx.run2, run2.str());
  return fx;
}

}  // namespace fixtures
