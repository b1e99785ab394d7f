#pragma once

// Synthetic data builders shared by the unit tests, the acceptance suite,
// and the oracle-equivalence checks.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fareval/alignment.hpp"
#include "fareval/dataset_io.hpp"

namespace fixtures {

using fareval::MetadataTable;
using fareval::PageId;
using fareval::PageMetadataRecord;
using fareval::Qrels;
using fareval::Task1Run;
using fareval::Task2Run;
using fareval::TopicId;

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

// Continent bitmask from labels (known continents only).
std::uint8_t geo_mask(const std::vector<std::string>& continents);

PageMetadataRecord page(PageId id, const std::vector<std::string>& continents,
                        const std::optional<std::string>& gender,
                        const std::optional<std::string>& quality);

// A randomized evaluation instance: topics, small metadata, one run per
// task. Every topic has at least one relevant page with a quality label
// and at least one known-group page, so every metric is defined.
struct Instance {
  MetadataTable meta;
  Qrels qrels;
  Task1Run run1;
  Task2Run run2;
};

Instance random_instance(std::uint64_t seed);

// Fresh directory under the system temp root.
std::filesystem::path temp_dir(const std::string& tag);

void write_text(const std::filesystem::path& path, const std::string& content);
void write_gzip(const std::filesystem::path& path, const std::string& content);
std::string read_bytes(const std::filesystem::path& path);

// Five-topic, fifty-page fixture written to disk: metadata.jsonl,
// topics.jsonl, run1.tsv, run2.tsv under `dir`.
struct DiskFixture {
  std::filesystem::path metadata;
  std::filesystem::path topics;
  std::filesystem::path run1;
  std::filesystem::path run2;
};

DiskFixture write_disk_fixture(const std::filesystem::path& dir);

}  // namespace fixtures
