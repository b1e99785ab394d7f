#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "fareval/dataset_io.hpp"
#include "fareval/types.hpp"

namespace fareval {

// Gender literals discarded before normalization. The track metadata
// contains one known data error that the reference pipeline drops.
struct GenderRules {
  std::vector<std::string> deny = {"Taira no Kiyomori"};
};

// Collapses "(tran|ci)sgender (fe)male" to the base label, maps anything
// outside {unknown, male, female, third} to third, absent to unknown.
Gender normalize_gender(const std::optional<std::string>& raw);

// Applies the deny-list, normalizes each remaining value, and keeps the
// first distinct label so gender rows stay one-hot.
Gender normalize_gender_values(const std::vector<std::string>& raw,
                               const GenderRules& rules = {});

// Row-major page matrices over a shared page order.
struct GeoMatrix {
  std::vector<PageId> pages;
  std::vector<std::uint8_t> masks;  // bit i => kGeoLabels[i + 1]
};

struct GenderMatrix {
  std::vector<PageId> pages;
  std::vector<Gender> genders;
};

GeoMatrix build_geo_alignment(const MetadataTable& meta);
GenderMatrix build_gender_alignment(const MetadataTable& meta, const GenderRules& rules = {});

// Page -> group membership for all three views (geography, gender, and
// their 32-cell product). One entry per page holds a continent bitmask and
// a gender code; dense rows are materialized only on lookup. Immutable
// after build, safe to share across threads.
class AlignmentStore {
 public:
  struct Entry {
    std::uint8_t geo_mask = 0;
    Gender gender = Gender::Unknown;
  };

  static AlignmentStore build(const MetadataTable& meta, const GenderRules& rules = {});

  // Assemble from pre-sorted parallel row vectors (ids must be unique).
  static AlignmentStore from_rows(std::vector<PageId> pages, std::vector<Entry> entries);

  bool contains(PageId id) const { return index_.count(id) != 0; }
  std::size_t size() const { return pages_.size(); }
  const std::vector<PageId>& pages() const { return pages_; }

  const Entry* find(PageId id) const;

  // Dense row views. Pages absent from the store get all-zero rows; a
  // present page with no continents gets Unknown = 1.
  std::array<double, kGeoGroups> geo_row(PageId id) const;
  std::array<double, kGenderGroups> gender_row(PageId id) const;
  std::array<double, kCells> xalign_row(PageId id) const;
  std::array<double, kTask1Dims> task1_row(PageId id) const;

  // Column sums of the intersectional matrix over all stored pages.
  std::array<double, kCells> column_totals() const;

  // Versioned little-endian binary file; round-trip stable. Layout:
  //   "FVAS" | u32 version | u64 count | count x (i64 page_id, u8 mask, u8 gender)
  // sorted by page_id.
  void save(const std::string& path) const;
  static AlignmentStore load(const std::string& path);

 private:
  std::vector<PageId> pages_;  // sorted ascending
  std::vector<Entry> entries_;
  std::unordered_map<PageId, std::size_t> index_;

  void rebuild_index();
};

// Outer product of the two row sets; throws if the page sets differ.
AlignmentStore build_intersectional(const GeoMatrix& geo, const GenderMatrix& gender);

// xalign row from one page's dense axis rows (outer product, row-major).
std::array<double, kCells> intersect_rows(const std::array<double, kGeoGroups>& geo,
                                          const std::array<double, kGenderGroups>& gender);

}  // namespace fareval
