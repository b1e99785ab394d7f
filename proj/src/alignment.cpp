#include "fareval/alignment.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <numeric>
#include <regex>
#include <stdexcept>

namespace fareval {

namespace {

const std::regex kGenderCollapse("(?:tran|ci)sgender\\s+((?:fe)?male)");

Gender label_to_gender(const std::string& s) {
  if (s == "unknown") return Gender::Unknown;
  if (s == "female") return Gender::Female;
  if (s == "male") return Gender::Male;
  return Gender::Third;
}

void write_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void write_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

std::uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t read_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

constexpr char kStoreMagic[4] = {'F', 'V', 'A', 'S'};
constexpr std::uint32_t kStoreVersion = 1;

}  // namespace

Gender normalize_gender(const std::optional<std::string>& raw) {
  if (!raw.has_value() || raw->empty()) return Gender::Unknown;
  std::string collapsed = std::regex_replace(*raw, kGenderCollapse, "$1");
  return label_to_gender(collapsed);
}

Gender normalize_gender_values(const std::vector<std::string>& raw, const GenderRules& rules) {
  for (const auto& value : raw) {
    bool denied = std::find(rules.deny.begin(), rules.deny.end(), value) != rules.deny.end();
    if (denied) continue;
    return normalize_gender(value);
  }
  return Gender::Unknown;
}

GeoMatrix build_geo_alignment(const MetadataTable& meta) {
  GeoMatrix m;
  m.pages.reserve(meta.size());
  m.masks.reserve(meta.size());
  for (const auto& rec : meta.records()) {
    m.pages.push_back(rec.page_id);
    m.masks.push_back(rec.geo_mask);
  }
  return m;
}

GenderMatrix build_gender_alignment(const MetadataTable& meta, const GenderRules& rules) {
  GenderMatrix m;
  m.pages.reserve(meta.size());
  m.genders.reserve(meta.size());
  for (const auto& rec : meta.records()) {
    m.pages.push_back(rec.page_id);
    m.genders.push_back(normalize_gender_values(rec.gender_raw, rules));
  }
  return m;
}

AlignmentStore build_intersectional(const GeoMatrix& geo, const GenderMatrix& gender) {
  if (geo.pages != gender.pages) {
    throw std::invalid_argument(
        "build_intersectional: geography and gender matrices cover different page sets");
  }
  std::vector<std::size_t> order(geo.pages.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return geo.pages[a] < geo.pages[b]; });
  // MetadataTable already deduplicated, so ids are unique here.
  std::vector<PageId> pages;
  std::vector<AlignmentStore::Entry> entries;
  pages.reserve(order.size());
  entries.reserve(order.size());
  for (std::size_t i : order) {
    pages.push_back(geo.pages[i]);
    entries.push_back({geo.masks[i], gender.genders[i]});
  }
  return AlignmentStore::from_rows(std::move(pages), std::move(entries));
}

AlignmentStore AlignmentStore::from_rows(std::vector<PageId> pages, std::vector<Entry> entries) {
  AlignmentStore store;
  store.pages_ = std::move(pages);
  store.entries_ = std::move(entries);
  store.rebuild_index();
  return store;
}

AlignmentStore AlignmentStore::build(const MetadataTable& meta, const GenderRules& rules) {
  return build_intersectional(build_geo_alignment(meta), build_gender_alignment(meta, rules));
}

void AlignmentStore::rebuild_index() {
  index_.clear();
  index_.reserve(pages_.size());
  for (std::size_t i = 0; i < pages_.size(); ++i) index_.emplace(pages_[i], i);
}

const AlignmentStore::Entry* AlignmentStore::find(PageId id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

std::array<double, kGeoGroups> AlignmentStore::geo_row(PageId id) const {
  std::array<double, kGeoGroups> row{};
  const Entry* e = find(id);
  if (e == nullptr) return row;
  if (e->geo_mask == 0) {
    row[0] = 1.0;
    return row;
  }
  for (int b = 0; b < kKnownGeo; ++b) {
    if (e->geo_mask & (1u << b)) row[static_cast<std::size_t>(b) + 1] = 1.0;
  }
  return row;
}

std::array<double, kGenderGroups> AlignmentStore::gender_row(PageId id) const {
  std::array<double, kGenderGroups> row{};
  const Entry* e = find(id);
  if (e == nullptr) return row;
  row[static_cast<std::size_t>(e->gender)] = 1.0;
  return row;
}

std::array<double, kCells> intersect_rows(const std::array<double, kGeoGroups>& geo,
                                          const std::array<double, kGenderGroups>& gender) {
  std::array<double, kCells> out{};
  for (int g = 0; g < kGeoGroups; ++g) {
    for (int s = 0; s < kGenderGroups; ++s) {
      out[static_cast<std::size_t>(g * kGenderGroups + s)] =
          geo[static_cast<std::size_t>(g)] * gender[static_cast<std::size_t>(s)];
    }
  }
  return out;
}

std::array<double, kCells> AlignmentStore::xalign_row(PageId id) const {
  return intersect_rows(geo_row(id), gender_row(id));
}

std::array<double, kTask1Dims> AlignmentStore::task1_row(PageId id) const {
  auto full = xalign_row(id);
  std::array<double, kTask1Dims> out{};
  std::copy(full.begin() + 1, full.end(), out.begin());
  return out;
}

std::array<double, kCells> AlignmentStore::column_totals() const {
  std::array<double, kCells> totals{};
  for (const auto& e : entries_) {
    int gender = static_cast<int>(e.gender);
    if (e.geo_mask == 0) {
      totals[static_cast<std::size_t>(gender)] += 1.0;
      continue;
    }
    for (int b = 0; b < kKnownGeo; ++b) {
      if (e.geo_mask & (1u << b)) {
        totals[static_cast<std::size_t>((b + 1) * kGenderGroups + gender)] += 1.0;
      }
    }
  }
  return totals;
}

void AlignmentStore::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out.write(kStoreMagic, 4);
  write_u32(out, kStoreVersion);
  write_u64(out, pages_.size());
  for (std::size_t i = 0; i < pages_.size(); ++i) {
    write_u64(out, static_cast<std::uint64_t>(pages_[i]));
    char b[2] = {static_cast<char>(entries_[i].geo_mask),
                 static_cast<char>(entries_[i].gender)};
    out.write(b, 2);
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

AlignmentStore AlignmentStore::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kStoreMagic, 4) != 0) {
    throw std::runtime_error("not an alignment store file: " + path);
  }
  std::uint32_t version = read_u32(in);
  if (version != kStoreVersion) {
    throw std::runtime_error("unsupported alignment store version " + std::to_string(version));
  }
  std::uint64_t count = read_u64(in);
  std::vector<PageId> pages;
  std::vector<Entry> entries;
  pages.reserve(count);
  entries.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    PageId id = static_cast<PageId>(read_u64(in));
    unsigned char b[2];
    in.read(reinterpret_cast<char*>(b), 2);
    if (!in) throw std::runtime_error("truncated alignment store: " + path);
    if (b[1] >= kGenderGroups) throw std::runtime_error("corrupt gender code in " + path);
    pages.push_back(id);
    entries.push_back({static_cast<std::uint8_t>(b[0]), static_cast<Gender>(b[1])});
  }
  return from_rows(std::move(pages), std::move(entries));
}

}  // namespace fareval
