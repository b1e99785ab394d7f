#include "fareval/dataset_io.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fareval {

using nlohmann::json;

namespace {

// Line-oriented reader over zlib's gzFile, which transparently handles
// both gzip-compressed and plain files.
class LineReader {
 public:
  explicit LineReader(const std::string& path) : path_(path) {
    file_ = gzopen(path.c_str(), "rb");
    if (file_ == nullptr) {
      throw std::runtime_error("cannot open file: " + path);
    }
  }

  ~LineReader() {
    if (file_ != nullptr) gzclose(file_);
  }

  LineReader(const LineReader&) = delete;
  LineReader& operator=(const LineReader&) = delete;

  // Returns false at EOF. Strips the trailing newline and any CR.
  bool next(std::string& line) {
    line.clear();
    char buf[1 << 16];
    bool got_any = false;
    while (true) {
      if (gzgets(file_, buf, sizeof(buf)) == nullptr) {
        int errnum = 0;
        const char* msg = gzerror(file_, &errnum);
        if (errnum != Z_OK && errnum != Z_STREAM_END) {
          throw std::runtime_error("read error in " + path_ + ": " + msg);
        }
        return got_any;
      }
      got_any = true;
      std::size_t len = std::strlen(buf);
      bool saw_newline = len > 0 && buf[len - 1] == '\n';
      if (saw_newline) --len;
      line.append(buf, len);
      if (saw_newline) break;
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

 private:
  std::string path_;
  gzFile file_ = nullptr;
};

[[noreturn]] void fail_line(const std::string& path, std::size_t line_no,
                            const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + what);
}

int continent_index(const std::string& label) {
  for (int i = 1; i < kGeoGroups; ++i) {
    if (label == kGeoLabels[static_cast<std::size_t>(i)]) return i - 1;
  }
  return -1;
}

int work_level_index(const std::string& label) {
  for (int i = 0; i < kWorkLevels; ++i) {
    if (label == kWorkLabels[static_cast<std::size_t>(i)]) return i;
  }
  return -1;
}

PageId to_page_id(const json& v, const std::string& path, std::size_t line_no,
                  const char* field) {
  if (v.is_number_integer() || v.is_number_unsigned()) {
    return v.get<PageId>();
  }
  if (v.is_number_float()) {
    double d = v.get<double>();
    PageId as_int = static_cast<PageId>(d);
    if (static_cast<double>(as_int) == d) return as_int;
  }
  fail_line(path, line_no, std::string(field) + " is not an integer page id");
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t i = 0;
  const std::size_t n = line.size();
  auto is_sep = [](char c) { return c == '\t' || c == ' '; };
  while (i < n) {
    while (i < n && is_sep(line[i])) ++i;
    if (i >= n) break;
    std::size_t start = i;
    while (i < n && !is_sep(line[i])) ++i;
    fields.emplace_back(line.substr(start, i - start));
  }
  return fields;
}

bool parse_int64(const std::string& s, std::int64_t& out) {
  if (s.empty()) return false;
  std::size_t pos = 0;
  try {
    out = std::stoll(s, &pos);
  } catch (const std::exception&) {
    return false;
  }
  return pos == s.size();
}

}  // namespace

void MetadataTable::add(PageMetadataRecord rec) {
  auto [it, inserted] = index_.emplace(rec.page_id, records_.size());
  (void)it;
  if (!inserted) return;  // first record wins
  records_.push_back(std::move(rec));
}

const PageMetadataRecord* MetadataTable::find(PageId id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &records_[it->second];
}

MetadataTable load_metadata(const std::string& path) {
  MetadataTable table;
  LineReader reader(path);
  std::string line;
  std::size_t line_no = 0;
  while (reader.next(line)) {
    ++line_no;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      fail_line(path, line_no, std::string("malformed JSON: ") + e.what());
    }
    if (!rec.is_object()) fail_line(path, line_no, "record is not a JSON object");
    if (!rec.contains("page_id")) fail_line(path, line_no, "missing page_id");

    PageMetadataRecord out;
    out.page_id = to_page_id(rec["page_id"], path, line_no, "page_id");
    if (out.page_id <= 0) fail_line(path, line_no, "page_id must be positive");

    if (rec.contains("quality_score") && rec["quality_score"].is_number()) {
      out.quality_score = rec["quality_score"].get<double>();
    }
    if (rec.contains("quality_score_disc") && rec["quality_score_disc"].is_string()) {
      const std::string label = rec["quality_score_disc"].get<std::string>();
      int level = work_level_index(label);
      if (level < 0) fail_line(path, line_no, "unknown quality label: " + label);
      out.quality_level = level;
    }
    if (rec.contains("geographic_locations") && rec["geographic_locations"].is_array()) {
      for (const auto& loc : rec["geographic_locations"]) {
        if (!loc.is_string()) fail_line(path, line_no, "continent label is not a string");
        const std::string label = loc.get<std::string>();
        int idx = continent_index(label);
        if (idx < 0) fail_line(path, line_no, "unknown continent label: " + label);
        out.geo_mask |= static_cast<std::uint8_t>(1u << idx);
      }
    }
    if (rec.contains("gender")) {
      const json& g = rec["gender"];
      if (g.is_string()) {
        out.gender_raw.push_back(g.get<std::string>());
      } else if (g.is_array()) {
        for (const auto& v : g) {
          if (v.is_string()) out.gender_raw.push_back(v.get<std::string>());
        }
      }
    }
    table.add(std::move(out));
  }
  return table;
}

std::vector<Topic> load_topics(const std::string& path) {
  std::vector<Topic> topics;
  std::unordered_set<TopicId> seen;
  LineReader reader(path);
  std::string line;
  std::size_t line_no = 0;
  while (reader.next(line)) {
    ++line_no;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      fail_line(path, line_no, std::string("malformed JSON: ") + e.what());
    }
    if (!rec.contains("id") || !rec["id"].is_number()) {
      fail_line(path, line_no, "missing topic id");
    }
    if (!rec.contains("rel_docs") || !rec["rel_docs"].is_array()) {
      fail_line(path, line_no, "missing rel_docs");
    }

    Topic t;
    t.id = rec["id"].get<TopicId>();
    if (t.id <= 0) fail_line(path, line_no, "topic id must be positive");
    if (!seen.insert(t.id).second) {
      fail_line(path, line_no, "duplicate topic id " + std::to_string(t.id));
    }
    if (rec.contains("title") && rec["title"].is_string()) {
      t.title = rec["title"].get<std::string>();
    }
    if (rec.contains("keywords") && rec["keywords"].is_array()) {
      for (const auto& k : rec["keywords"]) {
        if (k.is_string()) t.keywords.push_back(k.get<std::string>());
      }
    }
    if (rec.contains("scope") && rec["scope"].is_string()) {
      t.scope = rec["scope"].get<std::string>();
    }

    std::unordered_set<PageId> dedup;
    for (const auto& d : rec["rel_docs"]) {
      PageId id = to_page_id(d, path, line_no, "rel_docs entry");
      if (id <= 0) fail_line(path, line_no, "rel_docs entry must be positive");
      if (dedup.insert(id).second) t.rel_docs.push_back(id);
    }

    if (rec.contains("assessed_docs") && rec["assessed_docs"].is_array()) {
      std::vector<PageId> assessed;
      for (const auto& d : rec["assessed_docs"]) {
        assessed.push_back(to_page_id(d, path, line_no, "assessed_docs entry"));
      }
      t.assessed_docs = std::move(assessed);
    }
    if (rec.contains("max_tier") && rec["max_tier"].is_number()) {
      t.max_tier = rec["max_tier"].get<int>();
    }
    topics.push_back(std::move(t));
  }
  return topics;
}

void Qrels::set(TopicId topic, std::unordered_set<PageId> docs) {
  rel_[topic] = std::move(docs);
}

bool Qrels::has_topic(TopicId topic) const { return rel_.count(topic) != 0; }

const std::unordered_set<PageId>* Qrels::find(TopicId topic) const {
  auto it = rel_.find(topic);
  return it == rel_.end() ? nullptr : &it->second;
}

Qrels qrels_from_topics(const std::vector<Topic>& topics) {
  Qrels qrels;
  for (const auto& t : topics) {
    qrels.set(t.id, std::unordered_set<PageId>(t.rel_docs.begin(), t.rel_docs.end()));
  }
  return qrels;
}

Task1Run load_task1_run(const std::string& path, const std::string& run_name) {
  Task1Run run;
  run.run_name = run_name;
  std::unordered_map<TopicId, std::unordered_set<PageId>> seen;
  LineReader reader(path);
  std::string line;
  std::size_t line_no = 0;
  while (reader.next(line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (fields.empty()) continue;
    std::int64_t topic_raw = 0;
    if (line_no == 1 && !parse_int64(fields[0], topic_raw)) {
      std::cerr << "warning: " << path << ": skipping non-numeric header line\n";
      continue;
    }
    if (fields.size() != 2) {
      fail_line(path, line_no,
                "run line has " + std::to_string(fields.size()) + " columns, expected 2");
    }
    std::int64_t page_raw = 0;
    if (!parse_int64(fields[0], topic_raw) || !parse_int64(fields[1], page_raw)) {
      fail_line(path, line_no, "non-numeric field");
    }
    TopicId topic = static_cast<TopicId>(topic_raw);
    PageId page = page_raw;
    auto [it, inserted] = run.rankings.try_emplace(topic);
    if (inserted) run.topic_order.push_back(topic);
    if (!seen[topic].insert(page).second) {
      fail_line(path, line_no,
                "duplicate page " + std::to_string(page) + " in topic " + std::to_string(topic));
    }
    it->second.push_back(page);
  }
  return run;
}

Task2Run load_task2_run(const std::string& path, const std::string& run_name) {
  Task2Run run;
  run.run_name = run_name;
  // (topic, rep) -> pages already seen, to reject duplicates within a ranking
  std::map<std::pair<TopicId, int>, std::unordered_set<PageId>> seen;
  std::unordered_map<TopicId, std::unordered_map<int, std::size_t>> rep_index;
  LineReader reader(path);
  std::string line;
  std::size_t line_no = 0;
  while (reader.next(line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (fields.empty()) continue;
    std::int64_t topic_raw = 0;
    if (line_no == 1 && !parse_int64(fields[0], topic_raw)) {
      std::cerr << "warning: " << path << ": skipping non-numeric header line\n";
      continue;
    }
    if (fields.size() != 3) {
      fail_line(path, line_no,
                "run line has " + std::to_string(fields.size()) + " columns, expected 3");
    }
    std::int64_t rep_raw = 0, page_raw = 0;
    if (!parse_int64(fields[0], topic_raw) || !parse_int64(fields[1], rep_raw) ||
        !parse_int64(fields[2], page_raw)) {
      fail_line(path, line_no, "non-numeric field");
    }
    if (rep_raw < 1 || rep_raw > 100) {
      fail_line(path, line_no, "rep_number " + std::to_string(rep_raw) + " outside 1..100");
    }
    TopicId topic = static_cast<TopicId>(topic_raw);
    int rep = static_cast<int>(rep_raw);
    PageId page = page_raw;
    if (!seen[{topic, rep}].insert(page).second) {
      fail_line(path, line_no, "duplicate page " + std::to_string(page) + " in topic " +
                                   std::to_string(topic) + " rep " + std::to_string(rep));
    }
    auto [it, inserted] = run.rankings.try_emplace(topic);
    if (inserted) run.topic_order.push_back(topic);
    auto& reps = rep_index[topic];
    auto rep_it = reps.find(rep);
    if (rep_it == reps.end()) {
      reps.emplace(rep, it->second.size());
      it->second.emplace_back(rep, std::vector<PageId>{page});
    } else {
      it->second[rep_it->second].second.push_back(page);
    }
  }
  for (auto& [topic, reps] : run.rankings) {
    std::sort(reps.begin(), reps.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
  }
  return run;
}

void save_task1_run(const Task1Run& run, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  for (TopicId topic : run.topic_order) {
    for (PageId page : run.rankings.at(topic)) {
      out << topic << '\t' << page << '\n';
    }
  }
}

void save_task2_run(const Task2Run& run, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  for (TopicId topic : run.topic_order) {
    for (const auto& [rep, ranking] : run.rankings.at(topic)) {
      for (PageId page : ranking) {
        out << topic << '\t' << rep << '\t' << page << '\n';
      }
    }
  }
}

namespace {

void check_common(const std::vector<TopicId>& run_topics, const Qrels& qrels,
                  ValidationReport& report) {
  std::unordered_set<TopicId> in_run(run_topics.begin(), run_topics.end());
  for (TopicId topic : run_topics) {
    if (!qrels.has_topic(topic)) {
      report.errors.push_back({topic, "unknown topic",
                               "topic " + std::to_string(topic) + " not in the qrels"});
    }
  }
  for (const auto& [topic, docs] : qrels.topics()) {
    (void)docs;
    if (!in_run.count(topic)) {
      report.warnings.push_back({topic, "missing topic",
                                 "topic " + std::to_string(topic) + " absent from the run"});
    }
  }
}

void check_pages_known(TopicId topic, const std::vector<PageId>& ranking,
                       const MetadataTable& meta, ValidationReport& report) {
  std::size_t absent = 0;
  for (PageId page : ranking) {
    if (meta.find(page) == nullptr) ++absent;
  }
  if (absent > 0) {
    report.warnings.push_back({topic, "unknown pages",
                               std::to_string(absent) + " ranked pages absent from metadata"});
  }
}

}  // namespace

ValidationReport validate_run(const Task1Run& run, const TaskProfile& profile,
                              const Qrels& qrels, const MetadataTable* meta) {
  ValidationReport report;
  check_common(run.topic_order, qrels, report);
  for (TopicId topic : run.topic_order) {
    const auto& ranking = run.rankings.at(topic);
    if (ranking.size() < profile.expected_length) {
      report.warnings.push_back(
          {topic, "short ranking",
           "ranking has " + std::to_string(ranking.size()) + " items, expected " +
               std::to_string(profile.expected_length)});
    } else if (ranking.size() > profile.expected_length) {
      report.errors.push_back(
          {topic, "long ranking",
           "ranking has " + std::to_string(ranking.size()) + " items, limit " +
               std::to_string(profile.expected_length)});
    }
    if (meta != nullptr) check_pages_known(topic, ranking, *meta, report);
  }
  return report;
}

ValidationReport validate_run(const Task2Run& run, const TaskProfile& profile,
                              const Qrels& qrels, const MetadataTable* meta) {
  ValidationReport report;
  check_common(run.topic_order, qrels, report);
  for (TopicId topic : run.topic_order) {
    const auto& reps = run.rankings.at(topic);
    if (profile.expected_reps > 0 &&
        reps.size() < static_cast<std::size_t>(profile.expected_reps)) {
      report.warnings.push_back({topic, "missing repetition",
                                 "topic has " + std::to_string(reps.size()) +
                                     " rankings, expected " +
                                     std::to_string(profile.expected_reps)});
    }
    for (const auto& [rep, ranking] : reps) {
      if (ranking.size() < profile.expected_length) {
        report.warnings.push_back(
            {topic, "short ranking",
             "rep " + std::to_string(rep) + " has " + std::to_string(ranking.size()) +
                 " items, expected " + std::to_string(profile.expected_length)});
      } else if (ranking.size() > profile.expected_length) {
        report.errors.push_back(
            {topic, "long ranking",
             "rep " + std::to_string(rep) + " has " + std::to_string(ranking.size()) +
                 " items, limit " + std::to_string(profile.expected_length)});
      }
      if (meta != nullptr) check_pages_known(topic, ranking, *meta, report);
    }
  }
  return report;
}

std::set<std::pair<TopicId, PageId>> build_assessment_pool(
    const std::vector<Task1Run>& task1_runs, const std::vector<Task2Run>& task2_runs,
    const TierSpec& tiers) {
  std::set<std::pair<TopicId, PageId>> pool;
  for (const auto& run : task1_runs) {
    for (const auto& [topic, ranking] : run.rankings) {
      std::size_t depth = std::min(tiers.task1_depth, ranking.size());
      for (std::size_t i = 0; i < depth; ++i) pool.emplace(topic, ranking[i]);
    }
  }
  for (const auto& run : task2_runs) {
    for (const auto& [topic, reps] : run.rankings) {
      std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(tiers.task2_reps),
                                               reps.size());
      for (std::size_t r = 0; r < take; ++r) {
        const auto& ranking = reps[r].second;
        std::size_t depth = std::min(tiers.task2_depth, ranking.size());
        for (std::size_t i = 0; i < depth; ++i) pool.emplace(topic, ranking[i]);
      }
    }
  }
  return pool;
}

void save_pool(const std::set<std::pair<TopicId, PageId>>& pool, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  for (const auto& [topic, page] : pool) {
    out << topic << '\t' << page << '\n';
  }
}

}  // namespace fareval
