#include "fareval/reporting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fareval/parallel.hpp"

namespace fareval {

namespace {

// splitmix64; used both to derive per-resample seeds and as the draw
// generator so intervals are identical for any worker count or platform.
struct SplitMix64 {
  std::uint64_t state;
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

double resample_statistic(std::span<const double> values, Statistic statistic,
                          std::uint64_t seed) {
  SplitMix64 rng{seed};
  const std::size_t n = values.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum += values[rng.next() % n];
  }
  return statistic == Statistic::Mean ? sum / static_cast<double>(n) : sum;
}

// Linear interpolation between closest order statistics.
double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_csv_double(const std::string& s, const std::string& path) {
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw std::runtime_error(path + ": non-numeric CSV field: " + s);
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  return out;
}

}  // namespace

std::pair<double, double> bootstrap_ci(std::span<const double> values,
                                       const BootstrapConfig& config, Statistic statistic,
                                       Exec exec) {
  if (values.size() < 2) {
    throw std::invalid_argument("bootstrap_ci: need at least 2 per-topic values");
  }
  if (config.resamples < 1) {
    throw std::invalid_argument("bootstrap_ci: resamples must be positive");
  }
  if (!(config.level > 0.0 && config.level < 1.0)) {
    throw std::invalid_argument("bootstrap_ci: level must be in (0,1)");
  }
  std::vector<double> stats(static_cast<std::size_t>(config.resamples));
  parallel_for_each(stats.size(), exec, [&](std::size_t r) {
    SplitMix64 seeder{config.seed + 0x632be59bd9b4e019ULL * (static_cast<std::uint64_t>(r) + 1)};
    stats[r] = resample_statistic(values, statistic, seeder.next());
  });
  std::sort(stats.begin(), stats.end());
  const double alpha = 1.0 - config.level;
  return {quantile_sorted(stats, alpha / 2.0), quantile_sorted(stats, 1.0 - alpha / 2.0)};
}

std::vector<Task1Summary> make_leaderboard(std::vector<Task1Summary> rows) {
  std::sort(rows.begin(), rows.end(), [](const Task1Summary& a, const Task1Summary& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.run_name < b.run_name;
  });
  return rows;
}

std::vector<Task2Summary> make_leaderboard(std::vector<Task2Summary> rows) {
  std::sort(rows.begin(), rows.end(), [](const Task2Summary& a, const Task2Summary& b) {
    if (a.ee_l != b.ee_l) return a.ee_l < b.ee_l;
    return a.run_name < b.run_name;
  });
  return rows;
}

std::string format_double(double value, int digits) {
  char buf[64];
  if (digits <= 0) digits = 17;
  std::snprintf(buf, sizeof(buf), "%.*g", digits, value);
  return buf;
}

void write_task1_topic_csv(const Task1Result& result, const std::string& path, int digits) {
  auto out = open_out(path);
  out << "run_name,topic_id,ndcg,awrf,score\n";
  for (const auto& t : result.topics) {
    out << result.run_name << ',' << t.topic_id << ',' << format_double(t.ndcg, digits) << ','
        << format_double(t.awrf, digits) << ',' << format_double(t.score, digits) << '\n';
  }
}

void write_task1_aggregate_csv(const std::vector<Task1Summary>& rows, const std::string& path,
                               int digits) {
  auto out = open_out(path);
  out << "run_name,ndcg,awrf,score,ci_lo,ci_hi\n";
  for (const auto& r : rows) {
    out << r.run_name << ',' << format_double(r.ndcg, digits) << ','
        << format_double(r.awrf, digits) << ',' << format_double(r.score, digits) << ','
        << format_double(r.ci_lo, digits) << ',' << format_double(r.ci_hi, digits) << '\n';
  }
}

void write_task2_topic_csv(const Task2Result& result, const std::string& path, int digits) {
  auto out = open_out(path);
  out << "run_name,topic_id,ee_r,ee_d,ee_l\n";
  for (const auto& t : result.topics) {
    out << result.run_name << ',' << t.topic_id << ',' << format_double(t.ee_r, digits) << ','
        << format_double(t.ee_d, digits) << ',' << format_double(t.ee_l, digits) << '\n';
  }
}

void write_task2_aggregate_csv(const std::vector<Task2Summary>& rows, const std::string& path,
                               int digits) {
  auto out = open_out(path);
  out << "run_name,ee_r,ee_d,ee_l,ee_l_ci_lo,ee_l_ci_hi\n";
  for (const auto& r : rows) {
    out << r.run_name << ',' << format_double(r.ee_r, digits) << ','
        << format_double(r.ee_d, digits) << ',' << format_double(r.ee_l, digits) << ','
        << format_double(r.ee_l_ci_lo, digits) << ',' << format_double(r.ee_l_ci_hi, digits)
        << '\n';
  }
}

std::vector<Task1Summary> read_task1_aggregate_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line).size() != 6) {
    throw std::runtime_error(path + ": not a task 1 aggregate CSV");
  }
  std::vector<Task1Summary> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 6) throw std::runtime_error(path + ": malformed CSV row: " + line);
    rows.push_back({f[0], parse_csv_double(f[1], path), parse_csv_double(f[2], path),
                    parse_csv_double(f[3], path), parse_csv_double(f[4], path),
                    parse_csv_double(f[5], path)});
  }
  return rows;
}

std::vector<Task2Summary> read_task2_aggregate_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line).size() != 6) {
    throw std::runtime_error(path + ": not a task 2 aggregate CSV");
  }
  std::vector<Task2Summary> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 6) throw std::runtime_error(path + ": malformed CSV row: " + line);
    rows.push_back({f[0], parse_csv_double(f[1], path), parse_csv_double(f[2], path),
                    parse_csv_double(f[3], path), parse_csv_double(f[4], path),
                    parse_csv_double(f[5], path)});
  }
  return rows;
}

}  // namespace fareval
