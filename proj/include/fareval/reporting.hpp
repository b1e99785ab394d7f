#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fareval/eval_task1.hpp"
#include "fareval/eval_task2.hpp"
#include "fareval/types.hpp"

namespace fareval {

struct BootstrapConfig {
  int resamples = 10000;
  double level = 0.95;
  std::uint64_t seed = 42;
};

enum class Statistic { Mean, Sum };

// Percentile bootstrap over topics: resample with replacement, recompute
// the statistic, take the empirical (alpha/2, 1-alpha/2) quantiles.
// Each resample draws from its own seed-derived generator, so the result
// does not depend on thread count. Requires >= 2 values.
std::pair<double, double> bootstrap_ci(std::span<const double> values,
                                       const BootstrapConfig& config, Statistic statistic,
                                       Exec exec = Exec::Parallel);

struct Task1Summary {
  std::string run_name;
  double ndcg = 0.0;
  double awrf = 0.0;
  double score = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

struct Task2Summary {
  std::string run_name;
  double ee_r = 0.0;
  double ee_d = 0.0;
  double ee_l = 0.0;
  double ee_l_ci_lo = 0.0;
  double ee_l_ci_hi = 0.0;
};

// Task 1 sorts descending by score, Task 2 ascending by EE-L; ties break
// alphabetically by run name.
std::vector<Task1Summary> make_leaderboard(std::vector<Task1Summary> rows);
std::vector<Task2Summary> make_leaderboard(std::vector<Task2Summary> rows);

// Shortest-of-%.{digits}g rendering; digits <= 0 means full precision
// (17 significant digits).
std::string format_double(double value, int digits = 0);

// CSV writers. Headers:
//   per-topic T1:  run_name,topic_id,ndcg,awrf,score
//   aggregate T1:  run_name,ndcg,awrf,score,ci_lo,ci_hi
//   per-topic T2:  run_name,topic_id,ee_r,ee_d,ee_l
//   aggregate T2:  run_name,ee_r,ee_d,ee_l,ee_l_ci_lo,ee_l_ci_hi
void write_task1_topic_csv(const Task1Result& result, const std::string& path, int digits = 0);
void write_task1_aggregate_csv(const std::vector<Task1Summary>& rows, const std::string& path,
                               int digits = 0);
void write_task2_topic_csv(const Task2Result& result, const std::string& path, int digits = 0);
void write_task2_aggregate_csv(const std::vector<Task2Summary>& rows, const std::string& path,
                               int digits = 0);

std::vector<Task1Summary> read_task1_aggregate_csv(const std::string& path);
std::vector<Task2Summary> read_task2_aggregate_csv(const std::string& path);

}  // namespace fareval
