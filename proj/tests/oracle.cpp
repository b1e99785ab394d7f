#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oracle {

namespace {

std::vector<double> dense_weights(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 1.0 / std::log2(std::max<double>(static_cast<double>(i + 1), 2.0));
  }
  return w;
}

double entropy_bits(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log2(v);
  }
  return h;
}

}  // namespace

double ndcg(const std::vector<PageId>& ranking,
            const std::unordered_set<PageId>& rel_docs) {
  const auto w = dense_weights(ranking.size());
  std::vector<double> gains(ranking.size(), 0.0);
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    if (rel_docs.count(ranking[i])) gains[i] = 1.0;
  }
  std::vector<double> ideal_gains(ranking.size(), 0.0);
  for (std::size_t i = 0; i < std::min(rel_docs.size(), ranking.size()); ++i) {
    ideal_gains[i] = 1.0;
  }
  double dcg = 0.0, idcg = 0.0;
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    dcg += gains[i] * w[i];
    idcg += ideal_gains[i] * w[i];
  }
  if (idcg <= 0.0) throw std::runtime_error("oracle ndcg: empty ideal");
  return dcg / idcg;
}

std::vector<double> cumulated_attention(const std::vector<PageId>& ranking,
                                        const AlignmentStore& store) {
  const auto w = dense_weights(ranking.size());
  // full pages x 31 matrix, then one explicit vector-matrix product
  std::vector<std::array<double, fareval::kTask1Dims>> matrix;
  matrix.reserve(ranking.size());
  for (PageId p : ranking) matrix.push_back(store.task1_row(p));
  std::vector<double> acc(fareval::kTask1Dims, 0.0);
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    for (int c = 0; c < fareval::kTask1Dims; ++c) {
      acc[static_cast<std::size_t>(c)] += w[i] * matrix[i][static_cast<std::size_t>(c)];
    }
  }
  double mass = 0.0;
  for (double v : acc) mass += v;
  if (!(mass > 0.0)) throw std::runtime_error("oracle attention: zero mass");
  for (double& v : acc) v /= mass;
  return acc;
}

double jensen_shannon(const std::vector<double>& p, const std::vector<double>& q) {
  std::vector<double> m(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) m[i] = 0.5 * (p[i] + q[i]);
  double div = entropy_bits(m) - 0.5 * (entropy_bits(p) + entropy_bits(q));
  return std::clamp(div, 0.0, 1.0);
}

double awrf(const std::vector<PageId>& ranking, const AlignmentStore& store,
            const std::vector<double>& target31) {
  return 1.0 - jensen_shannon(cumulated_attention(ranking, store), target31);
}

std::unordered_map<PageId, double> doc_exposure(
    const std::vector<std::vector<PageId>>& sequence) {
  std::unordered_map<PageId, double> total;
  for (const auto& ranking : sequence) {
    const auto w = dense_weights(ranking.size());
    std::unordered_map<PageId, double> per_ranking;
    for (std::size_t i = 0; i < ranking.size(); ++i) per_ranking[ranking[i]] = w[i];
    for (const auto& [page, value] : per_ranking) total[page] += value;
  }
  for (auto& [page, value] : total) {
    (void)page;
    value /= static_cast<double>(sequence.size());
  }
  return total;
}

std::vector<double> group_exposure(const std::unordered_map<PageId, double>& exposure,
                                   const AlignmentStore& store) {
  std::vector<double> acc(fareval::kCells, 0.0);
  for (const auto& [page, eps] : exposure) {
    const auto row = store.xalign_row(page);
    for (int c = 0; c < fareval::kCells; ++c) {
      acc[static_cast<std::size_t>(c)] += eps * row[static_cast<std::size_t>(c)];
    }
  }
  double total = 0.0;
  for (double v : acc) total += v;
  if (!(total > 0.0)) throw std::runtime_error("oracle group exposure: zero vector");
  for (double& v : acc) v /= total;
  return acc;
}

EE ee_metrics(const std::vector<double>& system, const std::vector<double>& target) {
  EE out{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < system.size(); ++i) {
    out.ee_d += system[i] * system[i];
    out.ee_r += system[i] * target[i];
    const double d = system[i] - target[i];
    out.ee_l += d * d;
  }
  return out;
}

std::array<std::optional<double>, fareval::kWorkLevels> work_level_target_exposure(
    const std::array<std::int64_t, fareval::kWorkLevels>& counts) {
  std::vector<int> ideal_ranking;
  for (int level = 0; level < fareval::kWorkLevels; ++level) {
    for (std::int64_t i = 0; i < counts[static_cast<std::size_t>(level)]; ++i) {
      ideal_ranking.push_back(level);
    }
  }
  if (ideal_ranking.empty()) {
    throw std::runtime_error("oracle work exposure: no documents");
  }
  const auto w = dense_weights(ideal_ranking.size());
  std::array<double, fareval::kWorkLevels> sums{};
  for (std::size_t pos = 0; pos < ideal_ranking.size(); ++pos) {
    sums[static_cast<std::size_t>(ideal_ranking[pos])] += w[pos];
  }
  std::array<std::optional<double>, fareval::kWorkLevels> out{};
  for (int level = 0; level < fareval::kWorkLevels; ++level) {
    const std::int64_t c = counts[static_cast<std::size_t>(level)];
    if (c > 0) {
      out[static_cast<std::size_t>(level)] =
          sums[static_cast<std::size_t>(level)] / static_cast<double>(c);
    }
  }
  return out;
}

}  // namespace oracle
