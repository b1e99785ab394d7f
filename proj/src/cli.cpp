#include "fareval/cli.hpp"

#include <filesystem>
#include <iostream>
#include <optional>
#include <unordered_set>

#include <CLI11.hpp>

#include "fareval/alignment.hpp"
#include "fareval/dataset_io.hpp"
#include "fareval/eval_task1.hpp"
#include "fareval/eval_task2.hpp"
#include "fareval/parallel.hpp"
#include "fareval/reporting.hpp"
#include "fareval/targets.hpp"

namespace fareval {

namespace {

std::string default_run_name(const std::string& run_path) {
  return std::filesystem::path(run_path).stem().string();
}

// scores.csv -> scores.agg.csv
std::string derive_aggregate_path(const std::string& out_path) {
  std::filesystem::path p(out_path);
  std::filesystem::path agg = p.parent_path() / (p.stem().string() + ".agg" + p.extension().string());
  return agg.string();
}

void print_report(const ValidationReport& report) {
  for (const auto& e : report.errors) {
    std::cerr << "error: topic " << e.topic_id << ": [" << e.code << "] " << e.message << '\n';
  }
  for (const auto& w : report.warnings) {
    std::cerr << "warning: topic " << w.topic_id << ": [" << w.code << "] " << w.message << '\n';
  }
}

AlignmentStore load_or_build_store(const std::string& alignments_path,
                                   const MetadataTable& meta) {
  if (!alignments_path.empty()) return AlignmentStore::load(alignments_path);
  return AlignmentStore::build(meta);
}

// Keeps only the assessed pages of each ranking; topics without an
// assessed list are left untouched.
std::unordered_map<TopicId, std::unordered_set<PageId>> assessed_sets(
    const std::vector<Topic>& topics) {
  std::unordered_map<TopicId, std::unordered_set<PageId>> sets;
  for (const auto& t : topics) {
    if (t.assessed_docs.has_value()) {
      sets.emplace(t.id, std::unordered_set<PageId>(t.assessed_docs->begin(),
                                                    t.assessed_docs->end()));
    }
  }
  return sets;
}

void filter_ranking(std::vector<PageId>& ranking, const std::unordered_set<PageId>& keep) {
  std::erase_if(ranking, [&](PageId p) { return keep.count(p) == 0; });
}

struct EvalCommon {
  std::string metadata_path;
  std::string topics_path;
  std::string run_path;
  std::string run_name;
  std::string alignments_path;
  std::string targets_path;
  std::string out_path;
  std::string agg_out_path;
  bool assessed_only = false;
  int digits = 0;
  int threads = 0;
  std::uint64_t seed = 42;
  int resamples = 10000;
  double level = 0.95;
};

void add_eval_options(CLI::App* cmd, EvalCommon& opt) {
  cmd->add_option("--metadata", opt.metadata_path, "Page metadata JSON-lines (optionally gzip)")
      ->required();
  cmd->add_option("--topics", opt.topics_path, "Topics JSON-lines with rel_docs")->required();
  cmd->add_option("--run", opt.run_path, "Run file (TSV)")->required();
  cmd->add_option("--run-name", opt.run_name, "Run label (default: run file stem)");
  cmd->add_option("--alignments", opt.alignments_path,
                  "Prebuilt alignment store (default: build from metadata)");
  cmd->add_option("--targets", opt.targets_path,
                  "Prebuilt target JSON-lines (default: build from inputs)");
  cmd->add_option("--out", opt.out_path, "Per-topic CSV output")->required();
  cmd->add_option("--agg-out", opt.agg_out_path,
                  "Aggregate CSV output (default: <out>.agg.csv)");
  cmd->add_flag("--assessed-only", opt.assessed_only,
                "Truncate rankings to each topic's assessed documents");
  cmd->add_option("--digits", opt.digits, "Significant digits in CSVs (default: 17)");
  cmd->add_option("--threads", opt.threads, "Worker threads (default: OpenMP runtime)");
  cmd->add_option("--seed", opt.seed, "Bootstrap seed");
  cmd->add_option("--resamples", opt.resamples, "Bootstrap resamples");
  cmd->add_option("--level", opt.level, "Confidence level");
}

int eval_task1_command(const EvalCommon& opt) {
  set_thread_count(opt.threads);
  const MetadataTable meta = load_metadata(opt.metadata_path);
  const auto topics = load_topics(opt.topics_path);
  const Qrels qrels = qrels_from_topics(topics);
  const AlignmentStore store = load_or_build_store(opt.alignments_path, meta);

  const std::string run_name =
      opt.run_name.empty() ? default_run_name(opt.run_path) : opt.run_name;
  Task1Run run = load_task1_run(opt.run_path, run_name);

  const ValidationReport report = validate_run(run, kTask1Profile, qrels, &meta);
  print_report(report);
  if (!report.ok()) {
    std::cerr << "run is not evaluable (" << report.errors.size() << " errors)\n";
    return 1;
  }

  if (opt.assessed_only) {
    const auto keep = assessed_sets(topics);
    for (auto& [topic, ranking] : run.rankings) {
      auto it = keep.find(topic);
      if (it != keep.end()) filter_ranking(ranking, it->second);
      else std::cerr << "warning: topic " << topic << " has no assessed list, kept in full\n";
    }
  }

  TargetSet targets;
  if (!opt.targets_path.empty()) {
    targets = load_targets(opt.targets_path);
    if (targets.kind != TargetKind::Task1) {
      std::cerr << "error: " << opt.targets_path << " does not hold task 1 targets\n";
      return 1;
    }
  } else {
    targets = build_task1_targets(qrels, store);
  }

  const Task1Result result = score_task1(run, qrels, store, targets);
  if (!result.dropped.empty()) {
    for (const auto& d : result.dropped) {
      std::cerr << "warning: topic " << d.topic_id << " dropped: " << d.reason << '\n';
    }
    std::cerr << result.dropped.size() << " topic(s) excluded from the aggregate\n";
  }

  const Task1Aggregate agg = aggregate_task1(result);
  std::vector<double> per_topic_scores;
  per_topic_scores.reserve(result.topics.size());
  for (const auto& t : result.topics) per_topic_scores.push_back(t.score);
  BootstrapConfig bc{opt.resamples, opt.level, opt.seed};
  const auto ci = bootstrap_ci(per_topic_scores, bc, Statistic::Mean);

  write_task1_topic_csv(result, opt.out_path, opt.digits);
  const std::string agg_path =
      opt.agg_out_path.empty() ? derive_aggregate_path(opt.out_path) : opt.agg_out_path;
  write_task1_aggregate_csv({{agg.run_name, agg.ndcg, agg.awrf, agg.score, ci.first, ci.second}},
                            agg_path, opt.digits);
  return 0;
}

int eval_task2_command(const EvalCommon& opt, const std::string& aggregate_mode) {
  set_thread_count(opt.threads);
  const MetadataTable meta = load_metadata(opt.metadata_path);
  const auto topics = load_topics(opt.topics_path);
  const Qrels qrels = qrels_from_topics(topics);
  const AlignmentStore store = load_or_build_store(opt.alignments_path, meta);

  const std::string run_name =
      opt.run_name.empty() ? default_run_name(opt.run_path) : opt.run_name;
  Task2Run run = load_task2_run(opt.run_path, run_name);

  const ValidationReport report = validate_run(run, kTask2Profile, qrels, &meta);
  print_report(report);
  if (!report.ok()) {
    std::cerr << "run is not evaluable (" << report.errors.size() << " errors)\n";
    return 1;
  }

  if (opt.assessed_only) {
    const auto keep = assessed_sets(topics);
    for (auto& [topic, reps] : run.rankings) {
      auto it = keep.find(topic);
      if (it == keep.end()) {
        std::cerr << "warning: topic " << topic << " has no assessed list, kept in full\n";
        continue;
      }
      for (auto& [rep, ranking] : reps) {
        (void)rep;
        filter_ranking(ranking, it->second);
      }
    }
  }

  TargetSet targets;
  if (!opt.targets_path.empty()) {
    targets = load_targets(opt.targets_path);
    if (targets.kind != TargetKind::Task2) {
      std::cerr << "error: " << opt.targets_path << " does not hold task 2 targets\n";
      return 1;
    }
  } else {
    targets = build_task2_targets(qrels, store, meta);
  }

  const AggregateMode mode =
      aggregate_mode == "mean" ? AggregateMode::Mean : AggregateMode::Sum;
  const Task2Result result = score_task2(run, qrels, store, targets);
  const Task2Aggregate agg = aggregate_task2(result, mode);

  std::vector<double> per_topic_eel;
  per_topic_eel.reserve(result.topics.size());
  for (const auto& t : result.topics) per_topic_eel.push_back(t.ee_l);
  BootstrapConfig bc{opt.resamples, opt.level, opt.seed};
  const auto ci = bootstrap_ci(per_topic_eel, bc,
                               mode == AggregateMode::Mean ? Statistic::Mean : Statistic::Sum);

  write_task2_topic_csv(result, opt.out_path, opt.digits);
  const std::string agg_path =
      opt.agg_out_path.empty() ? derive_aggregate_path(opt.out_path) : opt.agg_out_path;
  write_task2_aggregate_csv({{agg.run_name, agg.ee_r, agg.ee_d, agg.ee_l, ci.first, ci.second}},
                            agg_path, opt.digits);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Fair-ranking evaluation toolkit: exposure-based metrics for "
               "single rankings (AWRF x nDCG) and ranking sequences (expected exposure)"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from an INI config file");

  // ---- build-alignments ----
  auto* build_align = app.add_subcommand(
      "build-alignments", "Build and serialize the page alignment store");
  std::string ba_metadata, ba_out;
  std::vector<std::string> ba_deny;
  build_align->add_option("--metadata", ba_metadata, "Page metadata JSON-lines")->required();
  build_align->add_option("--out", ba_out, "Output store file")->required();
  build_align->add_option("--deny-gender", ba_deny,
                          "Gender literal to discard (repeatable; default: the known data error)");

  // ---- build-targets ----
  auto* build_targets = app.add_subcommand(
      "build-targets", "Build per-topic target distributions");
  std::string bt_metadata, bt_topics, bt_out, bt_task = "1", bt_alignments;
  int bt_threads = 0;
  build_targets->add_option("--metadata", bt_metadata, "Page metadata JSON-lines")->required();
  build_targets->add_option("--topics", bt_topics, "Topics JSON-lines")->required();
  build_targets->add_option("--task", bt_task, "Target kind: 1, 2, or 2-geo")
      ->check(CLI::IsMember({"1", "2", "2-geo"}));
  build_targets->add_option("--alignments", bt_alignments, "Prebuilt alignment store");
  build_targets->add_option("--out", bt_out, "Output JSON-lines")->required();
  build_targets->add_option("--threads", bt_threads, "Worker threads");

  // ---- eval-task1 / eval-task2 ----
  auto* eval1 = app.add_subcommand("eval-task1", "Score a single-ranking run");
  EvalCommon e1;
  add_eval_options(eval1, e1);

  auto* eval2 = app.add_subcommand("eval-task2", "Score a ranking-sequence run");
  EvalCommon e2;
  std::string e2_aggregate = "sum";
  add_eval_options(eval2, e2);
  eval2->add_option("--aggregate", e2_aggregate, "Aggregate per-topic values by sum or mean")
      ->check(CLI::IsMember({"sum", "mean"}));

  // ---- validate-run ----
  auto* validate = app.add_subcommand("validate-run", "Check a run file against the contract");
  int v_task = 1;
  std::string v_run, v_topics, v_metadata;
  std::size_t v_length = 0;
  int v_reps = -1;
  validate->add_option("--task", v_task, "Task number (1 or 2)")
      ->check(CLI::IsMember({1, 2}))->required();
  validate->add_option("--run", v_run, "Run file")->required();
  validate->add_option("--topics", v_topics, "Topics JSON-lines (supplies the qrels)")->required();
  validate->add_option("--metadata", v_metadata, "Optional metadata for unknown-page warnings");
  validate->add_option("--expected-length", v_length, "Expected ranking length");
  validate->add_option("--expected-reps", v_reps, "Expected rankings per topic (task 2)");

  // ---- build-pool ----
  auto* pool = app.add_subcommand("build-pool", "Build an assessment pool from run prefixes");
  std::vector<std::string> p_task1_runs, p_task2_runs;
  TierSpec p_tiers;
  std::string p_out;
  pool->add_option("--task1-run", p_task1_runs, "Task 1 run file (repeatable)");
  pool->add_option("--task2-run", p_task2_runs, "Task 2 run file (repeatable)");
  pool->add_option("--task1-depth", p_tiers.task1_depth, "Prefix depth for task 1 rankings");
  pool->add_option("--task2-depth", p_tiers.task2_depth, "Prefix depth for task 2 rankings");
  pool->add_option("--task2-reps", p_tiers.task2_reps, "Rankings pooled per task 2 topic");
  pool->add_option("--out", p_out, "Output TSV")->required();

  // ---- leaderboard ----
  auto* board = app.add_subcommand("leaderboard", "Merge aggregate CSVs into a sorted table");
  int l_task = 1;
  std::string l_out;
  int l_digits = 0;
  std::vector<std::string> l_inputs;
  board->add_option("--task", l_task, "Task number (1 or 2)")
      ->check(CLI::IsMember({1, 2}))->required();
  board->add_option("--out", l_out, "Output CSV")->required();
  board->add_option("--digits", l_digits, "Significant digits (default: 17)");
  board->add_option("inputs", l_inputs, "Aggregate CSV files")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (build_align->parsed()) {
      const MetadataTable meta = load_metadata(ba_metadata);
      GenderRules rules;
      if (!ba_deny.empty()) rules.deny = ba_deny;
      AlignmentStore::build(meta, rules).save(ba_out);
      return 0;
    }
    if (build_targets->parsed()) {
      set_thread_count(bt_threads);
      const MetadataTable meta = load_metadata(bt_metadata);
      const Qrels qrels = qrels_from_topics(load_topics(bt_topics));
      const AlignmentStore store = load_or_build_store(bt_alignments, meta);
      TargetSet targets;
      if (bt_task == "1") targets = build_task1_targets(qrels, store);
      else if (bt_task == "2") targets = build_task2_targets(qrels, store, meta);
      else targets = build_task2_geo_targets(qrels, store, meta);
      save_targets(targets, bt_out);
      return 0;
    }
    if (eval1->parsed()) return eval_task1_command(e1);
    if (eval2->parsed()) return eval_task2_command(e2, e2_aggregate);
    if (validate->parsed()) {
      const Qrels qrels = qrels_from_topics(load_topics(v_topics));
      MetadataTable meta;
      const MetadataTable* meta_ptr = nullptr;
      if (!v_metadata.empty()) {
        meta = load_metadata(v_metadata);
        meta_ptr = &meta;
      }
      ValidationReport report;
      if (v_task == 1) {
        TaskProfile profile = kTask1Profile;
        if (v_length > 0) profile.expected_length = v_length;
        report = validate_run(load_task1_run(v_run, default_run_name(v_run)), profile, qrels,
                              meta_ptr);
      } else {
        TaskProfile profile = kTask2Profile;
        if (v_length > 0) profile.expected_length = v_length;
        if (v_reps >= 0) profile.expected_reps = v_reps;
        report = validate_run(load_task2_run(v_run, default_run_name(v_run)), profile, qrels,
                              meta_ptr);
      }
      print_report(report);
      std::cerr << report.errors.size() << " error(s), " << report.warnings.size()
                << " warning(s)\n";
      // strict: any deviation from the task contract fails validation
      if (!report.errors.empty()) return 1;
      return report.warnings.empty() ? 0 : 2;
    }
    if (pool->parsed()) {
      std::vector<Task1Run> t1;
      std::vector<Task2Run> t2;
      for (const auto& p : p_task1_runs) t1.push_back(load_task1_run(p, default_run_name(p)));
      for (const auto& p : p_task2_runs) t2.push_back(load_task2_run(p, default_run_name(p)));
      save_pool(build_assessment_pool(t1, t2, p_tiers), p_out);
      return 0;
    }
    if (board->parsed()) {
      if (l_task == 1) {
        std::vector<Task1Summary> rows;
        for (const auto& p : l_inputs) {
          auto part = read_task1_aggregate_csv(p);
          rows.insert(rows.end(), part.begin(), part.end());
        }
        write_task1_aggregate_csv(make_leaderboard(std::move(rows)), l_out, l_digits);
      } else {
        std::vector<Task2Summary> rows;
        for (const auto& p : l_inputs) {
          auto part = read_task2_aggregate_csv(p);
          rows.insert(rows.end(), part.begin(), part.end());
        }
        write_task2_aggregate_csv(make_leaderboard(std::move(rows)), l_out, l_digits);
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  std::cerr << "error: no subcommand given\n";
  return 1;
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args;
  args.reserve(static_cast<std::size_t>(argc > 0 ? argc - 1 : 0));
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args);
}

}  // namespace fareval
