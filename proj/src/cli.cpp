#include "newsxlt/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "newsxlt/config.hpp"
#include "newsxlt/embeddings.hpp"
#include "newsxlt/error.hpp"
#include "newsxlt/eval.hpp"
#include "newsxlt/formats.hpp"
#include "newsxlt/parallel.hpp"
#include "newsxlt/pipeline.hpp"
#include "newsxlt/sampler.hpp"

namespace newsxlt::cli {
namespace {

namespace fs = std::filesystem;

struct Common {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool dry_run = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "Random seed");
  cmd->add_option("--threads", c.threads, "Worker threads (default: available parallelism)")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--dry-run", c.dry_run, "Compute and report without writing output files");
}

AppConfig base_config(const Common& c) { return c.config ? load_config(*c.config) : AppConfig{}; }

unsigned threads_of(const Common& c) { return c.threads.value_or(default_threads()); }

template <typename T>
void apply(T& target, const std::optional<T>& flag) {
  if (flag) target = *flag;
}

std::string path_or(const std::optional<std::string>& flag, const AppConfig& cfg, const char* io_key) {
  if (flag) return *flag;
  auto it = cfg.io.paths.find(io_key);
  return it == cfg.io.paths.end() ? std::string() : it->second;
}

std::string require_path(const std::optional<std::string>& flag, const AppConfig& cfg, const char* io_key,
                         const char* flag_name) {
  std::string p = path_or(flag, cfg, io_key);
  if (p.empty()) throw Error(std::string("missing required path ") + flag_name);
  return p;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open input file " + path);
  return in;
}

template <typename WriteFn>
void write_file(const std::string& path, WriteFn&& fn) {
  if (const auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open output file " + path);
  fn(out);
  out.flush();
  if (!out) throw Error("write failure on " + path);
}

void write_text(const std::string& path, const std::string& text) {
  write_file(path, [&](std::ostream& out) { out << text; });
}

// "lang=path" pairs; a bare path uses its file stem as the language.
TablesByLanguage load_tables(const std::vector<std::string>& specs) {
  TablesByLanguage tables;
  for (const auto& spec : specs) {
    const auto eq = spec.find('=');
    const std::string path = eq == std::string::npos ? spec : spec.substr(eq + 1);
    const std::string lang = eq == std::string::npos ? fs::path(spec).stem().string() : spec.substr(0, eq);
    if (!is_valid_language_tag(lang)) throw Error("malformed language tag '" + lang + "' in --embeddings");
    if (!tables.emplace(lang, load_embeddings(path)).second)
      throw Error("language " + lang + " given twice in --embeddings");
  }
  if (tables.empty()) throw Error("no --embeddings given");
  return tables;
}

std::vector<Impression> load_behaviors(const std::string& path, bool validation_day_only) {
  auto in = open_in(path);
  auto behaviors = parse_behaviors_tsv(in);
  if (validation_day_only) behaviors = split_by_day(behaviors).second;
  return behaviors;
}

LidLabels load_labels(const std::string& path) {
  auto in = open_in(path);
  LidLabels labels;
  for (auto& [id, lang] : parse_lid_labels(in)) labels[id] = lang;
  return labels;
}

// ---------------------------------------------------------------- commands

struct BuildCorpusArgs {
  Common common;
  std::optional<std::string> input, output, stats, lid_labels;
  std::string kind = "news";
  std::optional<double> threshold;
  std::optional<std::size_t> min_letters;
};

int cmd_build_corpus(const BuildCorpusArgs& a, std::ostream& out) {
  AppConfig cfg = base_config(a.common);
  apply(cfg.pipeline.seed, a.common.seed);
  apply(cfg.pipeline.near_dup_threshold, a.threshold);
  apply(cfg.pipeline.min_letters, a.min_letters);
  cfg.validate();
  const std::string input = require_path(a.input, cfg, "input", "--input");
  const std::string output = path_or(a.output, cfg, "output");
  const std::string stats_path = path_or(a.stats, cfg, "stats");
  if (!a.common.dry_run && output.empty()) throw Error("missing required path --output");

  std::optional<LidLabels> labels;
  if (const auto p = path_or(a.lid_labels, cfg, "lid_labels"); !p.empty()) labels = load_labels(p);
  const NewsParseOptions opts{cfg.pipeline.sources};
  const unsigned threads = threads_of(a.common);

  auto in = open_in(input);
  PipelineStats stats;
  std::string payload;
  std::size_t before = 0, after = 0;
  if (a.kind == "news") {
    const Corpus corpus = parse_news_jsonl(in, opts);
    auto result = run_pipeline(corpus, cfg.pipeline, labels ? &*labels : nullptr, threads);
    std::ostringstream ss;
    write_news_jsonl(result.corpus.items(), ss);
    payload = ss.str();
    before = corpus.size();
    after = result.corpus.size();
    stats = std::move(result.stats);
  } else if (a.kind == "parallel") {
    const auto pairs = parse_parallel_jsonl(in, opts);
    auto result = run_parallel_pipeline(pairs, cfg.pipeline, labels ? &*labels : nullptr, threads);
    std::ostringstream ss;
    write_parallel_jsonl(result.pairs, ss);
    payload = ss.str();
    before = pairs.size();
    after = result.pairs.size();
    stats = std::move(result.stats);
  } else {
    throw Error("--kind must be 'news' or 'parallel'");
  }
  if (labels == std::nullopt) spdlog::warn("no LID labels given; language-ID filter passed every item through");
  if (stats.lid_unknown_ids) spdlog::warn("{} LID labels name unknown ids", stats.lid_unknown_ids);
  spdlog::info("build-corpus: {} -> {} items", before, after);

  const std::string stats_json = stats.to_json();
  if (a.common.dry_run) {
    out << stats_json << '\n';
    return kOk;
  }
  write_text(output, payload);
  if (!stats_path.empty()) write_text(stats_path, stats_json + "\n");
  return kOk;
}

struct CorpusStatsArgs {
  Common common;
  std::optional<std::string> input, output;
  std::string kind = "news";
};

int cmd_corpus_stats(const CorpusStatsArgs& a, std::ostream& out) {
  AppConfig cfg = base_config(a.common);
  const std::string input = require_path(a.input, cfg, "input", "--input");
  auto in = open_in(input);
  struct Acc {
    std::size_t count = 0;
    std::size_t chars = 0;
    std::size_t min = SIZE_MAX, max = 0;
    std::map<std::string, std::size_t> sources;
    void add(const NewsText& t) {
      ++count;
      chars += t.char_len;
      min = std::min(min, t.char_len);
      max = std::max(max, t.char_len);
      ++sources[t.source];
    }
  };
  std::map<std::string, Acc> acc;
  std::size_t total = 0;
  const NewsParseOptions opts{cfg.pipeline.sources};
  if (a.kind == "news") {
    for (const auto& t : parse_news_jsonl(in, opts).items()) acc[t.key.tag()].add(t);
  } else if (a.kind == "parallel") {
    for (const auto& p : parse_parallel_jsonl(in, opts)) acc[pair_tag(p.pair_key())].add(p.src);
  } else {
    throw Error("--kind must be 'news' or 'parallel'");
  }
  nlohmann::ordered_json root, keys = nlohmann::ordered_json::object();
  for (const auto& [key, s] : acc) {
    total += s.count;
    keys[key] = {{"count", s.count},
                 {"mean_chars", static_cast<double>(s.chars) / static_cast<double>(s.count)},
                 {"min_chars", s.min},
                 {"max_chars", s.max},
                 {"sources", s.sources}};
  }
  root["total"] = total;
  root["keys"] = acc.size();
  root["per_key"] = keys;
  const std::string text = root.dump(2) + "\n";
  const std::string output = path_or(a.output, cfg, "stats_output");
  if (output.empty() || a.common.dry_run)
    out << text;
  else
    write_text(output, text);
  return kOk;
}

struct SampleExportArgs {
  Common common;
  std::optional<std::string> mono, parallel, output, mode;
  std::optional<std::size_t> n, min_count, batch_size;
  std::optional<double> alpha, ratio, phase_split;
};

int cmd_sample_export(const SampleExportArgs& a, std::ostream& out) {
  AppConfig cfg = base_config(a.common);
  auto& s = cfg.sampler;
  apply(s.seed, a.common.seed);
  apply(s.n_examples, a.n);
  apply(s.min_count, a.min_count);
  apply(s.batch_size, a.batch_size);
  apply(s.alpha, a.alpha);
  apply(s.deletion_ratio, a.ratio);
  apply(s.phase_split, a.phase_split);
  if (a.mode) s.mode = parse_sample_mode(*a.mode);
  cfg.validate();

  const NewsParseOptions opts{cfg.pipeline.sources};
  Corpus mono;
  std::vector<ParallelPair> parallel;
  if (const auto p = path_or(a.mono, cfg, "mono"); !p.empty()) {
    auto in = open_in(p);
    mono = parse_news_jsonl(in, opts);
  }
  if (const auto p = path_or(a.parallel, cfg, "parallel"); !p.empty()) {
    auto in = open_in(p);
    parallel = parse_parallel_jsonl(in, opts);
  }
  const auto schedule = schedule_examples(mono, parallel, s);
  spdlog::info("sample-export: {} examples in {} batches (mode {})", schedule.examples.size(),
               schedule.batch_objectives.size(), to_string(s.mode));
  if (a.common.dry_run) {
    out << schedule.examples.size() << " examples\n";
    return kOk;
  }
  const std::string output = require_path(a.output, cfg, "output", "--output");
  write_file(output, [&](std::ostream& o) { write_seq2seq_jsonl(schedule.examples, o); });
  return kOk;
}

struct EvalArgs {
  Common common;
  std::optional<std::string> behaviors, source_language, cold_policy, report_json, report_csv;
  std::vector<std::string> embeddings, targets;
  std::optional<std::size_t> max_history;
  bool validation_day = false;
  bool normalize = false;
};

void apply_eval(AppConfig& cfg, const EvalArgs& a) {
  apply(cfg.eval.source_language, a.source_language);
  apply(cfg.eval.max_history, a.max_history);
  if (a.cold_policy) cfg.eval.cold_policy = parse_cold_policy(*a.cold_policy);
  if (!a.targets.empty()) cfg.eval.target_languages = a.targets;
  cfg.validate();
}

int cmd_validate_embeddings(const EvalArgs& a, std::ostream& out) {
  AppConfig cfg = base_config(a.common);
  const auto behaviors = load_behaviors(require_path(a.behaviors, cfg, "behaviors", "--behaviors"), false);
  const auto tables = load_tables(a.embeddings);
  const auto missing = find_missing_ids(behaviors, tables);
  std::size_t total = 0;
  for (const auto& [lang, table] : tables) {
    auto it = missing.find(lang);
    const std::size_t m = it == missing.end() ? 0 : it->second.size();
    total += m;
    out << fmt::format("{}: {} vectors, dim {}, {} missing\n", lang, table.size(), table.dim(), m);
    if (it != missing.end())
      for (const auto& id : it->second) out << "  missing " << id << '\n';
  }
  out << fmt::format("total: {} missing\n", total);
  return total ? kCoverage : kOk;
}

int cmd_evaluate(const EvalArgs& a, std::ostream& out) {
  AppConfig cfg = base_config(a.common);
  apply_eval(cfg, a);
  const auto behaviors = load_behaviors(require_path(a.behaviors, cfg, "behaviors", "--behaviors"), a.validation_day);
  TablesByLanguage tables = load_tables(a.embeddings);
  if (!tables.count(cfg.eval.source_language))
    throw Error("source language '" + cfg.eval.source_language + "' has no --embeddings entry");
  if (!cfg.eval.target_languages.empty()) {
    TablesByLanguage subset;
    subset.emplace(cfg.eval.source_language, tables.at(cfg.eval.source_language));
    for (const auto& t : cfg.eval.target_languages) {
      auto it = tables.find(t);
      if (it == tables.end()) throw Error("target language '" + t + "' has no --embeddings entry");
      subset.emplace(t, it->second);
    }
    tables = std::move(subset);
  }
  if (a.normalize)
    for (auto& [_, t] : tables) t = l2_normalize(t);

  const EvalOptions opts{cfg.eval.max_history, cfg.eval.cold_policy, threads_of(a.common)};
  const EvalReport report = run_xlt_eval(behaviors, tables, cfg.eval.source_language, opts);
  out << report.to_table();
  if (report.cold_count) spdlog::warn("{} impressions had an empty click history", report.cold_count);
  if (a.common.dry_run) return kOk;
  if (const auto p = path_or(a.report_json, cfg, "report_json"); !p.empty()) write_text(p, report.to_json() + "\n");
  if (const auto p = path_or(a.report_csv, cfg, "report_csv"); !p.empty()) write_text(p, report.to_csv());
  return kOk;
}

struct SelectArgs {
  EvalArgs eval;
  std::vector<std::string> checkpoints, languages;
  std::optional<std::string> output;
};

int cmd_select_checkpoint(const SelectArgs& a, std::ostream& out) {
  AppConfig cfg = base_config(a.eval.common);
  apply_eval(cfg, a.eval);
  const auto behaviors =
      load_behaviors(require_path(a.eval.behaviors, cfg, "behaviors", "--behaviors"), a.eval.validation_day);
  if (a.checkpoints.empty()) throw Error("no --checkpoint directories given");
  for (const auto& l : a.languages)
    if (!is_valid_language_tag(l)) throw Error("malformed language tag '" + l + "'");
  std::vector<Checkpoint> ckpts;
  for (const auto& dir : a.checkpoints) {
    ckpts.push_back(load_checkpoint_dir(dir));
    if (a.eval.normalize)
      for (auto& [_, t] : ckpts.back().tables) t = l2_normalize(t);
  }
  const EvalOptions opts{cfg.eval.max_history, cfg.eval.cold_policy, threads_of(a.eval.common)};
  const auto sel = checkpoint_select(ckpts, behaviors, a.languages, opts);

  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : sel.rows) {
    out << fmt::format("{:<24} mean nDCG@10 {:.4f}", row.id, row.mean);
    for (const auto& [lang, v] : row.ndcg10) out << fmt::format("  {} {:.4f}", lang, v);
    out << '\n';
    rows.push_back({{"id", row.id}, {"mean_ndcg10", row.mean}, {"ndcg10", row.ndcg10}});
  }
  out << "best: " << sel.best_id << '\n';
  if (const auto p = path_or(a.output, cfg, "selection_output"); !p.empty() && !a.eval.common.dry_run)
    write_text(p, nlohmann::ordered_json{{"best", sel.best_id}, {"checkpoints", rows}}.dump(2) + "\n");
  return kOk;
}

struct FewShotArgs {
  Common common;
  std::optional<std::string> behaviors, output, tuples_output;
  std::size_t n = 0;
  std::optional<std::size_t> negatives;
  bool train_split = false;
};

int cmd_fewshot(const FewShotArgs& a, std::ostream& out) {
  AppConfig cfg = base_config(a.common);
  auto behaviors = load_behaviors(require_path(a.behaviors, cfg, "behaviors", "--behaviors"), false);
  if (a.train_split) behaviors = split_by_day(behaviors).first;
  const std::string tuples_path = path_or(a.tuples_output, cfg, "tuples_output");
  std::optional<std::size_t> negatives = a.negatives;
  if (!negatives && !tuples_path.empty()) negatives = 4;
  const auto result = fewshot_export(behaviors, a.n, a.common.seed.value_or(0), negatives);
  if (a.common.dry_run) {
    out << result.impressions.size() << " impressions, " << result.tuples.size() << " training tuples\n";
    return kOk;
  }
  const std::string output = require_path(a.output, cfg, "output", "--output");
  write_file(output, [&](std::ostream& o) { write_behaviors_tsv(result.impressions, o); });
  if (negatives) {
    if (tuples_path.empty()) throw Error("--negatives needs --tuples-output (or io.tuples_output)");
    write_file(tuples_path, [&](std::ostream& o) { write_training_tuples(result.tuples, o); });
  }
  return kOk;
}

spdlog::level::level_enum log_level_from_env() {
  const char* v = std::getenv("NEWSXLT_LOG");
  if (!v) return spdlog::level::warn;
  const std::string s(v);
  if (s == "error") return spdlog::level::err;
  if (s == "info") return spdlog::level::info;
  if (s == "debug") return spdlog::level::debug;
  return spdlog::level::warn;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto logger = std::make_shared<spdlog::logger>("newsxlt", sink);
  logger->set_pattern("[%l] %v");
  logger->set_level(log_level_from_env());
  auto previous = spdlog::default_logger();
  spdlog::set_default_logger(logger);
  struct Restore {
    std::shared_ptr<spdlog::logger> prev;
    ~Restore() { spdlog::set_default_logger(prev); }
  } restore{previous};

  CLI::App app{"Multilingual news corpus building, seq2seq data export and cross-lingual recommendation evaluation",
               "newsxlt"};
  app.require_subcommand(1);

  BuildCorpusArgs build;
  auto* c_build = app.add_subcommand("build-corpus", "Clean and de-duplicate a news or parallel JSONL corpus");
  add_common(c_build, build.common);
  c_build->add_option("--input", build.input, "Input JSONL");
  c_build->add_option("--output", build.output, "Cleaned JSONL");
  c_build->add_option("--stats", build.stats, "Stage statistics JSON");
  c_build->add_option("--kind", build.kind, "news | parallel")->check(CLI::IsMember({"news", "parallel"}));
  c_build->add_option("--lid-labels", build.lid_labels, "TSV of id<TAB>iso639_3 predictions");
  c_build->add_option("--near-dup-threshold", build.threshold, "MinHash Jaccard threshold");
  c_build->add_option("--min-letters", build.min_letters, "Minimum letters for script classification");

  CorpusStatsArgs cstats;
  auto* c_stats = app.add_subcommand("corpus-stats", "Per language-script counts and length statistics");
  add_common(c_stats, cstats.common);
  c_stats->add_option("--input", cstats.input, "Input JSONL");
  c_stats->add_option("--output", cstats.output, "Statistics JSON (default: stdout)");
  c_stats->add_option("--kind", cstats.kind, "news | parallel")->check(CLI::IsMember({"news", "parallel"}));

  SampleExportArgs sample;
  auto* c_sample = app.add_subcommand("sample-export", "Generate seq2seq DAE/MT training examples");
  add_common(c_sample, sample.common);
  c_sample->add_option("--mono", sample.mono, "Monolingual news JSONL");
  c_sample->add_option("--parallel", sample.parallel, "Parallel JSONL");
  c_sample->add_option("--output", sample.output, "Seq2seq JSONL");
  c_sample->add_option("--mode", sample.mode, "dae | mt | dae_plus_mt | dae_then_mt");
  c_sample->add_option("-n,--n", sample.n, "Number of examples");
  c_sample->add_option("--alpha", sample.alpha, "Smoothing exponent");
  c_sample->add_option("--ratio", sample.ratio, "Token deletion ratio");
  c_sample->add_option("--min-count", sample.min_count, "Minimum texts per language or pair");
  c_sample->add_option("--phase-split", sample.phase_split, "DAE share for dae_then_mt");
  c_sample->add_option("--batch-size", sample.batch_size, "Units per batch");

  auto add_eval_options = [](CLI::App* cmd, EvalArgs& e, bool with_embeddings) {
    add_common(cmd, e.common);
    cmd->add_option("--behaviors", e.behaviors, "MIND behaviors TSV");
    if (with_embeddings) cmd->add_option("--embeddings", e.embeddings, "lang=path embedding table (repeatable)");
    cmd->add_option("--max-history", e.max_history, "Most recent clicks kept per user");
    cmd->add_option("--cold-policy", e.cold_policy, "error | zero");
    cmd->add_flag("--validation-day", e.validation_day, "Only use impressions from the last day");
    cmd->add_flag("--normalize", e.normalize, "L2-normalize embeddings (cosine scoring)");
  };

  EvalArgs validate;
  auto* c_validate = app.add_subcommand("validate-embeddings", "Check embedding coverage of a behaviors log");
  add_common(c_validate, validate.common);
  c_validate->add_option("--behaviors", validate.behaviors, "MIND behaviors TSV");
  c_validate->add_option("--embeddings", validate.embeddings, "lang=path embedding table (repeatable)");

  EvalArgs evaluate;
  auto* c_eval = app.add_subcommand("evaluate", "Late-fusion cross-lingual recommendation evaluation");
  add_eval_options(c_eval, evaluate, true);
  c_eval->add_option("--source-language", evaluate.source_language, "Source language tag");
  c_eval->add_option("--targets", evaluate.targets, "Target language tags (default: all others)");
  c_eval->add_option("--report-json", evaluate.report_json, "Report JSON path");
  c_eval->add_option("--report-csv", evaluate.report_csv, "Report CSV path");

  SelectArgs select;
  auto* c_select = app.add_subcommand("select-checkpoint", "Pick the checkpoint with the best mean nDCG@10");
  add_eval_options(c_select, select.eval, false);
  c_select->add_option("--checkpoint", select.checkpoints, "Checkpoint directory (repeatable, in order)");
  c_select->add_option("--languages", select.languages, "Languages to average (default: all in first checkpoint)");
  c_select->add_option("--output", select.output, "Selection JSON");

  FewShotArgs fewshot;
  auto* c_fewshot = app.add_subcommand("fewshot-export", "Subsample impressions for few-shot training");
  add_common(c_fewshot, fewshot.common);
  c_fewshot->add_option("--behaviors", fewshot.behaviors, "MIND behaviors TSV");
  c_fewshot->add_option("-n,--n", fewshot.n, "Number of impressions")->required();
  c_fewshot->add_option("--output", fewshot.output, "Subsampled behaviors TSV");
  c_fewshot->add_option("--negatives", fewshot.negatives, "Negatives per positive for training tuples (default 4)");
  c_fewshot->add_option("--tuples-output", fewshot.tuples_output, "Training tuples TSV");
  c_fewshot->add_flag("--train-split", fewshot.train_split, "Sample only from days before the last one");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageOrIo;
  }

  try {
    if (c_build->parsed()) return cmd_build_corpus(build, out);
    if (c_stats->parsed()) return cmd_corpus_stats(cstats, out);
    if (c_sample->parsed()) return cmd_sample_export(sample, out);
    if (c_validate->parsed()) return cmd_validate_embeddings(validate, out);
    if (c_eval->parsed()) return cmd_evaluate(evaluate, out);
    if (c_select->parsed()) return cmd_select_checkpoint(select, out);
    if (c_fewshot->parsed()) return cmd_fewshot(fewshot, out);
  } catch (const CoverageError& e) {
    err << "error: " << e.what() << '\n';
    return kCoverage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsageOrIo;
  }
  return kUsageOrIo;
}

}  // namespace newsxlt::cli
