#include "newsxlt/eval.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <ostream>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "newsxlt/parallel.hpp"
#include "newsxlt/rng.hpp"
#include "newsxlt/text.hpp"

namespace newsxlt {

const char* metric_name(Metric m) noexcept {
  switch (m) {
    case Metric::auc: return "auc";
    case Metric::mrr: return "mrr";
    case Metric::ndcg5: return "ndcg@5";
    case Metric::ndcg10: return "ndcg@10";
  }
  return "?";
}

std::map<std::string, std::vector<std::string>> find_missing_ids(const std::vector<Impression>& behaviors,
                                                                 const TablesByLanguage& tables) {
  std::set<std::string> needed;
  for (const auto& imp : behaviors) {
    needed.insert(imp.history.begin(), imp.history.end());
    for (const auto& c : imp.candidates) needed.insert(c.news_id);
  }
  std::map<std::string, std::vector<std::string>> missing;
  for (const auto& [lang, table] : tables)
    for (const auto& id : needed)
      if (!table.contains(id)) missing[lang].push_back(id);
  return missing;
}

namespace {

std::string describe_missing(const std::map<std::string, std::vector<std::string>>& missing) {
  constexpr std::size_t kShown = 20;
  std::string msg = "embedding coverage gaps:";
  for (const auto& [lang, ids] : missing) {
    msg += fmt::format(" [{}: {} missing:", lang, ids.size());
    for (std::size_t i = 0; i < std::min(kShown, ids.size()); ++i) msg += " " + ids[i];
    if (ids.size() > kShown) msg += " ...";
    msg += "]";
  }
  return msg;
}

}  // namespace

std::vector<ImpressionResult> evaluate_impressions(const std::vector<Impression>& behaviors,
                                                   const EmbeddingTablef& table, const EvalOptions& options) {
  std::vector<ImpressionResult> results(behaviors.size());
  parallel_for(behaviors.size(), options.threads, [&](std::size_t i) {
    const auto scored = score_impression(behaviors[i], table, options.max_history, options.cold_policy);
    std::vector<int> labels;
    std::vector<double> scores;
    labels.reserve(scored.candidates.size());
    scores.reserve(scored.candidates.size());
    for (const auto& c : scored.candidates) {
      labels.push_back(c.label);
      scores.push_back(c.score);
    }
    results[i].cold = scored.cold;
    if (std::find(labels.begin(), labels.end(), 1) != labels.end())
      results[i].metrics = impression_metrics(labels, scores);
  });
  return results;
}

LanguageResult reduce_results(const std::vector<ImpressionResult>& results) {
  LanguageResult out;
  std::map<Metric, double> sums;
  out.impressions = results.size();
  for (const auto& r : results) {
    out.cold_count += r.cold;
    if (!r.metrics) {
      ++out.no_positive_count;
      continue;
    }
    const auto& m = *r.metrics;
    if (m.auc) {
      sums[Metric::auc] += *m.auc;
      ++out.metrics[Metric::auc].count;
    } else {
      ++out.auc_skipped_count;
    }
    sums[Metric::mrr] += m.mrr;
    sums[Metric::ndcg5] += m.ndcg5;
    sums[Metric::ndcg10] += m.ndcg10;
    for (Metric k : {Metric::mrr, Metric::ndcg5, Metric::ndcg10}) ++out.metrics[k].count;
  }
  for (Metric k : kMetrics) {
    auto& mm = out.metrics[k];
    mm.mean = mm.count ? sums[k] / static_cast<double>(mm.count) : 0.0;
  }
  return out;
}

EvalReport run_xlt_eval(const std::vector<Impression>& behaviors, const TablesByLanguage& tables,
                        const std::string& source_language, const EvalOptions& options) {
  if (behaviors.empty()) throw Error("no impressions to evaluate");
  if (!tables.count(source_language))
    throw Error("source language '" + source_language + "' has no embedding table");
  const auto missing = find_missing_ids(behaviors, tables);
  if (!missing.empty()) throw CoverageError(describe_missing(missing));

  EvalReport report;
  report.source_language = source_language;
  for (const auto& [lang, _] : tables)
    if (lang != source_language) report.target_languages.push_back(lang);

  for (const auto& [lang, table] : tables)
    report.per_language[lang] = reduce_results(evaluate_impressions(behaviors, table, options));

  const auto& source = report.per_language.at(source_language);
  report.cold_count = source.cold_count;
  report.auc_skipped_count = source.auc_skipped_count;
  for (Metric m : kMetrics) report.eng[m] = source.metrics.at(m).mean;
  if (!report.target_languages.empty()) {
    for (Metric m : kMetrics) {
      double sum = 0.0;
      for (const auto& lang : report.target_languages) sum += report.per_language.at(lang).metrics.at(m).mean;
      report.avg[m] = sum / static_cast<double>(report.target_languages.size());
      if (report.eng[m] != 0.0) report.delta_percent[m] = relative_delta(report.eng[m], report.avg[m]);
    }
  }
  return report;
}

std::string EvalReport::to_json() const {
  using ordered_json = nlohmann::ordered_json;
  ordered_json root;
  root["source_language"] = source_language;
  root["target_languages"] = target_languages;
  ordered_json langs = ordered_json::object();
  for (const auto& [lang, r] : per_language) {
    ordered_json o;
    o["impressions"] = r.impressions;
    o["cold_count"] = r.cold_count;
    o["auc_skipped_count"] = r.auc_skipped_count;
    o["no_positive_count"] = r.no_positive_count;
    ordered_json ms;
    for (Metric m : kMetrics) ms[metric_name(m)] = {{"mean", r.metrics.at(m).mean}, {"count", r.metrics.at(m).count}};
    o["metrics"] = ms;
    langs[lang] = o;
  }
  root["per_language"] = langs;
  auto metric_map = [](const std::map<Metric, double>& values) {
    ordered_json o = ordered_json::object();
    for (const auto& [m, v] : values) o[metric_name(m)] = v;
    return o;
  };
  root["eng"] = metric_map(eng);
  root["avg"] = metric_map(avg);
  root["delta_percent"] = metric_map(delta_percent);
  root["cold_count"] = cold_count;
  root["auc_skipped_count"] = auc_skipped_count;
  return root.dump(2);
}

std::string EvalReport::to_csv() const {
  std::string out = "language,metric,mean,count\n";
  for (const auto& [lang, r] : per_language)
    for (Metric m : kMetrics)
      out += fmt::format("{},{},{},{}\n", lang, metric_name(m), r.metrics.at(m).mean, r.metrics.at(m).count);
  for (const auto& [m, v] : avg) out += fmt::format("AVG,{},{},{}\n", metric_name(m), v, target_languages.size());
  for (const auto& [m, v] : delta_percent)
    out += fmt::format("DELTA_PCT,{},{:.2f},{}\n", metric_name(m), v, target_languages.size());
  return out;
}

std::string EvalReport::to_table() const {
  std::string out = fmt::format("{:<12}", "language");
  for (Metric m : kMetrics) out += fmt::format("{:>10}", metric_name(m));
  out += "\n";
  auto row = [&](const std::string& label, auto&& value_of) {
    out += fmt::format("{:<12}", label);
    for (Metric m : kMetrics) out += value_of(m);
    out += "\n";
  };
  for (const auto& [lang, r] : per_language)
    row(lang == source_language ? lang + " (src)" : lang,
        [&](Metric m) { return fmt::format("{:>10.2f}", 100.0 * r.metrics.at(m).mean); });
  row("ENG", [&](Metric m) { return fmt::format("{:>10.2f}", 100.0 * eng.at(m)); });
  if (!avg.empty()) {
    row("AVG", [&](Metric m) { return fmt::format("{:>10.2f}", 100.0 * avg.at(m)); });
    row("%Delta", [&](Metric m) {
      auto it = delta_percent.find(m);
      return it == delta_percent.end() ? fmt::format("{:>10}", "n/a") : fmt::format("{:>10.2f}", it->second);
    });
  }
  return out;
}

CheckpointSelection checkpoint_select(const std::vector<Checkpoint>& checkpoints,
                                      const std::vector<Impression>& behaviors,
                                      const std::vector<std::string>& languages, const EvalOptions& options) {
  if (checkpoints.empty()) throw Error("no checkpoints to select from");
  if (behaviors.empty()) throw Error("no impressions to evaluate");
  std::vector<std::string> langs = languages;
  if (langs.empty())
    for (const auto& [lang, _] : checkpoints.front().tables) langs.push_back(lang);
  if (langs.empty()) throw Error("no evaluation languages");

  CheckpointSelection selection;
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    const auto& ckpt = checkpoints[c];
    TablesByLanguage subset;
    for (const auto& lang : langs) {
      auto it = ckpt.tables.find(lang);
      if (it == ckpt.tables.end())
        throw Error("checkpoint " + ckpt.id + " has no embedding table for language " + lang);
      subset.emplace(lang, it->second);
    }
    const auto missing = find_missing_ids(behaviors, subset);
    if (!missing.empty()) throw CoverageError("checkpoint " + ckpt.id + ": " + describe_missing(missing));

    CheckpointSelection::Row row{ckpt.id, {}, 0.0};
    double sum = 0.0;
    for (const auto& lang : langs) {
      const double v =
          reduce_results(evaluate_impressions(behaviors, subset.at(lang), options)).metrics.at(Metric::ndcg10).mean;
      row.ndcg10[lang] = v;
      sum += v;
    }
    row.mean = sum / static_cast<double>(langs.size());
    if (c == 0 || row.mean > selection.rows[selection.best_index].mean) selection.best_index = c;
    selection.rows.push_back(std::move(row));
  }
  selection.best_id = selection.rows[selection.best_index].id;
  return selection;
}

Checkpoint load_checkpoint_dir(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error("checkpoint directory " + dir.string() + " does not exist");
  Checkpoint ckpt;
  ckpt.id = dir.filename().empty() ? dir.parent_path().filename().string() : dir.filename().string();
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto ext = entry.path().extension().string();
    if (entry.is_regular_file() && (ext == ".nbem" || ext == ".bin" || ext == ".tsv")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    const std::string lang = f.stem().string();
    if (ckpt.tables.count(lang)) throw Error("checkpoint " + ckpt.id + " has two tables for language " + lang);
    ckpt.tables.emplace(lang, load_embeddings(f));
  }
  if (ckpt.tables.empty()) throw Error("checkpoint directory " + dir.string() + " holds no embedding tables");
  return ckpt;
}

std::pair<std::vector<Impression>, std::vector<Impression>> split_by_day(const std::vector<Impression>& impressions) {
  std::set<std::chrono::sys_days> days;
  for (const auto& imp : impressions) days.insert(imp.day());
  if (days.size() < 2) throw Error("behaviors span a single day; no train/validation split possible");
  const auto last = *days.rbegin();
  std::pair<std::vector<Impression>, std::vector<Impression>> out;
  for (const auto& imp : impressions) (imp.day() == last ? out.second : out.first).push_back(imp);
  return out;
}

FewShotResult fewshot_export(const std::vector<Impression>& train, std::size_t n, std::uint64_t seed,
                             std::optional<std::size_t> negatives_per_positive) {
  if (n > train.size())
    throw Error(fmt::format("requested {} shots from only {} impressions", n, train.size()));
  Rng rng(seed);
  std::vector<std::size_t> idx(train.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < n; ++i) std::swap(idx[i], idx[i + rng.uniform_index(train.size() - i)]);
  idx.resize(n);
  std::sort(idx.begin(), idx.end());

  FewShotResult out;
  out.impressions.reserve(n);
  for (std::size_t i : idx) out.impressions.push_back(train[i]);
  if (!negatives_per_positive) return out;

  for (const auto& imp : out.impressions) {
    std::vector<std::string> negatives;
    for (const auto& c : imp.candidates)
      if (c.label == 0) negatives.push_back(c.news_id);
    for (const auto& c : imp.candidates) {
      if (c.label != 1) continue;
      std::vector<std::string> pool = negatives;
      const std::size_t k = std::min(*negatives_per_positive, pool.size());
      for (std::size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + rng.uniform_index(pool.size() - i)]);
      pool.resize(k);
      out.tuples.push_back({imp.impression_id, imp.user_id, c.news_id, std::move(pool)});
    }
  }
  return out;
}

std::size_t write_training_tuples(const std::vector<TrainingTuple>& tuples, std::ostream& out) {
  std::size_t bytes = 0;
  for (const auto& t : tuples) {
    const std::string line = t.impression_id + '\t' + t.user_id + '\t' + t.positive + '\t' + join(t.negatives) + '\n';
    out << line;
    bytes += line.size();
  }
  if (!out) throw Error("write failure");
  return bytes;
}

}  // namespace newsxlt
