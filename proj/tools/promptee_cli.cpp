// Command-line front end for the prompt-based event extraction pipeline.
//
// Exit codes: 0 success, 1 validation error or bad usage, 2 runtime failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "promptee/augment.hpp"
#include "promptee/corpus.hpp"
#include "promptee/errors.hpp"
#include "promptee/evaluation.hpp"
#include "promptee/harness.hpp"
#include "promptee/io.hpp"
#include "promptee/mock_backend.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace promptee;

namespace {

/// Flags shared by every subcommand that resolves a PipelineConfig.
struct ConfigFlags {
  std::string config;
  std::string schema;
  std::string corpus;
  std::string output_dir;
  std::optional<std::uint64_t> seed;
  std::string regime;
  std::string eval_split;
  std::string execution;
  std::optional<std::size_t> external_window;
  std::optional<std::size_t> internal_window;
  std::optional<std::size_t> max_decode_len;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "pipeline config file (JSON)");
    app->add_option("--schema", schema, "schema file");
    app->add_option("--corpus", corpus, "corpus JSONL");
    app->add_option("--output-dir", output_dir, "artifact directory");
    app->add_option("--seed", seed, "global seed");
    app->add_option("--regime", regime, "end_to_end | gold_triggers");
    app->add_option("--eval-split", eval_split, "train | dev | test");
    app->add_option("--execution", execution, "serial | parallel");
    app->add_option("--external-window", external_window, "context words around external prompts");
    app->add_option("--internal-window", internal_window, "context words around internal prompts");
    app->add_option("--max-decode-len", max_decode_len, "decode length cap");
  }

  PipelineConfig resolve() const {
    json j = json::object();
    fs::path base;
    if (!config.empty()) {
      j = read_json_file(config);
      base = fs::path(config).parent_path();
    }
    if (seed) j["seed"] = *seed;
    if (!regime.empty()) j["regime"] = regime;
    if (!eval_split.empty()) j["eval_split"] = eval_split;
    if (!execution.empty()) j["execution"] = execution;
    if (external_window) j["windows"]["external"] = *external_window;
    if (internal_window) j["windows"]["internal"] = *internal_window;
    if (max_decode_len) j["max_decode_len"] = *max_decode_len;
    auto c = PipelineConfig::from_json(j, base);
    if (!schema.empty()) c.schema_path = schema;
    if (!corpus.empty()) c.corpus_path = corpus;
    if (!output_dir.empty()) c.output_dir = output_dir;
    if (c.schema_path.empty()) throw ValidationError("a schema is required (--schema or config)");
    if (c.corpus_path.empty()) throw ValidationError("a corpus is required (--corpus or config)");
    return c;
  }
};

void print_diagnostics(const Diagnostics& diag) {
  for (const auto& m : diag.messages) std::cerr << "note: " << m << "\n";
}

std::vector<EventMention> gold_for(const Corpus& corpus, const std::vector<std::string>& ids) {
  std::vector<EventMention> out;
  for (const auto& id : ids) {
    for (auto& m : corpus.mentions_of(id)) out.push_back(std::move(m));
  }
  return out;
}

std::vector<std::string> all_doc_ids(const Corpus& corpus) {
  std::vector<std::string> ids;
  for (const auto& d : corpus.documents) ids.push_back(d.doc_id);
  return ids;
}

int cmd_ingest(const std::string& schema_path, const std::string& corpus_path, const std::string& out) {
  const auto schema = load_schema(schema_path);
  const auto corpus = ingest(corpus_path, schema);
  if (!out.empty()) write_corpus(corpus, out);
  std::size_t arguments = 0;
  for (const auto& m : corpus.mentions) arguments += m.arguments.size();
  std::cout << json{{"documents", corpus.documents.size()}, {"mentions", corpus.mentions.size()},
                    {"arguments", arguments}}
                   .dump()
            << "\n";
  return 0;
}

int cmd_build_prompts(const ConfigFlags& flags, const std::string& family_name, const std::string& out) {
  const auto config = flags.resolve();
  const auto family = family_from_string(family_name);
  const auto schema = load_schema(config.schema_path);
  const auto corpus = ingest(config.corpus_path, schema);
  Diagnostics diag;
  std::vector<PromptInstance> instances;
  for (const auto& doc : corpus.documents) {
    for (auto& inst : build_family_instances(doc, corpus.mentions_of(doc.doc_id), schema, family, config, diag)) {
      instances.push_back(std::move(inst));
    }
  }
  write_instances(instances, out);
  print_diagnostics(diag);
  std::cout << json{{"family", family_name}, {"instances", instances.size()}}.dump() << "\n";
  return 0;
}

int cmd_train(const ConfigFlags& flags, const std::vector<std::string>& stages) {
  const auto config = flags.resolve();
  const auto schema = load_schema(config.schema_path);
  const auto corpus = ingest(config.corpus_path, schema);
  const auto assignment = assign_splits(corpus.documents, config.splits);
  Diagnostics diag;
  const auto sets = build_training_sets(corpus, docs_in_splits(corpus, assignment, config.train_splits), schema,
                                        config, diag, false, config.execution);
  const auto texts = vocabulary_texts(corpus, sets);
  const auto factory = mock_backend_factory();
  fs::create_directories(config.output_dir);
  const std::map<TrainStage, const std::vector<PromptInstance>*> by_stage = {
      {TrainStage::kTriggerCoarse, &sets.trigger_coarse},
      {TrainStage::kTriggerSubtype, &sets.trigger_subtype},
      {TrainStage::kArgument, &sets.argument}};
  json summary = json::object();
  for (const auto& [stage, instances] : by_stage) {
    const auto name = to_string(stage);
    if (!stages.empty() && std::find(stages.begin(), stages.end(), name) == stages.end()) continue;
    auto backend = factory(texts);
    std::vector<LossPoint> curve;
    if (!instances->empty()) curve = train(*backend, *instances, config.stages.at(stage));
    write_instances(*instances, config.output_dir / ("train_" + name + ".jsonl"));
    write_text_file(config.output_dir / ("loss_" + name + ".csv"), loss_curve_csv(curve));
    backend->save(config.output_dir / ("checkpoint_" + name + ".json"));
    summary[name] = {{"instances", instances->size()}, {"steps", curve.size()},
                     {"final_loss", curve.empty() ? json(nullptr) : json(curve.back().loss)}};
  }
  print_diagnostics(diag);
  std::cout << summary.dump() << "\n";
  return 0;
}

int cmd_predict(const ConfigFlags& flags, std::string checkpoints, std::string out) {
  const auto config = flags.resolve();
  if (checkpoints.empty()) checkpoints = config.output_dir.string();
  if (out.empty()) out = (config.output_dir / "predictions.jsonl").string();
  const auto schema = load_schema(config.schema_path);
  const auto corpus = ingest(config.corpus_path, schema);
  const auto assignment = assign_splits(corpus.documents, config.splits);
  const auto eval_docs = docs_in_splits(corpus, assignment, {config.eval_split});

  auto load_stage = [&](TrainStage stage) -> std::optional<MockBackend> {
    const auto path = fs::path(checkpoints) / ("checkpoint_" + to_string(stage) + ".json");
    if (!fs::exists(path)) return std::nullopt;
    return MockBackend::load(path);
  };
  const auto trigger = load_stage(TrainStage::kTriggerCoarse);
  const auto subtype = load_stage(TrainStage::kTriggerSubtype);
  const auto argument = load_stage(TrainStage::kArgument);
  if (!argument) throw ValidationError("missing argument checkpoint in " + checkpoints);
  if (config.regime == Regime::kEndToEnd && (!trigger || !subtype)) {
    throw ValidationError("end-to-end prediction needs trigger checkpoints in " + checkpoints);
  }
  StageBackends backends{trigger ? &*trigger : nullptr, subtype ? &*subtype : nullptr, &*argument};
  const auto result = predict_documents(backends, corpus, eval_docs, schema, config, config.regime, config.execution);
  write_predictions(result.predictions, out);
  if (const auto parent = fs::path(out).parent_path(); !parent.empty()) {
    write_generations(result.generations, parent / "generations.jsonl");
  }
  print_diagnostics(result.diagnostics);
  std::cout << json{{"documents", eval_docs.size()}, {"predictions", result.predictions.size()}}.dump() << "\n";
  return 0;
}

int cmd_score(const std::string& gold_path, const std::string& pred_path, const std::string& schema_path,
              const std::string& errors_out, std::size_t sample_n, std::uint64_t seed) {
  const Corpus corpus = schema_path.empty() ? read_corpus(gold_path) : ingest(gold_path, load_schema(schema_path));
  const auto preds = read_predictions(pred_path);
  // Only documents that were predicted on take part in scoring.
  std::vector<std::string> ids;
  for (const auto& d : corpus.documents) {
    if (std::any_of(preds.begin(), preds.end(), [&](const EventPrediction& p) { return p.doc_id == d.doc_id; })) {
      ids.push_back(d.doc_id);
    }
  }
  const auto gold = preds.empty() ? corpus.mentions : gold_for(corpus, ids);
  const auto report = score(gold, preds);
  if (!errors_out.empty()) write_error_records(export_errors(corpus, gold, preds, sample_n, seed), errors_out);
  std::cout << report.to_json().dump(2) << "\n";
  return 0;
}

int cmd_fewshot(const ConfigFlags& flags, const std::vector<std::size_t>& ks, std::uint64_t seed, bool evaluate) {
  const auto config = flags.resolve();
  const auto schema = load_schema(config.schema_path);
  const auto corpus = ingest(config.corpus_path, schema);
  const auto assignment = assign_splits(corpus.documents, config.splits);
  const auto pool = gold_for(corpus, docs_in_splits(corpus, assignment, {Split::kTrain, Split::kDev}));
  fs::create_directories(config.output_dir);
  json summary = json::array();
  for (auto k : ks) {
    const auto sample = fewshot_sample(pool, k, seed);
    std::ofstream out(config.output_dir / ("fewshot_k" + std::to_string(k) + ".jsonl"));
    for (const auto& doc : corpus.documents) {
      std::vector<EventMention> mine;
      for (const auto& m : sample) {
        if (m.doc_id == doc.doc_id) mine.push_back(m);
      }
      if (!mine.empty()) out << document_to_json(doc, mine).dump() << "\n";
    }
    if (!out) throw RuntimeFailure("cannot write few-shot sample for k=" + std::to_string(k));
    summary.push_back({{"k", k}, {"sampled", sample.size()}});
  }
  if (evaluate) {
    const auto reports = fewshot_driver(corpus, schema, config, ks, seed, mock_backend_factory());
    for (std::size_t i = 0; i < reports.size(); ++i) summary[i]["report"] = reports[i].report.to_json();
    write_text_file(config.output_dir / "fewshot_report.json", summary.dump(2) + "\n");
  }
  std::cout << summary.dump() << "\n";
  return 0;
}

int cmd_augment(const std::string& in, const std::string& out, const std::string& method, std::uint64_t seed,
                std::size_t ops, std::optional<std::size_t> target, const std::string& lexicon_path) {
  const auto instances = read_instances(in);
  std::vector<PromptInstance> result;
  Diagnostics diag;
  // Both methods rewrite single-argument prompts only; other instances (the
  // joint prompts of an argument training file) are left out.
  std::vector<PromptInstance> singles;
  for (const auto& inst : instances) {
    if (inst.family == PromptFamily::kSingleArgument) singles.push_back(inst);
  }
  if (singles.size() < instances.size()) {
    diag.add(std::to_string(instances.size() - singles.size()) + " non-single-argument instances left out");
  }
  if (method == "eda") {
    // EDA copies take the place of the left-out instances, so the default
    // target keeps the input size.
    if (!target && singles.size() < instances.size()) target = instances.size();
    const auto lexicon = lexicon_path.empty() ? MapLexicon{} : MapLexicon::load(lexicon_path);
    result = target ? expand_with_eda(singles, *target, seed, ops, lexicon) : augment_eda(singles, seed, ops, lexicon);
  } else if (method == "backtranslate-identity" || method == "backtranslate-shuffle") {
    const IdentityTranslator identity;
    const WordShuffleTranslator shuffle;
    const RoundTripTranslator& translator =
        method == "backtranslate-identity" ? static_cast<const RoundTripTranslator&>(identity) : shuffle;
    auto bt = augment_backtranslate(singles, translator, seed);
    result = std::move(bt.instances);
    diag.append(bt.diagnostics);
  } else {
    throw ValidationError("unknown augmentation method: " + method);
  }
  write_instances(result, out);
  print_diagnostics(diag);
  std::cout << json{{"input", instances.size()}, {"output", result.size()}}.dump() << "\n";
  return 0;
}

int cmd_run_all(const ConfigFlags& flags) {
  const auto config = flags.resolve();
  const auto result = run_end_to_end(config, mock_backend_factory());
  print_diagnostics(result.diagnostics);
  std::cout << result.report.to_json().dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prompt-based event extraction: prompts, constrained decoding, scoring"};
  app.require_subcommand(1);

  std::string schema_path, corpus_path, out;
  auto* ingest_cmd = app.add_subcommand("ingest", "validate a corpus against a schema");
  ingest_cmd->add_option("--schema", schema_path, "schema file")->required();
  ingest_cmd->add_option("--corpus", corpus_path, "corpus JSONL")->required();
  ingest_cmd->add_option("--out", out, "write the normalized corpus here");

  ConfigFlags prompt_flags;
  std::string family;
  std::string prompts_out;
  auto* prompts_cmd = app.add_subcommand("build-prompts", "write prompt instances of one family");
  prompt_flags.attach(prompts_cmd);
  prompts_cmd->add_option("--family", family, "external_trigger | internal_trigger | subtype | single_argument | "
                                              "joint_argument")
      ->required();
  prompts_cmd->add_option("--out", prompts_out, "instance JSONL")->required();

  ConfigFlags train_flags;
  std::vector<std::string> stages;
  auto* train_cmd = app.add_subcommand("train", "train stage backends and write checkpoints");
  train_flags.attach(train_cmd);
  train_cmd->add_option("--stage", stages, "trigger_coarse | trigger_subtype | argument (repeatable)");

  ConfigFlags predict_flags;
  std::string checkpoints, pred_out;
  auto* predict_cmd = app.add_subcommand("predict", "predict events on the evaluation split");
  predict_flags.attach(predict_cmd);
  predict_cmd->add_option("--checkpoints", checkpoints, "directory holding checkpoint_<stage>.json");
  predict_cmd->add_option("--out", pred_out, "prediction JSONL");

  std::string gold_path, score_pred, score_schema, errors_out;
  std::size_t sample_n = 50;
  std::uint64_t error_seed = 42;
  auto* score_cmd = app.add_subcommand("score", "compute Trig-C / Arg-C scores");
  score_cmd->add_option("--gold", gold_path, "gold corpus JSONL")->required();
  score_cmd->add_option("--pred", score_pred, "prediction JSONL")->required();
  score_cmd->add_option("--schema", score_schema, "validate gold against this schema");
  score_cmd->add_option("--errors-out", errors_out, "write sampled error records here");
  score_cmd->add_option("--sample", sample_n, "number of error records to sample");
  score_cmd->add_option("--error-seed", error_seed, "seed for error sampling");

  ConfigFlags fewshot_flags;
  std::vector<std::size_t> ks;
  std::uint64_t fewshot_seed = 42;
  bool evaluate = false;
  auto* fewshot_cmd = app.add_subcommand("fewshot", "sample k mentions per subtype (and optionally evaluate)");
  fewshot_flags.attach(fewshot_cmd);
  fewshot_cmd->add_option("--k", ks, "shots per subtype (repeatable)")->required();
  fewshot_cmd->add_option("--sample-seed", fewshot_seed, "sampling seed (defaults to --seed)");
  fewshot_cmd->add_flag("--evaluate", evaluate, "train and score each k on the test split");

  std::string aug_in, aug_out, method = "eda", lexicon;
  std::uint64_t aug_seed = 42;
  std::size_t ops = 1;
  std::optional<std::size_t> target;
  auto* augment_cmd = app.add_subcommand("augment", "EDA or back-translation augmentation");
  augment_cmd->add_option("--instances", aug_in, "single-argument instance JSONL")->required();
  augment_cmd->add_option("--out", aug_out, "augmented instance JSONL")->required();
  augment_cmd->add_option("--method", method, "eda | backtranslate-identity | backtranslate-shuffle");
  augment_cmd->add_option("--seed", aug_seed, "augmentation seed");
  augment_cmd->add_option("--ops", ops, "EDA operations per instance");
  augment_cmd->add_option("--target-count", target, "expand with EDA copies to this many instances");
  augment_cmd->add_option("--lexicon", lexicon, "synonym lexicon JSON");

  ConfigFlags run_flags;
  auto* run_cmd = app.add_subcommand("run-all", "ingest, train, predict and score end to end");
  run_flags.attach(run_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 1;
  }

  try {
    if (*ingest_cmd) return cmd_ingest(schema_path, corpus_path, out);
    if (*prompts_cmd) return cmd_build_prompts(prompt_flags, family, prompts_out);
    if (*train_cmd) return cmd_train(train_flags, stages);
    if (*predict_cmd) return cmd_predict(predict_flags, checkpoints, pred_out);
    if (*score_cmd) return cmd_score(gold_path, score_pred, score_schema, errors_out, sample_n, error_seed);
    if (*fewshot_cmd) {
      const auto seed = fewshot_cmd->count("--sample-seed") ? fewshot_seed : fewshot_flags.seed.value_or(42);
      return cmd_fewshot(fewshot_flags, ks, seed, evaluate);
    }
    if (*augment_cmd) return cmd_augment(aug_in, aug_out, method, aug_seed, ops, target, lexicon);
    if (*run_cmd) return cmd_run_all(run_flags);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
