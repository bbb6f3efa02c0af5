#include "promptee/harness.hpp"

#include <algorithm>
#include <exception>
#include <set>

#include <omp.h>

#include "promptee/mock_backend.hpp"
#include "promptee/rng.hpp"

namespace promptee {

using nlohmann::json;

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t instance_seed(std::uint64_t seed, const std::string& doc_id, std::size_t sentence) {
  return derive_seed(seed ^ fnv1a(doc_id), sentence);
}

std::vector<EventMention> in_sentences(const std::vector<EventMention>& mentions, SentenceRange range) {
  std::vector<EventMention> out;
  for (const auto& m : mentions) {
    if (m.sentence_index >= range.first && m.sentence_index <= range.last) out.push_back(m);
  }
  return out;
}

std::set<std::size_t> event_sentences(const std::vector<EventMention>& mentions) {
  std::set<std::size_t> out;
  for (const auto& m : mentions) out.insert(m.sentence_index);
  return out;
}

/// Runs `body` and re-throws failures with the stage name attached.
template <typename F>
auto staged(const std::string& stage, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const ValidationError& e) {
    throw ValidationError("[" + stage + "] " + e.what());
  } catch (const std::exception& e) {
    throw RuntimeFailure("[" + stage + "] " + e.what());
  }
}

template <typename Fn>
void for_each_index(std::size_t n, Execution execution, Fn&& fn) {
  if (execution == Execution::kSerial) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

GenerationResult decode_instance(const Seq2SeqBackend& backend, const PromptInstance& inst,
                                 const ConstraintSet& constraint, std::size_t max_len) {
  auto result = constrained_greedy_decode(backend, inst.input_text(), constraint, max_len);
  return ground_answers(std::move(result), inst.passage);
}

void record(std::vector<GenerationRecord>* records, const PromptInstance& inst, const GenerationResult& result) {
  if (records) records->push_back({inst.passage.doc_id, inst.passage.sentences, inst.family, result});
}

}  // namespace

std::string to_string(Regime regime) {
  return regime == Regime::kEndToEnd ? "end_to_end" : "gold_triggers";
}

Regime regime_from_string(std::string_view name) {
  if (name == "end_to_end") return Regime::kEndToEnd;
  if (name == "gold_triggers") return Regime::kGoldTriggers;
  throw ValidationError("unknown regime: " + std::string(name));
}

PipelineConfig PipelineConfig::from_json(const json& j, const std::filesystem::path& base_dir) {
  static const std::set<std::string> kKeys = {"schema",      "corpus",          "output_dir",        "splits",
                                              "train_splits", "eval_split",     "stages",            "windows",
                                              "seed",         "max_decode_len", "max_gap_sentences", "regime",
                                              "execution"};
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.contains(key)) throw ValidationError("unknown config key: " + key);
  }
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
  };
  try {
    PipelineConfig c;
    if (j.contains("schema")) c.schema_path = resolve(j.at("schema").get<std::string>());
    if (j.contains("corpus")) c.corpus_path = resolve(j.at("corpus").get<std::string>());
    if (j.contains("output_dir")) c.output_dir = resolve(j.at("output_dir").get<std::string>());
    if (j.contains("splits")) c.splits = SplitSpec::from_json(j.at("splits"));
    if (j.contains("train_splits")) {
      c.train_splits.clear();
      for (const auto& s : j.at("train_splits")) c.train_splits.push_back(split_from_string(s.get<std::string>()));
    }
    if (j.contains("eval_split")) c.eval_split = split_from_string(j.at("eval_split").get<std::string>());
    c.seed = j.value("seed", c.seed);
    for (auto& [stage, tc] : c.stages) tc.seed = c.seed;
    if (j.contains("stages")) {
      for (const auto& [name, sj] : j.at("stages").items()) {
        auto& tc = c.stages.at(stage_from_string(name));
        tc.learning_rate = sj.value("learning_rate", tc.learning_rate);
        tc.epochs = sj.value("epochs", tc.epochs);
        tc.batch_size = sj.value("batch_size", tc.batch_size);
        tc.seed = sj.value("seed", tc.seed);
        tc.optimizer = sj.value("optimizer", tc.optimizer);
        tc.validate();
      }
    }
    if (j.contains("windows")) {
      c.external_window = j.at("windows").value("external", c.external_window);
      c.internal_window = j.at("windows").value("internal", c.internal_window);
    }
    c.max_decode_len = j.value("max_decode_len", c.max_decode_len);
    c.max_gap_sentences = j.value("max_gap_sentences", c.max_gap_sentences);
    if (j.contains("regime")) c.regime = regime_from_string(j.at("regime").get<std::string>());
    if (j.contains("execution")) {
      const auto e = j.at("execution").get<std::string>();
      if (e != "serial" && e != "parallel") throw ValidationError("execution must be serial or parallel");
      c.execution = e == "serial" ? Execution::kSerial : Execution::kParallel;
    }
    return c;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed config: ") + e.what());
  }
}

json PipelineConfig::to_json() const {
  json stages_json = json::object();
  for (const auto& [stage, tc] : stages) {
    stages_json[promptee::to_string(stage)] = {{"learning_rate", tc.learning_rate},
                                               {"epochs", tc.epochs},
                                               {"batch_size", tc.batch_size},
                                               {"seed", tc.seed},
                                               {"optimizer", tc.optimizer}};
  }
  json train = json::array();
  for (auto s : train_splits) train.push_back(promptee::to_string(s));
  return {{"schema", schema_path.string()},
          {"corpus", corpus_path.string()},
          {"output_dir", output_dir.string()},
          {"splits", splits.to_json()},
          {"train_splits", train},
          {"eval_split", promptee::to_string(eval_split)},
          {"stages", stages_json},
          {"windows", {{"external", external_window}, {"internal", internal_window}}},
          {"seed", seed},
          {"max_decode_len", max_decode_len},
          {"max_gap_sentences", max_gap_sentences},
          {"regime", promptee::to_string(regime)},
          {"execution", execution == Execution::kSerial ? "serial" : "parallel"}};
}

BackendFactory mock_backend_factory() {
  return [](const std::vector<std::string>& texts) -> std::unique_ptr<Seq2SeqBackend> {
    return std::make_unique<MockBackend>(Vocabulary::build(texts));
  };
}

std::vector<PromptInstance> build_family_instances(const Document& doc, const std::vector<EventMention>& mentions,
                                                   const Schema& schema, PromptFamily family,
                                                   const PipelineConfig& config, Diagnostics& diag) {
  std::vector<PromptInstance> out;
  auto attempt = [&](const std::string& what, auto&& body) {
    try {
      body();
    } catch (const PromptRejected& e) {
      diag.add(doc.doc_id + " " + what + ": " + e.what());
    }
  };
  switch (family) {
    case PromptFamily::kExternalTrigger:
      for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
        attempt("external sentence " + std::to_string(s), [&] {
          out.push_back(build_external_trigger_prompt(make_passage(doc, {s, s}, config.external_window), schema,
                                                      std::span<const EventMention>(mentions)));
        });
      }
      break;
    case PromptFamily::kInternalTrigger:
      for (const auto& range : merge_adjoining(doc, mentions, config.max_gap_sentences)) {
        attempt("internal sentences " + std::to_string(range.first) + "-" + std::to_string(range.last), [&] {
          const auto inside = in_sentences(mentions, range);
          out.push_back(build_internal_trigger_prompt(make_passage(doc, range, config.internal_window), inside, schema));
        });
      }
      break;
    case PromptFamily::kSubtype:
      for (const auto& m : mentions) {
        attempt("subtype '" + m.trigger_surface + "'", [&] {
          const auto passage = make_passage(doc, {m.sentence_index, m.sentence_index}, config.external_window);
          out.push_back(build_subtype_prompt(passage, m.trigger_surface, schema.main_type_of(m.subtype), schema,
                                             m.subtype));
        });
      }
      break;
    case PromptFamily::kSingleArgument:
      for (const auto& m : mentions) {
        attempt("single '" + m.trigger_surface + "'", [&] {
          const auto passage = make_passage(doc, {m.sentence_index, m.sentence_index}, config.external_window);
          for (auto& inst : build_single_argument_prompts(passage, m, schema)) out.push_back(std::move(inst));
        });
      }
      break;
    case PromptFamily::kJointArgument:
      for (auto s : event_sentences(mentions)) {
        attempt("joint sentence " + std::to_string(s), [&] {
          const auto events = in_sentences(mentions, {s, s});
          const auto passage = make_passage(doc, {s, s}, config.external_window);
          out.push_back(build_joint_argument_prompt(passage, events, schema, instance_seed(config.seed, doc.doc_id, s)));
        });
      }
      break;
  }
  return out;
}

TrainingSets build_training_sets(const Corpus& corpus, const std::vector<std::string>& doc_ids, const Schema& schema,
                                 const PipelineConfig& config, Diagnostics& diag, bool event_sentences_only,
                                 Execution execution) {
  std::vector<TrainingSets> per_doc(doc_ids.size());
  std::vector<Diagnostics> per_diag(doc_ids.size());
  for_each_index(doc_ids.size(), execution, [&](std::size_t i) {
    const auto& doc = corpus.document(doc_ids[i]);
    const auto mentions = corpus.mentions_of(doc.doc_id);
    auto& sets = per_doc[i];
    auto& d = per_diag[i];
    auto append = [](std::vector<PromptInstance>& dst, std::vector<PromptInstance> src) {
      for (auto& x : src) dst.push_back(std::move(x));
    };
    if (event_sentences_only) {
      const auto keep = event_sentences(mentions);
      for (auto& inst : build_family_instances(doc, mentions, schema, PromptFamily::kExternalTrigger, config, d)) {
        if (keep.contains(inst.passage.sentences.first)) sets.trigger_coarse.push_back(std::move(inst));
      }
    } else {
      append(sets.trigger_coarse,
             build_family_instances(doc, mentions, schema, PromptFamily::kExternalTrigger, config, d));
    }
    append(sets.trigger_coarse, build_family_instances(doc, mentions, schema, PromptFamily::kInternalTrigger, config, d));
    append(sets.trigger_subtype, build_family_instances(doc, mentions, schema, PromptFamily::kSubtype, config, d));
    append(sets.argument, build_family_instances(doc, mentions, schema, PromptFamily::kSingleArgument, config, d));
    append(sets.argument, build_family_instances(doc, mentions, schema, PromptFamily::kJointArgument, config, d));
  });
  TrainingSets all;
  for (std::size_t i = 0; i < per_doc.size(); ++i) {
    auto move_into = [](std::vector<PromptInstance>& dst, std::vector<PromptInstance>& src) {
      for (auto& x : src) dst.push_back(std::move(x));
    };
    move_into(all.trigger_coarse, per_doc[i].trigger_coarse);
    move_into(all.trigger_subtype, per_doc[i].trigger_subtype);
    move_into(all.argument, per_doc[i].argument);
    diag.append(per_diag[i]);
  }
  return all;
}

std::vector<DetectedEvent> gold_detections(const std::vector<EventMention>& mentions) {
  std::vector<DetectedEvent> out;
  for (const auto& m : mentions) out.push_back({m.sentence_index, m.trigger, m.trigger_surface, "", m.subtype});
  return out;
}

std::vector<DetectedEvent> detect_events(const Seq2SeqBackend& trigger_backend, const Seq2SeqBackend& subtype_backend,
                                         const Document& doc, const Schema& schema, const PipelineConfig& config,
                                         Diagnostics& diag, std::vector<GenerationRecord>* records) {
  std::vector<DetectedEvent> out;
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    const auto passage = make_passage(doc, {s, s}, config.external_window);
    const auto inst = build_external_trigger_prompt(passage, schema, std::nullopt);
    const auto result =
        decode_instance(trigger_backend, inst, build_constraint(trigger_backend, inst.input_text()), config.max_decode_len);
    record(records, inst, result);

    struct Candidate {
      CharSpan span;
      std::string surface;
      std::string main_type;
    };
    std::vector<Candidate> candidates;
    for (const auto& slot : inst.slots) {
      auto it = result.grounded.find(slot.sentinel);
      if (it == result.grounded.end()) continue;
      const auto& main = std::get<MainTypeBinding>(slot.bind).main_type;
      for (const auto& g : it->second) {
        const std::string where = doc.doc_id + " sentence " + std::to_string(s) + " " + main + " trigger '" + g.answer + "'";
        if (!g.doc_span) {
          diag.add(where + ": ungrounded, dropped");
          continue;
        }
        if (!g.in_focus) {
          diag.add(where + ": found only outside the sentence, dropped");
          continue;
        }
        const bool seen = std::any_of(candidates.begin(), candidates.end(),
                                      [&](const Candidate& c) { return c.span == *g.doc_span; });
        if (!seen) candidates.push_back({*g.doc_span, g.answer, main});
      }
    }

    for (const auto& c : candidates) {
      const auto sub_inst = build_subtype_prompt(passage, c.surface, c.main_type, schema, std::nullopt);
      std::vector<std::string> labels;
      std::map<std::string, std::string> by_label;
      for (const auto* st : schema.subtypes_of(c.main_type)) {
        labels.push_back(st->label());
        by_label[st->label()] = st->name;
      }
      const auto sub_result = constrained_greedy_decode(
          subtype_backend, sub_inst.input_text(), build_answer_constraint(subtype_backend, labels), config.max_decode_len);
      record(records, sub_inst, sub_result);
      const auto entry = sub_result.answer_map.entries.find(0);
      const std::string answer =
          entry == sub_result.answer_map.entries.end() || entry->second.empty() ? "" : entry->second.front();
      auto label = by_label.find(answer);
      if (label == by_label.end()) {
        diag.add(doc.doc_id + " sentence " + std::to_string(s) + " trigger '" + c.surface + "': subtype answer '" +
                 answer + "' is not a " + c.main_type + " subtype, dropped");
        continue;
      }
      out.push_back({s, c.span, c.surface, c.main_type, label->second});
    }
  }
  return out;
}

std::vector<EventPrediction> extract_arguments(const Seq2SeqBackend& argument_backend, const Document& doc,
                                               const std::vector<DetectedEvent>& detected, const Schema& schema,
                                               const PipelineConfig& config, Diagnostics& diag,
                                               std::vector<GenerationRecord>* records) {
  std::vector<EventPrediction> out;
  for (const auto& ev : detected) {
    EventPrediction pred;
    pred.doc_id = doc.doc_id;
    pred.sentence_index = ev.sentence_index;
    pred.trigger = ev.trigger;
    pred.trigger_surface = ev.surface;
    pred.subtype = ev.subtype;
    pred.main_type = schema.main_type_of(ev.subtype);

    EventMention query;
    query.doc_id = doc.doc_id;
    query.sentence_index = ev.sentence_index;
    query.subtype = ev.subtype;
    query.trigger = ev.trigger;
    query.trigger_surface = ev.surface;
    const auto passage = make_passage(doc, {ev.sentence_index, ev.sentence_index}, config.external_window);
    std::vector<PromptInstance> prompts;
    try {
      prompts = build_single_argument_prompts(passage, query, schema, false);
    } catch (const PromptRejected& e) {
      diag.add(doc.doc_id + " trigger '" + ev.surface + "': " + e.what());
    }
    for (const auto& inst : prompts) {
      const auto result = decode_instance(argument_backend, inst, build_constraint(argument_backend, inst.input_text()),
                                          config.max_decode_len);
      record(records, inst, result);
      const auto& role = std::get<RoleBinding>(inst.slots.front().bind).role;
      auto it = result.grounded.find(0);
      if (it == result.grounded.end()) continue;
      for (const auto& g : it->second) {
        if (!g.doc_span) diag.add(doc.doc_id + " " + role + " answer '" + g.answer + "' ungrounded");
        pred.arguments.push_back({role, g.doc_span, g.answer});
      }
    }
    out.push_back(std::move(pred));
  }
  return out;
}

CorpusPrediction predict_documents(const StageBackends& backends, const Corpus& corpus,
                                   const std::vector<std::string>& doc_ids, const Schema& schema,
                                   const PipelineConfig& config, Regime regime, Execution execution) {
  struct PerDoc {
    std::vector<EventPrediction> predictions;
    std::vector<GenerationRecord> generations;
    Diagnostics diagnostics;
  };
  std::vector<PerDoc> per_doc(doc_ids.size());
  for_each_index(doc_ids.size(), execution, [&](std::size_t i) {
    const auto& doc = corpus.document(doc_ids[i]);
    auto& slot = per_doc[i];
    std::vector<DetectedEvent> detected;
    if (regime == Regime::kGoldTriggers) {
      detected = gold_detections(corpus.mentions_of(doc.doc_id));
    } else {
      detected = detect_events(*backends.trigger, *backends.subtype, doc, schema, config, slot.diagnostics,
                               &slot.generations);
    }
    slot.predictions =
        extract_arguments(*backends.argument, doc, detected, schema, config, slot.diagnostics, &slot.generations);
  });
  CorpusPrediction out;
  for (auto& d : per_doc) {
    for (auto& p : d.predictions) out.predictions.push_back(std::move(p));
    for (auto& g : d.generations) out.generations.push_back(std::move(g));
    out.diagnostics.append(d.diagnostics);
  }
  return out;
}

std::vector<std::string> vocabulary_texts(const Corpus& corpus, const TrainingSets& sets) {
  std::vector<std::string> texts;
  for (const auto& d : corpus.documents) texts.push_back(d.text);
  for (const auto* set : {&sets.trigger_coarse, &sets.trigger_subtype, &sets.argument}) {
    for (const auto& inst : *set) {
      texts.push_back(inst.input_text());
      texts.push_back(inst.target_text);
    }
  }
  return texts;
}

TrainedStages train_stages(const TrainingSets& sets, const std::vector<std::string>& vocab_texts,
                           const PipelineConfig& config, const BackendFactory& factory) {
  TrainedStages trained;
  auto run = [&](TrainStage stage, const std::vector<PromptInstance>& instances) {
    return staged("train:" + to_string(stage), [&] {
      auto backend = factory(vocab_texts);
      if (!instances.empty()) trained.loss_curves[stage] = train(*backend, instances, config.stages.at(stage));
      return backend;
    });
  };
  trained.trigger = run(TrainStage::kTriggerCoarse, sets.trigger_coarse);
  trained.subtype = run(TrainStage::kTriggerSubtype, sets.trigger_subtype);
  trained.argument = run(TrainStage::kArgument, sets.argument);
  return trained;
}

std::vector<std::string> docs_in_splits(const Corpus& corpus, const std::map<std::string, Split>& assignment,
                                        const std::vector<Split>& splits) {
  std::vector<std::string> out;
  for (const auto& d : corpus.documents) {
    auto it = assignment.find(d.doc_id);
    if (it != assignment.end() && std::find(splits.begin(), splits.end(), it->second) != splits.end()) {
      out.push_back(d.doc_id);
    }
  }
  return out;
}

namespace {

std::vector<EventMention> gold_for(const Corpus& corpus, const std::vector<std::string>& doc_ids) {
  std::vector<EventMention> out;
  for (const auto& id : doc_ids) {
    for (auto& m : corpus.mentions_of(id)) out.push_back(std::move(m));
  }
  return out;
}

struct PipelineArtifacts {
  std::map<std::string, Split> assignment;
  TrainingSets sets;
  CorpusPrediction prediction;
};

RunResult run_pipeline_impl(const Corpus& corpus, const Schema& schema, const PipelineConfig& config,
                            const BackendFactory& factory, TrainedStages& trained, PipelineArtifacts& art) {
  RunResult result;
  art.assignment = staged("split", [&] { return assign_splits(corpus.documents, config.splits); });
  const auto train_docs = docs_in_splits(corpus, art.assignment, config.train_splits);
  const auto eval_docs = docs_in_splits(corpus, art.assignment, {config.eval_split});

  art.sets = staged("build-prompts", [&] {
    return build_training_sets(corpus, train_docs, schema, config, result.diagnostics, false, config.execution);
  });
  trained = train_stages(art.sets, vocabulary_texts(corpus, art.sets), config, factory);
  art.prediction = staged("predict", [&] {
    return predict_documents(trained.view(), corpus, eval_docs, schema, config, config.regime, config.execution);
  });
  result.diagnostics.append(art.prediction.diagnostics);
  result.predictions = art.prediction.predictions;
  result.report = staged("score", [&] { return score(gold_for(corpus, eval_docs), result.predictions); });
  return result;
}

}  // namespace

RunResult run_pipeline(const Corpus& corpus, const Schema& schema, const PipelineConfig& config,
                       const BackendFactory& factory, TrainedStages* trained) {
  TrainedStages local;
  PipelineArtifacts art;
  auto result = run_pipeline_impl(corpus, schema, config, factory, trained ? *trained : local, art);
  return result;
}

RunResult run_end_to_end(const PipelineConfig& config, const BackendFactory& factory) {
  const Schema schema = staged("schema", [&] { return load_schema(config.schema_path); });
  const Corpus corpus = staged("ingest", [&] { return ingest(config.corpus_path, schema); });
  TrainedStages trained;
  PipelineArtifacts art;
  auto result = run_pipeline_impl(corpus, schema, config, factory, trained, art);

  staged("write", [&] {
    const auto& dir = config.output_dir;
    std::filesystem::create_directories(dir);
    write_text_file(dir / "config.json", config.to_json().dump(2) + "\n");
    json splits = json::object();
    for (const auto& [id, split] : art.assignment) splits[id] = to_string(split);
    write_text_file(dir / "splits.json", splits.dump(2) + "\n");
    write_instances(art.sets.trigger_coarse, dir / "train_trigger_coarse.jsonl");
    write_instances(art.sets.trigger_subtype, dir / "train_trigger_subtype.jsonl");
    write_instances(art.sets.argument, dir / "train_argument.jsonl");
    for (const auto& [stage, curve] : trained.loss_curves) {
      write_text_file(dir / ("loss_" + to_string(stage) + ".csv"), loss_curve_csv(curve));
    }
    trained.trigger->save(dir / "checkpoint_trigger_coarse.json");
    trained.subtype->save(dir / "checkpoint_trigger_subtype.json");
    trained.argument->save(dir / "checkpoint_argument.json");
    write_generations(art.prediction.generations, dir / "generations.jsonl");
    write_predictions(result.predictions, dir / "predictions.jsonl");
    write_text_file(dir / "score.json", result.report.to_json().dump(2) + "\n");
    write_text_file(dir / "diagnostics.log", join(result.diagnostics.messages, "\n") +
                                                 (result.diagnostics.messages.empty() ? "" : "\n"));
  });
  return result;
}

std::vector<FewShotReport> fewshot_driver(const Corpus& corpus, const Schema& schema, const PipelineConfig& config,
                                          const std::vector<std::size_t>& ks, std::uint64_t seed,
                                          const BackendFactory& factory) {
  if (ks.empty()) throw ValidationError("few-shot driver needs at least one k");
  const auto assignment = assign_splits(corpus.documents, config.splits);
  const auto pool_docs = docs_in_splits(corpus, assignment, {Split::kTrain, Split::kDev});
  const auto test_docs = docs_in_splits(corpus, assignment, {Split::kTest});
  const auto pool = gold_for(corpus, pool_docs);
  const auto gold = gold_for(corpus, test_docs);

  std::vector<FewShotReport> reports;
  for (auto k : ks) {
    Corpus sampled{corpus.documents, fewshot_sample(pool, k, seed)};
    std::vector<std::string> doc_ids;
    for (const auto& id : pool_docs) {
      if (std::any_of(sampled.mentions.begin(), sampled.mentions.end(),
                      [&](const EventMention& m) { return m.doc_id == id; })) {
        doc_ids.push_back(id);
      }
    }
    Diagnostics diag;
    const auto sets = build_training_sets(sampled, doc_ids, schema, config, diag, true, config.execution);
    const auto trained = train_stages(sets, vocabulary_texts(corpus, sets), config, factory);
    const auto prediction =
        predict_documents(trained.view(), corpus, test_docs, schema, config, Regime::kEndToEnd, config.execution);
    reports.push_back({k, sampled.mentions.size(), score(gold, prediction.predictions)});
  }
  return reports;
}

}  // namespace promptee
