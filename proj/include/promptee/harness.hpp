#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "promptee/corpus.hpp"
#include "promptee/errors.hpp"
#include "promptee/evaluation.hpp"
#include "promptee/generation.hpp"
#include "promptee/io.hpp"
#include "promptee/prompting.hpp"
#include "promptee/schema.hpp"

namespace promptee {

enum class Regime { kEndToEnd, kGoldTriggers };
enum class Execution { kSerial, kParallel };

std::string to_string(Regime regime);
Regime regime_from_string(std::string_view name);

struct PipelineConfig {
  std::filesystem::path schema_path;
  std::filesystem::path corpus_path;
  std::filesystem::path output_dir = "out";
  SplitSpec splits;
  std::vector<Split> train_splits = {Split::kTrain};
  Split eval_split = Split::kTest;
  std::map<TrainStage, TrainConfig> stages = {
      {TrainStage::kTriggerCoarse, TrainConfig::defaults(TrainStage::kTriggerCoarse)},
      {TrainStage::kTriggerSubtype, TrainConfig::defaults(TrainStage::kTriggerSubtype)},
      {TrainStage::kArgument, TrainConfig::defaults(TrainStage::kArgument)}};
  std::size_t external_window = kExternalWindowWords;
  std::size_t internal_window = kInternalWindowWords;
  std::size_t max_gap_sentences = 3;
  std::uint64_t seed = 42;
  std::size_t max_decode_len = 128;
  Regime regime = Regime::kEndToEnd;
  Execution execution = Execution::kParallel;

  /// Relative paths resolve against `base_dir`. Unknown keys are rejected.
  static PipelineConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
  nlohmann::json to_json() const;
};

/// Creates an untrained backend whose vocabulary covers `texts`.
using BackendFactory = std::function<std::unique_ptr<Seq2SeqBackend>(const std::vector<std::string>& texts)>;
BackendFactory mock_backend_factory();

/// Instances of one family for one document. Instances that cannot be
/// built are skipped with a diagnostic.
std::vector<PromptInstance> build_family_instances(const Document& doc, const std::vector<EventMention>& mentions,
                                                   const Schema& schema, PromptFamily family,
                                                   const PipelineConfig& config, Diagnostics& diag);

struct TrainingSets {
  std::vector<PromptInstance> trigger_coarse;   // external + internal
  std::vector<PromptInstance> trigger_subtype;  // subtype classification
  std::vector<PromptInstance> argument;         // single + joint
};

/// With `event_sentences_only`, external prompts are built only for
/// sentences that carry a mention (used by the few-shot driver).
TrainingSets build_training_sets(const Corpus& corpus, const std::vector<std::string>& doc_ids, const Schema& schema,
                                 const PipelineConfig& config, Diagnostics& diag, bool event_sentences_only = false,
                                 Execution execution = Execution::kParallel);

struct DetectedEvent {
  std::size_t sentence_index = 0;
  CharSpan trigger;
  std::string surface;
  std::string main_type;
  std::string subtype;
};

std::vector<DetectedEvent> gold_detections(const std::vector<EventMention>& mentions);

std::vector<DetectedEvent> detect_events(const Seq2SeqBackend& trigger_backend, const Seq2SeqBackend& subtype_backend,
                                         const Document& doc, const Schema& schema, const PipelineConfig& config,
                                         Diagnostics& diag, std::vector<GenerationRecord>* records = nullptr);

std::vector<EventPrediction> extract_arguments(const Seq2SeqBackend& argument_backend, const Document& doc,
                                               const std::vector<DetectedEvent>& detected, const Schema& schema,
                                               const PipelineConfig& config, Diagnostics& diag,
                                               std::vector<GenerationRecord>* records = nullptr);

struct StageBackends {
  const Seq2SeqBackend* trigger = nullptr;
  const Seq2SeqBackend* subtype = nullptr;
  const Seq2SeqBackend* argument = nullptr;
};

struct CorpusPrediction {
  std::vector<EventPrediction> predictions;
  std::vector<GenerationRecord> generations;
  Diagnostics diagnostics;
};

/// Predicts every listed document; output order follows `doc_ids` for
/// both execution modes.
CorpusPrediction predict_documents(const StageBackends& backends, const Corpus& corpus,
                                   const std::vector<std::string>& doc_ids, const Schema& schema,
                                   const PipelineConfig& config, Regime regime, Execution execution);

struct TrainedStages {
  std::unique_ptr<Seq2SeqBackend> trigger;
  std::unique_ptr<Seq2SeqBackend> subtype;
  std::unique_ptr<Seq2SeqBackend> argument;
  std::map<TrainStage, std::vector<LossPoint>> loss_curves;

  StageBackends view() const { return {trigger.get(), subtype.get(), argument.get()}; }
};

/// Fresh backends from `factory`, each trained on its stage set. Empty sets
/// leave the stage untrained.
TrainedStages train_stages(const TrainingSets& sets, const std::vector<std::string>& vocab_texts,
                           const PipelineConfig& config, const BackendFactory& factory);

/// Texts a backend vocabulary should cover for this corpus and schema.
std::vector<std::string> vocabulary_texts(const Corpus& corpus, const TrainingSets& sets);

std::vector<std::string> docs_in_splits(const Corpus& corpus, const std::map<std::string, Split>& assignment,
                                        const std::vector<Split>& splits);

struct RunResult {
  std::vector<EventPrediction> predictions;
  ScoreReport report;
  Diagnostics diagnostics;
};

/// ingest -> build instances -> train three stages -> predict -> score,
/// writing every artifact under config.output_dir.
RunResult run_end_to_end(const PipelineConfig& config, const BackendFactory& factory);

/// Same pipeline on already-loaded inputs; writes nothing.
RunResult run_pipeline(const Corpus& corpus, const Schema& schema, const PipelineConfig& config,
                       const BackendFactory& factory, TrainedStages* trained = nullptr);

struct FewShotReport {
  std::size_t k = 0;
  std::size_t sampled = 0;
  ScoreReport report;
};

/// For each k: sample k mentions per subtype from train+dev, train fresh
/// stages and evaluate on the full test split.
std::vector<FewShotReport> fewshot_driver(const Corpus& corpus, const Schema& schema, const PipelineConfig& config,
                                          const std::vector<std::size_t>& ks, std::uint64_t seed,
                                          const BackendFactory& factory);

}  // namespace promptee
