#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "promptee/corpus.hpp"

namespace promptee {

struct PredictedArgument {
  std::string role;
  std::optional<CharSpan> span;  // nullopt when the answer could not be grounded
  std::string surface;
};

struct EventPrediction {
  std::string doc_id;
  std::size_t sentence_index = 0;
  std::optional<CharSpan> trigger;
  std::string trigger_surface;
  std::string main_type;
  std::string subtype;
  std::vector<PredictedArgument> arguments;
};

nlohmann::json prediction_to_json(const EventPrediction& p);
EventPrediction prediction_from_json(const nlohmann::json& j);
void write_predictions(const std::vector<EventPrediction>& preds, const std::filesystem::path& path);
std::vector<EventPrediction> read_predictions(const std::filesystem::path& path);

struct Prf {
  double p = 0.0;
  double r = 0.0;
  double f1 = 0.0;
  std::size_t gold = 0;
  std::size_t pred = 0;
  std::size_t correct = 0;

  static Prf from_counts(std::size_t gold, std::size_t pred, std::size_t correct);
};

struct ScoreReport {
  Prf trig_c;
  Prf arg_c;

  nlohmann::json to_json() const;
};

/// Hashable identity used for exact matching.
using MatchKey = std::string;

/// Gold / predicted keys. A predicted item without a grounded span gets a
/// key that can never match.
std::vector<MatchKey> gold_trigger_keys(const std::vector<EventMention>& gold);
std::vector<MatchKey> predicted_trigger_keys(const std::vector<EventPrediction>& pred);
std::vector<MatchKey> gold_argument_keys(const std::vector<EventMention>& gold);
/// Duplicate arguments of one predicted event are collapsed first.
std::vector<MatchKey> predicted_argument_keys(const std::vector<EventPrediction>& pred);

/// Size of the one-to-one matching of equal keys.
std::size_t count_matches(const std::vector<MatchKey>& gold, const std::vector<MatchKey>& pred);

Prf score_triggers(const std::vector<EventMention>& gold, const std::vector<EventPrediction>& pred);
Prf score_arguments(const std::vector<EventMention>& gold, const std::vector<EventPrediction>& pred);
ScoreReport score(const std::vector<EventMention>& gold, const std::vector<EventPrediction>& pred);

inline const std::vector<std::string>& error_categories() {
  static const std::vector<std::string> kCategories = {"shallow_heuristics", "ambiguous_expression",
                                                       "coreference_or_head", "other1", "other2"};
  return kCategories;
}

struct ErrorRecord {
  std::string kind;  // "trigger" or "argument"
  std::string doc_id;
  std::size_t sentence_index = 0;
  std::string context;
  nlohmann::json gold;       // gold events of the same sentence
  nlohmann::json predicted;  // the incorrect prediction
  std::string category;      // blank until annotated

  nlohmann::json to_json() const;
  static ErrorRecord from_json(const nlohmann::json& j);
};

/// Uniform sample (without replacement) of incorrect predictions.
std::vector<ErrorRecord> export_errors(const Corpus& corpus, const std::vector<EventMention>& gold,
                                       const std::vector<EventPrediction>& pred, std::size_t sample_n,
                                       std::uint64_t seed);
void write_error_records(const std::vector<ErrorRecord>& records, const std::filesystem::path& path);
std::vector<ErrorRecord> read_error_records(const std::filesystem::path& path);

}  // namespace promptee
