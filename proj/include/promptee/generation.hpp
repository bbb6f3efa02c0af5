#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "promptee/corpus.hpp"
#include "promptee/prompting.hpp"
#include "promptee/vocabulary.hpp"

namespace promptee {

struct TrainExample {
  std::vector<TokenId> input;
  std::vector<TokenId> target;
};

/// Hyperparameters and step counter of the optimizer driving train_step.
struct OptimizerState {
  std::string name = "adamw";
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.01;
  std::uint64_t steps = 0;
};

/// Encoder-decoder model contract. next_logits must be deterministic and
/// safe to call concurrently; train_step is exclusive.
class Seq2SeqBackend {
 public:
  virtual ~Seq2SeqBackend() = default;

  virtual std::vector<TokenId> tokenize(std::string_view text) const = 0;
  virtual std::string detokenize(std::span<const TokenId> ids) const = 0;
  virtual std::size_t vocab_size() const = 0;
  /// Id of a single-token string, if the vocabulary has one.
  virtual std::optional<TokenId> token_id(std::string_view token) const = 0;

  /// Unnormalized scores over the vocabulary for the next decoder token.
  virtual std::vector<double> next_logits(std::span<const TokenId> encoder,
                                          std::span<const TokenId> prefix) const = 0;

  /// One optimizer step on the mean token cross entropy of `batch`;
  /// returns the loss measured before the update.
  virtual double train_step(std::span<const TrainExample> batch, OptimizerState& state) = 0;

  virtual std::unique_ptr<Seq2SeqBackend> clone() const = 0;
  virtual void save(const std::filesystem::path& path) const = 0;
};

class ConstraintSet {
 public:
  ConstraintSet() = default;
  explicit ConstraintSet(std::size_t vocab_size) : allowed_(vocab_size, 0), structural_(vocab_size, 0) {}

  void allow(TokenId id);
  void allow_structural(TokenId id);
  bool contains(TokenId id) const;
  bool is_structural(TokenId id) const;
  std::size_t vocab_size() const { return allowed_.size(); }
  std::vector<TokenId> allowed_ids() const;

 private:
  std::vector<char> allowed_;
  std::vector<char> structural_;
};

/// Tokens of the input plus sentinels, end marker, "None" and "|".
ConstraintSet build_constraint(const Seq2SeqBackend& backend, std::string_view input_text);
/// Tokens of the candidate answers plus the structural tokens.
ConstraintSet build_answer_constraint(const Seq2SeqBackend& backend, const std::vector<std::string>& candidates);

/// Highest logit among allowed ids, lowest id on ties; nullopt when every
/// allowed logit is -inf.
std::optional<TokenId> masked_argmax(std::span<const double> logits, const ConstraintSet& constraint);

struct GroundedAnswer {
  std::string answer;
  std::optional<CharSpan> passage_span;
  std::optional<CharSpan> doc_span;
  bool in_focus = false;
};

struct GenerationResult {
  std::vector<TokenId> token_ids;
  std::string text;
  AnswerMap answer_map;
  std::map<int, std::vector<GroundedAnswer>> grounded;
};

GenerationResult constrained_greedy_decode(const Seq2SeqBackend& backend, std::string_view input_text,
                                           const ConstraintSet& constraint, std::size_t max_len);

/// Locates each answer as a run of whole words, focus region first, then the
/// whole passage; first occurrence wins.
GenerationResult ground_answers(GenerationResult result, const Passage& passage);

enum class TrainStage { kTriggerCoarse, kTriggerSubtype, kArgument };
std::string to_string(TrainStage stage);
TrainStage stage_from_string(std::string_view name);

struct TrainConfig {
  double learning_rate = 1e-4;
  std::size_t epochs = 6;
  std::size_t batch_size = 8;
  std::uint64_t seed = 42;
  std::string optimizer = "adamw";
  TrainStage stage = TrainStage::kTriggerCoarse;

  static TrainConfig defaults(TrainStage stage);
  void validate() const;
};

struct LossPoint {
  std::size_t epoch = 0;
  std::size_t step = 0;
  double loss = 0.0;
};

std::vector<LossPoint> train(Seq2SeqBackend& backend, const std::vector<PromptInstance>& instances,
                             const TrainConfig& config);

std::string loss_curve_csv(const std::vector<LossPoint>& curve);

}  // namespace promptee
