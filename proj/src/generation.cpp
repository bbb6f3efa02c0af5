#include "promptee/generation.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "promptee/errors.hpp"
#include "promptee/rng.hpp"

namespace promptee {

void ConstraintSet::allow(TokenId id) {
  if (id < 0 || static_cast<std::size_t>(id) >= allowed_.size()) {
    throw RuntimeFailure("constraint id out of range: " + std::to_string(id));
  }
  allowed_[static_cast<std::size_t>(id)] = 1;
}

void ConstraintSet::allow_structural(TokenId id) {
  allow(id);
  structural_[static_cast<std::size_t>(id)] = 1;
}

bool ConstraintSet::contains(TokenId id) const {
  return id >= 0 && static_cast<std::size_t>(id) < allowed_.size() && allowed_[static_cast<std::size_t>(id)];
}

bool ConstraintSet::is_structural(TokenId id) const {
  return id >= 0 && static_cast<std::size_t>(id) < structural_.size() && structural_[static_cast<std::size_t>(id)];
}

std::vector<TokenId> ConstraintSet::allowed_ids() const {
  std::vector<TokenId> out;
  for (std::size_t i = 0; i < allowed_.size(); ++i) {
    if (allowed_[i]) out.push_back(static_cast<TokenId>(i));
  }
  return out;
}

namespace {

ConstraintSet structural_only(const Seq2SeqBackend& backend) {
  ConstraintSet c(backend.vocab_size());
  for (auto t : {tokens::kEnd, tokens::kNone, tokens::kSeparator}) {
    if (auto id = backend.token_id(t)) c.allow_structural(*id);
  }
  for (int k = 0; k < tokens::kMaxSentinels; ++k) {
    if (auto id = backend.token_id(tokens::sentinel(k))) c.allow_structural(*id);
  }
  return c;
}

}  // namespace

ConstraintSet build_constraint(const Seq2SeqBackend& backend, std::string_view input_text) {
  ConstraintSet c = structural_only(backend);
  for (auto id : backend.tokenize(input_text)) c.allow(id);
  return c;
}

ConstraintSet build_answer_constraint(const Seq2SeqBackend& backend, const std::vector<std::string>& candidates) {
  ConstraintSet c = structural_only(backend);
  for (const auto& cand : candidates) {
    for (auto id : backend.tokenize(cand)) c.allow(id);
  }
  return c;
}

std::optional<TokenId> masked_argmax(std::span<const double> logits, const ConstraintSet& constraint) {
  std::optional<TokenId> best;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const auto id = static_cast<TokenId>(i);
    if (!constraint.contains(id)) continue;
    if (logits[i] > best_value) {
      best_value = logits[i];
      best = id;
    }
  }
  return best;
}

GenerationResult constrained_greedy_decode(const Seq2SeqBackend& backend, std::string_view input_text,
                                           const ConstraintSet& constraint, std::size_t max_len) {
  if (max_len == 0) throw ValidationError("max_len must be at least 1");
  const auto end_id = backend.token_id(tokens::kEnd);
  if (!end_id) throw RuntimeFailure("backend vocabulary has no end marker");
  if (constraint.vocab_size() != backend.vocab_size()) {
    throw RuntimeFailure("constraint was built for a different vocabulary");
  }
  const auto encoder = backend.tokenize(input_text);
  GenerationResult result;
  for (std::size_t step = 0; step < max_len; ++step) {
    const auto logits = backend.next_logits(encoder, result.token_ids);
    if (logits.size() != backend.vocab_size()) throw RuntimeFailure("backend returned a logit vector of wrong size");
    const auto next = masked_argmax(logits, constraint);
    if (!next) throw RuntimeFailure("every allowed token has logit -inf at step " + std::to_string(step));
    if (!constraint.contains(*next)) throw RuntimeFailure("decoder emitted a token outside the constraint");
    result.token_ids.push_back(*next);
    if (*next == *end_id) break;
  }
  result.text = backend.detokenize(result.token_ids);
  result.answer_map = parse_generation(result.text);
  return result;
}

GenerationResult ground_answers(GenerationResult result, const Passage& passage) {
  result.grounded.clear();
  const CharSpan focus{passage.focus.begin, passage.focus.end};
  for (const auto& [k, answers] : result.answer_map.entries) {
    auto& out = result.grounded[k];
    for (const auto& answer : answers) {
      GroundedAnswer g;
      g.answer = answer;
      std::optional<CharSpan> outside;
      for (const auto& hit : find_word_sequence(passage.text, answer)) {
        if (!passage.to_document(hit)) continue;
        if (focus.contains(hit)) {
          g.passage_span = hit;
          g.in_focus = true;
          break;
        }
        if (!outside) outside = hit;
      }
      if (!g.passage_span) g.passage_span = outside;
      if (g.passage_span) g.doc_span = passage.to_document(*g.passage_span);
      out.push_back(std::move(g));
    }
  }
  return result;
}

std::string to_string(TrainStage stage) {
  switch (stage) {
    case TrainStage::kTriggerCoarse: return "trigger_coarse";
    case TrainStage::kTriggerSubtype: return "trigger_subtype";
    case TrainStage::kArgument: return "argument";
  }
  return "trigger_coarse";
}

TrainStage stage_from_string(std::string_view name) {
  for (auto s : {TrainStage::kTriggerCoarse, TrainStage::kTriggerSubtype, TrainStage::kArgument}) {
    if (to_string(s) == name) return s;
  }
  throw ValidationError("unknown training stage: " + std::string(name));
}

TrainConfig TrainConfig::defaults(TrainStage stage) {
  TrainConfig c;
  c.stage = stage;
  switch (stage) {
    case TrainStage::kTriggerCoarse:
      c.learning_rate = 1e-4;
      c.epochs = 6;
      c.batch_size = 8;
      break;
    case TrainStage::kTriggerSubtype:
      c.learning_rate = 5e-4;
      c.epochs = 3;
      c.batch_size = 8;
      break;
    case TrainStage::kArgument:
      c.learning_rate = 1e-3;
      c.epochs = 3;
      c.batch_size = 64;
      break;
  }
  return c;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ValidationError("learning_rate must be positive");
  if (batch_size == 0) throw ValidationError("batch_size must be positive");
  if (optimizer != "adamw") throw ValidationError("unsupported optimizer: " + optimizer);
}

std::vector<LossPoint> train(Seq2SeqBackend& backend, const std::vector<PromptInstance>& instances,
                             const TrainConfig& config) {
  config.validate();
  if (instances.empty()) throw ValidationError("no training instances");
  std::vector<TrainExample> examples;
  examples.reserve(instances.size());
  for (const auto& inst : instances) {
    if (trim(inst.target_text).empty()) throw ValidationError("training instance has an empty target");
    examples.push_back({backend.tokenize(inst.input_text()), backend.tokenize(inst.target_text)});
  }

  OptimizerState state;
  state.name = config.optimizer;
  state.learning_rate = config.learning_rate;
  std::vector<LossPoint> curve;
  std::vector<std::size_t> order(examples.size());
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(derive_seed(config.seed, epoch));
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      std::vector<TrainExample> batch;
      for (std::size_t i = start; i < std::min(order.size(), start + config.batch_size); ++i) {
        batch.push_back(examples[order[i]]);
      }
      curve.push_back({epoch, step++, backend.train_step(batch, state)});
    }
  }
  return curve;
}

std::string loss_curve_csv(const std::vector<LossPoint>& curve) {
  std::string out = "epoch,step,loss\n";
  char buf[64];
  for (const auto& p : curve) {
    std::snprintf(buf, sizeof(buf), "%zu,%zu,%.12g\n", p.epoch, p.step, p.loss);
    out += buf;
  }
  return out;
}

}  // namespace promptee
