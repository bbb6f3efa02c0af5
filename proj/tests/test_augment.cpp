#include <algorithm>

#include "doctest.h"
#include "fixtures.hpp"
#include "promptee/augment.hpp"
#include "promptee/errors.hpp"
#include "promptee/harness.hpp"

using namespace promptee;

namespace {

std::vector<PromptInstance> synthetic_single_instances() {
  const auto schema = fixtures::synthetic_schema();
  const auto corpus = fixtures::synthetic_corpus();
  PipelineConfig config;
  Diagnostics diag;
  std::vector<PromptInstance> out;
  for (const auto& d : corpus.documents) {
    for (auto& inst : build_family_instances(d, corpus.mentions_of(d.doc_id), schema, PromptFamily::kSingleArgument,
                                             config, diag)) {
      out.push_back(std::move(inst));
    }
  }
  return out;
}

MapLexicon lexicon() { return MapLexicon::load(fixtures::data_dir() / "synthetic" / "lexicon.json"); }

std::vector<std::string> specials(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& w : split_words(text)) {
    if (tokens::is_special(w.text)) out.emplace_back(w.text);
  }
  return out;
}

std::vector<std::string> sorted_words(std::string_view text) {
  auto w = split_ws(text);
  std::sort(w.begin(), w.end());
  return w;
}

/// Protection contract for an augmented copy of `original`.
void check_protected(const PromptInstance& original, const PromptInstance& augmented) {
  CHECK(augmented.prompt_section == original.prompt_section);
  CHECK(augmented.target_text == original.target_text);
  CHECK(specials(augmented.passage.text) == specials(original.passage.text));
  CHECK(augmented.passage.offset_map.size() == augmented.passage.text.size());
  const auto open = augmented.passage.text.find("<t0> ");
  REQUIRE(open != std::string::npos);
  const auto orig_open = original.passage.text.find("<t0> ");
  const auto trigger_len = original.passage.text.find(" </t0>") - orig_open;
  CHECK(augmented.passage.text.substr(open, trigger_len) == original.passage.text.substr(orig_open, trigger_len));
  for (const auto& slot : augmented.slots) {
    for (const auto& g : slot.gold) {
      if (g == "None") continue;
      const auto hits = find_word_sequence(augmented.passage.text, g);
      REQUIRE_FALSE(hits.empty());
      // Protected answers keep their mapping back to the document.
      bool mapped = false;
      for (const auto& h : hits) mapped = mapped || augmented.passage.to_document(h).has_value();
      CHECK(mapped);
    }
  }
  CHECK(fill_sentinels(augmented.input_text(), {}) == augmented.input_text());
}

}  // namespace

TEST_CASE("swap preserves the word multiset") {
  const auto insts = synthetic_single_instances();
  const auto lex = lexicon();
  Rng rng(1);
  std::size_t applied = 0;
  for (const auto& inst : insts) {
    const auto out = apply_eda_op(inst, EdaOp::kSwap, rng, lex);
    if (!out) continue;
    ++applied;
    CHECK(sorted_words(out->passage.text) == sorted_words(inst.passage.text));
    check_protected(inst, *out);
  }
  CHECK(applied > 0);
}

TEST_CASE("each EDA operation keeps protected tokens intact") {
  const auto insts = synthetic_single_instances();
  const auto lex = lexicon();
  for (auto op : {EdaOp::kReplace, EdaOp::kInsert, EdaOp::kDelete}) {
    Rng rng(9);
    std::size_t applied = 0;
    for (const auto& inst : insts) {
      const auto out = apply_eda_op(inst, op, rng, lex);
      if (!out) continue;
      ++applied;
      check_protected(inst, *out);
      const auto before = split_ws(inst.passage.text).size();
      const auto after = split_ws(out->passage.text).size();
      if (op == EdaOp::kInsert) CHECK(after == before + 1);
      if (op == EdaOp::kDelete) CHECK(after + 1 == before);
      if (op == EdaOp::kReplace) CHECK(after == before);
    }
    CHECK(applied > 0);
  }
}

TEST_CASE("deletion never empties the unprotected region") {
  const auto schema = fixtures::synthetic_schema();
  const auto doc = fixtures::make_doc("tiny", {"Bo died ."});
  const auto m = fixtures::mention(doc, 0, "Life.Die", "died", {{"Victim", "Bo"}});
  const auto insts = build_single_argument_prompts(make_passage(doc, {0, 0}, 100), m, schema);
  REQUIRE(insts.size() == 1);
  Rng rng(3);
  CHECK_FALSE(apply_eda_op(insts[0], EdaOp::kDelete, rng, lexicon()).has_value());
  CHECK_FALSE(apply_eda_op(insts[0], EdaOp::kSwap, rng, lexicon()).has_value());
}

TEST_CASE("EDA rejects other families and is deterministic") {
  const auto schema = fixtures::synthetic_schema();
  const auto [doc, ms] = fixtures::convict_sentence_doc();
  const auto external =
      build_external_trigger_prompt(make_passage(doc, {0, 0}, 100), schema, std::span<const EventMention>(ms));
  Rng rng(1);
  CHECK_THROWS_AS(apply_eda_op(external, EdaOp::kSwap, rng, lexicon()), ValidationError);

  const auto insts = synthetic_single_instances();
  const auto a = augment_eda(insts, 42, 3, lexicon());
  const auto b = augment_eda(insts, 42, 3, lexicon());
  REQUIRE(a.size() == insts.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].input_text() == b[i].input_text());
}

TEST_CASE("expansion matches the interaction training-set size") {
  const auto schema = fixtures::synthetic_schema();
  const auto corpus = fixtures::synthetic_corpus();
  PipelineConfig config;
  Diagnostics diag;
  std::vector<std::string> ids;
  for (const auto& d : corpus.documents) ids.push_back(d.doc_id);
  const auto sets = build_training_sets(corpus, ids, schema, config, diag);
  const auto singles = synthetic_single_instances();
  const auto joint = sets.argument.size() - singles.size();
  REQUIRE(joint > 0);
  const auto expanded = expand_with_eda(singles, singles.size() + joint, 7, 2, lexicon());
  CHECK(expanded.size() == singles.size() + joint);
  for (std::size_t i = 0; i < singles.size(); ++i) CHECK(expanded[i].input_text() == singles[i].input_text());
  for (std::size_t i = singles.size(); i < expanded.size(); ++i) {
    CHECK(expanded[i].family == PromptFamily::kSingleArgument);
  }
  CHECK_THROWS_AS(expand_with_eda(singles, 1, 7, 2, lexicon()), ValidationError);
}

TEST_CASE("back-translation with the identity transform is a no-op") {
  const auto insts = synthetic_single_instances();
  const auto r = augment_backtranslate(insts, IdentityTranslator{}, 42);
  REQUIRE(r.instances.size() == insts.size());
  CHECK(r.diagnostics.messages.empty());
  for (std::size_t i = 0; i < insts.size(); ++i) {
    CHECK(r.instances[i].input_text() == insts[i].input_text());
    CHECK(r.instances[i].passage.offset_map == insts[i].passage.offset_map);
  }
}

namespace {

class DropWord final : public RoundTripTranslator {
 public:
  explicit DropWord(std::string word) : word_(std::move(word)) {}
  std::optional<std::string> round_trip(std::string_view text, std::uint64_t) const override {
    auto words = split_ws(text);
    words.erase(std::remove(words.begin(), words.end(), word_), words.end());
    return join(words, " ");
  }

 private:
  std::string word_;
};

class Failing final : public RoundTripTranslator {
 public:
  std::optional<std::string> round_trip(std::string_view, std::uint64_t) const override {
    throw std::runtime_error("service unavailable");
  }
};

}  // namespace

TEST_CASE("back-translation drops instances whose answer vanished") {
  const auto schema = fixtures::synthetic_schema();
  const auto [doc, ms] = fixtures::convict_sentence_doc();
  const auto insts = build_single_argument_prompts(make_passage(doc, {0, 0}, 100), ms[0], schema);
  const auto r = augment_backtranslate(insts, DropWord("Varga"), 1);
  // The Defendant instance loses its answer; the Adjudicator one survives.
  REQUIRE(r.instances.size() == 1);
  CHECK(std::get<RoleBinding>(r.instances[0].slots[0].bind).role == "Adjudicator");
  REQUIRE(r.diagnostics.messages.size() == 1);
  CHECK(r.diagnostics.messages[0].find("Varga") != std::string::npos);

  const auto failed = augment_backtranslate(insts, Failing{}, 1);
  CHECK(failed.instances.empty());
  CHECK_FALSE(failed.diagnostics.messages.empty());
}

TEST_CASE("word-shuffle back-translation re-grounds answers") {
  const auto insts = synthetic_single_instances();
  const auto r = augment_backtranslate(insts, WordShuffleTranslator{}, 5);
  CHECK(r.instances.size() + r.diagnostics.messages.size() >= insts.size());
  REQUIRE(r.instances.size() == r.answer_spans.size());
  REQUIRE_FALSE(r.instances.empty());
  for (std::size_t i = 0; i < r.instances.size(); ++i) {
    const auto& inst = r.instances[i];
    std::size_t k = 0;
    for (const auto& slot : inst.slots) {
      for (const auto& g : slot.gold) {
        if (g == "None") continue;
        const auto span = r.answer_spans[i].at(k++);
        CHECK(normalize_ws(inst.passage.text.substr(span.begin, span.size())) == g);
        const auto hits = find_word_sequence(inst.passage.text, g);
        CHECK(std::find(hits.begin(), hits.end(), span) != hits.end());
      }
    }
    CHECK_FALSE(specials(inst.passage.text).empty());
  }
}

TEST_CASE("lexicon loading") {
  const auto lex = lexicon();
  CHECK_FALSE(lex.synonyms("home").empty());
  CHECK(lex.synonyms("zebra").empty());
  CHECK_THROWS_AS(MapLexicon::load("/nonexistent.json"), ValidationError);
}
