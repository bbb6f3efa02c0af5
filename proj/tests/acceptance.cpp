// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero if any gated criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <string>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "promptee/augment.hpp"
#include "promptee/harness.hpp"
#include "promptee/mock_backend.hpp"

using namespace promptee;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

PipelineConfig synthetic_config(const std::string& name = "config.json") {
  const auto dir = fixtures::data_dir() / "synthetic";
  return PipelineConfig::from_json(read_json_file(dir / name), dir);
}

std::map<int, std::string> gold_fill(const PromptInstance& inst) {
  std::map<int, std::string> out;
  for (const auto& s : inst.slots) out[s.sentinel] = s.gold.front();
  return out;
}

// 1. Train on the synthetic corpus and evaluate on the same documents.
Outcome memorization() {
  const auto start = Clock::now();
  const auto schema = fixtures::synthetic_schema();
  std::size_t role_slots = 0;
  for (const auto& st : schema.subtypes()) role_slots += schema.roles_for(st.name).size();
  if (schema.main_types().size() != 3 || schema.subtypes().size() != 5 || role_slots != 6) {
    return {false, "synthetic schema shape is not 3/5/6"};
  }
  auto config = synthetic_config();
  config.output_dir = std::filesystem::temp_directory_path() / "promptee_acceptance_memorization";
  const auto result = run_end_to_end(config, mock_backend_factory());
  const double elapsed = seconds_since(start);
  char buf[160];
  std::snprintf(buf, sizeof buf, "Trig-C F1=%.4f Arg-C F1=%.4f docs=20 time=%.2fs", result.report.trig_c.f1,
                result.report.arg_c.f1, elapsed);
  return {result.report.trig_c.f1 == 1.0 && result.report.arg_c.f1 == 1.0 && elapsed < 60.0, buf};
}

// 2. Constrained greedy decoding against a per-step brute-force argmax.
Outcome decoding_oracle() {
  const auto start = Clock::now();
  const std::vector<std::string> structural = {"</s>", "None", "|", "<extra_id_0>", "<extra_id_1>"};
  const std::vector<std::string> words = {"a", "b", "c", "d", "e", "f"};
  const double values[] = {-std::numeric_limits<double>::infinity(), 0.0, 1.0, 2.0, 3.0};
  Rng rng(2024);
  std::size_t agree = 0;
  const std::size_t trials = 200;
  for (std::size_t t = 0; t < trials; ++t) {
    std::vector<std::string> toks = structural;
    const std::size_t n_words = 1 + rng.below(words.size());
    toks.insert(toks.end(), words.begin(), words.begin() + static_cast<std::ptrdiff_t>(n_words));
    MockBackend backend{Vocabulary(toks)};  // appends <unk>: at most 12 tokens
    const std::size_t vocab = backend.vocab_size();

    std::vector<std::string> input_words;
    for (std::size_t i = 0, len = 1 + rng.below(4); i < len; ++i) input_words.push_back(toks[5 + rng.below(n_words)]);
    const std::string input = join(input_words, " ");

    std::set<TokenId> allowed;
    for (const auto& s : structural) allowed.insert(backend.vocabulary().id(s));
    for (const auto& w : input_words) allowed.insert(backend.vocabulary().id(w));

    const std::size_t max_len = 1 + rng.below(4);
    oracles::LogitTable table;
    table.vocab = vocab;
    // Random rows for every prefix of length < max_len over a few ids.
    std::function<void(std::vector<TokenId>)> fill = [&](std::vector<TokenId> prefix) {
      std::vector<double> row(vocab);
      for (auto& v : row) v = values[rng.below(5)];
      backend.set_logits(input, prefix, row);
      table.rows[prefix] = row;
      if (prefix.size() + 1 >= max_len) return;
      for (TokenId id = 0; id < static_cast<TokenId>(vocab); ++id) {
        if (!allowed.count(id) || id == backend.vocabulary().id("</s>")) continue;
        auto next = prefix;
        next.push_back(id);
        fill(next);
      }
    };
    fill({});

    const auto expected = oracles::brute_force_decode(table, allowed, backend.vocabulary().id("</s>"), max_len);
    try {
      const auto got = constrained_greedy_decode(backend, input, build_constraint(backend, input), max_len);
      if (expected && *expected == got.token_ids) ++agree;
    } catch (const RuntimeFailure&) {
      if (!expected) ++agree;
    }
  }
  const double elapsed = seconds_since(start);
  char buf[120];
  std::snprintf(buf, sizeof buf, "%zu/%zu configurations agree, time=%.2fs", agree, trials, elapsed);
  return {agree == trials && elapsed < 10.0, buf};
}

// 3. First-step cross entropy on a 4-token vocabulary.
Outcome loss_oracle() {
  const std::vector<TokenId> enc = {1, 2};
  auto fresh = [&] {
    MockBackend be(Vocabulary({"</s>", "a", "b", "<unk>"}));
    be.set_logits(enc, {}, {1.0, 2.0, 0.5, -1.0});
    be.set_logits(enc, std::vector<TokenId>{1}, {0.3, 0.1, 0.2, 0.0});
    return be;
  };
  // Hand computation: -log softmax(1,2,.5,-1)[a], -log softmax(.3,.1,.2,0)[</s>],
  // and log 4 for each of the three tokens scored under default logits.
  auto lse = [](std::initializer_list<double> xs) {
    double s = 0;
    for (double x : xs) s += std::exp(x);
    return std::log(s);
  };
  const double t1 = lse({1.0, 2.0, 0.5, -1.0}) - 2.0;
  const double t2 = lse({0.3, 0.1, 0.2, 0.0}) - 0.3;
  const double single_expected = (t1 + t2) / 2.0;
  const double batch_expected = (t1 + t2 + 3.0 * std::log(4.0)) / 5.0;

  OptimizerState s1, s2;
  auto a = fresh();
  const double single = a.train_step(std::vector<TrainExample>{{enc, {1, 0}}}, s1);
  auto b = fresh();
  const double batch = b.train_step(std::vector<TrainExample>{{enc, {1, 0}}, {{2}, {2, 1, 0}}}, s2);
  const double err = std::max(std::abs(single - single_expected), std::abs(batch - batch_expected));
  char buf[120];
  std::snprintf(buf, sizeof buf, "single=%.12f batch=%.12f max|err|=%.2e", single, batch, err);
  return {err < 1e-9, buf};
}

// 4. Micro P/R/F1 against maximum bipartite matching, plus the worked example.
Outcome scorer_oracle() {
  Rng rng(77);
  std::size_t agree = 0;
  const std::size_t trials = 100;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto [gold, pred] = oracles::random_sets(rng);
    const auto tr = score_triggers(gold, pred);
    const auto ar = score_arguments(gold, pred);
    const auto ot = oracles::oracle_triggers(gold, pred);
    const auto oa = oracles::oracle_arguments(gold, pred);
    const auto expect = [](const Prf& got, const oracles::Counts& c) {
      const double p = c.pred ? double(c.correct) / double(c.pred) : 0.0;
      const double r = c.gold ? double(c.correct) / double(c.gold) : 0.0;
      return got.gold == c.gold && got.pred == c.pred && got.correct == c.correct && got.p == p && got.r == r &&
             got.f1 == oracles::f1_of(p, r);
    };
    if (expect(tr, ot) && expect(ar, oa)) ++agree;
  }
  // Worked example: 3 predicted, 4 gold, 2 correct.
  const auto worked = Prf::from_counts(4, 3, 2);
  const bool example = std::abs(worked.p - 2.0 / 3.0) < 1e-9 && std::abs(worked.r - 0.5) < 1e-9 &&
                       std::abs(worked.f1 - 4.0 / 7.0) < 1e-9;
  char buf[120];
  std::snprintf(buf, sizeof buf, "%zu/%zu random sets agree, worked example F1=%.4f", agree, trials, worked.f1);
  return {agree == trials && example, buf};
}

// 5. Prompt invariants on generated documents.
Outcome prompt_invariants() {
  const auto schema = fixtures::synthetic_schema();
  const auto ace = fixtures::ace_schema();
  Rng rng(5);
  std::size_t external = 0, external_ok = 0, filled = 0, filled_ok = 0, joint = 0, joint_ok = 0;
  std::size_t trial = 0;
  while (filled < 1000 && trial < 5000) {
    const auto [doc, ms] = fixtures::random_doc(rng, "p" + std::to_string(trial++), schema);
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
      const auto passage = make_passage(doc, {s, s}, kExternalWindowWords);
      std::vector<EventMention> here;
      for (const auto& m : ms) {
        if (m.sentence_index == s) here.push_back(m);
      }
      for (const auto* sch : {&schema, &ace}) {
        const auto inst = build_external_trigger_prompt(passage, *sch, std::span<const EventMention>(here));
        ++external;
        if (inst.slots.size() == sch->main_types().size() &&
            sentinels_in(inst.prompt_section).size() == sch->main_types().size()) {
          ++external_ok;
        }
      }
      if (here.empty()) continue;
      const auto internal = build_internal_trigger_prompt(passage, here, schema);
      ++filled;
      if (fill_sentinels(internal.passage.focus_text(), gold_fill(internal)) == passage.focus_text()) ++filled_ok;

      std::vector<EventMention> with_args;
      for (const auto& m : here) {
        if (!m.arguments.empty()) with_args.push_back(m);
      }
      if (with_args.empty()) continue;
      PromptInstance j;
      try {
        j = build_joint_argument_prompt(passage, with_args, schema, trial);
      } catch (const PromptRejected&) {
        continue;
      }
      ++filled;
      if (fill_sentinels(j.passage.focus_text(), gold_fill(j)) == passage.focus_text()) ++filled_ok;
      // Same seed reproduces the prompt; other seeds permute the same words.
      ++joint;
      const auto again = build_joint_argument_prompt(passage, with_args, schema, trial);
      const auto other = build_joint_argument_prompt(passage, with_args, schema, trial + 1000);
      auto words_a = split_ws(j.prompt_section), words_b = split_ws(other.prompt_section);
      std::sort(words_a.begin(), words_a.end());
      std::sort(words_b.begin(), words_b.end());
      if (again.input_text() == j.input_text() && words_a == words_b && other.passage.text == j.passage.text) {
        ++joint_ok;
      }
    }
  }

  std::size_t roundtrip = 0, roundtrip_ok = 0;
  const std::vector<std::string> vocab = {"alpha", "beta", "Judge", "x", "None", "7", "-", "a.b"};
  for (int t = 0; t < 500; ++t, ++roundtrip) {
    std::vector<std::string> answers;
    std::vector<std::vector<std::string>> expected;
    for (std::size_t i = 0, n = 1 + rng.below(6); i < n; ++i) {
      std::vector<std::string> parts, want;
      for (std::size_t k = 0, m = 1 + rng.below(3); k < m; ++k) {
        std::vector<std::string> ws;
        for (std::size_t w = 0, len = 1 + rng.below(3); w < len; ++w) ws.push_back(vocab[rng.below(vocab.size())]);
        parts.push_back(join(ws, " "));
        if (parts.back() != "None") want.push_back(parts.back());
      }
      answers.push_back(join(parts, " | "));
      expected.push_back(want);
    }
    const auto parsed = parse_generation(serialize_target(answers));
    bool ok = !parsed.malformed && parsed.entries.size() == answers.size();
    for (std::size_t i = 0; ok && i < answers.size(); ++i) ok = parsed.entries.at(static_cast<int>(i)) == expected[i];
    if (ok) ++roundtrip_ok;
  }

  char buf[200];
  std::snprintf(buf, sizeof buf, "external %zu/%zu, mask-fill %zu/%zu, joint shuffle %zu/%zu, round-trip %zu/%zu",
                external_ok, external, filled_ok, filled, joint_ok, joint, roundtrip_ok, roundtrip);
  return {filled >= 1000 && external_ok == external && filled_ok == filled && joint > 0 && joint_ok == joint &&
              roundtrip_ok == roundtrip,
          buf};
}

// 6. Per-subtype few-shot sampling counts and determinism.
Outcome sampler() {
  Rng rng(6);
  const std::vector<std::string> subtypes = {"A.x", "A.y", "B.z", "C.w", "C.v"};
  std::size_t ok = 0;
  const std::size_t trials = 100;
  for (std::size_t t = 0; t < trials; ++t) {
    std::vector<EventMention> pool;
    std::map<std::string, std::size_t> available;
    for (std::size_t i = 0, n = rng.below(60); i < n; ++i) {
      EventMention m;
      m.doc_id = "d" + std::to_string(rng.below(10));
      m.subtype = subtypes[rng.below(subtypes.size())];
      m.trigger = {i * 10, i * 10 + 3};
      m.sentence_index = i;
      pool.push_back(m);
      ++available[m.subtype];
    }
    const std::size_t k = rng.below(12);
    const std::uint64_t seed = rng.below(1000);
    const auto sample = fewshot_sample(pool, k, seed);
    std::map<std::string, std::size_t> got;
    for (const auto& m : sample) ++got[m.subtype];
    bool good = true;
    for (const auto& [sub, n] : available) good = good && got[sub] == std::min(k, n);
    const auto again = fewshot_sample(pool, k, seed);
    good = good && again.size() == sample.size();
    for (std::size_t i = 0; good && i < sample.size(); ++i) {
      good = again[i].doc_id == sample[i].doc_id && again[i].trigger == sample[i].trigger &&
             again[i].subtype == sample[i].subtype;
    }
    if (good) ++ok;
  }
  char buf[80];
  std::snprintf(buf, sizeof buf, "%zu/%zu corpora", ok, trials);
  return {ok == trials, buf};
}

// 7. EDA never touches protected tokens; swap keeps the word multiset.
Outcome eda_protection() {
  const auto schema = fixtures::synthetic_schema();
  const MapLexicon lexicon({{"report", {"account", "story"}},
                            {"said", {"stated"}},
                            {"city", {"town", "municipal area"}},
                            {"officials", {"authorities"}},
                            {"week", {"period"}},
                            {"later", {"afterwards"}}});
  const EdaOp ops[] = {EdaOp::kReplace, EdaOp::kInsert, EdaOp::kSwap, EdaOp::kDelete};
  Rng rng(7);
  std::size_t augmented = 0, ok = 0, swaps = 0, trial = 0;
  auto specials = [](std::string_view text) {
    std::vector<std::string> out;
    for (const auto& w : split_words(text)) {
      if (tokens::is_special(w.text)) out.emplace_back(w.text);
    }
    return out;
  };
  while (augmented < 500 && trial < 10000) {
    const auto [doc, ms] = fixtures::random_doc(rng, "e" + std::to_string(trial++), schema);
    for (const auto& m : ms) {
      const auto passage = make_passage(doc, {m.sentence_index, m.sentence_index}, kExternalWindowWords);
      for (const auto& inst : build_single_argument_prompts(passage, m, schema)) {
        const auto op = ops[rng.below(4)];
        const auto out = apply_eda_op(inst, op, rng, lexicon);
        if (!out) continue;
        ++augmented;
        bool good = out->prompt_section == inst.prompt_section && out->target_text == inst.target_text &&
                    specials(out->passage.text) == specials(inst.passage.text) &&
                    out->passage.offset_map.size() == out->passage.text.size();
        const auto trig = "<t0> " + m.trigger_surface + " </t0>";
        good = good && out->passage.text.find(trig) != std::string::npos;
        for (const auto& g : inst.slots.front().gold) {
          if (g == "None") continue;
          bool mapped = false;
          for (const auto& h : find_word_sequence(out->passage.text, g)) {
            mapped = mapped || out->passage.to_document(h).has_value();
          }
          good = good && mapped;
        }
        if (op == EdaOp::kSwap) {
          ++swaps;
          auto a = split_ws(inst.passage.text), b = split_ws(out->passage.text);
          std::sort(a.begin(), a.end());
          std::sort(b.begin(), b.end());
          good = good && a == b;
        }
        if (good) ++ok;
      }
    }
  }
  char buf[120];
  std::snprintf(buf, sizeof buf, "%zu/%zu augmented instances intact (%zu swaps)", ok, augmented, swaps);
  return {augmented >= 500 && ok == augmented && swaps > 0, buf};
}

// 8. A corrupted trigger decision lowers end-to-end Arg-C below the
// gold-trigger regime.
Outcome error_propagation() {
  const auto config = synthetic_config();
  const auto schema = load_schema(config.schema_path);
  const auto corpus = ingest(config.corpus_path, schema);
  TrainedStages trained;
  run_pipeline(corpus, schema, config, mock_backend_factory(), &trained);
  auto* trigger = dynamic_cast<MockBackend*>(trained.trigger.get());
  if (!trigger) return {false, "trigger stage is not a mock backend"};

  // Force the first Justice slot with a gold trigger to answer None.
  const auto& doc = corpus.documents.front();
  const auto mentions = corpus.mentions_of(doc.doc_id);
  bool corrupted = false;
  for (std::size_t s = 0; s < doc.sentences.size() && !corrupted; ++s) {
    const auto passage = make_passage(doc, {s, s}, config.external_window);
    const auto gold_inst = build_external_trigger_prompt(passage, schema, std::span<const EventMention>(mentions));
    if (gold_inst.slots.front().gold.front() == "None") continue;
    const auto inst = build_external_trigger_prompt(passage, schema, std::nullopt);
    std::vector<double> row(trigger->vocab_size(), 0.0);
    row[static_cast<std::size_t>(trigger->vocabulary().id(tokens::kNone))] = 100.0;
    trigger->set_logits(inst.input_text(), trigger->tokenize(tokens::sentinel(0)), row);
    corrupted = true;
  }
  if (!corrupted) return {false, "no sentence to corrupt"};

  std::vector<std::string> ids;
  std::vector<EventMention> gold;
  for (const auto& d : corpus.documents) ids.push_back(d.doc_id);
  for (const auto& m : corpus.mentions) gold.push_back(m);
  const auto e2e = predict_documents(trained.view(), corpus, ids, schema, config, Regime::kEndToEnd, config.execution);
  const auto oracle =
      predict_documents(trained.view(), corpus, ids, schema, config, Regime::kGoldTriggers, config.execution);
  const auto e2e_score = score(gold, e2e.predictions);
  const auto oracle_score = score(gold, oracle.predictions);
  char buf[160];
  std::snprintf(buf, sizeof buf, "end-to-end Arg-C F1=%.4f < gold-trigger Arg-C F1=%.4f (Trig-C F1=%.4f)",
                e2e_score.arg_c.f1, oracle_score.arg_c.f1, e2e_score.trig_c.f1);
  return {e2e_score.arg_c.f1 < oracle_score.arg_c.f1, buf};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"1 memorization fixture", memorization},     {"2 constrained decoding oracle", decoding_oracle},
      {"3 cross-entropy oracle", loss_oracle},      {"4 scorer oracle", scorer_oracle},
      {"5 prompt invariants", prompt_invariants},   {"6 few-shot sampler", sampler},
      {"7 EDA protection", eda_protection},         {"8 error propagation", error_propagation},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
  }
  std::printf(
      "SKIP criterion 9 pretrained backend on licensed data: not CI-gated; targets gold-trigger Arg-C F1 70.1 +/- 2.0, "
      "end-to-end Trig-C F1 69.6 +/- 2.0 and Arg-C F1 52.4 +/- 2.0\n");
  return failures == 0 ? 0 : 1;
}
