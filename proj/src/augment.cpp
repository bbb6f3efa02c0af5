#include "promptee/augment.hpp"

#include <algorithm>
#include <fstream>

#include "json.hpp"

namespace promptee {

MapLexicon MapLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open lexicon: " + path.string());
  try {
    auto j = nlohmann::json::parse(in);
    std::map<std::string, std::vector<std::string>, std::less<>> table;
    for (const auto& [word, syns] : j.items()) table[word] = syns.get<std::vector<std::string>>();
    return MapLexicon(std::move(table));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("malformed lexicon " + path.string() + ": " + e.what());
  }
}

std::vector<std::string> MapLexicon::synonyms(std::string_view word) const {
  auto it = table_.find(word);
  return it == table_.end() ? std::vector<std::string>{} : it->second;
}

namespace {

struct Token {
  std::string text;
  bool locked = false;
  std::optional<std::size_t> origin;  // start in the source passage text
};

std::vector<Token> tokenize_passage(const PromptInstance& inst) {
  const auto& passage = inst.passage;
  const auto words = split_words(passage.text);
  std::vector<Token> out;
  out.reserve(words.size());
  int open_trigger = 0;
  for (const auto& w : words) {
    Token t{std::string(w.text), false, w.span.begin};
    if (tokens::is_special(w.text)) {
      t.locked = true;
      if (w.text.starts_with("<t")) ++open_trigger;
      if (w.text.starts_with("</t")) --open_trigger;
    } else if (open_trigger > 0) {
      t.locked = true;
    }
    out.push_back(std::move(t));
  }
  for (const auto& slot : inst.slots) {
    for (const auto& answer : slot.gold) {
      if (answer == tokens::kNone) continue;
      for (const auto& hit : find_word_sequence(passage.text, answer)) {
        for (std::size_t i = 0; i < words.size(); ++i) {
          if (hit.contains(words[i].span)) out[i].locked = true;
        }
      }
    }
  }
  return out;
}

Passage rebuild(const Passage& source, const std::vector<Token>& toks) {
  Passage p;
  p.doc_id = source.doc_id;
  p.sentences = source.sentences;
  auto kept = [](const Token& t) { return t.locked && t.origin && !tokens::is_special(t.text); };
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const auto& t = toks[i];
    const bool keep = kept(t);
    if (i > 0) {
      // A space between two kept tokens that were adjacent in the source
      // keeps its mapping, so multi-word answers stay contiguous.
      const auto& prev = toks[i - 1];
      const bool adjacent = keep && kept(prev) && *t.origin == *prev.origin + prev.text.size() + 1;
      p.text += ' ';
      p.offset_map.push_back(adjacent ? source.offset_map[*prev.origin + prev.text.size()] : Passage::kUnmapped);
    }
    for (std::size_t c = 0; c < t.text.size(); ++c) {
      p.offset_map.push_back(keep ? source.offset_map[*t.origin + c] : Passage::kUnmapped);
    }
    p.text += t.text;
  }
  p.relocate_focus();
  return p;
}

std::vector<std::size_t> open_indices(const std::vector<Token>& toks, const SynonymLexicon* lexicon) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (toks[i].locked) continue;
    if (lexicon && lexicon->synonyms(toks[i].text).empty()) continue;
    out.push_back(i);
  }
  return out;
}

template <typename T>
const T& pick(const std::vector<T>& items, Rng& rng) {
  return items[rng.below(items.size())];
}

}  // namespace

std::optional<PromptInstance> apply_eda_op(const PromptInstance& instance, EdaOp op, Rng& rng,
                                           const SynonymLexicon& lexicon) {
  if (instance.family != PromptFamily::kSingleArgument) {
    throw ValidationError("EDA applies to single-argument instances only");
  }
  auto toks = tokenize_passage(instance);
  switch (op) {
    case EdaOp::kReplace: {
      const auto candidates = open_indices(toks, &lexicon);
      if (candidates.empty()) return std::nullopt;
      auto& t = toks[pick(candidates, rng)];
      t.text = pick(lexicon.synonyms(t.text), rng);
      t.origin.reset();
      break;
    }
    case EdaOp::kInsert: {
      const auto candidates = open_indices(toks, &lexicon);
      if (candidates.empty()) return std::nullopt;
      const std::string word = pick(lexicon.synonyms(toks[pick(candidates, rng)].text), rng);
      std::vector<std::size_t> gaps;
      for (std::size_t g = 0; g <= toks.size(); ++g) {
        const bool inside_locked = g > 0 && g < toks.size() && toks[g - 1].locked && toks[g].locked;
        if (!inside_locked) gaps.push_back(g);
      }
      toks.insert(toks.begin() + static_cast<std::ptrdiff_t>(pick(gaps, rng)), Token{word, false, std::nullopt});
      break;
    }
    case EdaOp::kSwap: {
      const auto candidates = open_indices(toks, nullptr);
      if (candidates.size() < 2) return std::nullopt;
      const auto chosen = rng.sample_indices(candidates.size(), 2);
      std::swap(toks[candidates[chosen[0]]], toks[candidates[chosen[1]]]);
      break;
    }
    case EdaOp::kDelete: {
      const auto candidates = open_indices(toks, nullptr);
      if (candidates.size() < 2) return std::nullopt;
      toks.erase(toks.begin() + static_cast<std::ptrdiff_t>(pick(candidates, rng)));
      break;
    }
  }
  PromptInstance out = instance;
  out.passage = rebuild(instance.passage, toks);
  return out;
}

std::vector<PromptInstance> augment_eda(const std::vector<PromptInstance>& instances, std::uint64_t seed,
                                        std::size_t ops_per_instance, const SynonymLexicon& lexicon) {
  constexpr EdaOp kOps[] = {EdaOp::kReplace, EdaOp::kInsert, EdaOp::kSwap, EdaOp::kDelete};
  std::vector<PromptInstance> out;
  out.reserve(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    Rng rng(derive_seed(seed, i));
    PromptInstance current = instances[i];
    for (std::size_t n = 0; n < ops_per_instance; ++n) {
      if (auto next = apply_eda_op(current, kOps[rng.below(4)], rng, lexicon)) current = std::move(*next);
    }
    out.push_back(std::move(current));
  }
  return out;
}

std::vector<PromptInstance> expand_with_eda(const std::vector<PromptInstance>& instances, std::size_t target_count,
                                            std::uint64_t seed, std::size_t ops_per_instance,
                                            const SynonymLexicon& lexicon) {
  if (target_count < instances.size()) {
    throw ValidationError("expansion target is smaller than the original instance count");
  }
  std::vector<PromptInstance> out = instances;
  if (instances.empty()) return out;
  for (std::uint64_t round = 0; out.size() < target_count; ++round) {
    auto extra = augment_eda(instances, derive_seed(seed, round), ops_per_instance, lexicon);
    for (auto& inst : extra) {
      if (out.size() == target_count) break;
      out.push_back(std::move(inst));
    }
  }
  return out;
}

std::optional<std::string> WordShuffleTranslator::round_trip(std::string_view text, std::uint64_t seed) const {
  auto words = split_ws(text);
  Rng rng(seed);
  rng.shuffle(words);
  return join(words, " ");
}

BacktranslationResult augment_backtranslate(const std::vector<PromptInstance>& instances,
                                            const RoundTripTranslator& translator, std::uint64_t seed) {
  BacktranslationResult result;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    const auto& src = inst.passage;
    const std::string where = "instance " + std::to_string(i) + " (" + src.doc_id + ")";

    Passage p;
    p.doc_id = src.doc_id;
    p.sentences = src.sentences;
    auto copy_range = [&](std::size_t from, std::size_t to) {
      p.text.append(src.text, from, to - from);
      p.offset_map.insert(p.offset_map.end(), src.offset_map.begin() + static_cast<std::ptrdiff_t>(from),
                          src.offset_map.begin() + static_cast<std::ptrdiff_t>(to));
    };

    bool failed = false;
    std::size_t cursor = 0;
    std::size_t segment = 0;
    auto translate_until = [&](std::size_t stop) {
      const std::string_view piece = std::string_view(src.text).substr(cursor, stop - cursor);
      const std::string_view core = trim(piece);
      if (core.empty()) {
        copy_range(cursor, stop);
        return;
      }
      const std::size_t core_begin = cursor + static_cast<std::size_t>(core.data() - piece.data());
      const std::size_t core_end = core_begin + core.size();
      std::optional<std::string> out;
      try {
        out = translator.round_trip(core, derive_seed(seed, i * 1024 + segment++));
      } catch (const std::exception& e) {
        result.diagnostics.add(where + ": translator failed: " + e.what());
      }
      if (!out || trim(*out).empty()) {
        failed = true;
        return;
      }
      copy_range(cursor, core_begin);
      if (*out == core) {
        copy_range(core_begin, core_end);
      } else {
        p.text += *out;
        p.offset_map.insert(p.offset_map.end(), out->size(), Passage::kUnmapped);
      }
      copy_range(core_end, stop);
    };

    for (const auto& w : split_words(src.text)) {
      if (!tokens::is_special(w.text)) continue;
      translate_until(w.span.begin);
      if (failed) break;
      copy_range(w.span.begin, w.span.end);
      cursor = w.span.end;
    }
    if (!failed) translate_until(src.text.size());
    if (failed) {
      result.diagnostics.add(where + ": dropped, translation failed");
      continue;
    }
    try {
      p.relocate_focus();
    } catch (const std::exception& e) {
      result.diagnostics.add(where + ": dropped, " + e.what());
      continue;
    }

    std::vector<CharSpan> spans;
    bool lost = false;
    for (const auto& slot : inst.slots) {
      for (const auto& answer : slot.gold) {
        if (answer == tokens::kNone) continue;
        const auto hits = find_word_sequence(p.text, answer);
        if (hits.empty()) {
          result.diagnostics.add(where + ": dropped, answer '" + answer + "' vanished after round trip");
          lost = true;
          break;
        }
        const CharSpan focus{p.focus.begin, p.focus.end};
        auto in_focus = std::find_if(hits.begin(), hits.end(), [&](const CharSpan& h) { return focus.contains(h); });
        spans.push_back(in_focus != hits.end() ? *in_focus : hits.front());
      }
      if (lost) break;
    }
    if (lost) continue;

    PromptInstance out = inst;
    out.passage = std::move(p);
    result.instances.push_back(std::move(out));
    result.answer_spans.push_back(std::move(spans));
  }
  return result;
}

}  // namespace promptee
