#pragma once

// Small builders shared by the unit tests and the acceptance binary.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "promptee/corpus.hpp"
#include "promptee/rng.hpp"
#include "promptee/schema.hpp"
#include "promptee/text.hpp"

namespace fixtures {

using namespace promptee;

inline std::filesystem::path data_dir() { return PROMPTEE_DATA_DIR; }
inline Schema synthetic_schema() { return load_schema(data_dir() / "synthetic" / "schema.json"); }
inline Schema ace_schema() { return load_schema(data_dir() / "schemas" / "ace2005.json"); }
inline Corpus synthetic_corpus() { return ingest(data_dir() / "synthetic" / "corpus.jsonl", synthetic_schema()); }

/// Document whose sentences are joined by single spaces.
inline Document make_doc(const std::string& id, const std::vector<std::string>& sentences) {
  Document d;
  d.doc_id = id;
  for (const auto& s : sentences) {
    if (!d.text.empty()) d.text += ' ';
    const std::size_t begin = d.text.size();
    d.text += s;
    d.sentences.push_back({begin, d.text.size()});
  }
  return d;
}

/// Span of the first whole-word occurrence of `surface` in sentence `s`.
inline CharSpan locate(const Document& d, std::size_t s, const std::string& surface) {
  const auto sentence = d.sentences.at(s);
  const auto hits = find_word_sequence(std::string_view(d.text).substr(sentence.begin, sentence.size()), surface);
  if (hits.empty()) throw std::invalid_argument("fixture surface not found: " + surface);
  return {sentence.begin + hits.front().begin, sentence.begin + hits.front().end};
}

inline EventMention mention(const Document& d, std::size_t s, const std::string& subtype, const std::string& trigger,
                            const std::vector<std::pair<std::string, std::string>>& args = {}) {
  EventMention m;
  m.doc_id = d.doc_id;
  m.sentence_index = s;
  m.subtype = subtype;
  m.trigger = locate(d, s, trigger);
  m.trigger_surface = trigger;
  for (const auto& [role, surface] : args) m.arguments.push_back({role, locate(d, s, surface), surface});
  return m;
}

/// Two Justice triggers in one sentence sharing a defendant.
inline std::pair<Document, std::vector<EventMention>> convict_sentence_doc() {
  auto d = make_doc("court", {"Judge Brennan convicted and sentenced Varga in Kestrel ."});
  std::vector<EventMention> ms = {
      mention(d, 0, "Justice.Convict", "convicted", {{"Defendant", "Varga"}, {"Adjudicator", "Judge Brennan"}}),
      mention(d, 0, "Justice.Sentence", "sentenced", {{"Defendant", "Varga"}})};
  return {d, ms};
}

/// Random document over the synthetic schema. Each event sentence carries
/// unique trigger and argument words so every surface is unambiguous.
inline std::pair<Document, std::vector<EventMention>> random_doc(Rng& rng, const std::string& id,
                                                                 const Schema& schema) {
  static const std::vector<std::string> kFiller = {"the", "a", "report", "said", "on", "city", "officials",
                                                   "later", "that", "week", "and", "of"};
  const std::size_t n_sent = 1 + rng.below(6);
  std::vector<std::string> sentences;
  struct Planned {
    std::size_t sentence;
    std::string subtype, trigger;
    std::vector<std::pair<std::string, std::string>> args;
  };
  std::vector<Planned> planned;
  std::size_t unique = 0;
  auto fresh = [&](const char* stem) { return std::string(stem) + std::to_string(unique++); };
  for (std::size_t s = 0; s < n_sent; ++s) {
    std::vector<std::string> words;
    const std::size_t n_events = rng.below(3);
    for (std::size_t e = 0; e < n_events; ++e) {
      const auto& sub = schema.subtypes()[rng.below(schema.subtypes().size())];
      Planned p{s, sub.name, fresh("trig"), {}};
      words.push_back(kFiller[rng.below(kFiller.size())]);
      words.push_back(p.trigger);
      for (const auto* role : schema.roles_for(sub.name)) {
        const std::size_t fillers = rng.below(3);
        for (std::size_t f = 0; f < fillers; ++f) {
          std::string surface = fresh("arg");
          if (rng.below(3) == 0) surface += " " + fresh("tail");
          p.args.push_back({role->name, surface});
          words.push_back(kFiller[rng.below(kFiller.size())]);
          words.push_back(surface);
        }
      }
      planned.push_back(std::move(p));
    }
    for (std::size_t w = rng.below(5); w < 6; ++w) words.push_back(kFiller[rng.below(kFiller.size())]);
    words.push_back(".");
    sentences.push_back(join(words, " "));
  }
  auto d = make_doc(id, sentences);
  std::vector<EventMention> ms;
  for (const auto& p : planned) ms.push_back(mention(d, p.sentence, p.subtype, p.trigger, p.args));
  return {d, ms};
}

}  // namespace fixtures
