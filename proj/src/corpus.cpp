#include "promptee/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "promptee/errors.hpp"
#include "promptee/rng.hpp"

namespace promptee {

using nlohmann::json;

namespace {

CharSpan span_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_unsigned() || !j[1].is_number_unsigned()) {
    throw ValidationError("expected [start, end] span in " + where);
  }
  CharSpan s{j[0].get<std::size_t>(), j[1].get<std::size_t>()};
  if (s.end < s.begin) throw ValidationError("span end precedes start in " + where);
  return s;
}

json span_to_json(CharSpan s) { return json::array({s.begin, s.end}); }

constexpr std::string_view kOpenPadded = "<e> ";
constexpr std::string_view kClosePadded = " </e>";

}  // namespace

const Document& Corpus::document(const std::string& doc_id) const {
  for (const auto& d : documents) {
    if (d.doc_id == doc_id) return d;
  }
  throw ValidationError("unknown document: " + doc_id);
}

std::vector<EventMention> Corpus::mentions_of(const std::string& doc_id) const {
  std::vector<EventMention> out;
  for (const auto& m : mentions) {
    if (m.doc_id == doc_id) out.push_back(m);
  }
  return out;
}

std::optional<CharSpan> Passage::to_document(CharSpan span) const {
  if (span.size() == 0 || span.end > text.size()) return std::nullopt;
  const std::size_t first = offset_map[span.begin];
  if (first == kUnmapped) return std::nullopt;
  for (std::size_t i = span.begin; i < span.end; ++i) {
    if (offset_map[i] != first + (i - span.begin)) return std::nullopt;
  }
  return CharSpan{first, first + span.size()};
}

std::optional<CharSpan> Passage::to_passage(CharSpan doc_span) const {
  if (doc_span.size() == 0) return std::nullopt;
  for (std::size_t p = 0; p < offset_map.size(); ++p) {
    if (offset_map[p] != doc_span.begin) continue;
    CharSpan candidate{p, p + doc_span.size()};
    if (candidate.end <= text.size() && to_document(candidate) == doc_span) return candidate;
    return std::nullopt;
  }
  return std::nullopt;
}

void Passage::relocate_focus() {
  if (count_occurrences(text, tokens::kFocusOpen) != 1 || count_occurrences(text, tokens::kFocusClose) != 1) {
    throw PromptRejected("passage must contain exactly one <e> and one </e>");
  }
  auto open = text.find(kOpenPadded);
  auto close = text.find(kClosePadded);
  if (open == std::string::npos || close == std::string::npos || close < open + kOpenPadded.size()) {
    throw PromptRejected("passage focus markers missing or out of order");
  }
  focus = {open + kOpenPadded.size(), close};
}

Passage Passage::edited(std::vector<TextEdit> edits) const {
  std::sort(edits.begin(), edits.end(), [](const TextEdit& a, const TextEdit& b) {
    return a.range.begin != b.range.begin ? a.range.begin < b.range.begin : a.range.end < b.range.end;
  });
  for (std::size_t i = 1; i < edits.size(); ++i) {
    if (edits[i].range.begin < edits[i - 1].range.end) {
      throw PromptRejected("overlapping passage edits");
    }
  }
  Passage out;
  out.doc_id = doc_id;
  out.sentences = sentences;
  std::size_t cursor = 0;
  for (const auto& e : edits) {
    if (e.range.end > text.size()) throw PromptRejected("passage edit out of range");
    out.text.append(text, cursor, e.range.begin - cursor);
    out.offset_map.insert(out.offset_map.end(), offset_map.begin() + static_cast<std::ptrdiff_t>(cursor),
                          offset_map.begin() + static_cast<std::ptrdiff_t>(e.range.begin));
    out.text += e.replacement;
    out.offset_map.insert(out.offset_map.end(), e.replacement.size(), kUnmapped);
    cursor = e.range.end;
  }
  out.text.append(text, cursor, std::string::npos);
  out.offset_map.insert(out.offset_map.end(), offset_map.begin() + static_cast<std::ptrdiff_t>(cursor),
                        offset_map.end());
  out.relocate_focus();
  return out;
}

SplitSpec SplitSpec::from_json(const json& j) {
  SplitSpec spec;
  spec.seed = j.value("seed", std::uint64_t{42});
  if (j.contains("counts")) {
    const auto& c = j.at("counts");
    if (c.is_array() && c.size() == 3) {
      spec.counts = std::array<std::size_t, 3>{c[0].get<std::size_t>(), c[1].get<std::size_t>(),
                                               c[2].get<std::size_t>()};
    } else if (c.is_object()) {
      spec.counts = std::array<std::size_t, 3>{c.value("train", std::size_t{0}), c.value("dev", std::size_t{0}),
                                               c.value("test", std::size_t{0})};
    } else {
      throw ValidationError("split counts must be [train, dev, test] or an object");
    }
  }
  for (const char* name : {"train", "dev", "test"}) {
    if (j.contains(name)) spec.explicit_ids[name] = j.at(name).get<std::vector<std::string>>();
  }
  if (spec.counts && !spec.explicit_ids.empty()) {
    throw ValidationError("split spec must use either counts or explicit ids, not both");
  }
  return spec;
}

json SplitSpec::to_json() const {
  json j = {{"seed", seed}};
  if (counts) j["counts"] = {(*counts)[0], (*counts)[1], (*counts)[2]};
  for (const auto& [name, ids] : explicit_ids) j[name] = ids;
  return j;
}

std::string to_string(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
  }
  return "train";
}

Split split_from_string(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "dev") return Split::kDev;
  if (name == "test") return Split::kTest;
  throw ValidationError("unknown split name: " + std::string(name));
}

void validate_corpus(const Corpus& corpus, const Schema& schema) {
  std::map<std::string, const Document*> by_id;
  for (const auto& d : corpus.documents) {
    if (!by_id.emplace(d.doc_id, &d).second) throw ValidationError("duplicate doc_id: " + d.doc_id);
    std::size_t prev_end = 0;
    for (std::size_t i = 0; i < d.sentences.size(); ++i) {
      const auto& s = d.sentences[i];
      if (s.end > d.text.size() || s.begin < prev_end || s.end <= s.begin) {
        throw ValidationError("sentence " + std::to_string(i) + " of " + d.doc_id +
                              " is empty, out of bounds, or overlaps its predecessor");
      }
      prev_end = s.end;
    }
  }
  for (const auto& m : corpus.mentions) {
    auto it = by_id.find(m.doc_id);
    if (it == by_id.end()) throw ValidationError("mention references unknown document " + m.doc_id);
    const Document& d = *it->second;
    const std::string where = m.doc_id + " sentence " + std::to_string(m.sentence_index);
    if (m.sentence_index >= d.sentences.size()) throw ValidationError("sentence index out of range in " + where);
    if (!schema.has_subtype(m.subtype)) throw ValidationError("unknown subtype " + m.subtype + " in " + where);
    if (m.trigger.size() == 0 || !d.sentences[m.sentence_index].contains(m.trigger)) {
      throw ValidationError("trigger span outside its sentence in " + where);
    }
    if (d.text.compare(m.trigger.begin, m.trigger.size(), m.trigger_surface) != 0) {
      throw ValidationError("trigger surface mismatch in " + where);
    }
    for (const auto& a : m.arguments) {
      if (a.span.size() == 0 || a.span.end > d.text.size()) {
        throw ValidationError("argument span out of bounds in " + where);
      }
      if (d.text.compare(a.span.begin, a.span.size(), a.surface) != 0) {
        throw ValidationError("argument surface '" + a.surface + "' does not match text at span in " + where);
      }
      if (!schema.role_allowed(m.subtype, a.role)) {
        throw ValidationError("role " + a.role + " not defined for " + m.subtype + " in " + where);
      }
    }
  }
}

Corpus parse_corpus_lines(std::istream& in) {
  Corpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ValidationError("corpus parse failure at " + where + ": " + e.what());
    }
    try {
      Document doc;
      doc.doc_id = j.at("doc_id").get<std::string>();
      doc.text = j.at("text").get<std::string>();
      for (const auto& s : j.at("sentences")) doc.sentences.push_back(span_from_json(s, where));
      for (const auto& e : j.value("events", json::array())) {
        EventMention m;
        m.doc_id = doc.doc_id;
        m.sentence_index = e.at("sentence_index").get<std::size_t>();
        m.subtype = e.at("subtype").get<std::string>();
        m.trigger = span_from_json(e.at("trigger"), where);
        if (m.trigger.end > doc.text.size()) throw ValidationError("trigger span out of bounds at " + where);
        m.trigger_surface = doc.text.substr(m.trigger.begin, m.trigger.size());
        for (const auto& a : e.value("arguments", json::array())) {
          m.arguments.push_back({a.at("role").get<std::string>(), span_from_json(a.at("span"), where),
                                 a.at("surface").get<std::string>()});
        }
        corpus.mentions.push_back(std::move(m));
      }
      corpus.documents.push_back(std::move(doc));
    } catch (const json::exception& e) {
      throw ValidationError("malformed corpus record at " + where + ": " + e.what());
    }
  }
  return corpus;
}

Corpus ingest_lines(std::istream& in, const Schema& schema) {
  Corpus corpus = parse_corpus_lines(in);
  validate_corpus(corpus, schema);
  return corpus;
}

Corpus read_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open corpus file: " + path.string());
  return parse_corpus_lines(in);
}

Corpus ingest(const std::filesystem::path& path, const Schema& schema) {
  Corpus corpus = read_corpus(path);
  validate_corpus(corpus, schema);
  return corpus;
}

json document_to_json(const Document& doc, const std::vector<EventMention>& mentions) {
  json sentences = json::array();
  for (const auto& s : doc.sentences) sentences.push_back(span_to_json(s));
  json events = json::array();
  for (const auto& m : mentions) {
    json args = json::array();
    for (const auto& a : m.arguments) {
      args.push_back({{"role", a.role}, {"span", span_to_json(a.span)}, {"surface", a.surface}});
    }
    events.push_back({{"sentence_index", m.sentence_index},
                      {"subtype", m.subtype},
                      {"trigger", span_to_json(m.trigger)},
                      {"arguments", args}});
  }
  return {{"doc_id", doc.doc_id}, {"text", doc.text}, {"sentences", sentences}, {"events", events}};
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw RuntimeFailure("cannot write corpus file: " + path.string());
  for (const auto& d : corpus.documents) out << document_to_json(d, corpus.mentions_of(d.doc_id)).dump() << '\n';
}

std::map<std::string, Split> assign_splits(const std::vector<Document>& documents, const SplitSpec& spec) {
  std::map<std::string, Split> out;
  std::set<std::string> known;
  for (const auto& d : documents) known.insert(d.doc_id);

  if (spec.counts) {
    const auto [n_train, n_dev, n_test] = *spec.counts;
    if (n_train + n_dev + n_test > documents.size()) {
      throw ValidationError("split counts exceed corpus size (" + std::to_string(documents.size()) + ")");
    }
    std::vector<std::size_t> order(documents.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(spec.seed);
    rng.shuffle(order);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < n_train; ++i) out[documents[order[pos++]].doc_id] = Split::kTrain;
    for (std::size_t i = 0; i < n_dev; ++i) out[documents[order[pos++]].doc_id] = Split::kDev;
    for (std::size_t i = 0; i < n_test; ++i) out[documents[order[pos++]].doc_id] = Split::kTest;
    return out;
  }

  for (const auto& [name, ids] : spec.explicit_ids) {
    const Split split = split_from_string(name);
    for (const auto& id : ids) {
      if (!known.contains(id)) throw ValidationError("split names unknown document " + id);
      auto [it, inserted] = out.emplace(id, split);
      if (!inserted && it->second != split) {
        throw ValidationError("document " + id + " appears in both " + to_string(it->second) + " and " + name);
      }
    }
  }
  // Documents not named anywhere default to train.
  if (!spec.explicit_ids.contains("train")) {
    for (const auto& d : documents) out.emplace(d.doc_id, Split::kTrain);
  } else {
    for (const auto& d : documents) {
      if (!out.contains(d.doc_id)) throw ValidationError("document " + d.doc_id + " is not assigned to any split");
    }
  }
  return out;
}

Passage make_passage(const Document& doc, SentenceRange range, std::size_t window_words) {
  if (range.first > range.last || range.last >= doc.sentences.size()) {
    throw ValidationError("invalid sentence range for document " + doc.doc_id);
  }
  const CharSpan focus{doc.sentences[range.first].begin, doc.sentences[range.last].end};
  const auto words = split_words(doc.text);
  std::vector<CharSpan> left;
  std::vector<CharSpan> right;
  std::size_t focus_words = 0;
  for (const auto& w : words) {
    if (w.span.end <= focus.begin) {
      left.push_back(w.span);
    } else if (w.span.begin >= focus.end) {
      right.push_back(w.span);
    } else {
      ++focus_words;
    }
  }

  const std::size_t budget = window_words > focus_words ? window_words - focus_words : 0;
  const std::size_t want_left = budget / 2;
  const std::size_t want_right = budget - want_left;
  std::size_t n_left = std::min(want_left, left.size());
  std::size_t n_right = std::min(want_right, right.size());
  // Budget a side cannot use moves to the other side.
  n_right = std::min(right.size(), n_right + (want_left - n_left));
  n_left = std::min(left.size(), n_left + (want_right - std::min(want_right, right.size())));

  const std::size_t start = n_left > 0 ? left[left.size() - n_left].begin : focus.begin;
  const std::size_t stop = n_right > 0 ? right[n_right - 1].end : focus.end;

  Passage p;
  p.doc_id = doc.doc_id;
  p.sentences = range;
  auto append_doc = [&](std::size_t from, std::size_t to) {
    p.text.append(doc.text, from, to - from);
    for (std::size_t i = from; i < to; ++i) p.offset_map.push_back(i);
  };
  auto append_marker = [&](std::string_view s) {
    p.text += s;
    p.offset_map.insert(p.offset_map.end(), s.size(), Passage::kUnmapped);
  };
  append_doc(start, focus.begin);
  append_marker(kOpenPadded);
  append_doc(focus.begin, focus.end);
  append_marker(kClosePadded);
  append_doc(focus.end, stop);
  p.relocate_focus();
  return p;
}

std::vector<SentenceRange> merge_adjoining(const Document& doc, const std::vector<EventMention>& mentions,
                                           std::size_t max_gap_sentences) {
  std::set<std::size_t> bearing;
  for (const auto& m : mentions) {
    if (m.doc_id == doc.doc_id) bearing.insert(m.sentence_index);
  }
  std::vector<SentenceRange> ranges;
  for (auto s : bearing) {
    if (!ranges.empty() && s - ranges.back().last <= max_gap_sentences) {
      ranges.back().last = s;
    } else {
      ranges.push_back({s, s});
    }
  }
  return ranges;
}

std::vector<EventMention> fewshot_sample(const std::vector<EventMention>& mentions, std::size_t k,
                                         std::uint64_t seed) {
  std::map<std::string, std::vector<std::size_t>> by_subtype;
  for (std::size_t i = 0; i < mentions.size(); ++i) by_subtype[mentions[i].subtype].push_back(i);
  Rng rng(seed);
  std::vector<std::size_t> chosen;
  for (const auto& [subtype, pool] : by_subtype) {
    for (auto j : rng.sample_indices(pool.size(), k)) chosen.push_back(pool[j]);
  }
  std::sort(chosen.begin(), chosen.end());
  std::vector<EventMention> out;
  out.reserve(chosen.size());
  for (auto i : chosen) out.push_back(mentions[i]);
  return out;
}

}  // namespace promptee
