#include "promptee/evaluation.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "promptee/errors.hpp"
#include "promptee/rng.hpp"

namespace promptee {

using nlohmann::json;

namespace {

json span_json(const std::optional<CharSpan>& s) {
  if (!s) return nullptr;
  return json::array({s->begin, s->end});
}

std::optional<CharSpan> span_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return CharSpan{j.at(0).get<std::size_t>(), j.at(1).get<std::size_t>()};
}

std::string span_key(CharSpan s) { return std::to_string(s.begin) + ":" + std::to_string(s.end); }

constexpr char kSep = '\x1f';

std::string trigger_key(const std::string& doc, CharSpan trig, const std::string& subtype) {
  return doc + kSep + span_key(trig) + kSep + subtype;
}

std::string unmatched_key(std::size_t i) { return std::string(1, '\0') + "unmatched#" + std::to_string(i); }

struct ScoredItem {
  MatchKey key;
  const EventPrediction* event;
  const PredictedArgument* argument;  // null for triggers
};

std::vector<ScoredItem> trigger_items(const std::vector<EventPrediction>& pred) {
  std::vector<ScoredItem> out;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const auto& p = pred[i];
    out.push_back({p.trigger ? trigger_key(p.doc_id, *p.trigger, p.subtype) : unmatched_key(i), &p, nullptr});
  }
  return out;
}

std::vector<ScoredItem> argument_items(const std::vector<EventPrediction>& pred) {
  std::vector<ScoredItem> out;
  std::size_t counter = 0;
  for (const auto& p : pred) {
    std::set<std::string> seen;
    for (const auto& a : p.arguments) {
      // Dedup key covers both grounded and surface-only answers.
      const std::string local = a.role + kSep + (a.span ? span_key(*a.span) : "?" + a.surface);
      if (!seen.insert(local).second) continue;
      MatchKey key = (p.trigger && a.span)
                         ? trigger_key(p.doc_id, *p.trigger, p.subtype) + kSep + a.role + kSep + span_key(*a.span)
                         : unmatched_key(counter);
      ++counter;
      out.push_back({std::move(key), &p, &a});
    }
  }
  return out;
}

std::vector<MatchKey> keys_of(const std::vector<ScoredItem>& items) {
  std::vector<MatchKey> out;
  out.reserve(items.size());
  for (const auto& i : items) out.push_back(i.key);
  return out;
}

}  // namespace

json prediction_to_json(const EventPrediction& p) {
  json args = json::array();
  for (const auto& a : p.arguments) {
    args.push_back({{"role", a.role}, {"span", span_json(a.span)}, {"surface", a.surface}});
  }
  return {{"doc_id", p.doc_id},
          {"sentence_index", p.sentence_index},
          {"trigger", span_json(p.trigger)},
          {"trigger_surface", p.trigger_surface},
          {"main_type", p.main_type},
          {"subtype", p.subtype},
          {"arguments", args}};
}

EventPrediction prediction_from_json(const json& j) {
  try {
    EventPrediction p;
    p.doc_id = j.at("doc_id").get<std::string>();
    p.sentence_index = j.value("sentence_index", std::size_t{0});
    p.trigger = span_from(j.at("trigger"));
    p.trigger_surface = j.value("trigger_surface", "");
    p.main_type = j.value("main_type", "");
    p.subtype = j.at("subtype").get<std::string>();
    for (const auto& a : j.value("arguments", json::array())) {
      p.arguments.push_back({a.at("role").get<std::string>(), span_from(a.at("span")), a.value("surface", "")});
    }
    return p;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed prediction record: ") + e.what());
  }
}

void write_predictions(const std::vector<EventPrediction>& preds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw RuntimeFailure("cannot write predictions: " + path.string());
  for (const auto& p : preds) out << prediction_to_json(p).dump() << '\n';
}

std::vector<EventPrediction> read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open predictions: " + path.string());
  std::vector<EventPrediction> out;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    try {
      out.push_back(prediction_from_json(json::parse(line)));
    } catch (const json::parse_error& e) {
      throw ValidationError(std::string("prediction parse failure: ") + e.what());
    }
  }
  return out;
}

Prf Prf::from_counts(std::size_t gold, std::size_t pred, std::size_t correct) {
  Prf s;
  s.gold = gold;
  s.pred = pred;
  s.correct = correct;
  s.p = pred > 0 ? static_cast<double>(correct) / static_cast<double>(pred) : 0.0;
  s.r = gold > 0 ? static_cast<double>(correct) / static_cast<double>(gold) : 0.0;
  s.f1 = s.p + s.r > 0.0 ? 2.0 * s.p * s.r / (s.p + s.r) : 0.0;
  return s;
}

json ScoreReport::to_json() const {
  auto one = [](const Prf& s) {
    return json{{"p", s.p}, {"r", s.r}, {"f1", s.f1}, {"gold", s.gold}, {"pred", s.pred}, {"correct", s.correct}};
  };
  return {{"trig_c", one(trig_c)}, {"arg_c", one(arg_c)}};
}

std::vector<MatchKey> gold_trigger_keys(const std::vector<EventMention>& gold) {
  std::vector<MatchKey> out;
  for (const auto& g : gold) out.push_back(trigger_key(g.doc_id, g.trigger, g.subtype));
  return out;
}

std::vector<MatchKey> predicted_trigger_keys(const std::vector<EventPrediction>& pred) {
  return keys_of(trigger_items(pred));
}

std::vector<MatchKey> gold_argument_keys(const std::vector<EventMention>& gold) {
  std::vector<MatchKey> out;
  for (const auto& g : gold) {
    for (const auto& a : g.arguments) {
      out.push_back(trigger_key(g.doc_id, g.trigger, g.subtype) + kSep + a.role + kSep + span_key(a.span));
    }
  }
  return out;
}

std::vector<MatchKey> predicted_argument_keys(const std::vector<EventPrediction>& pred) {
  return keys_of(argument_items(pred));
}

std::size_t count_matches(const std::vector<MatchKey>& gold, const std::vector<MatchKey>& pred) {
  std::map<MatchKey, std::size_t> available;
  for (const auto& g : gold) ++available[g];
  std::size_t matched = 0;
  for (const auto& p : pred) {
    auto it = available.find(p);
    if (it != available.end() && it->second > 0) {
      --it->second;
      ++matched;
    }
  }
  return matched;
}

Prf score_triggers(const std::vector<EventMention>& gold, const std::vector<EventPrediction>& pred) {
  const auto g = gold_trigger_keys(gold);
  const auto p = predicted_trigger_keys(pred);
  return Prf::from_counts(g.size(), p.size(), count_matches(g, p));
}

Prf score_arguments(const std::vector<EventMention>& gold, const std::vector<EventPrediction>& pred) {
  const auto g = gold_argument_keys(gold);
  const auto p = predicted_argument_keys(pred);
  return Prf::from_counts(g.size(), p.size(), count_matches(g, p));
}

ScoreReport score(const std::vector<EventMention>& gold, const std::vector<EventPrediction>& pred) {
  return {score_triggers(gold, pred), score_arguments(gold, pred)};
}

json ErrorRecord::to_json() const {
  return {{"kind", kind},       {"doc_id", doc_id},       {"sentence_index", sentence_index}, {"context", context},
          {"gold", gold},       {"predicted", predicted}, {"category", category}};
}

ErrorRecord ErrorRecord::from_json(const json& j) {
  ErrorRecord r;
  try {
    r.kind = j.at("kind").get<std::string>();
    r.doc_id = j.at("doc_id").get<std::string>();
    r.sentence_index = j.at("sentence_index").get<std::size_t>();
    r.context = j.value("context", "");
    r.gold = j.value("gold", json::array());
    r.predicted = j.value("predicted", json::object());
    r.category = j.value("category", "");
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed error record: ") + e.what());
  }
  if (!r.category.empty()) {
    const auto& cats = error_categories();
    if (std::find(cats.begin(), cats.end(), r.category) == cats.end()) {
      throw ValidationError("unknown error category: " + r.category);
    }
  }
  return r;
}

std::vector<ErrorRecord> export_errors(const Corpus& corpus, const std::vector<EventMention>& gold,
                                       const std::vector<EventPrediction>& pred, std::size_t sample_n,
                                       std::uint64_t seed) {
  std::vector<ErrorRecord> wrong;
  auto context_of = [&](const std::string& doc_id, std::size_t sentence) -> std::string {
    for (const auto& d : corpus.documents) {
      if (d.doc_id == doc_id && sentence < d.sentences.size()) {
        const auto& s = d.sentences[sentence];
        return d.text.substr(s.begin, s.size());
      }
    }
    return {};
  };
  auto gold_of = [&](const std::string& doc_id, std::size_t sentence) {
    json out = json::array();
    for (const auto& m : gold) {
      if (m.doc_id == doc_id && m.sentence_index == sentence) {
        json args = json::array();
        for (const auto& a : m.arguments) {
          args.push_back({{"role", a.role}, {"span", {a.span.begin, a.span.end}}, {"surface", a.surface}});
        }
        out.push_back({{"subtype", m.subtype},
                       {"trigger", {m.trigger.begin, m.trigger.end}},
                       {"trigger_surface", m.trigger_surface},
                       {"arguments", args}});
      }
    }
    return out;
  };
  auto collect = [&](const std::vector<ScoredItem>& items, const std::vector<MatchKey>& gold_keys,
                     const char* kind) {
    std::map<MatchKey, std::size_t> available;
    for (const auto& g : gold_keys) ++available[g];
    for (const auto& item : items) {
      auto it = available.find(item.key);
      if (it != available.end() && it->second > 0) {
        --it->second;
        continue;
      }
      const auto& ev = *item.event;
      ErrorRecord r;
      r.kind = kind;
      r.doc_id = ev.doc_id;
      r.sentence_index = ev.sentence_index;
      r.context = context_of(ev.doc_id, ev.sentence_index);
      r.gold = gold_of(ev.doc_id, ev.sentence_index);
      r.predicted = prediction_to_json(ev);
      if (item.argument) {
        r.predicted["error_argument"] = {{"role", item.argument->role},
                                         {"span", span_json(item.argument->span)},
                                         {"surface", item.argument->surface}};
      }
      wrong.push_back(std::move(r));
    }
  };
  collect(trigger_items(pred), gold_trigger_keys(gold), "trigger");
  collect(argument_items(pred), gold_argument_keys(gold), "argument");

  Rng rng(seed);
  auto picked = rng.sample_indices(wrong.size(), sample_n);
  std::sort(picked.begin(), picked.end());
  std::vector<ErrorRecord> out;
  for (auto i : picked) out.push_back(std::move(wrong[i]));
  return out;
}

void write_error_records(const std::vector<ErrorRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw RuntimeFailure("cannot write error records: " + path.string());
  for (const auto& r : records) out << r.to_json().dump() << '\n';
}

std::vector<ErrorRecord> read_error_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open error records: " + path.string());
  std::vector<ErrorRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    try {
      out.push_back(ErrorRecord::from_json(json::parse(line)));
    } catch (const json::parse_error& e) {
      throw ValidationError(std::string("error record parse failure: ") + e.what());
    }
  }
  return out;
}

}  // namespace promptee
