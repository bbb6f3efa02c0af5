#include "promptee/prompting.hpp"

#include <algorithm>
#include <set>

#include "promptee/errors.hpp"
#include "promptee/rng.hpp"

namespace promptee {

namespace {

// Leaves room for the closing sentinel of the target within <extra_id_0..99>.
constexpr int kMaxInputSentinels = tokens::kMaxSentinels - 1;

std::string fill(std::string tmpl, std::initializer_list<std::pair<std::string_view, std::string_view>> values) {
  for (const auto& [key, value] : values) tmpl = replace_all(std::move(tmpl), key, value);
  return tmpl;
}

void check_budget(std::size_t n) {
  if (n > static_cast<std::size_t>(kMaxInputSentinels)) {
    throw PromptRejected("instance needs " + std::to_string(n) + " sentinels; the budget is " +
                         std::to_string(kMaxInputSentinels));
  }
}

void require_markers(const Passage& passage) {
  Passage copy = passage;
  copy.relocate_focus();
}

/// Document range covered by the focus region.
CharSpan focus_in_document(const Passage& passage) {
  std::optional<std::size_t> first;
  std::size_t last = 0;
  for (std::size_t i = passage.focus.begin; i < passage.focus.end; ++i) {
    const auto d = passage.offset_map[i];
    if (d == Passage::kUnmapped) continue;
    if (!first) first = d;
    last = d;
  }
  if (!first) return {0, 0};
  return {*first, last + 1};
}

/// Passage span of a document span that must lie in the focus region.
CharSpan locate_in_focus(const Passage& passage, CharSpan doc_span, const std::string& what) {
  auto span = passage.to_passage(doc_span);
  if (!span || !CharSpan{passage.focus.begin, passage.focus.end}.contains(*span)) {
    throw PromptRejected(what + " lies outside the passage focus");
  }
  return *span;
}

std::string bridge(const Schema& schema) { return " " + schema.phrases().bridge; }

std::string trigger_marked(int k, std::string_view surface) {
  return tokens::trigger_open(k) + " " + std::string(surface) + " " + tokens::trigger_close(k);
}

std::string answer_string(const std::vector<std::string>& gold) {
  return join(gold, " " + std::string(tokens::kSeparator) + " ");
}

void finish_target(PromptInstance& inst) {
  std::vector<std::string> answers;
  for (const auto& s : inst.slots) answers.push_back(answer_string(s.gold));
  inst.target_text = serialize_target(answers);
}

}  // namespace

std::string to_string(PromptFamily family) {
  switch (family) {
    case PromptFamily::kExternalTrigger: return "external_trigger";
    case PromptFamily::kInternalTrigger: return "internal_trigger";
    case PromptFamily::kSubtype: return "subtype";
    case PromptFamily::kSingleArgument: return "single_argument";
    case PromptFamily::kJointArgument: return "joint_argument";
  }
  return "external_trigger";
}

PromptFamily family_from_string(std::string_view name) {
  for (auto f : {PromptFamily::kExternalTrigger, PromptFamily::kInternalTrigger, PromptFamily::kSubtype,
                 PromptFamily::kSingleArgument, PromptFamily::kJointArgument}) {
    if (to_string(f) == name) return f;
  }
  throw ValidationError("unknown prompt family: " + std::string(name));
}

PromptInstance build_external_trigger_prompt(const Passage& passage, const Schema& schema,
                                             std::optional<std::span<const EventMention>> gold) {
  require_markers(passage);
  check_budget(schema.main_types().size());
  PromptInstance inst;
  inst.family = PromptFamily::kExternalTrigger;
  inst.passage = passage;

  std::map<std::string, std::vector<const EventMention*>> by_main;
  if (gold) {
    const CharSpan focus = focus_in_document(passage);
    for (const auto& m : *gold) {
      if (m.doc_id == passage.doc_id && focus.contains(m.trigger)) {
        by_main[schema.main_type_of(m.subtype)].push_back(&m);
      }
    }
  }

  inst.prompt_section = bridge(schema);
  int k = 0;
  for (const auto& main : schema.main_types()) {
    inst.prompt_section += " " + replace_all(main.trigger_question_template, tokens::kMaskSlot, tokens::sentinel(k));
    PromptSlot slot{k, {}, MainTypeBinding{main.name}, {}};
    if (gold) {
      auto& found = by_main[main.name];
      std::sort(found.begin(), found.end(),
                [](const EventMention* a, const EventMention* b) { return a->trigger < b->trigger; });
      for (const auto* m : found) slot.gold.push_back(m->trigger_surface);
      if (slot.gold.empty()) slot.gold.emplace_back(tokens::kNone);
    }
    inst.slots.push_back(std::move(slot));
    ++k;
  }
  if (gold && !inst.slots.empty()) finish_target(inst);
  return inst;
}

PromptInstance build_internal_trigger_prompt(const Passage& passage, std::span<const EventMention> mentions,
                                             const Schema& schema) {
  require_markers(passage);
  if (mentions.empty()) throw PromptRejected("internal trigger prompt needs at least one event");
  check_budget(mentions.size());

  std::vector<const EventMention*> ordered;
  for (const auto& m : mentions) ordered.push_back(&m);
  std::sort(ordered.begin(), ordered.end(),
            [](const EventMention* a, const EventMention* b) { return a->trigger < b->trigger; });
  for (std::size_t i = 1; i < ordered.size(); ++i) {
    if (ordered[i]->trigger.overlaps(ordered[i - 1]->trigger)) {
      throw PromptRejected("overlapping trigger spans in " + passage.doc_id);
    }
  }

  std::vector<TextEdit> edits;
  PromptInstance inst;
  inst.family = PromptFamily::kInternalTrigger;
  inst.prompt_section = bridge(schema);
  const auto& phrases = schema.phrases();
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    const auto& m = *ordered[i];
    const int k = static_cast<int>(i);
    edits.push_back({locate_in_focus(passage, m.trigger, "trigger '" + m.trigger_surface + "'"), tokens::sentinel(k)});
    const auto& sub = schema.subtype(m.subtype);
    inst.prompt_section += " " + sub.parent + " : " +
                           replace_all(sub.trigger_question_template, tokens::kMaskSlot,
                                       phrases.internal_mask_reference);
    inst.slots.push_back({k, {m.trigger_surface}, SubtypeBinding{m.subtype}, {}});
  }
  inst.passage = passage.edited(std::move(edits));
  finish_target(inst);
  return inst;
}

PromptInstance build_subtype_prompt(const Passage& passage, const std::string& trigger_surface,
                                    const std::string& main_type, const Schema& schema,
                                    const std::optional<std::string>& gold_subtype) {
  require_markers(passage);
  const auto candidates = schema.subtypes_of(main_type);
  std::vector<std::string> labels;
  for (const auto* s : candidates) labels.push_back(s->label());

  PromptInstance inst;
  inst.family = PromptFamily::kSubtype;
  inst.passage = passage;
  const auto& phrases = schema.phrases();
  inst.prompt_section = bridge(schema) + " " +
                        fill(phrases.subtype_candidates, {{"{main_type}", main_type}, {"{candidates}", join(labels, " , ")}}) +
                        " " +
                        fill(phrases.subtype_question, {{"{main_type}", main_type},
                                                        {"{trigger}", trigger_marked(0, trigger_surface)},
                                                        {tokens::kMaskSlot, tokens::sentinel(0)}});
  PromptSlot slot{0, {}, MainTypeBinding{main_type}, {}};
  if (gold_subtype) {
    const auto& sub = schema.subtype(*gold_subtype);
    if (sub.parent != main_type) {
      throw ValidationError("gold subtype " + sub.name + " is not a subtype of " + main_type);
    }
    slot.bind = SubtypeBinding{sub.name};
    slot.gold.push_back(sub.label());
  }
  inst.slots.push_back(std::move(slot));
  if (gold_subtype) finish_target(inst);
  return inst;
}

std::vector<PromptInstance> build_single_argument_prompts(const Passage& passage, const EventMention& event,
                                                          const Schema& schema, bool with_gold) {
  require_markers(passage);
  const CharSpan trig = locate_in_focus(passage, event.trigger, "trigger '" + event.trigger_surface + "'");
  const Passage marked = passage.edited({{{trig.begin, trig.begin}, tokens::trigger_open(0) + " "},
                                         {{trig.end, trig.end}, " " + tokens::trigger_close(0)}});
  const auto& sub = schema.subtype(event.subtype);
  const std::string statement = fill(schema.phrases().event_statement,
                                     {{"{subtype}", sub.label()}, {"{trigger}", trigger_marked(0, event.trigger_surface)}});

  std::vector<PromptInstance> out;
  for (const auto* role : schema.roles_for(event.subtype)) {
    PromptInstance inst;
    inst.family = PromptFamily::kSingleArgument;
    inst.passage = marked;
    inst.prompt_section = bridge(schema) + " " +
                          replace_all(role->description_template, tokens::kMaskSlot, tokens::sentinel(0)) + " " +
                          statement;
    PromptSlot slot{0, {}, RoleBinding{event.subtype, role->name, 0}, {}};
    if (with_gold) {
      std::vector<const ArgumentMention*> fillers;
      for (const auto& a : event.arguments) {
        if (a.role == role->name) fillers.push_back(&a);
      }
      std::sort(fillers.begin(), fillers.end(),
                [](const ArgumentMention* a, const ArgumentMention* b) { return a->span < b->span; });
      for (const auto* a : fillers) slot.gold.push_back(a->surface);
      if (slot.gold.empty()) slot.gold.emplace_back(tokens::kNone);
    }
    inst.slots.push_back(std::move(slot));
    if (with_gold) finish_target(inst);
    out.push_back(std::move(inst));
  }
  return out;
}

PromptInstance build_joint_argument_prompt(const Passage& passage, std::span<const EventMention> events,
                                           const Schema& schema, std::uint64_t seed) {
  require_markers(passage);
  struct Masked {
    CharSpan doc_span;
    std::string surface;
    std::vector<RoleBinding> binds;
  };
  std::map<CharSpan, Masked> by_span;
  for (std::size_t e = 0; e < events.size(); ++e) {
    const auto& ev = events[e];
    locate_in_focus(passage, ev.trigger, "trigger '" + ev.trigger_surface + "'");
    for (const auto& a : ev.arguments) {
      locate_in_focus(passage, a.span, "argument '" + a.surface + "'");
      auto& m = by_span[a.span];
      m.doc_span = a.span;
      m.surface = a.surface;
      m.binds.push_back({ev.subtype, a.role, e});
    }
  }
  if (by_span.empty()) throw PromptRejected("joint argument prompt needs at least one argument");
  check_budget(by_span.size());
  const Masked* prev = nullptr;
  for (const auto& [span, m] : by_span) {
    if (prev && prev->doc_span.overlaps(span)) {
      throw PromptRejected("partially overlapping arguments '" + prev->surface + "' and '" + m.surface + "' in " +
                           passage.doc_id);
    }
    prev = &m;
  }

  PromptInstance inst;
  inst.family = PromptFamily::kJointArgument;
  std::vector<TextEdit> edits;
  int k = 0;
  for (const auto& [span, m] : by_span) {
    edits.push_back({*passage.to_passage(span), tokens::sentinel(k)});
    PromptSlot slot{k, {m.surface}, m.binds.front(), {}};
    for (std::size_t i = 1; i < m.binds.size(); ++i) slot.shared_with.push_back(m.binds[i]);
    inst.slots.push_back(std::move(slot));
    ++k;
  }
  inst.passage = passage.edited(std::move(edits));

  const auto& phrases = schema.phrases();
  std::vector<std::string> descriptions;
  std::vector<std::string> statements;
  for (std::size_t e = 0; e < events.size(); ++e) {
    const auto& ev = events[e];
    const int t = static_cast<int>(e);
    std::set<std::string> filled;
    for (const auto& a : ev.arguments) filled.insert(a.role);
    for (const auto* role : schema.roles_for(ev.subtype)) {
      if (!filled.contains(role->name)) continue;
      const std::string ref = fill(phrases.joint_role_reference,
                                   {{"{role}", role->name}, {"{trigger_marker}", tokens::trigger_open(t)}});
      descriptions.push_back(replace_all(role->description_template, tokens::kMaskSlot, ref));
    }
    statements.push_back(fill(phrases.event_statement, {{"{subtype}", schema.subtype(ev.subtype).label()},
                                                        {"{trigger}", trigger_marked(t, ev.trigger_surface)}}));
  }
  Rng rng(seed);
  rng.shuffle(descriptions);
  inst.prompt_section = bridge(schema);
  for (const auto& d : descriptions) inst.prompt_section += " " + d;
  for (const auto& s : statements) inst.prompt_section += " " + s;
  finish_target(inst);
  return inst;
}

std::string serialize_target(const std::vector<std::string>& answers) {
  if (answers.empty()) throw ValidationError("target needs at least one answer");
  if (answers.size() > static_cast<std::size_t>(kMaxInputSentinels)) {
    throw PromptRejected("target exceeds the sentinel budget");
  }
  std::string out;
  for (std::size_t i = 0; i < answers.size(); ++i) {
    if (trim(answers[i]).empty()) throw ValidationError("empty answer string at position " + std::to_string(i));
    out += tokens::sentinel(static_cast<int>(i)) + " " + std::string(trim(answers[i])) + " ";
  }
  out += tokens::sentinel(static_cast<int>(answers.size())) + " " + std::string(tokens::kEnd);
  return out;
}

namespace {

std::vector<std::string> split_answers(const std::vector<std::string>& words) {
  std::vector<std::string> out;
  const std::string joined = join(words, " ");
  std::size_t start = 0;
  while (start <= joined.size()) {
    auto bar = joined.find(tokens::kSeparator, start);
    if (bar == std::string::npos) bar = joined.size();
    const auto piece = trim(std::string_view(joined).substr(start, bar - start));
    if (!piece.empty() && piece != tokens::kNone) out.emplace_back(piece);
    start = bar + 1;
  }
  return out;
}

}  // namespace

AnswerMap parse_generation(std::string_view output) {
  AnswerMap result;
  const auto words = split_ws(isolate_special_tokens(output));
  std::optional<int> current;
  std::vector<std::string> buffer;
  int last_index = -1;

  auto flush = [&](bool closing_sentinel) {
    if (!current) {
      if (!buffer.empty()) result.malformed = true;
      return;
    }
    if (buffer.empty() && !closing_sentinel) return;  // terminal sentinel
    if (buffer.empty()) result.malformed = true;
    if (!closing_sentinel) result.malformed = true;
    if (result.entries.contains(*current)) {
      result.malformed = true;
    } else {
      result.entries[*current] = split_answers(buffer);
    }
  };

  std::size_t i = 0;
  for (; i < words.size(); ++i) {
    const auto& w = words[i];
    if (auto k = tokens::sentinel_index(w)) {
      flush(true);
      if (*k <= last_index) result.malformed = true;
      last_index = std::max(last_index, *k);
      current = *k;
      buffer.clear();
      continue;
    }
    if (w == tokens::kEnd) break;
    buffer.push_back(w);
  }
  flush(false);
  if (i + 1 < words.size()) result.malformed = true;  // text after the end marker
  return result;
}

std::string fill_sentinels(std::string_view text, const std::map<int, std::string>& answers) {
  std::string out(text);
  for (const auto& [k, answer] : answers) out = replace_all(std::move(out), tokens::sentinel(k), answer);
  return out;
}

std::vector<int> sentinels_in(std::string_view text) {
  std::vector<int> out;
  for (const auto& w : split_ws(isolate_special_tokens(text))) {
    if (auto k = tokens::sentinel_index(w)) out.push_back(*k);
  }
  return out;
}

}  // namespace promptee
