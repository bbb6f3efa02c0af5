#include "promptee/io.hpp"

#include <fstream>
#include <sstream>

#include "promptee/errors.hpp"

namespace promptee {

using nlohmann::json;

namespace {

json binding_to_json(const SlotBinding& b) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, MainTypeBinding>) {
          return {{"main_type", v.main_type}};
        } else if constexpr (std::is_same_v<T, SubtypeBinding>) {
          return {{"subtype", v.subtype}};
        } else {
          return {{"subtype", v.subtype}, {"role", v.role}, {"event", v.event}};
        }
      },
      b);
}

SlotBinding binding_from_json(const json& j) {
  if (j.contains("role")) {
    return RoleBinding{j.at("subtype").get<std::string>(), j.at("role").get<std::string>(),
                       j.value("event", std::size_t{0})};
  }
  if (j.contains("subtype")) return SubtypeBinding{j.at("subtype").get<std::string>()};
  return MainTypeBinding{j.at("main_type").get<std::string>()};
}

}  // namespace

json instance_to_json(const PromptInstance& inst) {
  json slots = json::array();
  for (const auto& s : inst.slots) {
    json slot = {{"sentinel", s.sentinel}, {"gold", s.gold}, {"bind", binding_to_json(s.bind)}};
    if (!s.shared_with.empty()) {
      json shared = json::array();
      for (const auto& b : s.shared_with) shared.push_back(binding_to_json(b));
      slot["shared_with"] = shared;
    }
    slots.push_back(std::move(slot));
  }
  json offsets = json::array();
  for (auto o : inst.passage.offset_map) {
    offsets.push_back(o == Passage::kUnmapped ? json(-1) : json(o));
  }
  return {{"family", to_string(inst.family)},
          {"input_text", inst.input_text()},
          {"target_text", inst.target_text},
          {"slots", slots},
          {"origin", {{"doc_id", inst.passage.doc_id},
                      {"sentence_range", {inst.passage.sentences.first, inst.passage.sentences.last}}}},
          {"passage", {{"text", inst.passage.text},
                       {"focus", {inst.passage.focus.begin, inst.passage.focus.end}},
                       {"offset_map", offsets}}},
          {"prompt_section", inst.prompt_section}};
}

PromptInstance instance_from_json(const json& j) {
  try {
    PromptInstance inst;
    inst.family = family_from_string(j.at("family").get<std::string>());
    inst.target_text = j.value("target_text", "");
    inst.prompt_section = j.at("prompt_section").get<std::string>();
    const auto& origin = j.at("origin");
    inst.passage.doc_id = origin.at("doc_id").get<std::string>();
    inst.passage.sentences = {origin.at("sentence_range").at(0).get<std::size_t>(),
                              origin.at("sentence_range").at(1).get<std::size_t>()};
    const auto& p = j.at("passage");
    inst.passage.text = p.at("text").get<std::string>();
    for (const auto& o : p.at("offset_map")) {
      inst.passage.offset_map.push_back(o.get<long long>() < 0 ? Passage::kUnmapped : o.get<std::size_t>());
    }
    if (inst.passage.offset_map.size() != inst.passage.text.size()) {
      throw ValidationError("offset_map length does not match passage text");
    }
    inst.passage.relocate_focus();
    for (const auto& s : j.at("slots")) {
      PromptSlot slot;
      slot.sentinel = s.at("sentinel").get<int>();
      slot.gold = s.value("gold", std::vector<std::string>{});
      slot.bind = binding_from_json(s.at("bind"));
      for (const auto& b : s.value("shared_with", json::array())) slot.shared_with.push_back(binding_from_json(b));
      inst.slots.push_back(std::move(slot));
    }
    if (j.contains("input_text") && j.at("input_text").get<std::string>() != inst.input_text()) {
      throw ValidationError("input_text does not equal passage text + prompt section");
    }
    return inst;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed prompt instance: ") + e.what());
  }
}

void write_instances(const std::vector<PromptInstance>& instances, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw RuntimeFailure("cannot write instances: " + path.string());
  for (const auto& inst : instances) out << instance_to_json(inst).dump() << '\n';
}

std::vector<PromptInstance> read_instances(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open instances: " + path.string());
  std::vector<PromptInstance> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (trim(line).empty()) continue;
    try {
      out.push_back(instance_from_json(json::parse(line)));
    } catch (const json::parse_error& e) {
      throw ValidationError("instance parse failure at line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

json generation_to_json(const GenerationRecord& record) {
  json answers = json::object();
  for (const auto& [k, list] : record.result.answer_map.entries) answers[std::to_string(k)] = list;
  json grounded = json::object();
  for (const auto& [k, list] : record.result.grounded) {
    json spans = json::array();
    for (const auto& g : list) {
      spans.push_back(g.doc_span ? json::array({g.doc_span->begin, g.doc_span->end}) : json(nullptr));
    }
    grounded[std::to_string(k)] = spans;
  }
  return {{"instance_origin", {{"doc_id", record.doc_id},
                               {"sentence_range", {record.sentences.first, record.sentences.last}}}},
          {"family", to_string(record.family)},
          {"text", record.result.text},
          {"answer_map", answers},
          {"grounded", grounded},
          {"malformed", record.result.answer_map.malformed}};
}

void write_generations(const std::vector<GenerationRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw RuntimeFailure("cannot write generations: " + path.string());
  for (const auto& r : records) out << generation_to_json(r).dump() << '\n';
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("parse failure in " + path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw RuntimeFailure("cannot write " + path.string());
  out << text;
}

}  // namespace promptee
