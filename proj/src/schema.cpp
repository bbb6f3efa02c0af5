#include "promptee/schema.hpp"

#include <fstream>
#include <set>

#include "promptee/errors.hpp"
#include "promptee/text.hpp"

namespace promptee {

using nlohmann::json;

namespace {

std::string default_main_question(const std::string& name) {
  return "The trigger of the " + name + " event is " + std::string(tokens::kMaskSlot) + " .";
}

void require_one_slot(const std::string& tmpl, const std::string& owner) {
  if (count_occurrences(tmpl, tokens::kMaskSlot) != 1) {
    throw ValidationError("template must contain exactly one mask slot: " + owner);
  }
}

std::string get_string(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key) || !j.at(key).is_string()) {
    throw ValidationError("missing string field '" + std::string(key) + "' in " + where);
  }
  return j.at(key).get<std::string>();
}

}  // namespace

std::string EventSubtype::label() const {
  auto dot = name.rfind('.');
  return dot == std::string::npos ? name : name.substr(dot + 1);
}

Schema::Schema(std::vector<MainType> main_types, std::vector<EventSubtype> subtypes,
               std::vector<ArgumentRole> roles, PromptPhrases phrases)
    : main_types_(std::move(main_types)),
      subtypes_(std::move(subtypes)),
      roles_(std::move(roles)),
      phrases_(std::move(phrases)) {
  validate_and_index();
}

void Schema::validate_and_index() {
  for (std::size_t i = 0; i < main_types_.size(); ++i) {
    auto& m = main_types_[i];
    if (m.name.empty()) throw ValidationError("empty main type name");
    if (m.trigger_question_template.empty()) m.trigger_question_template = default_main_question(m.name);
    require_one_slot(m.trigger_question_template, "main type " + m.name);
    if (!main_index_.emplace(m.name, i).second) {
      throw ValidationError("duplicate main type: " + m.name);
    }
  }
  std::set<std::string> labels;
  for (std::size_t i = 0; i < subtypes_.size(); ++i) {
    const auto& s = subtypes_[i];
    if (s.name.empty()) throw ValidationError("empty subtype name");
    if (!main_index_.contains(s.parent)) {
      throw ValidationError("subtype " + s.name + " references unknown main type " + s.parent);
    }
    require_one_slot(s.trigger_question_template, "subtype " + s.name);
    if (!subtype_index_.emplace(s.name, i).second) {
      throw ValidationError("duplicate subtype name: " + s.name);
    }
  }
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t i = 0; i < roles_.size(); ++i) {
    const auto& r = roles_[i];
    if (r.name.empty()) throw ValidationError("empty role name");
    if (!subtype_index_.contains(r.event_subtype)) {
      throw ValidationError("role " + r.name + " references unknown subtype " + r.event_subtype);
    }
    require_one_slot(r.description_template, "role " + r.event_subtype + "/" + r.name);
    if (!seen.emplace(r.name, r.event_subtype).second) {
      throw ValidationError("duplicate role " + r.name + " for subtype " + r.event_subtype);
    }
    roles_by_subtype_[r.event_subtype].push_back(i);
  }
  require_one_slot(phrases_.subtype_question, "phrases.subtype_question");
}

bool Schema::has_main_type(std::string_view name) const { return main_index_.contains(name); }
bool Schema::has_subtype(std::string_view name) const { return subtype_index_.contains(name); }

const MainType& Schema::main_type(std::string_view name) const {
  auto it = main_index_.find(name);
  if (it == main_index_.end()) throw ValidationError("unknown main type: " + std::string(name));
  return main_types_[it->second];
}

const EventSubtype& Schema::subtype(std::string_view name) const {
  auto it = subtype_index_.find(name);
  if (it == subtype_index_.end()) throw ValidationError("unknown subtype: " + std::string(name));
  return subtypes_[it->second];
}

std::vector<const ArgumentRole*> Schema::roles_for(std::string_view subtype_name) const {
  subtype(subtype_name);
  std::vector<const ArgumentRole*> out;
  if (auto it = roles_by_subtype_.find(subtype_name); it != roles_by_subtype_.end()) {
    for (auto i : it->second) out.push_back(&roles_[i]);
  }
  return out;
}

const std::string& Schema::main_type_of(std::string_view subtype_name) const {
  return subtype(subtype_name).parent;
}

std::vector<const EventSubtype*> Schema::subtypes_of(std::string_view main_type_name) const {
  main_type(main_type_name);
  std::vector<const EventSubtype*> out;
  for (const auto& s : subtypes_) {
    if (s.parent == main_type_name) out.push_back(&s);
  }
  return out;
}

bool Schema::role_allowed(std::string_view subtype_name, std::string_view role) const {
  auto it = roles_by_subtype_.find(subtype_name);
  if (it == roles_by_subtype_.end()) return false;
  for (auto i : it->second) {
    if (roles_[i].name == role) return true;
  }
  return false;
}

std::vector<std::string> Schema::role_names() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& r : roles_) {
    if (seen.insert(r.name).second) out.push_back(r.name);
  }
  return out;
}

json Schema::to_json() const {
  json mains = json::array();
  for (const auto& m : main_types_) {
    if (m.trigger_question_template == default_main_question(m.name)) {
      mains.push_back(m.name);
    } else {
      mains.push_back({{"name", m.name}, {"trigger_question_template", m.trigger_question_template}});
    }
  }
  json subs = json::array();
  for (const auto& s : subtypes_) {
    subs.push_back({{"name", s.name},
                    {"parent", s.parent},
                    {"trigger_question_template", s.trigger_question_template}});
  }
  json roles = json::array();
  for (const auto& r : roles_) {
    roles.push_back({{"name", r.name},
                     {"event_subtype", r.event_subtype},
                     {"description_template", r.description_template}});
  }
  json phrases = {{"bridge", phrases_.bridge},
                  {"subtype_candidates", phrases_.subtype_candidates},
                  {"subtype_question", phrases_.subtype_question},
                  {"event_statement", phrases_.event_statement},
                  {"internal_mask_reference", phrases_.internal_mask_reference},
                  {"joint_role_reference", phrases_.joint_role_reference}};
  return {{"main_types", mains}, {"subtypes", subs}, {"roles", roles}, {"phrases", phrases}};
}

Schema Schema::from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("schema must be a JSON object");
  std::vector<MainType> mains;
  std::vector<EventSubtype> subs;
  std::vector<ArgumentRole> roles;
  PromptPhrases phrases;
  for (const auto& m : j.value("main_types", json::array())) {
    if (m.is_string()) {
      mains.push_back({m.get<std::string>(), ""});
    } else {
      mains.push_back({get_string(m, "name", "main_types"), m.value("trigger_question_template", "")});
    }
  }
  for (const auto& s : j.value("subtypes", json::array())) {
    subs.push_back({get_string(s, "name", "subtypes"), get_string(s, "parent", "subtypes"),
                    get_string(s, "trigger_question_template", "subtypes")});
  }
  for (const auto& r : j.value("roles", json::array())) {
    roles.push_back({get_string(r, "name", "roles"), get_string(r, "event_subtype", "roles"),
                     get_string(r, "description_template", "roles")});
  }
  if (j.contains("phrases")) {
    const auto& p = j.at("phrases");
    phrases.bridge = p.value("bridge", phrases.bridge);
    phrases.subtype_candidates = p.value("subtype_candidates", phrases.subtype_candidates);
    phrases.subtype_question = p.value("subtype_question", phrases.subtype_question);
    phrases.event_statement = p.value("event_statement", phrases.event_statement);
    phrases.internal_mask_reference = p.value("internal_mask_reference", phrases.internal_mask_reference);
    phrases.joint_role_reference = p.value("joint_role_reference", phrases.joint_role_reference);
  }
  return Schema(std::move(mains), std::move(subs), std::move(roles), std::move(phrases));
}

bool operator==(const Schema& a, const Schema& b) { return a.to_json() == b.to_json(); }

Schema load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open schema file: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("schema parse failure in " + path.string() + ": " + e.what());
  }
  return Schema::from_json(j);
}

void save_schema(const Schema& schema, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw RuntimeFailure("cannot write schema file: " + path.string());
  out << schema.to_json().dump(2) << '\n';
}

}  // namespace promptee
