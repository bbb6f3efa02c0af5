#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace promptee {

struct MainType {
  std::string name;
  /// Question asked in external trigger prompts; exactly one [MASK_SLOT].
  std::string trigger_question_template;
};

struct EventSubtype {
  std::string name;    // dotted, e.g. "Justice.Convict"
  std::string parent;  // main type name
  std::string trigger_question_template;

  /// Short label used as the subtype-classification answer ("Convict").
  std::string label() const;
};

struct ArgumentRole {
  std::string name;
  std::string event_subtype;
  std::string description_template;
};

/// Connective phrasing used when assembling prompts. Placeholders in braces
/// are substituted at build time; loaders fill in defaults for missing keys.
struct PromptPhrases {
  std::string bridge = "In the passage above ,";
  std::string subtype_candidates = "the candidate {main_type} subtypes are : {candidates} .";
  std::string subtype_question = "The {main_type} event triggered by {trigger} is a [MASK_SLOT] event .";
  std::string event_statement = "The event type is {subtype} and the trigger is {trigger} .";
  std::string internal_mask_reference = "a masked word";
  std::string joint_role_reference = "{role} of {trigger_marker}";
};

/// The event ontology. Immutable after load.
class Schema {
 public:
  Schema() = default;
  Schema(std::vector<MainType> main_types, std::vector<EventSubtype> subtypes,
         std::vector<ArgumentRole> roles, PromptPhrases phrases = {});

  const std::vector<MainType>& main_types() const { return main_types_; }
  const std::vector<EventSubtype>& subtypes() const { return subtypes_; }
  const std::vector<ArgumentRole>& roles() const { return roles_; }
  const PromptPhrases& phrases() const { return phrases_; }

  bool has_main_type(std::string_view name) const;
  bool has_subtype(std::string_view name) const;
  const MainType& main_type(std::string_view name) const;
  const EventSubtype& subtype(std::string_view name) const;

  /// Roles of `subtype` in schema-file order.
  std::vector<const ArgumentRole*> roles_for(std::string_view subtype) const;
  const std::string& main_type_of(std::string_view subtype) const;
  /// Subtypes whose parent is `main_type`, in schema-file order.
  std::vector<const EventSubtype*> subtypes_of(std::string_view main_type) const;
  bool role_allowed(std::string_view subtype, std::string_view role) const;
  /// Distinct role names across all subtypes.
  std::vector<std::string> role_names() const;

  nlohmann::json to_json() const;
  static Schema from_json(const nlohmann::json& j);

  friend bool operator==(const Schema& a, const Schema& b);

 private:
  void validate_and_index();

  std::vector<MainType> main_types_;
  std::vector<EventSubtype> subtypes_;
  std::vector<ArgumentRole> roles_;
  PromptPhrases phrases_;
  std::map<std::string, std::size_t, std::less<>> main_index_;
  std::map<std::string, std::size_t, std::less<>> subtype_index_;
  std::map<std::string, std::vector<std::size_t>, std::less<>> roles_by_subtype_;
};

Schema load_schema(const std::filesystem::path& path);
void save_schema(const Schema& schema, const std::filesystem::path& path);

}  // namespace promptee
