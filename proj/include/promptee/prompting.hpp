#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "promptee/corpus.hpp"
#include "promptee/schema.hpp"

namespace promptee {

enum class PromptFamily { kExternalTrigger, kInternalTrigger, kSubtype, kSingleArgument, kJointArgument };

std::string to_string(PromptFamily family);
PromptFamily family_from_string(std::string_view name);

struct MainTypeBinding {
  std::string main_type;
  friend bool operator==(const MainTypeBinding&, const MainTypeBinding&) = default;
};
struct SubtypeBinding {
  std::string subtype;
  friend bool operator==(const SubtypeBinding&, const SubtypeBinding&) = default;
};
struct RoleBinding {
  std::string subtype;
  std::string role;
  std::size_t event = 0;  // index of the event within the instance
  friend bool operator==(const RoleBinding&, const RoleBinding&) = default;
};
using SlotBinding = std::variant<MainTypeBinding, SubtypeBinding, RoleBinding>;

struct PromptSlot {
  int sentinel = 0;
  std::vector<std::string> gold;  // {"None"} when absent; empty for inference instances
  SlotBinding bind;
  std::vector<SlotBinding> shared_with;  // extra bindings of a shared argument mask
};

/// One serialized example. The model input is the (possibly masked or
/// marked) passage followed by the prompt section.
struct PromptInstance {
  PromptFamily family = PromptFamily::kExternalTrigger;
  Passage passage;
  std::string prompt_section;
  std::string target_text;  // empty for inference instances
  std::vector<PromptSlot> slots;

  std::string input_text() const { return passage.text + prompt_section; }
};

struct AnswerMap {
  std::map<int, std::vector<std::string>> entries;
  bool malformed = false;
};

PromptInstance build_external_trigger_prompt(const Passage& passage, const Schema& schema,
                                             std::optional<std::span<const EventMention>> gold);

PromptInstance build_internal_trigger_prompt(const Passage& passage, std::span<const EventMention> mentions,
                                             const Schema& schema);

PromptInstance build_subtype_prompt(const Passage& passage, const std::string& trigger_surface,
                                    const std::string& main_type, const Schema& schema,
                                    const std::optional<std::string>& gold_subtype);

/// One instance per role of the event's subtype, in schema order. Pass
/// `with_gold = false` for inference instances.
std::vector<PromptInstance> build_single_argument_prompts(const Passage& passage, const EventMention& event,
                                                          const Schema& schema, bool with_gold = true);

PromptInstance build_joint_argument_prompt(const Passage& passage, std::span<const EventMention> events,
                                           const Schema& schema, std::uint64_t seed);

/// "<extra_id_0> a0 <extra_id_1> ... <extra_id_n> </s>".
std::string serialize_target(const std::vector<std::string>& answers);

/// Never throws; malformed output sets `malformed` and keeps what parsed.
AnswerMap parse_generation(std::string_view output);

/// Replaces each "<extra_id_k>" occurring in `text` with answers.at(k).
std::string fill_sentinels(std::string_view text, const std::map<int, std::string>& answers);

/// Sentinel indices in order of appearance.
std::vector<int> sentinels_in(std::string_view text);

}  // namespace promptee
