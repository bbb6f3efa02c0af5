#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "promptee/generation.hpp"
#include "promptee/prompting.hpp"

namespace promptee {

nlohmann::json instance_to_json(const PromptInstance& inst);
PromptInstance instance_from_json(const nlohmann::json& j);

void write_instances(const std::vector<PromptInstance>& instances, const std::filesystem::path& path);
std::vector<PromptInstance> read_instances(const std::filesystem::path& path);

/// One decode of one instance, as written to the generation JSONL.
struct GenerationRecord {
  std::string doc_id;
  SentenceRange sentences;
  PromptFamily family = PromptFamily::kExternalTrigger;
  GenerationResult result;
};

nlohmann::json generation_to_json(const GenerationRecord& record);
void write_generations(const std::vector<GenerationRecord>& records, const std::filesystem::path& path);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace promptee
