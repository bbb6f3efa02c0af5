#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "promptee/errors.hpp"
#include "promptee/prompting.hpp"
#include "promptee/rng.hpp"

namespace promptee {

class SynonymLexicon {
 public:
  virtual ~SynonymLexicon() = default;
  virtual std::vector<std::string> synonyms(std::string_view word) const = 0;
};

/// Word -> synonyms table, loadable from a JSON object of string arrays.
class MapLexicon final : public SynonymLexicon {
 public:
  MapLexicon() = default;
  explicit MapLexicon(std::map<std::string, std::vector<std::string>, std::less<>> table) : table_(std::move(table)) {}
  static MapLexicon load(const std::filesystem::path& path);

  std::vector<std::string> synonyms(std::string_view word) const override;

 private:
  std::map<std::string, std::vector<std::string>, std::less<>> table_;
};

enum class EdaOp { kReplace, kInsert, kSwap, kDelete };

/// Applies one EDA operation to the passage of a single-argument instance.
/// Sentinels, markers, the marked trigger and gold answer surfaces are never
/// touched; returns nullopt when the operation has no legal target.
std::optional<PromptInstance> apply_eda_op(const PromptInstance& instance, EdaOp op, Rng& rng,
                                           const SynonymLexicon& lexicon);

/// One augmented copy per input instance, each with `ops_per_instance`
/// randomly chosen operations.
std::vector<PromptInstance> augment_eda(const std::vector<PromptInstance>& instances, std::uint64_t seed,
                                        std::size_t ops_per_instance, const SynonymLexicon& lexicon);

/// Originals followed by augmented copies until exactly `target_count`
/// instances exist.
std::vector<PromptInstance> expand_with_eda(const std::vector<PromptInstance>& instances, std::size_t target_count,
                                            std::uint64_t seed, std::size_t ops_per_instance,
                                            const SynonymLexicon& lexicon);

/// Round-trip text transform (e.g. en -> pivot -> en). nullopt or an
/// exception means the transform failed for this text.
class RoundTripTranslator {
 public:
  virtual ~RoundTripTranslator() = default;
  virtual std::optional<std::string> round_trip(std::string_view text, std::uint64_t seed) const = 0;
};

class IdentityTranslator final : public RoundTripTranslator {
 public:
  std::optional<std::string> round_trip(std::string_view text, std::uint64_t) const override {
    return std::string(text);
  }
};

/// Seeded permutation of the words of each segment; stands in for a real
/// translation model in tests and demos.
class WordShuffleTranslator final : public RoundTripTranslator {
 public:
  std::optional<std::string> round_trip(std::string_view text, std::uint64_t seed) const override;
};

struct BacktranslationResult {
  std::vector<PromptInstance> instances;
  /// Per kept instance: passage span of each gold answer after re-grounding.
  std::vector<std::vector<CharSpan>> answer_spans;
  Diagnostics diagnostics;
};

BacktranslationResult augment_backtranslate(const std::vector<PromptInstance>& instances,
                                            const RoundTripTranslator& translator, std::uint64_t seed);

}  // namespace promptee
