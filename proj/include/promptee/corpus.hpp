#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "promptee/schema.hpp"
#include "promptee/text.hpp"

namespace promptee {

struct Document {
  std::string doc_id;
  std::string text;
  std::vector<CharSpan> sentences;
};

struct ArgumentMention {
  std::string role;
  CharSpan span;
  std::string surface;
};

struct EventMention {
  std::string doc_id;
  std::size_t sentence_index = 0;
  std::string subtype;
  CharSpan trigger;
  std::string trigger_surface;
  std::vector<ArgumentMention> arguments;
};

struct Corpus {
  std::vector<Document> documents;
  std::vector<EventMention> mentions;

  const Document& document(const std::string& doc_id) const;
  /// Mentions of one document, in file order.
  std::vector<EventMention> mentions_of(const std::string& doc_id) const;
};

/// Inclusive range of sentence indices.
struct SentenceRange {
  std::size_t first = 0;
  std::size_t last = 0;
  friend auto operator<=>(const SentenceRange&, const SentenceRange&) = default;
};

struct TextEdit {
  CharSpan range;           // empty range = insertion at range.begin
  std::string replacement;  // characters are unmapped in the result
};

/// A window of document text with the focus sentences wrapped in <e> ... </e>.
struct Passage {
  static constexpr std::size_t kUnmapped = static_cast<std::size_t>(-1);

  std::string text;
  CharSpan focus;  // text strictly between "<e> " and " </e>"
  std::string doc_id;
  SentenceRange sentences;
  std::vector<std::size_t> offset_map;  // passage char -> document char

  std::string_view focus_text() const { return std::string_view(text).substr(focus.begin, focus.size()); }

  /// Document span covered by a passage span, if every character maps to a
  /// contiguous run of document characters.
  std::optional<CharSpan> to_document(CharSpan span) const;
  /// Passage span showing the document span, if it is present verbatim.
  std::optional<CharSpan> to_passage(CharSpan doc_span) const;

  /// Applies non-overlapping edits; inserted characters are unmapped and the
  /// focus region is relocated from the markers.
  Passage edited(std::vector<TextEdit> edits) const;

  /// Recomputes `focus` from the marker positions; throws if markers are
  /// missing, repeated or out of order.
  void relocate_focus();
};

struct SplitSpec {
  // Either explicit document ids ...
  std::map<std::string, std::vector<std::string>> explicit_ids;
  // ... or counts for train/dev/test plus a seed.
  std::optional<std::array<std::size_t, 3>> counts;
  std::uint64_t seed = 42;

  static SplitSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

enum class Split { kTrain, kDev, kTest };
std::string to_string(Split split);
Split split_from_string(std::string_view name);

Corpus ingest(const std::filesystem::path& path, const Schema& schema);
Corpus ingest_lines(std::istream& in, const Schema& schema);
/// Parses corpus JSONL, checking only record structure (no schema checks).
Corpus parse_corpus_lines(std::istream& in);
Corpus read_corpus(const std::filesystem::path& path);
void validate_corpus(const Corpus& corpus, const Schema& schema);
nlohmann::json document_to_json(const Document& doc, const std::vector<EventMention>& mentions);
void write_corpus(const Corpus& corpus, const std::filesystem::path& path);

std::map<std::string, Split> assign_splits(const std::vector<Document>& documents, const SplitSpec& spec);

inline constexpr std::size_t kExternalWindowWords = 100;
inline constexpr std::size_t kInternalWindowWords = 120;

Passage make_passage(const Document& doc, SentenceRange range, std::size_t window_words);

std::vector<SentenceRange> merge_adjoining(const Document& doc, const std::vector<EventMention>& mentions,
                                           std::size_t max_gap_sentences = 3);

std::vector<EventMention> fewshot_sample(const std::vector<EventMention>& mentions, std::size_t k,
                                         std::uint64_t seed);

}  // namespace promptee
