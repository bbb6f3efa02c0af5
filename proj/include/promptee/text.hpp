#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace promptee {

/// Half-open [begin, end) character range.
struct CharSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool contains(const CharSpan& other) const {
    return begin <= other.begin && other.end <= end;
  }
  bool overlaps(const CharSpan& other) const {
    return begin < other.end && other.begin < end;
  }
  friend auto operator<=>(const CharSpan&, const CharSpan&) = default;
};

namespace tokens {

inline constexpr std::string_view kEnd = "</s>";
inline constexpr std::string_view kNone = "None";
inline constexpr std::string_view kSeparator = "|";
inline constexpr std::string_view kFocusOpen = "<e>";
inline constexpr std::string_view kFocusClose = "</e>";
inline constexpr std::string_view kMaskSlot = "[MASK_SLOT]";
inline constexpr int kMaxSentinels = 100;

std::string sentinel(int index);
std::string trigger_open(int index);
std::string trigger_close(int index);

/// Index k if `token` is exactly "<extra_id_k>".
std::optional<int> sentinel_index(std::string_view token);
bool is_marker(std::string_view token);
/// Sentinels, markers and the end marker.
bool is_special(std::string_view token);

}  // namespace tokens

/// A whitespace-delimited word with its character range in the source text.
struct Word {
  std::string_view text;
  CharSpan span;
};

std::vector<Word> split_words(std::string_view text);
std::vector<std::string> split_ws(std::string_view text);
std::string_view trim(std::string_view text);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::size_t count_occurrences(std::string_view haystack, std::string_view needle);
std::string replace_all(std::string text, std::string_view from, std::string_view to);

/// Pads every special token with spaces so whitespace splitting isolates it.
std::string isolate_special_tokens(std::string_view text);

/// Collapses whitespace runs to single spaces and trims.
std::string normalize_ws(std::string_view text);

/// Character spans of every occurrence of `needle` as a run of whole words
/// in `text`, compared after whitespace normalization.
std::vector<CharSpan> find_word_sequence(std::string_view text, std::string_view needle);

}  // namespace promptee
