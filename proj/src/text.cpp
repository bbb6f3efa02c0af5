#include "promptee/text.hpp"

#include <cctype>

namespace promptee {

namespace tokens {

std::string sentinel(int index) { return "<extra_id_" + std::to_string(index) + ">"; }
std::string trigger_open(int index) { return "<t" + std::to_string(index) + ">"; }
std::string trigger_close(int index) { return "</t" + std::to_string(index) + ">"; }

namespace {

bool all_digits(std::string_view s) {
  if (s.empty() || s.size() > 6) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

std::optional<int> sentinel_index(std::string_view token) {
  constexpr std::string_view kPrefix = "<extra_id_";
  if (token.size() <= kPrefix.size() + 1 || !token.starts_with(kPrefix) || token.back() != '>') {
    return std::nullopt;
  }
  auto digits = token.substr(kPrefix.size(), token.size() - kPrefix.size() - 1);
  if (!all_digits(digits)) return std::nullopt;
  return std::stoi(std::string(digits));
}

bool is_marker(std::string_view token) {
  if (token == kFocusOpen || token == kFocusClose) return true;
  if (token.starts_with("<t") && token.size() > 3 && token.back() == '>') {
    return all_digits(token.substr(2, token.size() - 3));
  }
  if (token.starts_with("</t") && token.size() > 4 && token.back() == '>') {
    return all_digits(token.substr(3, token.size() - 4));
  }
  return false;
}

bool is_special(std::string_view token) {
  return token == kEnd || is_marker(token) || sentinel_index(token).has_value();
}

}  // namespace tokens

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::vector<Word> split_words(std::string_view text) {
  std::vector<Word> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    if (i >= text.size()) break;
    std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    words.push_back({text.substr(start, i - start), {start, i}});
  }
  return words;
}

std::vector<std::string> split_ws(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& w : split_words(text)) out.emplace_back(w.text);
  return out;
}

std::string_view trim(std::string_view text) {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && is_space(text[b])) ++b;
  while (e > b && is_space(text[e - 1])) --e;
  return text.substr(b, e - b);
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
  if (needle.empty()) return 0;
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string_view::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

std::string replace_all(std::string text, std::string_view from, std::string_view to) {
  if (from.empty()) return text;
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
  return text;
}

std::string isolate_special_tokens(std::string_view text) {
  std::string out;
  out.reserve(text.size() + 16);
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '<') {
      auto close = text.find('>', i);
      if (close != std::string_view::npos) {
        auto candidate = text.substr(i, close - i + 1);
        if (tokens::is_special(candidate)) {
          out += ' ';
          out += candidate;
          out += ' ';
          i = close + 1;
          continue;
        }
      }
    }
    out += text[i++];
  }
  return out;
}

std::string normalize_ws(std::string_view text) { return join(split_ws(text), " "); }

std::vector<CharSpan> find_word_sequence(std::string_view text, std::string_view needle) {
  std::vector<CharSpan> hits;
  const auto target = split_ws(needle);
  if (target.empty()) return hits;
  const auto words = split_words(text);
  if (words.size() < target.size()) return hits;
  for (std::size_t i = 0; i + target.size() <= words.size(); ++i) {
    bool match = true;
    for (std::size_t j = 0; j < target.size() && match; ++j) {
      match = words[i + j].text == target[j];
    }
    if (match) hits.push_back({words[i].span.begin, words[i + target.size() - 1].span.end});
  }
  return hits;
}

}  // namespace promptee
