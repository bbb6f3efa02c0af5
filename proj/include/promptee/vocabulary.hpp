#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace promptee {

using TokenId = std::int32_t;

/// Word-level vocabulary over whitespace tokens. Special tokens are split out
/// of surrounding text before lookup; unknown words map to "<unk>".
class Vocabulary {
 public:
  static constexpr std::string_view kPad = "<pad>";
  static constexpr std::string_view kUnk = "<unk>";

  Vocabulary() = default;
  /// Tokens in id order. Must be distinct; "<unk>" is appended if absent.
  explicit Vocabulary(std::vector<std::string> tokens);

  /// Reserved tokens (<pad>, </s>, <unk>, None, |, all sentinels, <e>, </e>)
  /// followed by every word of `texts` in first-seen order.
  static Vocabulary build(const std::vector<std::string>& texts, int sentinels = 100);

  std::size_t size() const { return tokens_.size(); }
  std::optional<TokenId> find(std::string_view token) const;
  TokenId id(std::string_view token) const;
  const std::string& token(TokenId id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  TokenId unk_id() const { return unk_; }

  std::vector<TokenId> encode(std::string_view text) const;
  std::string decode(std::span<const TokenId> ids) const;

  /// Adds a token if missing; returns its id.
  TokenId add(std::string_view token);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
  TokenId unk_ = 0;
};

}  // namespace promptee
