#include "promptee/vocabulary.hpp"

#include "promptee/errors.hpp"
#include "promptee/text.hpp"

namespace promptee {

Vocabulary::Vocabulary(std::vector<std::string> tokens) {
  for (auto& t : tokens) {
    if (index_.contains(t)) throw ValidationError("duplicate vocabulary token: " + t);
    add(t);
  }
  unk_ = add(kUnk);
}

TokenId Vocabulary::add(std::string_view token) {
  if (auto it = index_.find(std::string(token)); it != index_.end()) return it->second;
  const auto id = static_cast<TokenId>(tokens_.size());
  tokens_.emplace_back(token);
  index_.emplace(tokens_.back(), id);
  return id;
}

Vocabulary Vocabulary::build(const std::vector<std::string>& texts, int sentinels) {
  std::vector<std::string> reserved = {std::string(kPad), std::string(tokens::kEnd), std::string(kUnk),
                                       std::string(tokens::kNone), std::string(tokens::kSeparator)};
  for (int k = 0; k < sentinels; ++k) reserved.push_back(tokens::sentinel(k));
  reserved.emplace_back(tokens::kFocusOpen);
  reserved.emplace_back(tokens::kFocusClose);
  Vocabulary v(std::move(reserved));
  for (const auto& text : texts) {
    for (const auto& w : split_ws(isolate_special_tokens(text))) v.add(w);
  }
  return v;
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TokenId Vocabulary::id(std::string_view token) const { return find(token).value_or(unk_); }

std::vector<TokenId> Vocabulary::encode(std::string_view text) const {
  std::vector<TokenId> ids;
  for (const auto& w : split_ws(isolate_special_tokens(text))) ids.push_back(id(w));
  return ids;
}

std::string Vocabulary::decode(std::span<const TokenId> ids) const {
  std::string out;
  for (auto id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
      throw RuntimeFailure("token id out of range: " + std::to_string(id));
    }
    if (tokens_[static_cast<std::size_t>(id)] == kPad) continue;
    if (!out.empty()) out += ' ';
    out += tokens_[static_cast<std::size_t>(id)];
  }
  return out;
}

}  // namespace promptee
