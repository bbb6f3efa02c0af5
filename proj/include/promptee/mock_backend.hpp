#pragma once

#include <filesystem>
#include <unordered_map>

#include "json.hpp"
#include "promptee/generation.hpp"

namespace promptee {

/// Table-driven backend: logits are looked up by (encoder input, decoder
/// prefix) and fall back to a default vector. train_step fits the table
/// entries it touches with AdamW, so the mock memorizes its training set.
class MockBackend final : public Seq2SeqBackend {
 public:
  explicit MockBackend(Vocabulary vocab, std::vector<double> default_logits = {});

  const Vocabulary& vocabulary() const { return vocab_; }
  void set_logits(std::span<const TokenId> encoder, std::span<const TokenId> prefix, std::vector<double> logits);
  void set_logits(std::string_view input_text, std::span<const TokenId> prefix, std::vector<double> logits);
  std::size_t table_size() const { return table_.size(); }

  std::vector<TokenId> tokenize(std::string_view text) const override { return vocab_.encode(text); }
  std::string detokenize(std::span<const TokenId> ids) const override { return vocab_.decode(ids); }
  std::size_t vocab_size() const override { return vocab_.size(); }
  std::optional<TokenId> token_id(std::string_view token) const override { return vocab_.find(token); }
  std::vector<double> next_logits(std::span<const TokenId> encoder, std::span<const TokenId> prefix) const override;
  double train_step(std::span<const TrainExample> batch, OptimizerState& state) override;
  std::unique_ptr<Seq2SeqBackend> clone() const override { return std::make_unique<MockBackend>(*this); }

  /// Vocabulary, defaults and logits; optimizer moments are not kept.
  nlohmann::json to_json() const;
  static MockBackend from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const override;
  static MockBackend load(const std::filesystem::path& path);

 private:
  struct SeqHash {
    std::size_t operator()(const std::vector<TokenId>& ids) const noexcept;
  };
  struct Key {
    std::uint32_t encoder = 0;
    std::vector<TokenId> prefix;
    friend bool operator==(const Key&, const Key&) = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };
  struct Entry {
    std::vector<double> logits;
    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t steps = 0;
  };

  std::uint32_t intern(std::span<const TokenId> encoder);
  const Entry* find(std::span<const TokenId> encoder, std::span<const TokenId> prefix) const;
  Entry& entry(std::span<const TokenId> encoder, std::span<const TokenId> prefix);

  Vocabulary vocab_;
  std::vector<double> default_logits_;
  std::unordered_map<std::vector<TokenId>, std::uint32_t, SeqHash> encoders_;
  std::unordered_map<Key, Entry, KeyHash> table_;
};

}  // namespace promptee
