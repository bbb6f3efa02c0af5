#include "promptee/mock_backend.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "promptee/errors.hpp"

namespace promptee {

using nlohmann::json;

std::size_t MockBackend::SeqHash::operator()(const std::vector<TokenId>& ids) const noexcept {
  std::uint64_t h = 1469598103934665603ULL;
  for (auto id : ids) {
    h ^= static_cast<std::uint32_t>(id);
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

std::size_t MockBackend::KeyHash::operator()(const Key& k) const noexcept {
  return SeqHash{}(k.prefix) * 31 + k.encoder;
}

MockBackend::MockBackend(Vocabulary vocab, std::vector<double> default_logits)
    : vocab_(std::move(vocab)), default_logits_(std::move(default_logits)) {
  if (default_logits_.empty()) default_logits_.assign(vocab_.size(), 0.0);
  if (default_logits_.size() != vocab_.size()) {
    throw ValidationError("default logits must cover the vocabulary");
  }
}

std::uint32_t MockBackend::intern(std::span<const TokenId> encoder) {
  std::vector<TokenId> key(encoder.begin(), encoder.end());
  auto [it, inserted] = encoders_.try_emplace(std::move(key), static_cast<std::uint32_t>(encoders_.size()));
  return it->second;
}

const MockBackend::Entry* MockBackend::find(std::span<const TokenId> encoder, std::span<const TokenId> prefix) const {
  auto enc = encoders_.find(std::vector<TokenId>(encoder.begin(), encoder.end()));
  if (enc == encoders_.end()) return nullptr;
  auto it = table_.find(Key{enc->second, std::vector<TokenId>(prefix.begin(), prefix.end())});
  return it == table_.end() ? nullptr : &it->second;
}

MockBackend::Entry& MockBackend::entry(std::span<const TokenId> encoder, std::span<const TokenId> prefix) {
  Key key{intern(encoder), std::vector<TokenId>(prefix.begin(), prefix.end())};
  auto [it, inserted] = table_.try_emplace(std::move(key));
  if (inserted) it->second.logits = default_logits_;
  return it->second;
}

void MockBackend::set_logits(std::span<const TokenId> encoder, std::span<const TokenId> prefix,
                             std::vector<double> logits) {
  if (logits.size() != vocab_.size()) throw ValidationError("logit vector must cover the vocabulary");
  entry(encoder, prefix).logits = std::move(logits);
}

void MockBackend::set_logits(std::string_view input_text, std::span<const TokenId> prefix,
                             std::vector<double> logits) {
  set_logits(vocab_.encode(input_text), prefix, std::move(logits));
}

std::vector<double> MockBackend::next_logits(std::span<const TokenId> encoder, std::span<const TokenId> prefix) const {
  if (const Entry* e = find(encoder, prefix)) return e->logits;
  return default_logits_;
}

double MockBackend::train_step(std::span<const TrainExample> batch, OptimizerState& state) {
  std::size_t n_tokens = 0;
  for (const auto& ex : batch) n_tokens += ex.target.size();
  if (n_tokens == 0) throw ValidationError("training batch has no target tokens");

  // Gradient of the mean cross entropy w.r.t. each touched logit vector.
  std::unordered_map<Key, std::vector<double>, KeyHash> grads;
  std::vector<Key> order;
  double loss = 0.0;
  const double scale = 1.0 / static_cast<double>(n_tokens);
  for (const auto& ex : batch) {
    for (std::size_t i = 0; i < ex.target.size(); ++i) {
      std::span<const TokenId> prefix(ex.target.data(), i);
      const auto logits = next_logits(ex.input, prefix);
      const double mx = *std::max_element(logits.begin(), logits.end());
      double z = 0.0;
      for (double l : logits) z += std::exp(l - mx);
      const double log_z = mx + std::log(z);
      const auto gold = static_cast<std::size_t>(ex.target[i]);
      loss -= (logits[gold] - log_z) * scale;

      Key key{intern(ex.input), std::vector<TokenId>(prefix.begin(), prefix.end())};
      auto [it, inserted] = grads.try_emplace(key, logits.size(), 0.0);
      if (inserted) order.push_back(std::move(key));
      auto& g = it->second;
      for (std::size_t v = 0; v < logits.size(); ++v) g[v] += std::exp(logits[v] - log_z) * scale;
      g[gold] -= scale;
    }
  }

  const double lr = state.learning_rate;
  for (const auto& key : order) {
    const auto& g = grads.at(key);
    auto [it, inserted] = table_.try_emplace(key);
    Entry& e = it->second;
    if (inserted) e.logits = default_logits_;
    if (e.m.empty()) {
      e.m.assign(g.size(), 0.0);
      e.v.assign(g.size(), 0.0);
    }
    ++e.steps;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(e.steps));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(e.steps));
    for (std::size_t v = 0; v < g.size(); ++v) {
      e.logits[v] -= lr * state.weight_decay * e.logits[v];
      e.m[v] = state.beta1 * e.m[v] + (1.0 - state.beta1) * g[v];
      e.v[v] = state.beta2 * e.v[v] + (1.0 - state.beta2) * g[v] * g[v];
      e.logits[v] -= lr * (e.m[v] / bc1) / (std::sqrt(e.v[v] / bc2) + state.epsilon);
    }
  }
  ++state.steps;
  return loss;
}

json MockBackend::to_json() const {
  std::vector<const std::vector<TokenId>*> encoders(encoders_.size());
  for (const auto& [seq, id] : encoders_) encoders[id] = &seq;
  std::vector<std::pair<const Key*, const Entry*>> entries;
  for (const auto& [k, e] : table_) entries.emplace_back(&k, &e);
  std::sort(entries.begin(), entries.end(), [&](const auto& a, const auto& b) {
    const auto& ea = *encoders[a.first->encoder];
    const auto& eb = *encoders[b.first->encoder];
    if (ea != eb) return ea < eb;
    return a.first->prefix < b.first->prefix;
  });
  json table = json::array();
  for (const auto& [k, e] : entries) {
    table.push_back({{"encoder", *encoders[k->encoder]}, {"prefix", k->prefix}, {"logits", e->logits}});
  }
  return {{"vocabulary", vocab_.tokens()}, {"default_logits", default_logits_}, {"table", table}};
}

MockBackend MockBackend::from_json(const json& j) {
  try {
    auto tokens = j.at("vocabulary").get<std::vector<std::string>>();
    MockBackend backend(Vocabulary(std::move(tokens)), j.at("default_logits").get<std::vector<double>>());
    for (const auto& row : j.at("table")) {
      backend.set_logits(row.at("encoder").get<std::vector<TokenId>>(), row.at("prefix").get<std::vector<TokenId>>(),
                         row.at("logits").get<std::vector<double>>());
    }
    return backend;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed mock checkpoint: ") + e.what());
  }
}

void MockBackend::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw RuntimeFailure("cannot write checkpoint: " + path.string());
  out << to_json().dump() << '\n';
}

MockBackend MockBackend::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open checkpoint: " + path.string());
  try {
    return from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("checkpoint parse failure: ") + e.what());
  }
}

}  // namespace promptee
