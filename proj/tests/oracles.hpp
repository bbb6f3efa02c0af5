#pragma once

// Independent reference implementations used to cross-check the library:
// a per-step masked argmax decoder over an explicit logit table, and a
// maximum bipartite matching scorer.

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "promptee/corpus.hpp"
#include "promptee/evaluation.hpp"
#include "promptee/rng.hpp"
#include "promptee/vocabulary.hpp"

namespace oracles {

using namespace promptee;

// ---- constrained decoding -------------------------------------------------

/// Logit table keyed by decoder prefix (one fixed encoder input).
struct LogitTable {
  std::size_t vocab = 0;
  std::map<std::vector<TokenId>, std::vector<double>> rows;

  std::vector<double> at(const std::vector<TokenId>& prefix) const {
    auto it = rows.find(prefix);
    return it == rows.end() ? std::vector<double>(vocab, 0.0) : it->second;
  }
};

/// Greedy decode by brute force: scan every allowed id at each step.
/// Returns nullopt when a step has no finite allowed logit.
inline std::optional<std::vector<TokenId>> brute_force_decode(const LogitTable& table, const std::set<TokenId>& allowed,
                                                              TokenId end_id, std::size_t max_len) {
  std::vector<TokenId> out;
  while (out.size() < max_len) {
    const auto row = table.at(out);
    std::optional<TokenId> best;
    for (TokenId id = 0; id < static_cast<TokenId>(table.vocab); ++id) {
      if (!allowed.count(id) || (std::isinf(row[id]) && row[id] < 0)) continue;
      if (!best || row[id] > row[*best]) best = id;
    }
    if (!best) return std::nullopt;
    out.push_back(*best);
    if (*best == end_id) break;
  }
  return out;
}

// ---- scoring --------------------------------------------------------------

/// Size of a maximum matching in a bipartite graph given as adjacency lists
/// (left -> right), by exhaustive augmenting-path search.
inline std::size_t max_matching(const std::vector<std::vector<std::size_t>>& adj, std::size_t n_right) {
  std::vector<std::optional<std::size_t>> owner(n_right);
  std::size_t matched = 0;
  for (std::size_t left = 0; left < adj.size(); ++left) {
    std::vector<bool> visited(n_right, false);
    std::function<bool(std::size_t)> augment = [&](std::size_t l) {
      for (auto r : adj[l]) {
        if (visited[r]) continue;
        visited[r] = true;
        if (!owner[r] || augment(*owner[r])) {
          owner[r] = l;
          return true;
        }
      }
      return false;
    };
    if (augment(left)) ++matched;
  }
  return matched;
}

struct Counts {
  std::size_t gold = 0, pred = 0, correct = 0;
};

inline Counts oracle_triggers(const std::vector<EventMention>& gold, const std::vector<EventPrediction>& pred) {
  std::vector<std::vector<std::size_t>> adj(pred.size());
  for (std::size_t p = 0; p < pred.size(); ++p) {
    for (std::size_t g = 0; g < gold.size(); ++g) {
      if (pred[p].trigger && pred[p].doc_id == gold[g].doc_id && *pred[p].trigger == gold[g].trigger &&
          pred[p].subtype == gold[g].subtype) {
        adj[p].push_back(g);
      }
    }
  }
  return {gold.size(), pred.size(), max_matching(adj, gold.size())};
}

inline Counts oracle_arguments(const std::vector<EventMention>& gold, const std::vector<EventPrediction>& pred) {
  using Item = std::tuple<std::string, std::optional<CharSpan>, std::string, std::string, std::optional<CharSpan>,
                          std::string>;
  std::vector<Item> g_items, p_items;
  for (const auto& g : gold) {
    for (const auto& a : g.arguments) g_items.emplace_back(g.doc_id, g.trigger, g.subtype, a.role, a.span, "");
  }
  for (const auto& p : pred) {
    std::set<std::tuple<std::string, std::optional<CharSpan>, std::string>> seen;
    for (const auto& a : p.arguments) {
      if (!seen.insert({a.role, a.span, a.span ? "" : a.surface}).second) continue;
      p_items.emplace_back(p.doc_id, p.trigger, p.subtype, a.role, a.span, a.surface);
    }
  }
  std::vector<std::vector<std::size_t>> adj(p_items.size());
  for (std::size_t p = 0; p < p_items.size(); ++p) {
    const auto& [pd, pt, ps, pr, pa, psurf] = p_items[p];
    if (!pt || !pa) continue;
    for (std::size_t g = 0; g < g_items.size(); ++g) {
      const auto& [gd, gt, gs, gr, ga, gsurf] = g_items[g];
      if (pd == gd && pt == gt && ps == gs && pr == gr && pa == ga) adj[p].push_back(g);
    }
  }
  return {g_items.size(), p_items.size(), max_matching(adj, g_items.size())};
}

inline double f1_of(double p, double r) { return p + r > 0 ? 2 * p * r / (p + r) : 0.0; }

/// Random small gold / predicted sets over a tiny label space, so equal
/// keys and duplicates are common.
inline std::pair<std::vector<EventMention>, std::vector<EventPrediction>> random_sets(Rng& rng) {
  const std::vector<std::string> docs = {"d0", "d1"};
  const std::vector<std::string> subtypes = {"Life.Die", "Conflict.Attack"};
  const std::vector<std::string> roles = {"Victim", "Place"};
  auto span = [&] {
    const std::size_t b = rng.below(3);
    return CharSpan{b, b + 1 + rng.below(2)};
  };
  std::vector<EventMention> gold(rng.below(6));
  for (auto& g : gold) {
    g.doc_id = docs[rng.below(2)];
    g.subtype = subtypes[rng.below(2)];
    g.trigger = span();
    for (std::size_t a = rng.below(3); a > 0; --a) g.arguments.push_back({roles[rng.below(2)], span(), "x"});
  }
  std::vector<EventPrediction> pred(rng.below(6));
  for (std::size_t i = 0; i < pred.size(); ++i) {
    auto& p = pred[i];
    if (!gold.empty() && rng.below(2) == 0) {
      const auto& g = gold[rng.below(gold.size())];
      p.doc_id = g.doc_id;
      p.subtype = g.subtype;
      p.trigger = g.trigger;
      for (const auto& a : g.arguments) {
        if (rng.below(3) > 0) p.arguments.push_back({a.role, a.span, a.surface});
      }
    } else {
      p.doc_id = docs[rng.below(2)];
      p.subtype = subtypes[rng.below(2)];
      if (rng.below(4) > 0) p.trigger = span();
    }
    for (std::size_t a = rng.below(3); a > 0; --a) {
      PredictedArgument arg{roles[rng.below(2)], std::nullopt, "y" + std::to_string(rng.below(2))};
      if (rng.below(4) > 0) arg.span = span();
      p.arguments.push_back(arg);
    }
    if (!p.arguments.empty() && rng.below(3) == 0) p.arguments.push_back(p.arguments.front());
  }
  return {gold, pred};
}

}  // namespace oracles
