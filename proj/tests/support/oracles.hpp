#pragma once

// Naive reference implementations used to cross-check the library.

#include <algorithm>
#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "jm/benchmark.hpp"
#include "jm/random.hpp"
#include "jm/transition_system.hpp"

namespace oracle {

/// Depth-first search over every path labelled by the trace.
inline bool accepts_by_paths(const jm::TransitionSystem& ts, const jm::Trace& t) {
  auto go = [&](auto& self, jm::StateId s, std::size_t i) -> bool {
    if (i == t.size()) return ts.is_final(s);
    for (const auto& tr : ts.transitions())
      if (tr.source == s && ts.event_label(tr.event) == t[i] && self(self, tr.target, i + 1)) return true;
    return false;
  };
  for (jm::StateId s : ts.initial())
    if (go(go, s, 0)) return true;
  return false;
}

/// Simple cycles among reachable states, each counted once from its smallest state.
inline std::size_t count_cycles(const jm::TransitionSystem& ts) {
  const std::size_t n = ts.num_states();
  std::vector<std::set<jm::StateId>> adj(n);
  for (const auto& tr : ts.transitions()) adj[tr.source].insert(tr.target);
  std::vector<char> reach(n, 0);
  std::vector<jm::StateId> stack(ts.initial().begin(), ts.initial().end());
  for (auto s : stack) reach[s] = 1;
  while (!stack.empty()) {
    auto s = stack.back();
    stack.pop_back();
    for (auto t : adj[s])
      if (!reach[t]) reach[t] = 1, stack.push_back(t);
  }
  std::size_t count = 0;
  std::vector<char> on(n, 0);
  for (jm::StateId start = 0; start < n; ++start) {
    if (!reach[start]) continue;
    auto dfs = [&](auto& self, jm::StateId v) -> void {
      for (auto w : adj[v]) {
        if (w == start) ++count;
        else if (w > start && !on[w]) {
          on[w] = 1;
          self(self, w);
          on[w] = 0;
        }
      }
    };
    on[start] = 1;
    dfs(dfs, start);
    on[start] = 0;
  }
  return count;
}

/// Every word over `alphabet` of length at most `max_len`.
inline std::vector<jm::Trace> all_words(const std::vector<std::string>& alphabet, std::size_t max_len) {
  std::vector<jm::Trace> out{{}};
  std::vector<jm::Trace> layer{{}};
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<jm::Trace> next;
    for (const auto& w : layer)
      for (const auto& a : alphabet) {
        auto v = w;
        v.push_back(a);
        next.push_back(v);
      }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

/// Trace language of a process tree, truncated to traces of length <= max_len.
inline std::set<jm::Trace> tree_language(const jm::bench::ProcessTree& t, std::size_t max_len) {
  using K = jm::bench::ProcessTree::Kind;
  auto concat = [&](const std::set<jm::Trace>& a, const std::set<jm::Trace>& b) {
    std::set<jm::Trace> out;
    for (const auto& x : a)
      for (const auto& y : b)
        if (x.size() + y.size() <= max_len) {
          auto z = x;
          z.insert(z.end(), y.begin(), y.end());
          out.insert(z);
        }
    return out;
  };
  switch (t.kind) {
    case K::leaf: return max_len >= 1 ? std::set<jm::Trace>{{t.label}} : std::set<jm::Trace>{};
    case K::sequence: {
      std::set<jm::Trace> acc{{}};
      for (const auto& c : t.children) acc = concat(acc, tree_language(c, max_len));
      return acc;
    }
    case K::choice: {
      std::set<jm::Trace> acc;
      for (const auto& c : t.children) {
        auto l = tree_language(c, max_len);
        acc.insert(l.begin(), l.end());
      }
      return acc;
    }
    case K::loop: {
      const auto body = tree_language(t.children.front(), max_len);
      auto acc = body;
      for (;;) {
        auto more = concat(acc, body);
        const auto before = acc.size();
        acc.insert(more.begin(), more.end());
        if (acc.size() == before) return acc;
      }
    }
  }
  return {};
}

/// Random TS with up to `max_states` states over the given alphabet.
inline jm::TransitionSystem random_ts(jm::Rng& rng, std::size_t max_states, const std::vector<std::string>& alphabet,
                                      double edge_prob) {
  jm::TransitionSystem::Builder b;
  const std::size_t n = 1 + rng.uniform_index(max_states);
  for (std::size_t i = 0; i < n; ++i) b.add_state("s" + std::to_string(i));
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& a : alphabet)
      for (std::size_t j = 0; j < n; ++j)
        if (rng.bernoulli(edge_prob)) b.add_transition(i, a, j);
  b.mark_initial(0);
  for (std::size_t i = 1; i < n; ++i)
    if (rng.bernoulli(0.2)) b.mark_initial(i);
  for (std::size_t i = 0; i < n; ++i)
    if (rng.bernoulli(0.4)) b.mark_final(i);
  return std::move(b).build();
}

}  // namespace oracle
