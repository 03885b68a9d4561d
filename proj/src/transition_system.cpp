#include "jm/transition_system.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "jm/error.hpp"
#include "jm/random.hpp"

namespace jm {

// --- construction ----------------------------------------------------------

StateId TransitionSystem::Builder::add_state(std::string label) {
  labels_.push_back(std::move(label));
  return static_cast<StateId>(labels_.size() - 1);
}

void TransitionSystem::Builder::add_transition(StateId source, std::string_view event,
                                               StateId target) {
  edges_.emplace_back(source, std::string(event), target);
}

void TransitionSystem::Builder::mark_initial(StateId s) { initial_.push_back(s); }
void TransitionSystem::Builder::mark_final(StateId s) { finals_.push_back(s); }

TransitionSystem TransitionSystem::Builder::build() && {
  const auto n = labels_.size();
  auto check = [n](StateId s) {
    if (s >= n) throw std::invalid_argument("state id out of range: " + std::to_string(s));
  };
  TransitionSystem ts;
  std::set<std::string> events;
  for (const auto& [src, ev, tgt] : edges_) {
    check(src);
    check(tgt);
    if (ev.empty()) throw std::invalid_argument("transition with empty event label");
    events.insert(ev);
  }
  ts.alphabet_.assign(events.begin(), events.end());
  ts.transitions_.reserve(edges_.size());
  for (const auto& [src, ev, tgt] : edges_) {
    const auto e = std::lower_bound(ts.alphabet_.begin(), ts.alphabet_.end(), ev) - ts.alphabet_.begin();
    ts.transitions_.push_back({src, static_cast<EventId>(e), tgt});
  }
  std::sort(ts.transitions_.begin(), ts.transitions_.end());
  ts.transitions_.erase(std::unique(ts.transitions_.begin(), ts.transitions_.end()), ts.transitions_.end());

  ts.offsets_.assign(n + 1, 0);
  for (const auto& t : ts.transitions_) ++ts.offsets_[t.source + 1];
  std::partial_sum(ts.offsets_.begin(), ts.offsets_.end(), ts.offsets_.begin());

  ts.is_initial_.assign(n, 0);
  ts.is_final_.assign(n, 0);
  for (StateId s : initial_) {
    check(s);
    ts.is_initial_[s] = 1;
  }
  for (StateId s : finals_) {
    check(s);
    ts.is_final_[s] = 1;
  }
  for (StateId s = 0; s < n; ++s) {
    if (ts.is_initial_[s]) ts.initial_.push_back(s);
    if (ts.is_final_[s]) ts.finals_.push_back(s);
  }
  ts.labels_ = std::move(labels_);
  return ts;
}

std::optional<EventId> TransitionSystem::find_event(std::string_view label) const {
  const auto it = std::lower_bound(alphabet_.begin(), alphabet_.end(), label);
  if (it == alphabet_.end() || *it != label) return std::nullopt;
  return static_cast<EventId>(it - alphabet_.begin());
}

std::span<const Transition> TransitionSystem::outgoing(StateId s) const {
  if (s >= num_states()) throw std::out_of_range("state id out of range");
  return std::span<const Transition>(transitions_).subspan(offsets_[s], offsets_[s + 1] - offsets_[s]);
}

std::vector<StateId> TransitionSystem::successors(StateId s, EventId e) const {
  const auto out = outgoing(s);
  const auto lo = std::lower_bound(out.begin(), out.end(), e,
                                   [](const Transition& t, EventId ev) { return t.event < ev; });
  std::vector<StateId> targets;
  for (auto it = lo; it != out.end() && it->event == e; ++it) targets.push_back(it->target);
  return targets;
}

// --- membership ------------------------------------------------------------

bool accepts(const TransitionSystem& ts, std::span<const std::string> trace) {
  std::vector<char> current(ts.num_states(), 0), next(ts.num_states(), 0);
  std::vector<StateId> frontier(ts.initial()), upcoming;
  for (StateId s : frontier) current[s] = 1;
  for (const auto& label : trace) {
    const auto e = ts.find_event(label);
    if (!e) return false;
    upcoming.clear();
    for (StateId s : frontier) {
      for (const auto& t : ts.outgoing(s)) {
        if (t.event != *e || next[t.target]) continue;
        next[t.target] = 1;
        upcoming.push_back(t.target);
      }
    }
    for (StateId s : frontier) current[s] = 0;
    if (upcoming.empty()) return false;
    frontier.swap(upcoming);
    current.swap(next);
  }
  return std::any_of(frontier.begin(), frontier.end(), [&](StateId s) { return ts.is_final(s); });
}

// --- reachability ----------------------------------------------------------

namespace {

std::vector<char> forward_reachable(const TransitionSystem& ts) {
  std::vector<char> seen(ts.num_states(), 0);
  std::vector<StateId> stack(ts.initial());
  for (StateId s : stack) seen[s] = 1;
  while (!stack.empty()) {
    const StateId s = stack.back();
    stack.pop_back();
    for (const auto& t : ts.outgoing(s))
      if (!seen[t.target]) {
        seen[t.target] = 1;
        stack.push_back(t.target);
      }
  }
  return seen;
}

std::vector<char> backward_reachable(const TransitionSystem& ts) {
  std::vector<std::vector<StateId>> preds(ts.num_states());
  for (const auto& t : ts.transitions()) preds[t.target].push_back(t.source);
  std::vector<char> seen(ts.num_states(), 0);
  std::vector<StateId> stack(ts.finals());
  for (StateId s : stack) seen[s] = 1;
  while (!stack.empty()) {
    const StateId s = stack.back();
    stack.pop_back();
    for (StateId p : preds[s])
      if (!seen[p]) {
        seen[p] = 1;
        stack.push_back(p);
      }
  }
  return seen;
}

}  // namespace

TransitionSystem prefix_closure(const TransitionSystem& ts) {
  TransitionSystem::Builder b;
  for (StateId s = 0; s < ts.num_states(); ++s) {
    b.add_state(ts.state_label(s));
    b.mark_final(s);
  }
  for (StateId s : ts.initial()) b.mark_initial(s);
  for (const auto& t : ts.transitions()) b.add_transition(t.source, ts.event_label(t.event), t.target);
  return std::move(b).build();
}

WellFormedness well_formedness(const TransitionSystem& ts) {
  const auto fwd = forward_reachable(ts);
  const auto bwd = backward_reachable(ts);
  WellFormedness w;
  for (StateId s = 0; s < ts.num_states(); ++s) {
    if (!bwd[s]) w.dead_states.push_back(s);
    if (!fwd[s]) w.unreachable_states.push_back(s);
  }
  return w;
}

// --- simple cycles (Johnson) -----------------------------------------------

namespace {

using Graph = std::vector<std::vector<std::uint32_t>>;

// Tarjan's strongly connected components, iterative. Only vertices with
// `alive` set take part; components of size one are dropped (self-loops are
// counted separately).
std::vector<std::vector<std::uint32_t>> nontrivial_sccs(const Graph& g, const std::vector<char>& alive) {
  const auto n = static_cast<std::uint32_t>(g.size());
  constexpr std::uint32_t kUnvisited = UINT32_MAX;
  std::vector<std::uint32_t> index(n, kUnvisited), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<std::uint32_t> stack;
  std::vector<std::pair<std::uint32_t, std::size_t>> call;
  std::vector<std::vector<std::uint32_t>> out;
  std::uint32_t counter = 0;
  for (std::uint32_t root = 0; root < n; ++root) {
    if (!alive[root] || index[root] != kUnvisited) continue;
    call.emplace_back(root, 0);
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      auto& [v, next] = call.back();
      if (next < g[v].size()) {
        const auto w = g[v][next++];
        if (!alive[w]) continue;
        if (index[w] == kUnvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const auto done = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
      if (low[done] != index[done]) continue;
      std::vector<std::uint32_t> comp;
      std::uint32_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = 0;
        comp.push_back(w);
      } while (w != done);
      if (comp.size() > 1) out.push_back(std::move(comp));
    }
  }
  return out;
}

// Counts the circuits through `start` inside `comp`; stops at `limit`.
std::size_t circuits_through(const Graph& g, const std::vector<char>& in_comp, std::uint32_t start,
                             std::size_t limit) {
  const auto n = g.size();
  std::vector<char> blocked(n, 0), closed(n, 0);
  std::vector<std::vector<std::uint32_t>> b_sets(n);
  std::vector<std::uint32_t> path{start};
  std::vector<std::pair<std::uint32_t, std::size_t>> stack{{start, 0}};
  blocked[start] = 1;
  std::size_t found = 0;

  auto unblock = [&](std::uint32_t u) {
    std::vector<std::uint32_t> todo{u};
    while (!todo.empty()) {
      const auto x = todo.back();
      todo.pop_back();
      if (!blocked[x]) continue;
      blocked[x] = 0;
      todo.insert(todo.end(), b_sets[x].begin(), b_sets[x].end());
      b_sets[x].clear();
    }
  };

  while (!stack.empty()) {
    auto& [v, next] = stack.back();
    const auto& nbrs = g[v];
    while (next < nbrs.size() && !in_comp[nbrs[next]]) ++next;
    if (next < nbrs.size()) {
      const auto w = nbrs[next++];
      if (w == start) {
        if (++found >= limit) return found;
        for (auto p : path) closed[p] = 1;
      } else if (!blocked[w]) {
        path.push_back(w);
        stack.emplace_back(w, 0);
        closed[w] = 0;
        blocked[w] = 1;
        continue;
      }
      if (next < nbrs.size()) continue;
    }
    const auto u = v;
    if (closed[u]) {
      unblock(u);
    } else {
      for (auto w : g[u]) {
        if (!in_comp[w]) continue;
        auto& bs = b_sets[w];
        if (std::find(bs.begin(), bs.end(), u) == bs.end()) bs.push_back(u);
      }
    }
    stack.pop_back();
    path.pop_back();
  }
  return found;
}

}  // namespace

std::optional<std::size_t> count_loops(const TransitionSystem& ts, std::size_t cap) {
  if (cap == 0) throw std::invalid_argument("count_loops: cap must be at least 1");
  const auto n = ts.num_states();
  const auto alive = forward_reachable(ts);
  Graph g(n);
  std::size_t count = 0;
  for (StateId s = 0; s < n; ++s) {
    if (!alive[s]) continue;
    bool self = false;
    for (const auto& t : ts.outgoing(s)) {
      if (t.target == s) self = true;
      else if (alive[t.target]) g[s].push_back(t.target);
    }
    std::sort(g[s].begin(), g[s].end());
    g[s].erase(std::unique(g[s].begin(), g[s].end()), g[s].end());
    if (self && ++count >= cap) return std::nullopt;
  }

  std::vector<char> in_comp(n, 0);
  auto pending = nontrivial_sccs(g, alive);
  while (!pending.empty()) {
    auto comp = std::move(pending.back());
    pending.pop_back();
    const auto start = *std::min_element(comp.begin(), comp.end());
    for (auto v : comp) in_comp[v] = 1;
    count += circuits_through(g, in_comp, start, cap - count);
    if (count >= cap) return std::nullopt;
    in_comp[start] = 0;
    auto rest = nontrivial_sccs(g, in_comp);
    for (auto v : comp) in_comp[v] = 0;
    for (auto& c : rest) pending.push_back(std::move(c));
  }
  return count;
}

// --- trace generation ------------------------------------------------------

std::vector<Trace> generate_traces(const TransitionSystem& ts, std::size_t n, std::size_t max_len,
                                   std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("generate_traces: n must be at least 1");
  const auto fwd = forward_reachable(ts);
  if (std::none_of(ts.finals().begin(), ts.finals().end(), [&](StateId s) { return fwd[s] != 0; }))
    throw EngineError("generate_traces: no reachable final state");

  Rng rng(seed);
  const std::size_t budget = 1000 * n + 1000;
  std::vector<Trace> out;
  out.reserve(n);
  Trace walk;
  for (std::size_t attempt = 0; out.size() < n; ++attempt) {
    if (attempt >= budget) throw EngineError("generate_traces: retry budget exhausted");
    walk.clear();
    const auto& init = ts.initial();
    StateId s = init[rng.uniform_index(init.size())];
    for (;;) {
      const auto out_edges = ts.outgoing(s);
      const bool final = ts.is_final(s);
      if (walk.size() == max_len) {
        if (final) out.push_back(walk);
        break;
      }
      const std::size_t options = out_edges.size() + (final ? 1 : 0);
      if (options == 0) break;
      const auto pick = rng.uniform_index(options);
      if (pick == out_edges.size()) {
        out.push_back(walk);
        break;
      }
      walk.push_back(ts.event_label(out_edges[pick].event));
      s = out_edges[pick].target;
    }
  }
  return out;
}

// --- export ----------------------------------------------------------------

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string to_dot(const TransitionSystem& ts) {
  std::vector<StateId> order(ts.num_states());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](StateId a, StateId b) { return ts.state_label(a) < ts.state_label(b); });
  std::vector<std::size_t> rank(ts.num_states());
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;

  std::ostringstream out;
  out << "digraph ts {\n  rankdir=LR;\n";
  if (!ts.initial().empty()) out << "  init [shape=point];\n";
  for (StateId s : order)
    out << "  s" << rank[s] << " [label=\"" << dot_escape(ts.state_label(s)) << "\", shape="
        << (ts.is_final(s) ? "doublecircle" : "circle") << "];\n";
  std::vector<StateId> init(ts.initial());
  std::sort(init.begin(), init.end(), [&](StateId a, StateId b) { return rank[a] < rank[b]; });
  for (StateId s : init) out << "  init -> s" << rank[s] << ";\n";
  std::vector<Transition> edges(ts.transitions().begin(), ts.transitions().end());
  std::sort(edges.begin(), edges.end(), [&](const Transition& a, const Transition& b) {
    return std::tie(rank[a.source], a.event, rank[a.target]) < std::tie(rank[b.source], b.event, rank[b.target]);
  });
  for (const auto& t : edges)
    out << "  s" << rank[t.source] << " -> s" << rank[t.target] << " [label=\""
        << dot_escape(ts.event_label(t.event)) << "\"];\n";
  out << "}\n";
  return out.str();
}

std::string to_model_json(const TransitionSystem& ts) {
  nlohmann::ordered_json doc;
  doc["states"] = nlohmann::ordered_json::array();
  for (StateId s = 0; s < ts.num_states(); ++s)
    doc["states"].push_back({{"id", s}, {"label", ts.state_label(s)}});
  doc["initial"] = ts.initial();
  doc["finals"] = ts.finals();
  doc["transitions"] = nlohmann::ordered_json::array();
  for (const auto& t : ts.transitions())
    doc["transitions"].push_back({t.source, ts.event_label(t.event), t.target});
  return doc.dump(1) + "\n";
}

TransitionSystem from_model_json(std::string_view text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    TransitionSystem::Builder b;
    const auto& states = doc.at("states");
    for (std::size_t i = 0; i < states.size(); ++i) {
      if (states[i].at("id").get<std::size_t>() != i) throw ParseError(0, "state ids must be 0..n-1 in order");
      b.add_state(states[i].value("label", std::to_string(i)));
    }
    for (const auto& s : doc.at("initial")) b.mark_initial(s.get<StateId>());
    for (const auto& s : doc.at("finals")) b.mark_final(s.get<StateId>());
    for (const auto& t : doc.at("transitions")) {
      if (!t.is_array() || t.size() != 3) throw ParseError(0, "transitions must be [source, event, target]");
      b.add_transition(t[0].get<StateId>(), t[1].get<std::string>(), t[2].get<StateId>());
    }
    return std::move(b).build();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("model json: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(0, std::string("model json: ") + e.what());
  }
}

}  // namespace jm
