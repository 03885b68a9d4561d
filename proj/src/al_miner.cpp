#include "jm/al_miner.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include "json.hpp"
#include "jm/error.hpp"
#include "jm/hybrid.hpp"

namespace jm::al {

std::uint64_t Fpta::Node::total() const {
  std::uint64_t t = terminations;
  for (const auto& [ev, n] : freq) t += n;
  return t;
}

std::optional<NodeId> Fpta::find(const Trace& path) const {
  NodeId at = 0;
  for (const auto& ev : path) {
    const auto it = nodes_[at].children.find(ev);
    if (it == nodes_[at].children.end()) return std::nullopt;
    at = it->second;
  }
  return at;
}

Fpta build_fpta(const EventLog& log) {
  if (log.empty()) throw EmptyLogError("build_fpta: empty log");
  std::vector<Fpta::Node> nodes(1);
  for (const auto& [trace, n] : log.variants()) {
    NodeId at = 0;
    nodes[0].incoming += n;
    for (const auto& ev : trace) {
      nodes[at].freq[ev] += n;
      auto it = nodes[at].children.find(ev);
      if (it == nodes[at].children.end()) {
        const auto id = static_cast<NodeId>(nodes.size());
        nodes[at].children.emplace(ev, id);
        nodes.push_back({ev, {}, {}, 0, 0});
        at = id;
      } else {
        at = it->second;
      }
      nodes[at].incoming += n;
    }
    nodes[at].terminations += n;
  }
  return Fpta(std::move(nodes));
}

std::uint64_t FrequencyView::total() const {
  std::uint64_t t = terminations;
  for (const auto& [ev, n] : events) t += n;
  return t;
}

double hoeffding_bound(std::uint64_t n1, std::uint64_t n2, double alpha) {
  return std::sqrt(0.5 * std::log(2.0 / alpha)) *
         (1.0 / std::sqrt(static_cast<double>(n1)) + 1.0 / std::sqrt(static_cast<double>(n2)));
}

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
}

bool differ(std::uint64_t f1, std::uint64_t n1, std::uint64_t f2, std::uint64_t n2, double bound) {
  return std::abs(static_cast<double>(f1) / n1 - static_cast<double>(f2) / n2) > bound;
}

// Mutable automaton used during merging; starts as a copy of the FPTA.
struct Work {
  std::vector<Fpta::Node> nodes;
  std::vector<Trace> prefix;
  std::vector<NodeId> parent;
  double alpha;

  bool different(NodeId a, NodeId b) const {
    const auto& x = nodes[a];
    const auto& y = nodes[b];
    const auto n1 = x.total(), n2 = y.total();
    if (n1 == 0 || n2 == 0) return false;
    const double bound = hoeffding_bound(n1, n2, alpha);
    if (differ(x.terminations, n1, y.terminations, n2, bound)) return true;
    auto get = [](const auto& m, const std::string& k) -> std::uint64_t {
      const auto it = m.find(k);
      return it == m.end() ? 0 : it->second;
    };
    for (const auto& [ev, f] : x.freq)
      if (differ(f, n1, get(y.freq, ev), n2, bound)) return true;
    for (const auto& [ev, f] : y.freq)
      if (!x.freq.contains(ev) && differ(0, n1, f, n2, bound)) return true;
    return false;
  }

  // `blue` roots a tree (only red states can close cycles), so this terminates.
  bool compatible(NodeId red, NodeId blue) const {
    if (nodes[red].label != nodes[blue].label) return false;
    if (different(red, blue)) return false;
    for (const auto& [ev, child] : nodes[blue].children) {
      const auto it = nodes[red].children.find(ev);
      if (it != nodes[red].children.end() && !compatible(it->second, child)) return false;
    }
    return true;
  }

  void fold(NodeId red, NodeId blue) {
    nodes[red].terminations += nodes[blue].terminations;
    for (const auto& [ev, f] : nodes[blue].freq) nodes[red].freq[ev] += f;
    for (const auto& [ev, child] : nodes[blue].children) {
      const auto it = nodes[red].children.find(ev);
      if (it == nodes[red].children.end()) {
        nodes[red].children.emplace(ev, child);
        parent[child] = red;
      } else {
        fold(it->second, child);
      }
    }
  }

  void merge(NodeId red, NodeId blue) {
    nodes[parent[blue]].children[nodes[blue].label] = red;
    fold(red, blue);
  }
};

bool shortlex(const Trace& a, const Trace& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

}  // namespace

bool hoeffding_different(const FrequencyView& s, const FrequencyView& s_prime, double alpha) {
  check_alpha(alpha);
  const auto n1 = s.total(), n2 = s_prime.total();
  if (n1 == 0 || n2 == 0) throw std::invalid_argument("hoeffding_different: empty frequency view");
  const double bound = hoeffding_bound(n1, n2, alpha);
  if (differ(s.terminations, n1, s_prime.terminations, n2, bound)) return true;
  for (const auto& [ev, f] : s.events) {
    const auto it = s_prime.events.find(ev);
    if (differ(f, n1, it == s_prime.events.end() ? 0 : it->second, n2, bound)) return true;
  }
  for (const auto& [ev, f] : s_prime.events)
    if (!s.events.contains(ev) && differ(0, n1, f, n2, bound)) return true;
  return false;
}

bool MarkovChain::well_formed() const {
  if (states.empty() || !states[0].label.empty()) return false;
  for (const auto& s : states) {
    double mass = s.termination;
    if (s.termination < 0.0) return false;
    for (const auto& e : s.edges) {
      if (e.target >= states.size() || e.target == 0 || e.probability < 0.0) return false;
      if (states[e.target].label.empty()) return false;
      mass += e.probability;
    }
    if (std::abs(mass - 1.0) > 1e-9) return false;
  }
  return true;
}

MarkovChain alergia(const EventLog& log, double alpha) {
  check_alpha(alpha);
  const Fpta fpta = build_fpta(log);

  Work w{{}, {}, {}, alpha};
  w.nodes.reserve(fpta.size());
  for (NodeId i = 0; i < fpta.size(); ++i) w.nodes.push_back(fpta.node(i));
  w.prefix.resize(fpta.size());
  w.parent.assign(fpta.size(), 0);
  for (NodeId i = 0; i < fpta.size(); ++i)
    for (const auto& [ev, c] : w.nodes[i].children) {
      w.parent[c] = i;
      w.prefix[c] = w.prefix[i];
      w.prefix[c].push_back(ev);
    }

  std::vector<NodeId> red{0};
  std::vector<char> is_red(fpta.size(), 0);
  is_red[0] = 1;
  for (;;) {
    std::optional<NodeId> blue;
    for (NodeId r : red)
      for (const auto& [ev, c] : w.nodes[r].children)
        if (!is_red[c] && (!blue || shortlex(w.prefix[c], w.prefix[*blue]))) blue = c;
    if (!blue) break;
    bool merged = false;
    for (NodeId r : red) {
      if (w.compatible(r, *blue)) {
        w.merge(r, *blue);
        merged = true;
        break;
      }
    }
    if (!merged) {
      red.push_back(*blue);
      is_red[*blue] = 1;
    }
  }

  // Renumber breadth-first from the root, children in event order.
  std::vector<std::uint32_t> index(fpta.size(), UINT32_MAX);
  std::vector<NodeId> order{0};
  index[0] = 0;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (const auto& [ev, c] : w.nodes[order[i]].children)
      if (index[c] == UINT32_MAX) {
        index[c] = static_cast<std::uint32_t>(order.size());
        order.push_back(c);
      }

  MarkovChain mc;
  mc.states.reserve(order.size());
  for (NodeId id : order) {
    const auto& n = w.nodes[id];
    const double total = static_cast<double>(n.total());
    MarkovChain::State s;
    s.label = id == 0 ? std::string() : n.label;
    s.termination = total > 0 ? n.terminations / total : 1.0;
    for (const auto& [ev, c] : n.children) s.edges.push_back({index[c], n.freq.at(ev) / total});
    mc.states.push_back(std::move(s));
  }
  return mc;
}

TransitionSystem mc_to_ts(const MarkovChain& mc) {
  if (mc.states.empty()) throw std::invalid_argument("mc_to_ts: empty chain");
  TransitionSystem::Builder b;
  for (const auto& s : mc.states) {
    const StateId id = b.add_state(s.label);
    b.mark_final(id);
  }
  b.mark_initial(0);
  for (std::size_t i = 0; i < mc.states.size(); ++i)
    for (const auto& e : mc.states[i].edges)
      b.add_transition(static_cast<StateId>(i), mc.states.at(e.target).label, e.target);
  return std::move(b).build();
}

std::string to_chain_json(const MarkovChain& mc) {
  nlohmann::ordered_json states = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < mc.states.size(); ++i) {
    const auto& s = mc.states[i];
    nlohmann::ordered_json edges = nlohmann::ordered_json::array();
    for (const auto& e : s.edges) edges.push_back({{"target", e.target}, {"probability", e.probability}});
    states.push_back({{"id", i}, {"label", s.label}, {"termination", s.termination}, {"edges", edges}});
  }
  nlohmann::ordered_json j;
  j["initial"] = 0;
  j["states"] = std::move(states);
  return j.dump(1);
}

AlResult mine_al(const EventLog& log, AlSetup setup) {
  if (log.empty()) throw EmptyLogError("mine_al: empty log");
  double alpha;
  if (setup.alpha) {
    alpha = *setup.alpha;
  } else {
    const auto stats = log_stats(log);
    const auto cfg = hybrid::HybridConfig::for_alphabet(std::max<std::size_t>(1, stats.alphabet_size));
    // Very large logs drive the sigmoid to zero; keep alpha a valid level.
    alpha = std::max(hybrid::alpha_approx(stats, cfg), std::numeric_limits<double>::min());
  }
  MarkovChain chain = alergia(log, alpha);
  TransitionSystem model = mc_to_ts(chain);
  return {std::move(chain), std::move(model), alpha};
}

}  // namespace jm::al
