#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jm/event_log.hpp"
#include "jm/transition_system.hpp"

namespace jm::al {

using NodeId = std::uint32_t;

/// Frequency prefix tree acceptor. Node 0 is the root (empty prefix); every
/// other node is reached by exactly one event from its parent.
class Fpta {
 public:
  struct Node {
    std::string label;                           // incoming event; empty for the root
    std::map<std::string, NodeId> children;      // event -> child
    std::map<std::string, std::uint64_t> freq;   // event -> traces continuing with it
    std::uint64_t terminations = 0;              // traces ending here
    std::uint64_t incoming = 0;                  // traces reaching this node

    std::uint64_t total() const;                 // Σ freq + terminations
  };

  explicit Fpta(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}

  const Node& root() const { return nodes_.front(); }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  std::size_t size() const noexcept { return nodes_.size(); }
  /// Follows `path` from the root; nullopt if it leaves the tree.
  std::optional<NodeId> find(const Trace& path) const;

 private:
  std::vector<Node> nodes_;
};

/// Throws EmptyLogError on an empty log.
Fpta build_fpta(const EventLog& log);

/// Outgoing event counts of a state plus the number of traces ending there.
struct FrequencyView {
  std::map<std::string, std::uint64_t> events;
  std::uint64_t terminations = 0;

  std::uint64_t total() const;
};

/// sqrt(½ ln(2/α)) · (1/√n1 + 1/√n2).
double hoeffding_bound(std::uint64_t n1, std::uint64_t n2, double alpha);

/// True if, for some event or for termination, the observed ratios differ by
/// more than the Hoeffding bound. Throws std::invalid_argument when either
/// view is empty or alpha is outside (0, 1].
bool hoeffding_different(const FrequencyView& s, const FrequencyView& s_prime, double alpha);

/// Markov chain over event-labelled states. State 0 is the initial state and
/// carries the empty label; every other state is entered only by the event it
/// is labelled with.
struct MarkovChain {
  struct Edge {
    std::uint32_t target;
    double probability;
  };
  struct State {
    std::string label;
    double termination = 0.0;
    std::vector<Edge> edges;  // sorted by target label
  };

  std::vector<State> states;

  /// Checks labels, edge targets, and that each state's outgoing plus
  /// termination mass sums to one within 1e-9.
  bool well_formed() const;
};

/// Red-blue state merging with the Hoeffding compatibility test.
///
/// Blue states are visited in shortlex order of their prefix; a blue state
/// merges into the first red state it is compatible with, where compatibility
/// requires equal labels and recursively no Hoeffding difference on all
/// aligned descendants. Throws EmptyLogError or std::invalid_argument for an
/// alpha outside (0, 1].
MarkovChain alergia(const EventLog& log, double alpha);

/// One TS state per chain state, a transition labelled with the target's
/// event per edge, the chain's initial state as the only initial state, and
/// every state final.
TransitionSystem mc_to_ts(const MarkovChain& mc);

std::string to_chain_json(const MarkovChain& mc);

/// A fixed alpha, or the log-size driven `alpha_approx` (user-journey setup).
struct AlSetup {
  std::optional<double> alpha;  // nullopt: user-journey setup

  static AlSetup fixed(double a) { return {a}; }
  static AlSetup uj() { return {}; }
};

struct AlResult {
  MarkovChain chain;
  TransitionSystem model;
  double alpha = 0.0;
};

AlResult mine_al(const EventLog& log, AlSetup setup);

}  // namespace jm::al
