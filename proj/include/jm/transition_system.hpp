#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "jm/event_log.hpp"

namespace jm {

using StateId = std::uint32_t;
using EventId = std::uint32_t;

struct Transition {
  StateId source;
  EventId event;
  StateId target;

  friend auto operator<=>(const Transition&, const Transition&) = default;
};

/// A nondeterministic finite transition system (states, alphabet, transitions,
/// initial states, final states).
///
/// States are opaque integers carrying display labels. Events are interned:
/// `EventId` indexes the sorted alphabet, which always equals the set of
/// events used by some transition. Transitions are stored sorted by
/// (source, event, target), so the outgoing edges of a state are contiguous.
class TransitionSystem {
 public:
  class Builder;

  TransitionSystem() = default;

  std::size_t num_states() const noexcept { return labels_.size(); }
  const std::string& state_label(StateId s) const { return labels_.at(s); }
  const std::vector<std::string>& state_labels() const noexcept { return labels_; }

  const std::vector<std::string>& alphabet() const noexcept { return alphabet_; }
  const std::string& event_label(EventId e) const { return alphabet_.at(e); }
  std::optional<EventId> find_event(std::string_view label) const;

  std::span<const Transition> transitions() const noexcept { return transitions_; }
  std::span<const Transition> outgoing(StateId s) const;
  /// Targets of (s, e, *), in increasing order.
  std::vector<StateId> successors(StateId s, EventId e) const;

  const std::vector<StateId>& initial() const noexcept { return initial_; }
  const std::vector<StateId>& finals() const noexcept { return finals_; }
  bool is_initial(StateId s) const { return is_initial_.at(s) != 0; }
  bool is_final(StateId s) const { return is_final_.at(s) != 0; }

  friend bool operator==(const TransitionSystem&, const TransitionSystem&) = default;

 private:
  std::vector<std::string> labels_;
  std::vector<std::string> alphabet_;
  std::vector<Transition> transitions_;
  std::vector<std::size_t> offsets_;  // num_states + 1 entries
  std::vector<StateId> initial_;
  std::vector<StateId> finals_;
  std::vector<char> is_initial_;
  std::vector<char> is_final_;
};

class TransitionSystem::Builder {
 public:
  StateId add_state(std::string label);
  std::size_t num_states() const noexcept { return labels_.size(); }
  void add_transition(StateId source, std::string_view event, StateId target);
  void mark_initial(StateId s);
  void mark_final(StateId s);

  /// Deduplicates transitions and interns the alphabet. Throws
  /// std::invalid_argument for dangling state ids or empty event labels.
  TransitionSystem build() &&;

 private:
  std::vector<std::string> labels_;
  std::vector<std::tuple<StateId, std::string, StateId>> edges_;
  std::vector<StateId> initial_;
  std::vector<StateId> finals_;
};

/// Language membership by frontier simulation.
bool accepts(const TransitionSystem& ts, std::span<const std::string> trace);

struct WellFormedness {
  std::vector<StateId> dead_states;         // cannot reach a final state
  std::vector<StateId> unreachable_states;  // not reachable from an initial state

  bool ok() const noexcept { return dead_states.empty() && unreachable_states.empty(); }
};

WellFormedness well_formedness(const TransitionSystem& ts);

/// The same TS with every state final. On a well-formed TS it accepts
/// exactly the prefixes of the original language.
TransitionSystem prefix_closure(const TransitionSystem& ts);

/// Number of simple cycles (self-loops included) among the states reachable
/// from an initial state, counted on the state graph: parallel transitions
/// with different events between the same pair of states form one edge.
///
/// Returns std::nullopt once the count reaches `cap`. Throws
/// std::invalid_argument if cap is zero.
std::optional<std::size_t> count_loops(const TransitionSystem& ts, std::size_t cap);

/// `n` accepted traces from seeded random walks. Each step picks uniformly
/// among the outgoing transitions, plus a stop option in final states. Walks
/// that are not in a final state after `max_len` events are restarted.
///
/// Throws EngineError when the retry budget is exhausted.
std::vector<Trace> generate_traces(const TransitionSystem& ts, std::size_t n, std::size_t max_len,
                                   std::uint64_t seed);

/// Graphviz rendering. Nodes are emitted sorted by label.
std::string to_dot(const TransitionSystem& ts);

/// Canonical JSON model: `states` (id + label), `initial`, `finals`, and
/// `transitions` as `[source, event, target]` triples.
std::string to_model_json(const TransitionSystem& ts);
/// Throws ParseError on malformed documents.
TransitionSystem from_model_json(std::string_view text);

}  // namespace jm
