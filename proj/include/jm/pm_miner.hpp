#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <span>
#include <string>
#include <vector>

#include "jm/event_log.hpp"
#include "jm/transition_system.hpp"

namespace jm::pm {

/// Which end of a trace the state representation looks at.
enum class Window { head, tail };
/// How the selected events are turned into a state: `list` keeps order and
/// multiplicity, `multiset` forgets order, `set` forgets both.
enum class Structure { set, multiset, list };

struct StateRepresentation {
  Window window = Window::tail;
  std::size_t k = 1;
  Structure structure = Structure::list;

  friend auto operator<=>(const StateRepresentation&, const StateRepresentation&) = default;
};

/// Last k events as a list: `[t]_k`.
constexpr StateRepresentation tail_list(std::size_t k) { return {Window::tail, k, Structure::list}; }
/// Last k events as a set: `{t}_k`.
constexpr StateRepresentation tail_set(std::size_t k) { return {Window::tail, k, Structure::set}; }
/// Next k events as a list: `[h]_k`.
constexpr StateRepresentation head_list(std::size_t k) { return {Window::head, k, Structure::list}; }

/// Short notation, e.g. "[t]4", "{t}2", "{|t|}3", "[h]1".
std::string notation(const StateRepresentation& r);
/// Parses the notation produced by `notation`.
StateRepresentation parse_notation(std::string_view text);

/// Canonical rendering of a representation applied to a trace, e.g. "[a,b,a]"
/// for lists, "{a,b}" for sets, "{|a,a,b|}" for multisets.
std::string represent(const StateRepresentation& r, std::span<const std::string> trace);

struct Candidate {
  StateRepresentation prefix;
  StateRepresentation suffix;

  friend auto operator<=>(const Candidate&, const Candidate&) = default;
};

/// The directly-follows graph: last event as prefix, no look-ahead.
constexpr Candidate dfg_candidate() { return {tail_list(1), head_list(0)}; }
/// Four events of history and four of look-ahead.
constexpr Candidate long_candidate() { return {tail_list(4), head_list(4)}; }

/// Directly-follows system: one state per (prefix repr of σ[:k], suffix repr
/// of σ[k:]) over all traces and positions, with the event σ[k] on the edge
/// from position k to k+1. Initial states come from position 0, final states
/// from position |σ|. State labels read "(prefix | suffix)".
///
/// Throws EmptyLogError on an empty log.
TransitionSystem build_dfs(const EventLog& log, const StateRepresentation& prefix,
                           const StateRepresentation& suffix);

inline TransitionSystem build_dfg(const EventLog& log) {
  const Candidate c = dfg_candidate();
  return build_dfs(log, c.prefix, c.suffix);
}

/// Tie-break rank: shorter prefix, shorter suffix, then set < multiset < list.
bool candidate_precedes(const Candidate& a, const Candidate& b);

/// Prefix k in 1..4 with {set, multiset, list} tails, suffix k in 0..3 list heads.
std::vector<Candidate> default_grid();

struct CandidateScore {
  Candidate candidate;
  std::size_t states = 0;
  std::optional<std::size_t> loops;  // nullopt: pruned or over budget
  std::optional<std::uint64_t> score;
};

struct Selection {
  TransitionSystem model;
  Candidate chosen;
  std::size_t states = 0;
  std::optional<std::size_t> loops;  // unset on fallback
  std::optional<std::uint64_t> score;
  bool fallback = false;  // no candidate under budget; the DFG was returned
  std::vector<CandidateScore> scored;
};

constexpr std::uint64_t kDefaultBudget = 1'000'000;

/// Builds every candidate and keeps the one minimizing loops² + |states|
/// among those scoring strictly below `budget`, ties broken by
/// `candidate_precedes`. Falls back to the DFG when nothing qualifies.
/// Throws std::invalid_argument on an empty grid.
Selection select_model(const EventLog& log, std::span<const Candidate> grid,
                       std::uint64_t budget = kDefaultBudget);

enum class Mode { dfg, long_history, uj, custom };

struct PmResult {
  TransitionSystem model;
  Mode mode = Mode::dfg;
  Candidate chosen;
  bool fallback = false;
};

/// The user-journey setup: the DFG when no trace repeats a label, otherwise
/// model selection over the default grid.
PmResult mine_pm_uj(const EventLog& log, std::uint64_t budget = kDefaultBudget);

}  // namespace jm::pm
