#include "jm/assessment.hpp"

namespace jm::assessment {
namespace {

enum : std::uint32_t { kRoot, kStart, kQ1, kQ1Again, kQ2, kResults, kAccept, kQuit };

}  // namespace

al::MarkovChain chain() {
  al::MarkovChain mc;
  mc.states = {
      {"", 0.0, {{kStart, 1.0}}},
      {"start", 0.0, {{kQ1, 0.8}, {kResults, 0.1}, {kQuit, 0.1}}},
      {"question1", 0.0, {{kQ1Again, 0.3}, {kQ2, 0.4}, {kResults, 0.2}, {kQuit, 0.1}}},
      {"question1", 0.0, {{kQ2, 0.6}, {kResults, 0.25}, {kQuit, 0.15}}},
      {"question2", 0.0, {{kResults, 0.7}, {kQuit, 0.3}}},
      {"results", 0.0, {{kAccept, 0.6}, {kQ1, 0.3}, {kQuit, 0.1}}},
      {"accept", 1.0, {}},
      {"quit", 1.0, {}},
  };
  return mc;
}

TransitionSystem journey_ts() {
  const auto mc = chain();
  TransitionSystem::Builder b;
  for (const auto& s : mc.states) b.add_state(s.label);
  b.mark_initial(kRoot);
  b.mark_final(kAccept);
  b.mark_final(kQuit);
  for (std::size_t i = 0; i < mc.states.size(); ++i)
    for (const auto& e : mc.states[i].edges) b.add_transition(static_cast<StateId>(i), mc.states[e.target].label, e.target);
  return std::move(b).build();
}

TransitionSystem ground_truth_ts() { return al::mc_to_ts(chain()); }

Trace sample_walk(const al::MarkovChain& mc, std::size_t max_len, Rng& rng) {
  Trace trace;
  std::uint32_t at = 0;
  while (trace.size() < max_len) {
    const auto& s = mc.states[at];
    double u = rng.uniform_real() - s.termination;
    if (u < 0.0 || s.edges.empty()) break;
    std::uint32_t next = s.edges.back().target;
    for (const auto& e : s.edges) {
      if (u < e.probability) {
        next = e.target;
        break;
      }
      u -= e.probability;
    }
    at = next;
    trace.push_back(mc.states[at].label);
  }
  return trace;
}

EventLog sample_log(std::size_t n, std::uint64_t seed) {
  const auto mc = chain();
  Rng rng(seed);
  std::vector<Trace> traces;
  for (std::size_t i = 0; i < n; ++i) {
    const auto len = static_cast<std::size_t>(rng.uniform_int(2, 15));
    traces.push_back(sample_walk(mc, len, rng));
  }
  return EventLog(traces);
}

}  // namespace jm::assessment
