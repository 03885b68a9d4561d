#pragma once

#include <cstddef>
#include <cstdint>

#include "jm/al_miner.hpp"
#include "jm/event_log.hpp"
#include "jm/random.hpp"
#include "jm/transition_system.hpp"

// Skill-assessment running example: a journey starts, answers question 1
// (at most twice), optionally question 2, and may ask for results or quit at
// any point; results are accepted or the questionnaire restarts.
namespace jm::assessment {

/// Ground-truth chain. Events: start, question1, question2, results, accept, quit.
al::MarkovChain chain();

/// The chain as a TS whose final states are those entered by accept or quit.
TransitionSystem journey_ts();

/// mc_to_ts(chain()): every prefix of a journey is accepted.
TransitionSystem ground_truth_ts();

/// One walk from the chain's initial state, stopping on termination or after
/// `max_len` events.
Trace sample_walk(const al::MarkovChain& mc, std::size_t max_len, Rng& rng);

/// `n` walks with a length bound drawn uniformly from [2, 15] for each.
EventLog sample_log(std::size_t n, std::uint64_t seed);

}  // namespace jm::assessment
