#pragma once

#include <string>

#include "jm/event_log.hpp"
#include "jm/transition_system.hpp"

namespace jm::hybrid {

/// Coefficients of the certainty threshold and the alpha approximation.
struct HybridConfig {
  double c0 = 0.0;  // threshold scale
  double c1 = 0.0;  // sigmoid inflection point (in traces)
  double c2 = 0.0;  // sigmoid slope
  int rounding_digits = 2;

  /// c0 = |A|, c1 = 10·|A|, c2 = 1/(100·|A|). Throws std::invalid_argument
  /// for an empty alphabet.
  static HybridConfig for_alphabet(std::size_t alphabet_size);

  /// Throws std::invalid_argument unless all coefficients are positive and
  /// rounding_digits is nonnegative.
  void validate() const;
};

/// c0 · log10(var(L)) / |L|. Throws std::invalid_argument for an empty log.
double lambda_approx(const LogStats& stats, const HybridConfig& config);

/// 1 − 1/(1 + e^{(c1 − |L|)·c2}); strictly inside (0, 1) for moderate sizes.
double alpha_approx(const LogStats& stats, const HybridConfig& config);

double round_to(double value, int digits);

enum class Engine { pm, al };

struct HybridDecision {
  double lambda_value = 0.0;
  double alpha_value = 0.0;
  Engine chosen = Engine::al;
  bool degenerate = false;  // a single trace variant
};

/// PM when the rounded threshold exceeds the rounded alpha, AL otherwise.
HybridDecision decide(const LogStats& stats, const HybridConfig& config);

struct HybridResult {
  TransitionSystem model;
  HybridDecision decision;
};

/// Dispatches to the user-journey PM or AL setup.
HybridResult hybrid_learn(const EventLog& log, const HybridConfig& config);
/// Same, with coefficients derived from the log's alphabet.
HybridResult hybrid_learn(const EventLog& log);

std::string to_decision_json(const HybridDecision& d);

}  // namespace jm::hybrid
