#include "jm/hybrid.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"
#include "jm/al_miner.hpp"
#include "jm/error.hpp"
#include "jm/pm_miner.hpp"

namespace jm::hybrid {

HybridConfig HybridConfig::for_alphabet(std::size_t alphabet_size) {
  if (alphabet_size == 0) throw std::invalid_argument("HybridConfig: empty alphabet");
  const double a = static_cast<double>(alphabet_size);
  return {a, 10.0 * a, 1.0 / (100.0 * a), 2};
}

void HybridConfig::validate() const {
  if (!(c0 > 0.0 && c1 > 0.0 && c2 > 0.0)) throw std::invalid_argument("HybridConfig: coefficients must be positive");
  if (rounding_digits < 0) throw std::invalid_argument("HybridConfig: negative rounding_digits");
}

double lambda_approx(const LogStats& stats, const HybridConfig& config) {
  if (stats.size == 0 || stats.variants == 0) throw std::invalid_argument("lambda_approx: empty log");
  return config.c0 * std::log10(static_cast<double>(stats.variants)) / static_cast<double>(stats.size);
}

double alpha_approx(const LogStats& stats, const HybridConfig& config) {
  // 1 − 1/(1 + e^x) = 1/(1 + e^−x)
  const double x = (config.c1 - static_cast<double>(stats.size)) * config.c2;
  return 1.0 / (1.0 + std::exp(-x));
}

double round_to(double value, int digits) {
  const double scale = std::pow(10.0, digits);
  return std::round(value * scale) / scale;
}

HybridDecision decide(const LogStats& stats, const HybridConfig& config) {
  config.validate();
  HybridDecision d;
  d.lambda_value = lambda_approx(stats, config);
  d.alpha_value = alpha_approx(stats, config);
  d.degenerate = stats.variants == 1;
  const bool pm = round_to(d.lambda_value, config.rounding_digits) > round_to(d.alpha_value, config.rounding_digits);
  d.chosen = pm ? Engine::pm : Engine::al;
  return d;
}

HybridResult hybrid_learn(const EventLog& log, const HybridConfig& config) {
  if (log.empty()) throw EmptyLogError("hybrid_learn: empty log");
  const HybridDecision d = decide(log_stats(log), config);
  if (d.chosen == Engine::pm) return {pm::mine_pm_uj(log).model, d};
  return {al::mine_al(log, al::AlSetup::uj()).model, d};
}

HybridResult hybrid_learn(const EventLog& log) {
  if (log.empty()) throw EmptyLogError("hybrid_learn: empty log");
  return hybrid_learn(log, HybridConfig::for_alphabet(std::max<std::size_t>(1, log.alphabet().size())));
}

std::string to_decision_json(const HybridDecision& d) {
  nlohmann::ordered_json j;
  j["lambda"] = d.lambda_value;
  j["alpha"] = d.alpha_value;
  j["chosen"] = d.chosen == Engine::pm ? "pm" : "al";
  j["degenerate"] = d.degenerate;
  return j.dump(1);
}

}  // namespace jm::hybrid
