#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jm/benchmark.hpp"
#include "jm/evaluation.hpp"
#include "jm/event_log.hpp"
#include "jm/transition_system.hpp"

// Named learner setups and the batch experiments built on them.
namespace jm::exp {

enum class Engine { pm_dfg, pm_long, pm_uj, al_low, al_high, al_uj, hybrid };

/// pm-dfg, pm-long, pm-uj, al-0.1, al-0.9, al-uj, hybrid.
std::string engine_name(Engine e);
std::optional<Engine> parse_engine(std::string_view name);
std::vector<Engine> all_engines();

TransitionSystem learn(const EventLog& log, Engine e);

struct Averages {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
  std::size_t runs = 0;
};

/// How model languages are compared: as learned, or with every state of
/// both models final (prefix-closed).
enum class Semantics { as_learned, prefix_closed };

struct SweepResult {
  std::vector<Engine> engines;
  std::map<unsigned, std::map<Engine, Averages>> per_setup;  // keyed by feature set
  std::map<Engine, Averages> overall;                       // mean over every log
};

/// Learns every engine on every benchmark log and scores it against the
/// ground truth. Work is spread over `jobs` threads; results do not depend on it.
SweepResult sweep(const bench::BenchmarkSpec& spec, std::span<const Engine> engines,
                  const eval::TestSuiteConfig& suite, Semantics semantics, std::size_t jobs = 1);

/// Rows per setup, a P/R/F column triple per engine, and an overall row.
std::string format_sweep_table(const SweepResult& r);
std::string to_sweep_json(const SweepResult& r);

struct ReplayPoint {
  double train_proportion = 0.0;
  double mean_failed = 0.0;  // mean failed-test proportion over the splits
};

/// For each proportion, `splits` seeded random splits; learn on the training
/// part and replay the rest.
std::vector<ReplayPoint> replay_trend(const EventLog& log, std::span<const double> proportions, std::size_t splits,
                                      std::uint64_t seed, Engine engine);

}  // namespace jm::exp
