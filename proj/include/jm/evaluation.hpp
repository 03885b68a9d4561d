#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jm/event_log.hpp"
#include "jm/transition_system.hpp"

namespace jm::eval {

struct TestSuiteConfig {
  std::size_t n_len = 2;            // suffix lengths are drawn from [0, n_len)
  std::size_t n_sigma_floor = 2;    // minimum traces per transition
  std::uint64_t seed = 0;
};

/// A deduplicated transition-coverage test suite. `multiplicity[i]` counts how
/// often `traces[i]` was generated; `raw_size()` is their sum.
struct TestSuite {
  std::vector<Trace> traces;
  std::vector<std::size_t> multiplicity;
  std::size_t skipped_transitions = 0;  // sources unreachable from an initial state

  std::size_t raw_size() const;
};

/// Test suite covering every transition of both models. Each test is p·a·s:
/// p a shortest path (lexicographic tie-break) to the transition's source, a
/// its event, s a random suffix over the union alphabet. Every transition gets
/// max(n_sigma_floor, ||Γ_sul| − |Γ_ts||) tests.
TestSuite gen_test_suite(const TransitionSystem& ts_sul, const TransitionSystem& ts,
                         const TestSuiteConfig& config);

/// Shortest path from an initial state to `target`, lexicographically smallest
/// among shortest ones; empty optional if unreachable.
std::optional<Trace> shortest_access(const TransitionSystem& ts, StateId target);

struct ConfusionMatrix {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  /// With no predicted (actual) positives, precision (recall) is 1 when the
  /// suite holds no false negatives (positives), 0 otherwise.
  double precision() const;
  double recall() const;
  double f_measure() const;
};

struct EvaluationReport {
  ConfusionMatrix matrix;
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
  std::vector<Trace> failed_traces;  // false negatives
  std::optional<double> avg_transition_frequency;  // set when a log was replayed
};

/// Classifies each suite trace by membership in the model and in the
/// reference (system under learning).
EvaluationReport score(const TransitionSystem& ts, const TransitionSystem& sul_oracle,
                       const TestSuite& suite);

/// Convenience: suite generation and scoring with one call.
EvaluationReport compare(const TransitionSystem& ts, const TransitionSystem& sul_oracle,
                         const TestSuiteConfig& config);

struct ReplayResult {
  std::vector<Trace> failed;  // distinct rejected traces
  std::size_t failed_count = 0;  // with multiplicity
  double proportion = 0.0;
};

ReplayResult replay(const TransitionSystem& ts, const EventLog& test_log);

struct OverlapResult {
  std::size_t fail_a = 0;
  std::size_t fail_b = 0;
  std::size_t overlap = 0;
};

/// Failure counts of both models on the log and the size of the multiset
/// intersection of their failures.
OverlapResult overlap_failures(const TransitionSystem& ts_a, const TransitionSystem& ts_b,
                               const EventLog& test_log);

enum class RunMode {
  canonical,   // one accepting run per trace
  exhaustive,  // every accepting run
};

struct TransitionFrequency {
  std::vector<double> per_transition;  // indexed like ts.transitions()
  double average = 0.0;
};

/// How often each transition is traversed when replaying the log. In
/// canonical mode every accepted trace contributes its accepting run with the
/// lexicographically smallest state sequence; in exhaustive mode every
/// accepting run counts. Rejected traces contribute nothing.
TransitionFrequency transition_frequency(const TransitionSystem& ts, const EventLog& log,
                                         RunMode mode = RunMode::canonical);

/// Random split of the traces (multiplicity expanded) into a training log
/// holding round(proportion·|L|) traces and a test log with the rest.
std::pair<EventLog, EventLog> split_log(const EventLog& log, double proportion, std::uint64_t seed);

std::string to_report_json(const EvaluationReport& report);
std::string format_report_table(const EvaluationReport& report);

}  // namespace jm::eval
