#include "jm/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "jm/random.hpp"

namespace jm::eval {
namespace {

// Lexicographically smallest shortest access path of every state.
std::vector<std::optional<Trace>> access_paths(const TransitionSystem& ts) {
  std::vector<std::optional<Trace>> path(ts.num_states());
  std::vector<StateId> frontier;
  for (StateId s : ts.initial()) {
    path[s] = Trace{};
    frontier.push_back(s);
  }
  while (!frontier.empty()) {
    // Equal-length paths: visiting in path order then event order discovers
    // each state along its smallest extension first.
    std::stable_sort(frontier.begin(), frontier.end(), [&](StateId a, StateId b) { return *path[a] < *path[b]; });
    std::vector<StateId> next;
    for (StateId s : frontier)
      for (const auto& t : ts.outgoing(s))
        if (!path[t.target]) {
          Trace p = *path[s];
          p.push_back(ts.event_label(t.event));
          path[t.target] = std::move(p);
          next.push_back(t.target);
        }
    frontier = std::move(next);
  }
  return path;
}

void check(const TestSuiteConfig& c) {
  if (c.n_len < 1) throw std::invalid_argument("TestSuiteConfig: n_len must be at least 1");
  if (c.n_sigma_floor < 1) throw std::invalid_argument("TestSuiteConfig: n_sigma_floor must be at least 1");
}

std::size_t index_of(const TransitionSystem& ts, const Transition& t) {
  const auto all = ts.transitions();
  return static_cast<std::size_t>(std::lower_bound(all.begin(), all.end(), t) - all.begin());
}

std::optional<std::vector<EventId>> event_ids(const TransitionSystem& ts, const Trace& trace) {
  std::vector<EventId> ids;
  ids.reserve(trace.size());
  for (const auto& ev : trace) {
    const auto e = ts.find_event(ev);
    if (!e) return std::nullopt;
    ids.push_back(*e);
  }
  return ids;
}

// live[i][s]: the remaining events from position i lead from s to a final state.
std::vector<std::vector<char>> live_sets(const TransitionSystem& ts, const std::vector<EventId>& ids) {
  const std::size_t n = ts.num_states();
  std::vector<std::vector<char>> live(ids.size() + 1, std::vector<char>(n, 0));
  for (StateId s : ts.finals()) live[ids.size()][s] = 1;
  for (std::size_t i = ids.size(); i-- > 0;)
    for (StateId s = 0; s < n; ++s)
      for (const auto& t : ts.outgoing(s))
        if (t.event == ids[i] && live[i + 1][t.target]) {
          live[i][s] = 1;
          break;
        }
  return live;
}

}  // namespace

std::size_t TestSuite::raw_size() const {
  return std::accumulate(multiplicity.begin(), multiplicity.end(), std::size_t{0});
}

std::optional<Trace> shortest_access(const TransitionSystem& ts, StateId target) {
  if (target >= ts.num_states()) throw std::invalid_argument("shortest_access: state out of range");
  return access_paths(ts)[target];
}

TestSuite gen_test_suite(const TransitionSystem& ts_sul, const TransitionSystem& ts, const TestSuiteConfig& config) {
  check(config);
  if (ts_sul.num_states() == 0 || ts.num_states() == 0) throw std::invalid_argument("gen_test_suite: empty model");
  std::set<std::string> alphabet_set(ts_sul.alphabet().begin(), ts_sul.alphabet().end());
  alphabet_set.insert(ts.alphabet().begin(), ts.alphabet().end());
  const std::vector<std::string> alphabet(alphabet_set.begin(), alphabet_set.end());

  const std::size_t gap = ts_sul.num_states() > ts.num_states() ? ts_sul.num_states() - ts.num_states()
                                                                   : ts.num_states() - ts_sul.num_states();
  const std::size_t n_sigma = std::max(config.n_sigma_floor, gap);

  TestSuite suite;
  std::map<Trace, std::size_t> seen;
  Rng rng(config.seed);
  for (const TransitionSystem* model : {&ts_sul, &ts}) {
    const auto access = access_paths(*model);
    for (const auto& t : model->transitions()) {
      if (!access[t.source]) {
        ++suite.skipped_transitions;
        continue;
      }
      Trace base = *access[t.source];
      base.push_back(model->event_label(t.event));
      // Draw all suffixes first; distinct ones are few when n_len is small.
      std::map<std::vector<std::size_t>, std::size_t> local;
      std::vector<const std::vector<std::size_t>*> first_seen;
      std::vector<std::size_t> suffix;
      for (std::size_t i = 0; i < n_sigma; ++i) {
        suffix.clear();
        const auto len = rng.uniform_index(config.n_len);
        for (std::uint64_t j = 0; j < len && !alphabet.empty(); ++j) suffix.push_back(rng.uniform_index(alphabet.size()));
        const auto [it, inserted] = local.try_emplace(suffix, 0);
        if (inserted) first_seen.push_back(&it->first);
        ++it->second;
      }
      for (const auto* key : first_seen) {
        Trace trace = base;
        for (std::size_t e : *key) trace.push_back(alphabet[e]);
        const auto [it, inserted] = seen.try_emplace(std::move(trace), suite.traces.size());
        if (inserted) {
          suite.traces.push_back(it->first);
          suite.multiplicity.push_back(local.at(*key));
        } else {
          suite.multiplicity[it->second] += local.at(*key);
        }
      }
    }
  }
  return suite;
}

// An empty denominator scores 1 if the models agree on every positive, else 0.
double ConfusionMatrix::precision() const {
  if (tp + fp == 0) return fn == 0 ? 1.0 : 0.0;
  return static_cast<double>(tp) / (tp + fp);
}
double ConfusionMatrix::recall() const {
  if (tp + fn == 0) return fp == 0 ? 1.0 : 0.0;
  return static_cast<double>(tp) / (tp + fn);
}
double ConfusionMatrix::f_measure() const {
  const double p = precision(), r = recall();
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

EvaluationReport score(const TransitionSystem& ts, const TransitionSystem& sul_oracle, const TestSuite& suite) {
  if (suite.traces.empty()) throw std::invalid_argument("score: empty test suite");
  EvaluationReport r;
  for (const auto& trace : suite.traces) {
    const bool in_ts = accepts(ts, trace);
    const bool in_sul = accepts(sul_oracle, trace);
    if (in_ts && in_sul) ++r.matrix.tp;
    else if (in_ts) ++r.matrix.fp;
    else if (in_sul) {
      ++r.matrix.fn;
      r.failed_traces.push_back(trace);
    } else ++r.matrix.tn;
  }
  r.precision = r.matrix.precision();
  r.recall = r.matrix.recall();
  r.f_measure = r.matrix.f_measure();
  return r;
}

EvaluationReport compare(const TransitionSystem& ts, const TransitionSystem& sul_oracle,
                         const TestSuiteConfig& config) {
  return score(ts, sul_oracle, gen_test_suite(sul_oracle, ts, config));
}

ReplayResult replay(const TransitionSystem& ts, const EventLog& test_log) {
  ReplayResult r;
  for (const auto& [trace, n] : test_log.variants())
    if (!accepts(ts, trace)) {
      r.failed.push_back(trace);
      r.failed_count += n;
    }
  if (!test_log.empty()) r.proportion = static_cast<double>(r.failed_count) / test_log.size();
  return r;
}

OverlapResult overlap_failures(const TransitionSystem& ts_a, const TransitionSystem& ts_b, const EventLog& test_log) {
  OverlapResult r;
  for (const auto& [trace, n] : test_log.variants()) {
    const bool fa = !accepts(ts_a, trace);
    const bool fb = !accepts(ts_b, trace);
    if (fa) r.fail_a += n;
    if (fb) r.fail_b += n;
    if (fa && fb) r.overlap += n;
  }
  return r;
}

TransitionFrequency transition_frequency(const TransitionSystem& ts, const EventLog& log, RunMode mode) {
  TransitionFrequency out;
  out.per_transition.assign(ts.transitions().size(), 0.0);
  for (const auto& [trace, n] : log.variants()) {
    const auto ids = event_ids(ts, trace);
    if (!ids) continue;
    const auto live = live_sets(ts, *ids);
    if (mode == RunMode::canonical) {
      std::optional<StateId> at;
      for (StateId s : ts.initial())
        if (live[0][s] && (!at || s < *at)) at = s;
      if (!at) continue;
      for (std::size_t i = 0; i < ids->size(); ++i) {
        std::optional<Transition> step;
        for (const auto& t : ts.outgoing(*at))
          if (t.event == (*ids)[i] && live[i + 1][t.target] && (!step || t.target < step->target)) step = t;
        out.per_transition[index_of(ts, *step)] += static_cast<double>(n);
        at = step->target;
      }
    } else {
      const std::size_t len = ids->size();
      std::vector<std::vector<double>> fwd(len + 1, std::vector<double>(ts.num_states(), 0.0));
      std::vector<std::vector<double>> bwd(len + 1, std::vector<double>(ts.num_states(), 0.0));
      for (StateId s : ts.initial()) fwd[0][s] = 1.0;
      for (std::size_t i = 0; i < len; ++i)
        for (StateId s = 0; s < ts.num_states(); ++s)
          if (fwd[i][s] > 0.0)
            for (const auto& t : ts.outgoing(s))
              if (t.event == (*ids)[i]) fwd[i + 1][t.target] += fwd[i][s];
      for (StateId s : ts.finals()) bwd[len][s] = 1.0;
      for (std::size_t i = len; i-- > 0;)
        for (StateId s = 0; s < ts.num_states(); ++s)
          for (const auto& t : ts.outgoing(s))
            if (t.event == (*ids)[i]) bwd[i][s] += bwd[i + 1][t.target];
      for (std::size_t i = 0; i < len; ++i)
        for (StateId s = 0; s < ts.num_states(); ++s)
          if (fwd[i][s] > 0.0)
            for (const auto& t : ts.outgoing(s))
              if (t.event == (*ids)[i] && bwd[i + 1][t.target] > 0.0)
                out.per_transition[index_of(ts, t)] += static_cast<double>(n) * fwd[i][s] * bwd[i + 1][t.target];
    }
  }
  if (!out.per_transition.empty())
    out.average = std::accumulate(out.per_transition.begin(), out.per_transition.end(), 0.0) /
                  static_cast<double>(out.per_transition.size());
  return out;
}

std::pair<EventLog, EventLog> split_log(const EventLog& log, double proportion, std::uint64_t seed) {
  if (!(proportion >= 0.0 && proportion <= 1.0)) throw std::invalid_argument("split_log: proportion outside [0, 1]");
  std::vector<Trace> traces = log.expanded();
  Rng rng(seed);
  for (std::size_t i = traces.size(); i > 1; --i) std::swap(traces[i - 1], traces[rng.uniform_index(i)]);
  const auto cut = static_cast<std::size_t>(std::llround(proportion * static_cast<double>(traces.size())));
  const std::span<const Trace> all(traces);
  return {EventLog(all.first(cut)), EventLog(all.subspan(cut))};
}

std::string to_report_json(const EvaluationReport& report) {
  nlohmann::ordered_json j;
  j["tp"] = report.matrix.tp;
  j["fp"] = report.matrix.fp;
  j["tn"] = report.matrix.tn;
  j["fn"] = report.matrix.fn;
  j["precision"] = report.precision;
  j["recall"] = report.recall;
  j["f_measure"] = report.f_measure;
  if (report.avg_transition_frequency) j["avg_transition_frequency"] = *report.avg_transition_frequency;
  j["failed_traces"] = report.failed_traces;
  return j.dump(1);
}

std::string format_report_table(const EvaluationReport& report) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3);
  out << "TP    FP    TN    FN    precision  recall  F\n";
  out << std::left << std::setw(6) << report.matrix.tp << std::setw(6) << report.matrix.fp << std::setw(6)
      << report.matrix.tn << std::setw(6) << report.matrix.fn << std::setw(11) << report.precision << std::setw(8)
      << report.recall << report.f_measure << '\n';
  if (report.avg_transition_frequency) out << "avg transition frequency " << *report.avg_transition_frequency << '\n';
  out << "failed traces " << report.failed_traces.size() << '\n';
  return out.str();
}

}  // namespace jm::eval
