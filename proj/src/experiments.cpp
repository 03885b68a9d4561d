#include "jm/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "jm/al_miner.hpp"
#include "jm/hybrid.hpp"
#include "jm/pm_miner.hpp"
#include "jm/random.hpp"

namespace jm::exp {

std::string engine_name(Engine e) {
  switch (e) {
    case Engine::pm_dfg: return "pm-dfg";
    case Engine::pm_long: return "pm-long";
    case Engine::pm_uj: return "pm-uj";
    case Engine::al_low: return "al-0.1";
    case Engine::al_high: return "al-0.9";
    case Engine::al_uj: return "al-uj";
    case Engine::hybrid: return "hybrid";
  }
  return "?";
}

std::vector<Engine> all_engines() {
  return {Engine::pm_dfg, Engine::pm_long, Engine::pm_uj, Engine::al_low, Engine::al_high, Engine::al_uj, Engine::hybrid};
}

std::optional<Engine> parse_engine(std::string_view name) {
  for (Engine e : all_engines())
    if (engine_name(e) == name) return e;
  return std::nullopt;
}

TransitionSystem learn(const EventLog& log, Engine e) {
  switch (e) {
    case Engine::pm_dfg: return pm::build_dfg(log);
    case Engine::pm_long: {
      const auto c = pm::long_candidate();
      return pm::build_dfs(log, c.prefix, c.suffix);
    }
    case Engine::pm_uj: return pm::mine_pm_uj(log).model;
    case Engine::al_low: return al::mine_al(log, al::AlSetup::fixed(0.1)).model;
    case Engine::al_high: return al::mine_al(log, al::AlSetup::fixed(0.9)).model;
    case Engine::al_uj: return al::mine_al(log, al::AlSetup::uj()).model;
    case Engine::hybrid: return hybrid::hybrid_learn(log).model;
  }
  throw std::invalid_argument("unknown engine");
}

namespace {

struct Cell {
  std::size_t entry;
  std::size_t log;
};

void add(Averages& a, const eval::EvaluationReport& r) {
  a.precision += r.precision;
  a.recall += r.recall;
  a.f_measure += r.f_measure;
  ++a.runs;
}

void finish(Averages& a) {
  if (a.runs == 0) return;
  a.precision /= a.runs;
  a.recall /= a.runs;
  a.f_measure /= a.runs;
}

}  // namespace

SweepResult sweep(const bench::BenchmarkSpec& spec, std::span<const Engine> engines,
                  const eval::TestSuiteConfig& suite, Semantics semantics, std::size_t jobs) {
  auto entries = bench::plan_benchmark(spec);
  if (semantics == Semantics::prefix_closed)
    for (auto& e : entries) e.ground_truth = prefix_closure(e.ground_truth);
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < entries.size(); ++i)
    for (std::size_t j = 0; j < entries[i].log_paths.size(); ++j) cells.push_back({i, j});

  // reports[cell][engine]
  std::vector<std::vector<eval::EvaluationReport>> reports(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c; (c = next.fetch_add(1)) < cells.size();) {
      const auto& e = entries[cells[c].entry];
      const EventLog log = bench::entry_log(spec, e, cells[c].log);
      for (Engine engine : engines) {
        eval::TestSuiteConfig cfg = suite;
        cfg.seed = derive_seed(suite.seed, {e.features, e.tree_index, cells[c].log, static_cast<std::uint64_t>(engine)});
        TransitionSystem model = learn(log, engine);
        if (semantics == Semantics::prefix_closed) model = prefix_closure(model);
        reports[c].push_back(eval::compare(model, e.ground_truth, cfg));
      }
    }
  };
  jobs = std::max<std::size_t>(1, std::min(jobs, cells.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  SweepResult r;
  r.engines.assign(engines.begin(), engines.end());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const unsigned features = entries[cells[c].entry].features;
    for (std::size_t k = 0; k < engines.size(); ++k) {
      add(r.per_setup[features][engines[k]], reports[c][k]);
      add(r.overall[engines[k]], reports[c][k]);
    }
  }
  for (auto& [f, row] : r.per_setup)
    for (auto& [e, a] : row) finish(a);
  for (auto& [e, a] : r.overall) finish(a);
  return r;
}

std::string format_sweep_table(const SweepResult& r) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3) << std::left;
  out << std::setw(32) << "setup";
  for (Engine e : r.engines) out << std::setw(21) << engine_name(e) + " P/R/F";
  out << '\n';
  auto row = [&](const std::string& name, const std::map<Engine, Averages>& cells) {
    out << std::setw(32) << name;
    for (Engine e : r.engines) {
      const auto& a = cells.at(e);
      std::ostringstream cell;
      cell << std::fixed << std::setprecision(3) << a.precision << ' ' << a.recall << ' ' << a.f_measure;
      out << std::setw(21) << cell.str();
    }
    out << '\n';
  };
  for (const auto& [f, cells] : r.per_setup) row(bench::feature_name(f), cells);
  row("average", r.overall);
  return out.str();
}

std::string to_sweep_json(const SweepResult& r) {
  auto cell = [](const Averages& a) {
    return nlohmann::ordered_json{
        {"precision", a.precision}, {"recall", a.recall}, {"f_measure", a.f_measure}, {"runs", a.runs}};
  };
  nlohmann::ordered_json j;
  j["setups"] = nlohmann::ordered_json::array();
  for (const auto& [f, cells] : r.per_setup) {
    nlohmann::ordered_json s;
    s["setup"] = bench::feature_name(f);
    for (Engine e : r.engines) s[engine_name(e)] = cell(cells.at(e));
    j["setups"].push_back(std::move(s));
  }
  nlohmann::ordered_json avg;
  for (Engine e : r.engines) avg[engine_name(e)] = cell(r.overall.at(e));
  j["average"] = std::move(avg);
  return j.dump(1);
}

std::vector<ReplayPoint> replay_trend(const EventLog& log, std::span<const double> proportions, std::size_t splits,
                                      std::uint64_t seed, Engine engine) {
  if (splits == 0) throw std::invalid_argument("replay_trend: splits must be at least 1");
  std::vector<ReplayPoint> out;
  for (std::size_t p = 0; p < proportions.size(); ++p) {
    double sum = 0.0;
    for (std::size_t s = 0; s < splits; ++s) {
      const auto [train, test] = eval::split_log(log, proportions[p], derive_seed(seed, {p, s}));
      if (train.empty()) throw std::invalid_argument("replay_trend: empty training split");
      sum += eval::replay(learn(train, engine), test).proportion;
    }
    out.push_back({proportions[p], sum / static_cast<double>(splits)});
  }
  return out;
}

}  // namespace jm::exp
