#include <algorithm>
#include <set>

#include "doctest.h"
#include "jm/assessment.hpp"
#include "jm/error.hpp"
#include "jm/pm_miner.hpp"
#include "oracles.hpp"

using jm::EventLog;
using jm::Trace;
using namespace jm::pm;

namespace {

EventLog random_log(jm::Rng& rng, std::size_t n, std::size_t max_len, std::size_t letters) {
  std::vector<Trace> traces;
  for (std::size_t i = 0; i < n; ++i) {
    Trace t;
    const auto len = 1 + rng.uniform_index(max_len);
    for (std::size_t j = 0; j < len; ++j) t.push_back(std::string(1, static_cast<char>('a' + rng.uniform_index(letters))));
    traces.push_back(t);
  }
  return EventLog(traces);
}

std::set<std::string> labels(const jm::TransitionSystem& ts) {
  return {ts.state_labels().begin(), ts.state_labels().end()};
}

}  // namespace

TEST_CASE("represent applies projection then structure") {
  const Trace t{"a", "b", "a"};
  CHECK(represent(tail_list(3), t) == "[a,b,a]");
  CHECK(represent(tail_set(3), t) == "{a,b}");
  CHECK(represent({Window::tail, 3, Structure::multiset}, t) == "{|a,a,b|}");
  CHECK(represent(tail_list(2), t) == "[b,a]");
  CHECK(represent(head_list(2), t) == "[a,b]");
  CHECK(represent(head_list(0), t) == "[]");
  CHECK(represent(tail_list(3), Trace{}) == "[]");
  CHECK(represent(tail_set(3), Trace{}) == "{}");
  CHECK(represent({Window::tail, 2, Structure::multiset}, Trace{}) == "{||}");
}

TEST_CASE("notation round-trips") {
  for (const auto& r : {tail_list(4), tail_set(2), head_list(1), StateRepresentation{Window::tail, 3, Structure::multiset}})
    CHECK(parse_notation(notation(r)) == r);
  CHECK(notation(tail_list(4)) == "[t]4");
  CHECK(notation(tail_set(2)) == "{t}2");
  CHECK(notation(head_list(1)) == "[h]1");
  CHECK(notation({Window::tail, 3, Structure::multiset}) == "{|t|}3");
  CHECK_THROWS(parse_notation("<t>2"));
}

TEST_CASE("DFG of a two-branch log") {
  const EventLog log(std::vector<Trace>{{"a", "b"}, {"a", "c"}});
  const auto ts = build_dfg(log);
  CHECK(ts.num_states() == 4);
  CHECK(ts.transitions().size() == 3);
  CHECK(labels(ts) == std::set<std::string>{"([] | [])", "([a] | [])", "([b] | [])", "([c] | [])"});
  CHECK(ts.initial().size() == 1);
  CHECK(ts.state_label(ts.initial()[0]) == "([] | [])");
  std::set<std::string> finals;
  for (auto s : ts.finals()) finals.insert(ts.state_label(s));
  CHECK(finals == std::set<std::string>{"([b] | [])", "([c] | [])"});
}

TEST_CASE("build_dfs rejects an empty log") {
  CHECK_THROWS_AS(build_dfs(EventLog{}, tail_list(1), head_list(0)), jm::EmptyLogError);
}

TEST_CASE("assessment DFG has a question-1 self-loop, the 1-event suffix splits it") {
  const auto log = jm::assessment::sample_log(80, 1);
  const auto dfg = build_dfg(log);
  bool self_loop = false;
  for (const auto& t : dfg.transitions())
    if (t.source == t.target && dfg.event_label(t.event) == "question1") self_loop = true;
  CHECK(self_loop);

  const auto dfs = build_dfs(log, tail_list(1), head_list(1));
  bool dfs_self_loop = false;
  for (const auto& t : dfs.transitions())
    if (t.source == t.target && dfs.event_label(t.event) == "question1") dfs_self_loop = true;
  CHECK_FALSE(dfs_self_loop);
  CHECK(jm::accepts(dfs, Trace{"start", "question1", "question1", "results"}));
  CHECK_FALSE(jm::accepts(dfs, Trace{"start", "question1", "question1", "question1", "results"}));
}

TEST_CASE("DFS invariants hold on random logs") {
  jm::Rng rng(5);
  const auto grid = default_grid();
  for (int round = 0; round < 15; ++round) {
    const auto log = random_log(rng, 1 + rng.uniform_index(25), 7, 4);
    for (const auto& c : grid) {
      const auto ts = build_dfs(log, c.prefix, c.suffix);
      for (const auto& [t, m] : log.variants()) REQUIRE(jm::accepts(ts, t));
      REQUIRE(jm::well_formedness(ts).ok());
    }
    for (std::size_t k = 1; k < 4; ++k)
      REQUIRE(build_dfs(log, tail_list(k + 1), head_list(0)).num_states() >=
              build_dfs(log, tail_list(k), head_list(0)).num_states());
  }
}

TEST_CASE("default grid shape and order") {
  const auto grid = default_grid();
  CHECK(grid.size() == 48);
  CHECK(std::is_sorted(grid.begin(), grid.end(), candidate_precedes));
  CHECK(grid.front() == Candidate{tail_set(1), head_list(0)});
  CHECK(candidate_precedes({tail_set(2), head_list(0)}, {tail_list(2), head_list(0)}));
  CHECK(candidate_precedes({tail_list(1), head_list(3)}, {tail_set(2), head_list(0)}));
}

TEST_CASE("select_model returns the grid-minimal score") {
  jm::Rng rng(9);
  const auto grid = default_grid();
  for (int round = 0; round < 8; ++round) {
    const auto log = random_log(rng, 20, 6, 3);
    std::optional<std::uint64_t> best;
    Candidate best_c{};
    for (const auto& c : grid) {
      const auto ts = build_dfs(log, c.prefix, c.suffix);
      const std::uint64_t loops = oracle::count_cycles(ts);
      const std::uint64_t s = loops * loops + ts.num_states();
      if (s < kDefaultBudget && (!best || s < *best)) best = s, best_c = c;
    }
    const auto sel = select_model(log, grid);
    REQUIRE(best.has_value());
    CHECK_FALSE(sel.fallback);
    CHECK(sel.score == best);
    CHECK(sel.chosen == best_c);
    CHECK(sel.model == build_dfs(log, best_c.prefix, best_c.suffix));
  }
}

TEST_CASE("select_model with only the DFG candidate") {
  const EventLog log(std::vector<Trace>{{"a", "b", "a"}, {"b"}});
  const Candidate only[] = {dfg_candidate()};
  const auto sel = select_model(log, only);
  CHECK(sel.chosen == dfg_candidate());
  CHECK(sel.model == build_dfg(log));
}

TEST_CASE("select_model falls back to the DFG under a tiny budget") {
  const EventLog log(std::vector<Trace>{{"a", "b", "a", "b"}, {"b", "a", "b", "a"}, {"a", "a", "b", "b"}});
  const auto grid = default_grid();
  const auto sel = select_model(log, grid, 3);
  CHECK(sel.fallback);
  CHECK_FALSE(sel.score.has_value());
  CHECK(sel.model == build_dfg(log));
  CHECK_THROWS_AS(select_model(log, std::span<const Candidate>{}), std::invalid_argument);
}

TEST_CASE("mine_pm_uj uses the DFG on duplicate-free logs") {
  const EventLog log(std::vector<Trace>{{"a", "b"}, {"a", "c"}});
  const auto r = mine_pm_uj(log);
  CHECK(r.mode == Mode::dfg);
  CHECK(r.model == build_dfg(log));

  const EventLog dup(std::vector<Trace>{{"offer", "call", "offer"}, {"offer"}});
  const auto en = jm::preprocess(dup, {.enumerate_duplicates = true});
  CHECK(mine_pm_uj(en).mode == Mode::dfg);
  const auto searched = mine_pm_uj(dup);
  CHECK(searched.mode == Mode::uj);
  CHECK(searched.model == select_model(dup, default_grid()).model);
}
