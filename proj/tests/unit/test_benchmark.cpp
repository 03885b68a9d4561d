#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "jm/benchmark.hpp"
#include "jm/error.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace jm::bench;
using jm::Trace;
using K = ProcessTree::Kind;

namespace {

void collect(const ProcessTree& t, std::set<K>& kinds, std::vector<std::string>& leaves) {
  kinds.insert(t.kind);
  if (t.kind == K::leaf) leaves.push_back(t.label);
  for (const auto& c : t.children) collect(c, kinds, leaves);
}

ProcessTree random_tree(jm::Rng& rng, std::size_t leaves, const std::vector<std::string>& sigma) {
  if (leaves == 1) {
    auto leaf = ProcessTree::leaf(sigma[rng.uniform_index(sigma.size())]);
    return rng.bernoulli(0.3) ? ProcessTree::loop(leaf) : leaf;
  }
  const auto left = 1 + rng.uniform_index(leaves - 1);
  std::vector<ProcessTree> kids{random_tree(rng, left, sigma), random_tree(rng, leaves - left, sigma)};
  ProcessTree node = rng.bernoulli(0.5) ? ProcessTree::sequence(std::move(kids)) : ProcessTree::choice(std::move(kids));
  return rng.bernoulli(0.25) ? ProcessTree::loop(std::move(node)) : node;
}

}  // namespace

TEST_CASE("factories validate arity") {
  CHECK_THROWS_AS(ProcessTree::leaf(""), std::invalid_argument);
  CHECK_THROWS_AS(ProcessTree::sequence({ProcessTree::leaf("a")}), std::invalid_argument);
  CHECK_THROWS_AS(ProcessTree::choice({}), std::invalid_argument);
}

TEST_CASE("feature sets") {
  const auto sets = all_feature_sets();
  CHECK(sets.size() == 14);
  CHECK_FALSE(valid_features(0));
  CHECK_FALSE(valid_features(kDuplicate));
  CHECK(valid_features(kSequence | kDuplicate));
  CHECK(feature_name(kSequence | kBranch | kLoop | kDuplicate) == "sequence+branch+loop+duplicate");
  CHECK_THROWS_AS(gen_process_tree({kDuplicate, 25, 12, 0}), std::invalid_argument);
  CHECK_THROWS_AS(gen_process_tree({0, 25, 12, 0}), std::invalid_argument);
}

TEST_CASE("sequence-only tree of five distinct leaves") {
  const auto t = gen_process_tree({kSequence, 25, 5, 3});
  REQUIRE(t.kind == K::sequence);
  CHECK(t.children.size() == 5);
  std::set<std::string> labels;
  for (const auto& c : t.children) {
    CHECK(c.kind == K::leaf);
    labels.insert(c.label);
  }
  CHECK(labels.size() == 5);
}

TEST_CASE("generated trees use exactly the enabled operators") {
  for (unsigned f : all_feature_sets()) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto t = gen_process_tree({f, 25, 12, seed});
      CHECK(t == gen_process_tree({f, 25, 12, seed}));
      std::set<K> kinds;
      std::vector<std::string> leaves;
      collect(t, kinds, leaves);
      const bool binary = (f & (kSequence | kBranch)) != 0;
      CHECK(leaves.size() == (binary ? 12u : 1u));
      CHECK(kinds.count(K::sequence) == ((f & kSequence) ? 1u : 0u));
      CHECK(kinds.count(K::choice) == ((f & kBranch) ? 1u : 0u));
      CHECK(kinds.count(K::loop) == ((f & kLoop) ? 1u : 0u));
      const std::set<std::string> distinct(leaves.begin(), leaves.end());
      if ((f & kDuplicate) && binary) CHECK(distinct.size() < leaves.size());
      else if (!(f & kDuplicate)) CHECK(distinct.size() == leaves.size());
    }
  }
}

TEST_CASE("tree json round-trips") {
  const auto t = gen_process_tree({kSequence | kBranch | kLoop | kDuplicate, 25, 12, 7});
  CHECK(from_tree_json(to_tree_json(t)) == t);
  CHECK_THROWS_AS(from_tree_json("{\"kind\":\"parallel\"}"), jm::ParseError);
  CHECK(to_string(ProcessTree::sequence({ProcessTree::leaf("a"),
                                         ProcessTree::choice({ProcessTree::leaf("b"), ProcessTree::leaf("c")}),
                                         ProcessTree::loop(ProcessTree::leaf("d"))})) == "->(a, X(b, c), *(d))");
}

TEST_CASE("compiled base cases") {
  const auto leaf = tree_to_ts(ProcessTree::leaf("a"));
  CHECK(leaf.num_states() == 2);
  CHECK(jm::accepts(leaf, Trace{"a"}));
  CHECK_FALSE(jm::accepts(leaf, Trace{}));
  CHECK_FALSE(jm::accepts(leaf, Trace{"a", "a"}));
  const auto seq = tree_to_ts(ProcessTree::sequence({ProcessTree::leaf("a"), ProcessTree::leaf("b")}));
  CHECK(jm::accepts(seq, Trace{"a", "b"}));
  CHECK_FALSE(jm::accepts(seq, Trace{"a"}));
  CHECK_FALSE(jm::accepts(seq, Trace{"b", "a"}));
  const auto loop = tree_to_ts(ProcessTree::loop(ProcessTree::leaf("a")));
  for (std::size_t n = 0; n <= 6; ++n) CHECK(jm::accepts(loop, Trace(n, "a")) == (n >= 1));
}

TEST_CASE("compiled language equals tree semantics") {
  jm::Rng rng(13);
  const std::vector<std::string> sigma{"a", "b", "c"};
  const auto words = oracle::all_words(sigma, 6);
  for (int i = 0; i < 120; ++i) {
    const auto tree = random_tree(rng, 1 + rng.uniform_index(5), sigma);
    const auto ts = tree_to_ts(tree);
    REQUIRE(jm::well_formedness(ts).ok());
    const auto lang = oracle::tree_language(tree, 6);
    for (const auto& w : words) REQUIRE_MESSAGE(jm::accepts(ts, w) == (lang.count(w) > 0), to_string(tree));
  }
}

TEST_CASE("sampling") {
  const auto seq = ProcessTree::sequence({ProcessTree::leaf("a"), ProcessTree::leaf("b"), ProcessTree::leaf("c")});
  const auto log = sample_log(seq, 50, 1);
  CHECK(log.variants().size() == 1);
  CHECK(log.multiplicity({"a", "b", "c"}) == 50);

  const auto ch = sample_log(ProcessTree::choice({ProcessTree::leaf("a"), ProcessTree::leaf("b")}), 10000, 2);
  const double sigma = std::sqrt(10000 * 0.25);
  CHECK(std::abs(static_cast<double>(ch.multiplicity({"a"})) - 5000.0) <= 3 * sigma);

  const auto loop = ProcessTree::loop(ProcessTree::leaf("a"));
  const auto capped = sample_log(loop, 500, 3, {0.9, 4});
  for (const auto& [t, m] : capped.variants()) CHECK(t.size() <= 4);

  CHECK_THROWS_AS(sample_log(seq, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_log(seq, 1, 1, {1.0, 3}), std::invalid_argument);
}

TEST_CASE("sampled traces belong to the ground truth") {
  for (unsigned f : all_feature_sets()) {
    const auto tree = gen_process_tree({f, 25, 12, 21});
    const auto ts = tree_to_ts(tree);
    CHECK(jm::well_formedness(ts).ok());
    for (std::size_t n : {10u, 50u, 100u, 200u, 500u, 1000u}) {
      const auto log = sample_log(tree, n, n);
      CHECK(log.size() == n);
      for (const auto& [t, m] : log.variants()) REQUIRE(jm::accepts(ts, t));
    }
  }
}

TEST_CASE("benchmark plan sizes") {
  CHECK(BenchmarkSpec{}.total_logs() == 8400);
  CHECK(BenchmarkSpec::desk().total_logs() == 84);
  const auto spec = BenchmarkSpec::desk(4);
  const auto plan = plan_benchmark(spec);
  CHECK(plan.size() == 14);
  std::size_t logs = 0;
  for (const auto& e : plan) logs += e.log_paths.size();
  CHECK(logs == 84);
  CHECK(entry_log(spec, plan[3], 5) == entry_log(spec, plan[3], 5));
  CHECK(entry_log(spec, plan[3], 5).size() == plan[3].log_sizes[5]);
}

TEST_CASE("benchmark files are deterministic") {
  namespace fs = std::filesystem;
  const fs::path a = fs::temp_directory_path() / "jm_bench_a", b = fs::temp_directory_path() / "jm_bench_b";
  fs::remove_all(a);
  fs::remove_all(b);
  BenchmarkSpec spec = BenchmarkSpec::desk(1);
  spec.setups = {kSequence, kSequence | kLoop};
  spec.sizes = {10, 20};
  const auto m1 = gen_benchmark(spec, a);
  const auto m2 = gen_benchmark(spec, b);
  CHECK(m1 == m2);
  const auto j = nlohmann::json::parse(m1);
  CHECK(j["total_logs"] == 8);
  for (const auto& e : j["entries"]) {
    CHECK(fs::exists(a / e["tree_path"].get<std::string>()));
    CHECK(fs::exists(a / e["ts_path"].get<std::string>()));
    for (const auto& p : e["log_paths"]) {
      std::ifstream fa(a / p.get<std::string>()), fb(b / p.get<std::string>());
      std::stringstream sa, sb;
      sa << fa.rdbuf();
      sb << fb.rdbuf();
      CHECK(sa.str() == sb.str());
    }
  }
  fs::remove_all(a);
  fs::remove_all(b);
}
