#include "jm/benchmark.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <stdexcept>

#include "json.hpp"
#include "jm/error.hpp"
#include "jm/random.hpp"

namespace jm::bench {

ProcessTree ProcessTree::leaf(std::string label) {
  if (label.empty()) throw std::invalid_argument("leaf with empty label");
  return {Kind::leaf, std::move(label), {}};
}

ProcessTree ProcessTree::sequence(std::vector<ProcessTree> children) {
  if (children.size() < 2) throw std::invalid_argument("sequence needs at least two children");
  return {Kind::sequence, {}, std::move(children)};
}

ProcessTree ProcessTree::choice(std::vector<ProcessTree> children) {
  if (children.size() < 2) throw std::invalid_argument("choice needs at least two children");
  return {Kind::choice, {}, std::move(children)};
}

ProcessTree ProcessTree::loop(ProcessTree body) { return {Kind::loop, {}, {std::move(body)}}; }

std::size_t ProcessTree::leaf_count() const {
  if (kind == Kind::leaf) return 1;
  std::size_t n = 0;
  for (const auto& c : children) n += c.leaf_count();
  return n;
}

namespace {

const char* kind_name(ProcessTree::Kind k) {
  switch (k) {
    case ProcessTree::Kind::leaf: return "leaf";
    case ProcessTree::Kind::sequence: return "sequence";
    case ProcessTree::Kind::choice: return "choice";
    case ProcessTree::Kind::loop: return "loop";
  }
  return "?";
}

nlohmann::ordered_json tree_json(const ProcessTree& t) {
  nlohmann::ordered_json j;
  j["kind"] = kind_name(t.kind);
  if (t.kind == ProcessTree::Kind::leaf) {
    j["label"] = t.label;
  } else {
    j["children"] = nlohmann::ordered_json::array();
    for (const auto& c : t.children) j["children"].push_back(tree_json(c));
  }
  return j;
}

ProcessTree tree_from(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "leaf") return ProcessTree::leaf(j.at("label").get<std::string>());
  std::vector<ProcessTree> children;
  for (const auto& c : j.at("children")) children.push_back(tree_from(c));
  if (kind == "sequence") return ProcessTree::sequence(std::move(children));
  if (kind == "choice") return ProcessTree::choice(std::move(children));
  if (kind == "loop") {
    if (children.size() != 1) throw std::invalid_argument("loop needs exactly one child");
    return ProcessTree::loop(std::move(children.front()));
  }
  throw std::invalid_argument("unknown tree node kind: " + kind);
}

bool contains(const ProcessTree& t, ProcessTree::Kind k) {
  if (t.kind == k) return true;
  return std::any_of(t.children.begin(), t.children.end(), [&](const auto& c) { return contains(c, k); });
}

void collect_leaves(ProcessTree& t, std::vector<ProcessTree*>& out) {
  if (t.kind == ProcessTree::Kind::leaf) out.push_back(&t);
  for (auto& c : t.children) collect_leaves(c, out);
}

constexpr double kLoopWrapProb = 0.25;
constexpr double kDuplicateProb = 0.25;

class TreeGen {
 public:
  TreeGen(unsigned features, Rng& rng) : features_(features), rng_(rng) {
    if (features & kSequence) ops_.push_back(ProcessTree::Kind::sequence);
    if (features & kBranch) ops_.push_back(ProcessTree::Kind::choice);
  }

  // Shape only; leaves get their labels afterwards.
  ProcessTree build(std::size_t leaves) {
    ProcessTree t;
    if (leaves == 1 || ops_.empty()) {
      t = ProcessTree{ProcessTree::Kind::leaf, "_", {}};
    } else {
      const auto kind = ops_[rng_.uniform_index(ops_.size())];
      const std::size_t arity = std::min<std::size_t>(leaves, 2 + rng_.uniform_index(2));
      std::vector<std::size_t> cuts;
      for (std::size_t i = 1; i < leaves; ++i) cuts.push_back(i);
      for (std::size_t i = 0; i + 1 < arity; ++i) std::swap(cuts[i], cuts[i + rng_.uniform_index(cuts.size() - i)]);
      cuts.resize(arity - 1);
      std::sort(cuts.begin(), cuts.end());
      cuts.push_back(leaves);
      t.kind = kind;
      std::size_t from = 0;
      for (std::size_t cut : cuts) {
        ProcessTree child = build(cut - from);
        from = cut;
        if (child.kind == kind) {
          for (auto& g : child.children) t.children.push_back(std::move(g));
        } else {
          t.children.push_back(std::move(child));
        }
      }
    }
    if ((features_ & kLoop) && (ops_.empty() || rng_.bernoulli(kLoopWrapProb)))
      return ProcessTree::loop(std::move(t));
    return t;
  }

 private:
  unsigned features_;
  Rng& rng_;
  std::vector<ProcessTree::Kind> ops_;
};

// ε-free fragment under construction; its initial state has no incoming edges.
struct Fragment {
  StateId init;
  std::vector<StateId> finals;
};

class Compiler {
 public:
  Fragment compile(const ProcessTree& t) {
    switch (t.kind) {
      case ProcessTree::Kind::leaf: {
        const StateId a = add(), b = add();
        out_[a].emplace_back(t.label, b);
        return {a, {b}};
      }
      case ProcessTree::Kind::sequence: {
        Fragment f = compile(t.children.front());
        for (std::size_t i = 1; i < t.children.size(); ++i) {
          Fragment g = compile(t.children[i]);
          const auto edges = out_[g.init];
          for (StateId fin : f.finals) out_[fin].insert(out_[fin].end(), edges.begin(), edges.end());
          out_[g.init].clear();
          f.finals = std::move(g.finals);
        }
        return f;
      }
      case ProcessTree::Kind::choice: {
        const StateId init = add();
        Fragment f{init, {}};
        for (const auto& c : t.children) {
          Fragment g = compile(c);
          auto edges = std::move(out_[g.init]);
          out_[g.init].clear();
          out_[init].insert(out_[init].end(), edges.begin(), edges.end());
          f.finals.insert(f.finals.end(), g.finals.begin(), g.finals.end());
        }
        merge_sinks(f);
        return f;
      }
      case ProcessTree::Kind::loop: {
        Fragment f = compile(t.children.front());
        const auto edges = out_[f.init];
        for (StateId fin : f.finals) out_[fin].insert(out_[fin].end(), edges.begin(), edges.end());
        return f;
      }
    }
    throw std::logic_error("unreachable");
  }

  TransitionSystem finish(const Fragment& f) {
    std::vector<char> is_final(out_.size(), 0);
    for (StateId s : f.finals) is_final[s] = 1;
    TransitionSystem::Builder b;
    std::vector<StateId> id(out_.size(), UINT32_MAX);
    std::vector<StateId> order{f.init};
    id[f.init] = b.add_state("q0");
    for (std::size_t i = 0; i < order.size(); ++i) {
      auto edges = out_[order[i]];
      std::sort(edges.begin(), edges.end());
      for (const auto& [ev, t] : edges)
        if (id[t] == UINT32_MAX) {
          id[t] = b.add_state("q" + std::to_string(order.size()));
          order.push_back(t);
        }
    }
    b.mark_initial(id[f.init]);
    for (StateId s : order) {
      if (is_final[s]) b.mark_final(id[s]);
      for (const auto& [ev, t] : out_[s]) b.add_transition(id[s], ev, id[t]);
    }
    return std::move(b).build();
  }

 private:
  StateId add() {
    out_.emplace_back();
    return static_cast<StateId>(out_.size() - 1);
  }

  void merge_sinks(Fragment& f) {
    std::vector<StateId> sinks;
    for (StateId s : f.finals)
      if (out_[s].empty()) sinks.push_back(s);
    if (sinks.size() < 2) return;
    const StateId keep = sinks.front();
    for (auto& edges : out_)
      for (auto& [ev, t] : edges)
        if (std::find(sinks.begin() + 1, sinks.end(), t) != sinks.end()) t = keep;
    std::erase_if(f.finals, [&](StateId s) { return std::find(sinks.begin() + 1, sinks.end(), s) != sinks.end(); });
  }

  std::vector<std::vector<std::pair<std::string, StateId>>> out_;
};

void sample_into(const ProcessTree& t, Rng& rng, const SampleOptions& o, Trace& out) {
  switch (t.kind) {
    case ProcessTree::Kind::leaf: out.push_back(t.label); return;
    case ProcessTree::Kind::sequence:
      for (const auto& c : t.children) sample_into(c, rng, o, out);
      return;
    case ProcessTree::Kind::choice: sample_into(t.children[rng.uniform_index(t.children.size())], rng, o, out); return;
    case ProcessTree::Kind::loop: {
      sample_into(t.children.front(), rng, o, out);
      for (std::size_t n = 1; n < o.loop_cap && rng.bernoulli(o.loop_continue_prob); ++n)
        sample_into(t.children.front(), rng, o, out);
      return;
    }
  }
}

std::string label_name(std::size_t i, std::size_t alphabet_size) {
  std::string digits = std::to_string(i + 1);
  const std::size_t width = std::max<std::size_t>(2, std::to_string(alphabet_size).size());
  return "ev" + std::string(width - std::min(width, digits.size()), '0') + digits;
}

std::string tree_id(std::size_t i) {
  std::string d = std::to_string(i);
  return "t" + std::string(d.size() < 2 ? 2 - d.size() : 0, '0') + d;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::error_code ec;
  std::filesystem::create_directories(p.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + p.parent_path().string() + ": " + ec.message());
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw IoError("cannot write " + p.string());
}

}  // namespace

std::string to_string(const ProcessTree& tree) {
  if (tree.kind == ProcessTree::Kind::leaf) return tree.label;
  std::string s = tree.kind == ProcessTree::Kind::sequence ? "->(" : tree.kind == ProcessTree::Kind::choice ? "X(" : "*(";
  for (std::size_t i = 0; i < tree.children.size(); ++i) {
    if (i) s += ", ";
    s += to_string(tree.children[i]);
  }
  return s + ")";
}

std::string to_tree_json(const ProcessTree& tree) { return tree_json(tree).dump(1); }

ProcessTree from_tree_json(std::string_view text) {
  try {
    return tree_from(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("tree json: ") + e.what());
  }
}

std::string feature_name(unsigned features) {
  std::string s;
  const std::pair<unsigned, const char*> names[] = {
      {kSequence, "sequence"}, {kBranch, "branch"}, {kLoop, "loop"}, {kDuplicate, "duplicate"}};
  for (const auto& [bit, name] : names)
    if (features & bit) s += (s.empty() ? "" : "+") + std::string(name);
  return s;
}

bool valid_features(unsigned features) { return features != 0 && features < 16 && features != kDuplicate; }

std::vector<unsigned> all_feature_sets() {
  std::vector<unsigned> v;
  for (unsigned f = 1; f < 16; ++f)
    if (valid_features(f)) v.push_back(f);
  return v;
}

ProcessTree gen_process_tree(const GenSetup& setup) {
  if (!valid_features(setup.features)) throw std::invalid_argument("invalid feature set: " + std::to_string(setup.features));
  if (setup.tree_size == 0) throw std::invalid_argument("tree_size must be at least 1");
  if (setup.alphabet_size == 0) throw std::invalid_argument("alphabet_size must be at least 1");
  const bool dup = setup.features & kDuplicate;
  if (!dup && setup.tree_size > setup.alphabet_size && (setup.features & (kSequence | kBranch)))
    throw std::invalid_argument("tree_size exceeds alphabet_size without the duplicate feature");

  Rng rng(setup.seed);
  TreeGen gen(setup.features, rng);
  ProcessTree tree;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    tree = gen.build(setup.tree_size);
    const bool ok = (!(setup.features & kSequence) || contains(tree, ProcessTree::Kind::sequence)) &&
                    (!(setup.features & kBranch) || contains(tree, ProcessTree::Kind::choice)) &&
                    (!(setup.features & kLoop) || contains(tree, ProcessTree::Kind::loop));
    if (ok) break;
  }

  std::vector<ProcessTree*> leaves;
  collect_leaves(tree, leaves);
  std::vector<std::size_t> pool(setup.alphabet_size);
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
  for (std::size_t i = 0; i < leaves.size() && i < pool.size(); ++i)
    std::swap(pool[i], pool[i + rng.uniform_index(pool.size() - i)]);
  std::vector<std::size_t> label(leaves.size());
  for (std::size_t i = 0; i < leaves.size(); ++i) label[i] = pool[i % pool.size()];
  if (dup && leaves.size() > 1) {
    bool repeated = false;
    for (std::size_t i = 1; i < leaves.size(); ++i)
      if (rng.bernoulli(kDuplicateProb)) {
        label[i] = label[rng.uniform_index(i)];
        repeated = true;
      }
    if (!repeated) {
      const std::size_t i = 1 + rng.uniform_index(leaves.size() - 1);
      label[i] = label[rng.uniform_index(i)];
    }
  }
  for (std::size_t i = 0; i < leaves.size(); ++i) leaves[i]->label = label_name(label[i], setup.alphabet_size);
  return tree;
}

TransitionSystem tree_to_ts(const ProcessTree& tree) {
  Compiler c;
  const Fragment f = c.compile(tree);
  return c.finish(f);
}

EventLog sample_log(const ProcessTree& tree, std::size_t n_traces, std::uint64_t seed, SampleOptions options) {
  if (n_traces == 0) throw std::invalid_argument("sample_log: n_traces must be at least 1");
  if (!(options.loop_continue_prob > 0.0 && options.loop_continue_prob < 1.0))
    throw std::invalid_argument("sample_log: loop_continue_prob must lie in (0, 1)");
  if (options.loop_cap == 0) throw std::invalid_argument("sample_log: loop_cap must be at least 1");
  Rng rng(seed);
  EventLog::VariantMap variants;
  Trace trace;
  for (std::size_t i = 0; i < n_traces; ++i) {
    trace.clear();
    sample_into(tree, rng, options, trace);
    ++variants[trace];
  }
  return EventLog(std::move(variants));
}

BenchmarkSpec BenchmarkSpec::desk(std::uint64_t seed) {
  BenchmarkSpec s;
  s.trees_per_setup = 1;
  s.sizes = {10, 100, 1000};
  s.reps = 2;
  s.seed = seed;
  return s;
}

std::vector<BenchmarkEntry> plan_benchmark(const BenchmarkSpec& spec) {
  if (spec.setups.empty() || spec.trees_per_setup == 0 || spec.sizes.empty() || spec.reps == 0)
    throw std::invalid_argument("benchmark parameters must be at least 1");
  std::vector<BenchmarkEntry> entries;
  for (unsigned features : spec.setups) {
    const std::string setup_dir = "bench/" + feature_name(features) + "/";
    for (std::size_t t = 0; t < spec.trees_per_setup; ++t) {
      BenchmarkEntry e;
      e.features = features;
      e.tree_index = t;
      e.seed = derive_seed(spec.seed, {features, t});
      e.tree = gen_process_tree({features, spec.alphabet_size, spec.tree_size, e.seed});
      e.ground_truth = tree_to_ts(e.tree);
      const std::string dir = setup_dir + tree_id(t) + "/";
      e.tree_path = dir + "tree.json";
      e.ts_path = dir + "ts.json";
      for (std::size_t size : spec.sizes) {
        if (size == 0) throw std::invalid_argument("benchmark log size must be at least 1");
        for (std::size_t r = 0; r < spec.reps; ++r) {
          e.log_sizes.push_back(size);
          e.log_paths.push_back(dir + std::to_string(size) + "/" + std::to_string(r) + ".jsonl");
        }
      }
      entries.push_back(std::move(e));
    }
  }
  return entries;
}

EventLog entry_log(const BenchmarkSpec& spec, const BenchmarkEntry& entry, std::size_t i) {
  const std::size_t size = entry.log_sizes.at(i);
  const std::size_t rep = i % spec.reps;
  return sample_log(entry.tree, size, derive_seed(spec.seed, {entry.features, entry.tree_index, size, rep}),
                    spec.sampling);
}

std::string gen_benchmark(const BenchmarkSpec& spec, const std::filesystem::path& root) {
  const auto entries = plan_benchmark(spec);
  nlohmann::ordered_json manifest;
  manifest["seed"] = spec.seed;
  manifest["total_logs"] = spec.total_logs();
  manifest["alphabet_size"] = spec.alphabet_size;
  manifest["tree_size"] = spec.tree_size;
  manifest["loop_continue_prob"] = spec.sampling.loop_continue_prob;
  manifest["loop_cap"] = spec.sampling.loop_cap;
  manifest["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    write_file(root / e.tree_path, to_tree_json(e.tree) + "\n");
    write_file(root / e.ts_path, to_model_json(e.ground_truth) + "\n");
    for (std::size_t i = 0; i < e.log_paths.size(); ++i) {
      write_file(root / e.log_paths[i], write_jsonl(entry_log(spec, e, i)));
    }
    nlohmann::ordered_json item;
    item["setup"] = feature_name(e.features);
    item["features"] = e.features;
    item["tree"] = e.tree_index;
    item["seed"] = e.seed;
    item["tree_path"] = e.tree_path;
    item["ts_path"] = e.ts_path;
    item["log_sizes"] = e.log_sizes;
    item["log_paths"] = e.log_paths;
    manifest["entries"].push_back(std::move(item));
  }
  std::string text = manifest.dump(1) + "\n";
  write_file(root / "manifest.json", text);
  return text;
}

}  // namespace jm::bench
