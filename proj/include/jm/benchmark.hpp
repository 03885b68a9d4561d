#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "jm/event_log.hpp"
#include "jm/transition_system.hpp"

namespace jm::bench {

/// Process tree over sequence, exclusive choice, and loop (body at least once).
struct ProcessTree {
  enum class Kind { leaf, sequence, choice, loop };

  Kind kind = Kind::leaf;
  std::string label;                  // leaves only
  std::vector<ProcessTree> children;  // one child for loops, at least two otherwise

  static ProcessTree leaf(std::string label);
  static ProcessTree sequence(std::vector<ProcessTree> children);
  static ProcessTree choice(std::vector<ProcessTree> children);
  static ProcessTree loop(ProcessTree body);

  std::size_t leaf_count() const;
  friend bool operator==(const ProcessTree&, const ProcessTree&) = default;
};

/// Bracket notation, e.g. `->(a, X(b, c), *(d))`.
std::string to_string(const ProcessTree& tree);
std::string to_tree_json(const ProcessTree& tree);
ProcessTree from_tree_json(std::string_view text);

enum Feature : unsigned {
  kSequence = 1u << 0,
  kBranch = 1u << 1,
  kLoop = 1u << 2,
  kDuplicate = 1u << 3,
};

/// e.g. "sequence+loop".
std::string feature_name(unsigned features);
bool valid_features(unsigned features);
/// The 14 valid feature subsets in increasing bitmask order.
std::vector<unsigned> all_feature_sets();

struct GenSetup {
  unsigned features = kSequence;
  std::size_t alphabet_size = 25;  // 20..30
  std::size_t tree_size = 12;      // leaf budget
  std::uint64_t seed = 0;
};

/// Seeded random tree using only the enabled operators. Every enabled
/// structural feature occurs at least once when the leaf budget allows it.
/// Without the duplicate feature all leaves carry distinct labels.
/// Throws std::invalid_argument on an invalid setup.
ProcessTree gen_process_tree(const GenSetup& setup);

/// Compositional compilation into a well-formed transition system whose
/// language is exactly the tree's trace language.
TransitionSystem tree_to_ts(const ProcessTree& tree);

struct SampleOptions {
  double loop_continue_prob = 0.5;
  std::size_t loop_cap = 10;  // maximum executions of a loop body
};

/// Random traversals: a choice picks a child uniformly, a loop repeats its
/// body with `loop_continue_prob` up to `loop_cap` executions.
EventLog sample_log(const ProcessTree& tree, std::size_t n_traces, std::uint64_t seed,
                    SampleOptions options = {});

struct BenchmarkSpec {
  std::vector<unsigned> setups = all_feature_sets();
  std::size_t trees_per_setup = 10;
  std::vector<std::size_t> sizes = {10, 50, 100, 200, 500, 1000};
  std::size_t reps = 10;
  std::uint64_t seed = 0;
  std::size_t alphabet_size = 25;
  std::size_t tree_size = 12;
  SampleOptions sampling;

  /// 14 setups × 1 tree × sizes {10, 100, 1000} × 2 reps.
  static BenchmarkSpec desk(std::uint64_t seed = 0);
  std::size_t total_logs() const { return setups.size() * trees_per_setup * sizes.size() * reps; }
};

struct BenchmarkEntry {
  unsigned features = 0;
  std::size_t tree_index = 0;
  std::uint64_t seed = 0;
  ProcessTree tree;
  TransitionSystem ground_truth;
  std::string tree_path;  // relative to the benchmark root
  std::string ts_path;
  std::vector<std::size_t> log_sizes;    // per log
  std::vector<std::string> log_paths;
};

/// In-memory benchmark; logs are produced on demand with `entry_log`.
std::vector<BenchmarkEntry> plan_benchmark(const BenchmarkSpec& spec);
/// The log at index `i` of an entry (sizes × reps, size-major).
EventLog entry_log(const BenchmarkSpec& spec, const BenchmarkEntry& entry, std::size_t i);

/// Writes trees, ground truths, logs and `manifest.json` under `root`, laid
/// out as `bench/<setup>/<tree>/<size>/<rep>.jsonl`. Returns the manifest.
/// Throws IoError if the directory cannot be written.
std::string gen_benchmark(const BenchmarkSpec& spec, const std::filesystem::path& root);

}  // namespace jm::bench
