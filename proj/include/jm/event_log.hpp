#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace jm {

/// A trace is a finite sequence of event labels; duplicates are allowed.
using Trace = std::vector<std::string>;

/// Renders a trace as `<a, b, c>` for diagnostics and reports.
std::string format_trace(std::span<const std::string> trace);

/// A multiset of traces over a finite alphabet.
///
/// Variants are kept in a sorted map, so iteration order (and every
/// algorithm built on it) is deterministic. A log is immutable once built.
class EventLog {
 public:
  using VariantMap = std::map<Trace, std::size_t>;

  EventLog() = default;
  /// Each trace counts once; repeated traces accumulate multiplicity.
  explicit EventLog(std::span<const Trace> traces);
  /// Entries with multiplicity zero are dropped. Throws std::invalid_argument
  /// on labels that are empty after trimming.
  explicit EventLog(VariantMap variants);

  const VariantMap& variants() const noexcept { return variants_; }
  /// Sorted set of labels occurring in the traces.
  const std::vector<std::string>& alphabet() const noexcept { return alphabet_; }

  /// |L|, counting multiplicity.
  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }
  std::size_t multiplicity(const Trace& trace) const;

  /// All traces with multiplicity expanded, in variant order.
  std::vector<Trace> expanded() const;

  friend bool operator==(const EventLog&, const EventLog&) = default;

 private:
  VariantMap variants_;
  std::vector<std::string> alphabet_;
  std::size_t size_ = 0;
};

struct LogStats {
  std::size_t size = 0;           // |L|
  std::size_t variants = 0;       // var(L)
  std::size_t alphabet_size = 0;  // |A|
  std::size_t total_events = 0;   // N

  friend bool operator==(const LogStats&, const LogStats&) = default;
};

LogStats log_stats(const EventLog& log);

enum class LogFormat { csv, jsonl, xes };

/// Parses `csv`, `jsonl`, `xes`; throws std::invalid_argument otherwise.
LogFormat parse_log_format(std::string_view name);
/// Guesses the format from a file extension, defaulting to csv.
LogFormat log_format_from_path(std::string_view path);

/// Reads a log. CSV needs a header with `case_id` and `event` columns and an
/// optional `timestamp` column; events of a case are ordered by timestamp,
/// then input order. JSON-lines holds one `{"trace": [...], "count": n}` per
/// line. XES reads `concept:name` of every event inside every trace.
///
/// Throws ParseError (with the 1-based line) on malformed input and
/// EmptyLogError when the source holds no traces.
EventLog parse_log(std::istream& source, LogFormat format);
EventLog parse_log(std::string_view text, LogFormat format);
EventLog read_log_file(const std::string& path, LogFormat format);

/// CSV with generated case ids `c1, c2, ...` and no timestamp column.
std::string write_csv(const EventLog& log);
/// One line per variant, with its multiplicity as `count`.
std::string write_jsonl(const EventLog& log);

struct PreprocessOptions {
  bool remove_singletons = false;
  bool enumerate_duplicates = false;
};

/// Drops traces of multiplicity one, then relabels the k-th occurrence of a
/// label x within each trace to "x k". Throws EmptyLogError if nothing
/// survives the filter.
EventLog preprocess(const EventLog& log, PreprocessOptions options);

/// Inverse of duplicate enumeration on a single trace: strips the " k" suffix.
Trace strip_enumeration(const Trace& trace);

/// True if some trace of the log repeats a label.
bool has_repeated_labels(const EventLog& log);

}  // namespace jm
