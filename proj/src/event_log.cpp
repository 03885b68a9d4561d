#include "jm/event_log.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include "json.hpp"

#include "jm/error.hpp"

namespace jm {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool valid_label(std::string_view label) { return !trim(label).empty(); }

// RFC-4180 record splitter. Quoted fields may contain separators, doubled
// quotes and line breaks; `line` is advanced past embedded newlines.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line) {
  fields.clear();
  std::string field;
  bool quoted = false;
  bool any = false;
  bool after_quote = false;
  for (int c = in.get(); c != EOF; c = in.get()) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          field.push_back('"');
          in.get();
        } else {
          quoted = false;
          after_quote = true;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(static_cast<char>(c));
      }
      continue;
    }
    if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      after_quote = false;
    } else if (c == '\n') {
      ++line;
      fields.push_back(std::move(field));
      return true;
    } else if (c == '\r') {
      // tolerated before \n
    } else if (c == '"' && field.empty() && !after_quote) {
      quoted = true;
    } else {
      if (after_quote) throw ParseError(line, "characters after closing quote");
      field.push_back(static_cast<char>(c));
    }
  }
  if (quoted) throw ParseError(line, "unterminated quoted field");
  if (!any) return false;
  fields.push_back(std::move(field));
  ++line;
  return true;
}

std::optional<double> as_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

struct Row {
  std::string timestamp;
  std::size_t order;
  std::string event;
};

// Orders each case by timestamp, then input order. Numeric timestamps
// compare as numbers; otherwise as strings (ISO-8601 sorts correctly).
std::vector<Trace> group_cases(std::vector<std::pair<std::string, std::vector<Row>>> cases) {
  bool numeric = true;
  for (const auto& [id, rows] : cases)
    for (const auto& r : rows)
      if (!as_number(r.timestamp)) numeric = false;
  std::vector<Trace> traces;
  traces.reserve(cases.size());
  for (auto& [id, rows] : cases) {
    std::stable_sort(rows.begin(), rows.end(), [numeric](const Row& a, const Row& b) {
      if (numeric) return *as_number(a.timestamp) < *as_number(b.timestamp);
      return a.timestamp < b.timestamp;
    });
    Trace t;
    t.reserve(rows.size());
    for (auto& r : rows) t.push_back(std::move(r.event));
    traces.push_back(std::move(t));
  }
  return traces;
}

EventLog parse_csv(std::istream& in) {
  std::size_t line = 1;
  std::vector<std::string> fields;
  if (!read_csv_record(in, fields, line)) throw EmptyLogError("empty source");
  std::optional<std::size_t> case_col, event_col, time_col;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const auto name = trim(fields[i]);
    if (name == "case_id") case_col = i;
    else if (name == "event") event_col = i;
    else if (name == "timestamp") time_col = i;
  }
  if (!case_col) throw ParseError(1, "missing case_id column");
  if (!event_col) throw ParseError(1, "missing event column");
  const std::size_t needed = std::max({*case_col, *event_col, time_col.value_or(0)}) + 1;

  std::vector<std::pair<std::string, std::vector<Row>>> cases;
  std::unordered_map<std::string, std::size_t> index;
  std::size_t order = 0;
  for (;;) {
    const std::size_t start = line;
    if (!read_csv_record(in, fields, line)) break;
    if (fields.size() == 1 && trim(fields[0]).empty()) continue;  // blank line
    if (fields.size() < needed)
      throw ParseError(start, "expected " + std::to_string(needed) + " fields, got " +
                                  std::to_string(fields.size()));
    const std::string event{trim(fields[*event_col])};
    if (event.empty()) throw ParseError(start, "empty event label");
    const std::string id{trim(fields[*case_col])};
    auto [it, inserted] = index.try_emplace(id, cases.size());
    if (inserted) cases.emplace_back(id, std::vector<Row>{});
    cases[it->second].second.push_back(
        Row{time_col ? std::string(trim(fields[*time_col])) : std::string(), order++, event});
  }
  if (cases.empty()) throw EmptyLogError("no events in source");
  const auto traces = group_cases(std::move(cases));
  return EventLog(traces);
}

EventLog parse_jsonl(std::istream& in) {
  EventLog::VariantMap variants;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (trim(text).empty()) continue;
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(line, e.what());
    }
    if (!doc.is_object() || !doc.contains("trace") || !doc["trace"].is_array())
      throw ParseError(line, "expected an object with a \"trace\" array");
    Trace trace;
    for (const auto& ev : doc["trace"]) {
      if (!ev.is_string() || !valid_label(ev.get_ref<const std::string&>()))
        throw ParseError(line, "trace entries must be nonempty strings");
      trace.push_back(ev.get<std::string>());
    }
    std::size_t count = 1;
    if (doc.contains("count")) {
      if (!doc["count"].is_number_unsigned() || doc["count"].get<std::size_t>() == 0)
        throw ParseError(line, "count must be a positive integer");
      count = doc["count"].get<std::size_t>();
    }
    variants[std::move(trace)] += count;
  }
  if (variants.empty()) throw EmptyLogError("no traces in source");
  return EventLog(std::move(variants));
}

std::string xes_attribute(const boost::property_tree::ptree& element, std::string_view key) {
  for (const auto& [tag, child] : element) {
    if (tag == "<xmlattr>") continue;
    const auto k = child.get_optional<std::string>("<xmlattr>.key");
    if (k && *k == key) return child.get<std::string>("<xmlattr>.value", "");
  }
  return {};
}

EventLog parse_xes(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree doc;
  try {
    pt::read_xml(in, doc);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError(e.line(), e.message());
  }
  const auto log = doc.get_child_optional("log");
  if (!log) throw ParseError(0, "missing <log> element");
  std::vector<std::pair<std::string, std::vector<Row>>> cases;
  for (const auto& [tag, trace] : *log) {
    if (tag != "trace") continue;
    std::vector<Row> rows;
    for (const auto& [etag, event] : trace) {
      if (etag != "event") continue;
      std::string name = xes_attribute(event, "concept:name");
      if (!valid_label(name)) throw ParseError(0, "event without concept:name");
      rows.push_back(Row{xes_attribute(event, "time:timestamp"), rows.size(), std::move(name)});
    }
    cases.emplace_back(std::to_string(cases.size()), std::move(rows));
  }
  if (cases.empty()) throw EmptyLogError("no traces in source");
  return EventLog(group_cases(std::move(cases)));
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

std::string format_trace(std::span<const std::string> trace) {
  std::string out = "<";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (i) out += ", ";
    out += trace[i];
  }
  return out + ">";
}

EventLog::EventLog(std::span<const Trace> traces) {
  VariantMap v;
  for (const auto& t : traces) ++v[t];
  *this = EventLog(std::move(v));
}

EventLog::EventLog(VariantMap variants) {
  std::set<std::string> labels;
  for (auto it = variants.begin(); it != variants.end();) {
    if (it->second == 0) {
      it = variants.erase(it);
      continue;
    }
    for (const auto& ev : it->first) {
      if (!valid_label(ev)) throw std::invalid_argument("event labels must be nonempty");
      labels.insert(ev);
    }
    size_ += it->second;
    ++it;
  }
  variants_ = std::move(variants);
  alphabet_.assign(labels.begin(), labels.end());
}

std::size_t EventLog::multiplicity(const Trace& trace) const {
  const auto it = variants_.find(trace);
  return it == variants_.end() ? 0 : it->second;
}

std::vector<Trace> EventLog::expanded() const {
  std::vector<Trace> out;
  out.reserve(size_);
  for (const auto& [t, n] : variants_) out.insert(out.end(), n, t);
  return out;
}

LogStats log_stats(const EventLog& log) {
  LogStats s;
  s.size = log.size();
  s.variants = log.variants().size();
  s.alphabet_size = log.alphabet().size();
  for (const auto& [t, n] : log.variants()) s.total_events += t.size() * n;
  return s;
}

LogFormat parse_log_format(std::string_view name) {
  if (name == "csv") return LogFormat::csv;
  if (name == "jsonl") return LogFormat::jsonl;
  if (name == "xes") return LogFormat::xes;
  throw std::invalid_argument("unknown log format: " + std::string(name));
}

LogFormat log_format_from_path(std::string_view path) {
  auto ends_with = [&](std::string_view ext) {
    return path.size() >= ext.size() && path.substr(path.size() - ext.size()) == ext;
  };
  if (ends_with(".jsonl")) return LogFormat::jsonl;
  if (ends_with(".xes")) return LogFormat::xes;
  return LogFormat::csv;
}

EventLog parse_log(std::istream& source, LogFormat format) {
  switch (format) {
    case LogFormat::csv: return parse_csv(source);
    case LogFormat::jsonl: return parse_jsonl(source);
    case LogFormat::xes: return parse_xes(source);
  }
  throw std::invalid_argument("unknown log format");
}

EventLog parse_log(std::string_view text, LogFormat format) {
  std::istringstream in{std::string(text)};
  return parse_log(in, format);
}

EventLog read_log_file(const std::string& path, LogFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return parse_log(in, format);
}

std::string write_csv(const EventLog& log) {
  std::string out = "case_id,event\n";
  std::size_t case_no = 0;
  for (const auto& [trace, n] : log.variants())
    for (std::size_t i = 0; i < n; ++i) {
      const std::string id = "c" + std::to_string(++case_no);
      for (const auto& ev : trace) out += id + "," + csv_field(ev) + "\n";
    }
  return out;
}

std::string write_jsonl(const EventLog& log) {
  std::string out;
  for (const auto& [trace, n] : log.variants()) {
    nlohmann::json line = {{"trace", trace}, {"count", n}};
    out += line.dump() + "\n";
  }
  return out;
}

EventLog preprocess(const EventLog& log, PreprocessOptions options) {
  EventLog::VariantMap out;
  for (const auto& [trace, n] : log.variants()) {
    if (options.remove_singletons && n == 1) continue;
    if (!options.enumerate_duplicates) {
      out.emplace(trace, n);
      continue;
    }
    std::map<std::string, std::size_t> seen;
    Trace relabeled;
    relabeled.reserve(trace.size());
    for (const auto& ev : trace) relabeled.push_back(ev + " " + std::to_string(++seen[ev]));
    out[std::move(relabeled)] += n;
  }
  if (out.empty()) throw EmptyLogError("no traces left after preprocessing");
  return EventLog(std::move(out));
}

Trace strip_enumeration(const Trace& trace) {
  Trace out;
  out.reserve(trace.size());
  for (const auto& ev : trace) {
    const auto space = ev.rfind(' ');
    out.push_back(space == std::string::npos ? ev : ev.substr(0, space));
  }
  return out;
}

bool has_repeated_labels(const EventLog& log) {
  for (const auto& [trace, n] : log.variants()) {
    std::set<std::string_view> seen;
    for (const auto& ev : trace)
      if (!seen.insert(ev).second) return true;
  }
  return false;
}

}  // namespace jm
