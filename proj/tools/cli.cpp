#include "cli.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "jm/al_miner.hpp"
#include "jm/benchmark.hpp"
#include "jm/error.hpp"
#include "jm/evaluation.hpp"
#include "jm/event_log.hpp"
#include "jm/experiments.hpp"
#include "jm/hybrid.hpp"
#include "jm/pm_miner.hpp"
#include "jm/transition_system.hpp"

namespace jm::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

// Config files are JSON objects; a subcommand's options live under its name,
// e.g. {"seed": 7, "learn": {"engine": "pm-uj"}}.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    return dump(app, default_also).dump(1);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json j;
    try {
      input >> j;
    } catch (const json::exception& e) {
      throw CLI::ConversionError("config", e.what());
    }
    std::vector<CLI::ConfigItem> items;
    walk(j, {}, items);
    return items;
  }

 private:
  static json dump(const CLI::App* app, bool default_also) {
    json j = json::object();
    for (const CLI::Option* opt : app->get_options()) {
      const std::string name = opt->get_single_name();
      if (name.empty() || name == "help" || opt == app->get_config_ptr()) continue;
      std::vector<std::string> values;
      if (opt->count() > 0) values = opt->as<std::vector<std::string>>();
      else if (default_also && !opt->get_default_str().empty()) values = {opt->get_default_str()};
      else continue;
      if (opt->get_expected_max() == 0) j[name] = opt->count() > 0 ? opt->as<bool>() : values.front() == "true";
      else if (values.size() == 1 && opt->get_expected_max() <= 1) j[name] = values.front();
      else j[name] = values;
    }
    for (const CLI::App* sub : app->get_subcommands()) j[sub->get_name()] = dump(sub, default_also);
    return j;
  }

  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void walk(const json& j, std::vector<std::string> parents, std::vector<CLI::ConfigItem>& items) {
    if (!j.is_object()) throw CLI::ConversionError("config", "expected a JSON object");
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        auto p = parents;
        p.push_back(key);
        walk(value, std::move(p), items);
        continue;
      }
      if (value.is_null()) continue;
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array())
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      else
        item.inputs.push_back(scalar(value));
      items.push_back(std::move(item));
    }
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) throw IoError("sha256 failed");
  std::ostringstream hex;
  for (unsigned i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return hex.str();
}

struct Options {
  std::uint64_t seed = 0;
  std::size_t jobs = 1;

  std::string log, format = "auto", out;
  std::string engine = "hybrid", alpha = "uj";
  std::uint64_t budget = pm::kDefaultBudget;
  bool remove_singletons = false, enumerate_duplicates = false;

  std::string sul, model, model_b, frequency_log;
  std::size_t n_len = 2, n_sigma_floor = 2;
  bool prefix_closed = false;
  bool sweep = false;
  std::vector<std::string> engines;

  std::string frequency = "canonical";
  std::vector<double> proportions{0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::size_t splits = 10;

  bool desk = false, full = false;
  std::size_t trees = 1, reps = 2, alphabet_size = 25, tree_size = 12, loop_cap = 10;
  std::vector<std::size_t> sizes{10, 100, 1000};
  double loop_prob = 0.5;

  bool dot = false;
};

class Record {
 public:
  Record(std::string command, int argc, const char* const* argv)
      : start_(std::chrono::steady_clock::now()) {
    j_["command"] = std::move(command);
    j_["argv"] = std::vector<std::string>(argv, argv + argc);
    j_["inputs"] = json::array();
    j_["outputs"] = json::array();
  }

  void config(const std::string& text, std::uint64_t seed) {
    j_["config"] = json::parse(text);
    j_["seed"] = seed;
  }
  std::string input(const std::string& path) {
    std::string data = read_file(path);
    j_["inputs"].push_back({{"path", path}, {"sha256", sha256_hex(data)}});
    return data;
  }
  void output(const fs::path& path, const std::string& text) {
    write_file(path, text);
    j_["outputs"].push_back(path.string());
  }
  json& operator[](const char* key) { return j_[key]; }

  std::string finish() {
    j_["wall_clock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    return j_.dump(1) + "\n";
  }

 private:
  json j_;
  std::chrono::steady_clock::time_point start_;
};

EventLog load_log(Record& rec, const std::string& path, const std::string& format) {
  const std::string data = rec.input(path);
  const LogFormat fmt = format == "auto" ? log_format_from_path(path) : parse_log_format(format);
  return parse_log(std::string_view(data), fmt);
}

TransitionSystem load_model(Record& rec, const std::string& path) { return from_model_json(rec.input(path)); }

void write_model(Record& rec, const fs::path& dir, const TransitionSystem& ts) {
  rec.output(dir / "model.json", to_model_json(ts) + "\n");
  rec.output(dir / "model.dot", to_dot(ts));
}

int cmd_learn(const Options& o, Record& rec, std::ostream& out) {
  EventLog log = load_log(rec, o.log, o.format);
  if (o.remove_singletons || o.enumerate_duplicates) log = preprocess(log, {o.remove_singletons, o.enumerate_duplicates});
  const fs::path dir = o.out;
  TransitionSystem model;
  if (o.engine == "pm-dfg") {
    model = pm::build_dfg(log);
  } else if (o.engine == "pm-long") {
    const auto c = pm::long_candidate();
    model = pm::build_dfs(log, c.prefix, c.suffix);
  } else if (o.engine == "pm-uj") {
    auto r = pm::mine_pm_uj(log, o.budget);
    rec["representation"] = {{"prefix", pm::notation(r.chosen.prefix)},
                             {"suffix", pm::notation(r.chosen.suffix)},
                             {"fallback", r.fallback}};
    model = std::move(r.model);
  } else if (o.engine == "al") {
    const auto setup = o.alpha == "uj" ? al::AlSetup::uj() : al::AlSetup::fixed(std::stod(o.alpha));
    auto r = al::mine_al(log, setup);
    rec["alpha"] = r.alpha;
    rec.output(dir / "chain.json", al::to_chain_json(r.chain) + "\n");
    model = std::move(r.model);
  } else {
    const auto cfg = hybrid::HybridConfig::for_alphabet(std::max<std::size_t>(1, log.alphabet().size()));
    auto r = hybrid::hybrid_learn(log, cfg);
    const std::string decision = hybrid::to_decision_json(r.decision);
    rec["decision"] = json::parse(decision);
    rec.output(dir / "decision.json", decision + "\n");
    model = std::move(r.model);
  }
  write_model(rec, dir, model);
  out << o.engine << ": " << model.num_states() << " states, " << model.transitions().size() << " transitions\n";
  return 0;
}

bench::BenchmarkSpec bench_spec(const Options& o) {
  bench::BenchmarkSpec s;
  if (o.full) {
    s.seed = o.seed;
  } else if (o.desk) {
    s = bench::BenchmarkSpec::desk(o.seed);
  } else {
    s.seed = o.seed;
    s.trees_per_setup = o.trees;
    s.sizes = o.sizes;
    s.reps = o.reps;
  }
  s.alphabet_size = o.alphabet_size;
  s.tree_size = o.tree_size;
  s.sampling = {o.loop_prob, o.loop_cap};
  return s;
}

int cmd_evaluate(const Options& o, Record& rec, std::ostream& out) {
  const fs::path dir = o.out;
  const eval::TestSuiteConfig cfg{o.n_len, o.n_sigma_floor, o.seed};
  if (o.sweep) {
    std::vector<exp::Engine> engines;
    for (const auto& name : o.engines) {
      const auto e = exp::parse_engine(name);
      if (!e) throw std::invalid_argument("unknown engine: " + name);
      engines.push_back(*e);
    }
    if (engines.empty()) engines = exp::all_engines();
    const auto semantics = o.prefix_closed ? exp::Semantics::prefix_closed : exp::Semantics::as_learned;
    const auto r = exp::sweep(bench_spec(o), engines, cfg, semantics, o.jobs);
    const std::string table = exp::format_sweep_table(r);
    rec.output(dir / "sweep.json", exp::to_sweep_json(r) + "\n");
    rec.output(dir / "sweep.txt", table);
    out << table;
    return 0;
  }
  if (o.sul.empty() || o.model.empty()) throw std::invalid_argument("evaluate needs --sul and --model, or --sweep");
  TransitionSystem sul = load_model(rec, o.sul);
  TransitionSystem model = load_model(rec, o.model);
  if (o.prefix_closed) {
    sul = prefix_closure(sul);
    model = prefix_closure(model);
  }
  auto report = eval::compare(model, sul, cfg);
  if (!o.frequency_log.empty())
    report.avg_transition_frequency = eval::transition_frequency(model, load_log(rec, o.frequency_log, o.format)).average;
  const std::string table = eval::format_report_table(report);
  rec.output(dir / "report.json", eval::to_report_json(report) + "\n");
  rec.output(dir / "report.txt", table);
  out << table;
  return 0;
}

int cmd_replay(const Options& o, Record& rec, std::ostream& out) {
  const fs::path dir = o.out;
  const EventLog log = load_log(rec, o.log, o.format);
  json j;
  if (o.model.empty()) {
    const auto engine = exp::parse_engine(o.engine);
    if (!engine) throw std::invalid_argument("replay trend needs --engine with one of the named setups");
    const auto points = exp::replay_trend(log, o.proportions, o.splits, o.seed, *engine);
    j["engine"] = o.engine;
    j["points"] = json::array();
    for (const auto& p : points) {
      j["points"].push_back({{"train_proportion", p.train_proportion}, {"mean_failed", p.mean_failed}});
      out << std::fixed << std::setprecision(2) << p.train_proportion << "  " << std::setprecision(4) << p.mean_failed
          << '\n';
    }
    rec.output(dir / "trend.json", j.dump(1) + "\n");
    return 0;
  }
  const TransitionSystem model = load_model(rec, o.model);
  const auto r = eval::replay(model, log);
  j["failed_count"] = r.failed_count;
  j["proportion"] = r.proportion;
  j["failed"] = r.failed;
  const auto mode = o.frequency == "exhaustive" ? eval::RunMode::exhaustive : eval::RunMode::canonical;
  const auto freq = eval::transition_frequency(model, log, mode);
  json per = json::array();
  const auto all = model.transitions();
  for (std::size_t i = 0; i < all.size(); ++i)
    per.push_back({{"source", all[i].source},
                   {"event", model.event_label(all[i].event)},
                   {"target", all[i].target},
                   {"count", freq.per_transition[i]}});
  j["transition_frequency"] = {{"mode", o.frequency}, {"average", freq.average}, {"per_transition", per}};
  out << "failed " << r.failed_count << " of " << log.size() << " (" << r.proportion << ")\n";
  if (!o.model_b.empty()) {
    const auto ov = eval::overlap_failures(model, load_model(rec, o.model_b), log);
    j["overlap"] = {{"fail_a", ov.fail_a}, {"fail_b", ov.fail_b}, {"overlap", ov.overlap}};
    out << "fail_a " << ov.fail_a << " fail_b " << ov.fail_b << " overlap " << ov.overlap << '\n';
  }
  rec.output(dir / "replay.json", j.dump(1) + "\n");
  return 0;
}

int cmd_benchmark(const Options& o, Record& rec, std::ostream& out) {
  const auto spec = bench_spec(o);
  const std::string manifest = bench::gen_benchmark(spec, o.out);
  rec["outputs"].push_back((fs::path(o.out) / "manifest.json").string());
  rec["total_logs"] = spec.total_logs();
  (void)manifest;
  out << spec.total_logs() << " logs written to " << o.out << '\n';
  return 0;
}

int cmd_stats(const Options& o, Record& rec, std::ostream& out) {
  const auto s = log_stats(load_log(rec, o.log, o.format));
  out << "size " << s.size << "\nvariants " << s.variants << "\nalphabet " << s.alphabet_size << "\nevents "
      << s.total_events << '\n';
  rec["stats"] = {{"size", s.size}, {"variants", s.variants}, {"alphabet_size", s.alphabet_size},
                  {"total_events", s.total_events}};
  return 0;
}

int cmd_export(const Options& o, Record& rec, std::ostream& out) {
  const TransitionSystem ts = load_model(rec, o.model);
  const std::string text = o.dot ? to_dot(ts) : to_model_json(ts) + "\n";
  if (o.out.empty()) out << text;
  else rec.output(o.out, text);
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Learn transition-system models of user journeys from event logs."};
  app.name("jm");
  app.require_subcommand(1);
  app.fallthrough();
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file with option values; command-line flags take precedence");
  app.add_option("--seed", o.seed, "Master seed")->envname("JM_SEED")->capture_default_str();
  app.add_option("--jobs", o.jobs, "Worker threads for batch commands")->capture_default_str();

  auto log_options = [&](CLI::App* c, bool required) {
    auto* opt = c->add_option("--log", o.log, "Event log (.csv, .jsonl, .xes)");
    if (required) opt->required();
    c->add_option("--format", o.format, "csv, jsonl, xes or auto")->capture_default_str();
  };
  auto bench_options = [&](CLI::App* c) {
    c->add_flag("--desk", o.desk, "14 setups x 1 tree x sizes {10,100,1000} x 2 reps");
    c->add_flag("--full", o.full, "14 setups x 10 trees x 6 sizes x 10 reps");
    c->add_option("--trees", o.trees, "Trees per setup")->capture_default_str();
    c->add_option("--sizes", o.sizes, "Log sizes")->capture_default_str();
    c->add_option("--reps", o.reps, "Logs per tree and size")->capture_default_str();
    c->add_option("--alphabet-size", o.alphabet_size)->capture_default_str();
    c->add_option("--tree-size", o.tree_size, "Leaves per tree")->capture_default_str();
    c->add_option("--loop-prob", o.loop_prob, "Probability of repeating a loop body")->capture_default_str();
    c->add_option("--loop-cap", o.loop_cap, "Maximum executions of a loop body")->capture_default_str();
  };

  auto* learn = app.add_subcommand("learn", "Learn a model from a log");
  log_options(learn, true);
  learn->add_option("--engine", o.engine)
      ->check(CLI::IsMember({"pm-dfg", "pm-long", "pm-uj", "al", "hybrid"}))
      ->capture_default_str();
  learn->add_option("--alpha", o.alpha, "Alergia alpha, or uj for the log-size approximation")->capture_default_str();
  learn->add_option("--budget", o.budget, "Score bound for pm-uj")->capture_default_str();
  learn->add_flag("--remove-singletons", o.remove_singletons);
  learn->add_flag("--enumerate-duplicates", o.enumerate_duplicates);
  learn->add_option("--out", o.out, "Output directory")->required();

  auto* evaluate = app.add_subcommand("evaluate", "Compare a model against a reference, or sweep the benchmark");
  evaluate->add_option("--sul", o.sul, "Reference model JSON");
  evaluate->add_option("--model", o.model, "Learned model JSON");
  evaluate->add_option("--log", o.frequency_log, "Log replayed for the average transition frequency");
  evaluate->add_option("--format", o.format)->capture_default_str();
  evaluate->add_option("--n-len", o.n_len, "Random suffix lengths are drawn from [0, n-len)")->capture_default_str();
  evaluate->add_option("--n-sigma-floor", o.n_sigma_floor)->capture_default_str();
  evaluate->add_flag("--prefix-closed", o.prefix_closed, "Compare with every state of both models final");
  evaluate->add_flag("--sweep", o.sweep, "Score every engine on a generated benchmark");
  evaluate->add_option("--engines", o.engines, "Engines for --sweep (default all)");
  bench_options(evaluate);
  evaluate->add_option("--out", o.out, "Output directory")->required();

  auto* replay = app.add_subcommand("replay", "Replay a log on a model, or measure the held-out replay trend");
  log_options(replay, true);
  replay->add_option("--model", o.model, "Model JSON");
  replay->add_option("--model-b", o.model_b, "Second model for overlapping failures");
  replay->add_option("--frequency", o.frequency)->check(CLI::IsMember({"canonical", "exhaustive"}))->capture_default_str();
  replay->add_option("--engine", o.engine, "Setup for the trend mode, e.g. al-uj");
  replay->add_option("--proportions", o.proportions, "Training proportions")->capture_default_str();
  replay->add_option("--splits", o.splits, "Random splits per proportion")->capture_default_str();
  replay->add_option("--out", o.out, "Output directory")->required();

  auto* benchmark = app.add_subcommand("benchmark", "Generate the synthetic benchmark");
  bench_options(benchmark);
  benchmark->add_option("--out", o.out, "Output directory")->required();

  auto* stats = app.add_subcommand("stats", "Print log statistics");
  log_options(stats, true);

  auto* exportc = app.add_subcommand("export", "Export a model");
  exportc->add_option("--model", o.model, "Model JSON")->required();
  exportc->add_flag("--dot", o.dot, "Graphviz output instead of JSON");
  exportc->add_option("--out", o.out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  CLI::App* cmd = app.get_subcommands().front();
  Record rec(cmd->get_name(), argc, argv);
  try {
    rec.config(app.config_to_str(true, false), o.seed);
    int code = 0;
    if (cmd == learn) code = cmd_learn(o, rec, out);
    else if (cmd == evaluate) code = cmd_evaluate(o, rec, out);
    else if (cmd == replay) code = cmd_replay(o, rec, out);
    else if (cmd == benchmark) code = cmd_benchmark(o, rec, out);
    else if (cmd == stats) code = cmd_stats(o, rec, out);
    else code = cmd_export(o, rec, out);
    const std::string record = rec.finish();
    if (cmd == stats || (cmd == exportc && o.out.empty())) err << record;
    else if (cmd == exportc) write_file(o.out + ".run.json", record);
    else write_file(fs::path(o.out) / "run.json", record);
    return code;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return 1;
  } catch (const EmptyLogError& e) {
    err << "empty log: " << e.what() << '\n';
    return 1;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return 3;
  } catch (const fs::filesystem_error& e) {
    err << "i/o error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace jm::cli
