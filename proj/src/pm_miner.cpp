#include "jm/pm_miner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "jm/error.hpp"

namespace jm::pm {
namespace {

// Key of one projected trace: event ids in canonical order.
using Key = std::vector<std::uint32_t>;

struct KeyHash {
  std::size_t operator()(const Key& k) const noexcept {
    std::size_t h = 0x9e3779b97f4a7c15ULL ^ k.size();
    for (auto v : k) h = (h ^ v) * 0x100000001b3ULL + (h >> 29);
    return h;
  }
};

template <typename T>
std::vector<T> project(const StateRepresentation& r, std::span<const T> trace) {
  const std::size_t n = std::min(r.k, trace.size());
  const auto window = r.window == Window::head ? trace.first(n) : trace.last(n);
  std::vector<T> out(window.begin(), window.end());
  if (r.structure != Structure::list) std::sort(out.begin(), out.end());
  if (r.structure == Structure::set) out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

template <typename Range>
std::string render(Structure s, const Range& items) {
  std::string out = s == Structure::list ? "[" : s == Structure::set ? "{" : "{|";
  bool first = true;
  for (const auto& item : items) {
    if (!first) out += ',';
    out += item;
    first = false;
  }
  return out + (s == Structure::list ? "]" : s == Structure::set ? "}" : "|}");
}

int structure_rank(Structure s) {
  switch (s) {
    case Structure::set: return 0;
    case Structure::multiset: return 1;
    case Structure::list: return 2;
  }
  return 3;
}

std::uint64_t isqrt(std::uint64_t x) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(x)));
  while (r * r > x) --r;
  while ((r + 1) * (r + 1) <= x) ++r;
  return r;
}

}  // namespace

std::string notation(const StateRepresentation& r) {
  const char w = r.window == Window::head ? 'h' : 't';
  std::string core(1, w);
  switch (r.structure) {
    case Structure::list: core = "[" + core + "]"; break;
    case Structure::set: core = "{" + core + "}"; break;
    case Structure::multiset: core = "{|" + core + "|}"; break;
  }
  return core + std::to_string(r.k);
}

StateRepresentation parse_notation(std::string_view text) {
  StateRepresentation r;
  std::string_view head;
  if (text.starts_with("{|")) {
    r.structure = Structure::multiset;
    head = text.substr(2);
    if (head.size() < 3 || head.substr(1, 2) != "|}") throw std::invalid_argument("bad representation");
    text = head.substr(3);
  } else if (text.starts_with("{") || text.starts_with("[")) {
    r.structure = text[0] == '{' ? Structure::set : Structure::list;
    head = text.substr(1);
    const char close = text[0] == '{' ? '}' : ']';
    if (head.size() < 2 || head[1] != close) throw std::invalid_argument("bad representation");
    text = head.substr(2);
  } else {
    throw std::invalid_argument("bad representation: " + std::string(text));
  }
  if (head[0] == 'h') r.window = Window::head;
  else if (head[0] == 't') r.window = Window::tail;
  else throw std::invalid_argument("bad representation window");
  if (text.empty() || !std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; }))
    throw std::invalid_argument("bad representation length");
  r.k = std::stoul(std::string(text));
  return r;
}

std::string represent(const StateRepresentation& r, std::span<const std::string> trace) {
  return render(r.structure, project(r, trace));
}

TransitionSystem build_dfs(const EventLog& log, const StateRepresentation& prefix,
                           const StateRepresentation& suffix) {
  if (log.empty()) throw EmptyLogError("build_dfs: empty log");
  const auto& alphabet = log.alphabet();
  auto id_of = [&](const std::string& ev) {
    return static_cast<std::uint32_t>(std::lower_bound(alphabet.begin(), alphabet.end(), ev) - alphabet.begin());
  };

  TransitionSystem::Builder b;
  std::unordered_map<Key, StateId, KeyHash> states;
  constexpr std::uint32_t kSeparator = UINT32_MAX;
  auto state_at = [&](std::span<const std::uint32_t> ids, std::size_t k) {
    Key key = project(prefix, ids.first(k));
    const std::size_t split = key.size();
    key.push_back(kSeparator);
    const Key tail = project(suffix, ids.subspan(k));
    key.insert(key.end(), tail.begin(), tail.end());
    const auto [it, inserted] = states.try_emplace(std::move(key), 0);
    if (inserted) {
      auto names = [&](auto first, auto last) {
        std::vector<std::string> v;
        for (; first != last; ++first) v.push_back(alphabet[*first]);
        return v;
      };
      const auto& k2 = it->first;
      const std::string label = "(" + render(prefix.structure, names(k2.begin(), k2.begin() + split)) + " | " +
                                render(suffix.structure, names(k2.begin() + split + 1, k2.end())) + ")";
      it->second = b.add_state(label);
    }
    return it->second;
  };

  std::vector<std::uint32_t> ids;
  for (const auto& [trace, n] : log.variants()) {
    ids.clear();
    for (const auto& ev : trace) ids.push_back(id_of(ev));
    StateId current = state_at(ids, 0);
    b.mark_initial(current);
    for (std::size_t k = 0; k < ids.size(); ++k) {
      const StateId next = state_at(ids, k + 1);
      b.add_transition(current, trace[k], next);
      current = next;
    }
    b.mark_final(current);
  }
  return std::move(b).build();
}

bool candidate_precedes(const Candidate& a, const Candidate& b) {
  auto key = [](const Candidate& c) {
    return std::make_tuple(c.prefix.k, c.suffix.k, structure_rank(c.prefix.structure),
                           structure_rank(c.suffix.structure), c.prefix.window, c.suffix.window);
  };
  return key(a) < key(b);
}

std::vector<Candidate> default_grid() {
  std::vector<Candidate> grid;
  for (std::size_t p = 1; p <= 4; ++p)
    for (Structure s : {Structure::set, Structure::multiset, Structure::list})
      for (std::size_t q = 0; q <= 3; ++q)
        grid.push_back({{Window::tail, p, s}, head_list(q)});
  std::sort(grid.begin(), grid.end(), candidate_precedes);
  return grid;
}

Selection select_model(const EventLog& log, std::span<const Candidate> grid, std::uint64_t budget) {
  if (grid.empty()) throw std::invalid_argument("select_model: empty candidate grid");
  std::vector<Candidate> order(grid.begin(), grid.end());
  std::stable_sort(order.begin(), order.end(), candidate_precedes);

  Selection sel;
  std::optional<std::size_t> best;
  for (const auto& c : order) {
    TransitionSystem ts = build_dfs(log, c.prefix, c.suffix);
    CandidateScore cs{c, ts.num_states(), std::nullopt, std::nullopt};
    // Only a strictly lower score can win: earlier candidates take ties.
    const std::uint64_t bound = best ? *sel.score : budget;
    if (cs.states < bound) {
      const std::uint64_t cap = isqrt(bound - cs.states - 1) + 1;
      cs.loops = count_loops(ts, cap);
      if (cs.loops) {
        cs.score = static_cast<std::uint64_t>(*cs.loops) * *cs.loops + cs.states;
        best = sel.scored.size();
        sel.model = std::move(ts);
        sel.chosen = c;
        sel.states = cs.states;
        sel.loops = cs.loops;
        sel.score = cs.score;
      }
    }
    sel.scored.push_back(cs);
  }
  if (!best) {
    sel.model = build_dfg(log);
    sel.chosen = dfg_candidate();
    sel.states = sel.model.num_states();
    sel.fallback = true;
  }
  return sel;
}

PmResult mine_pm_uj(const EventLog& log, std::uint64_t budget) {
  if (log.empty()) throw EmptyLogError("mine_pm_uj: empty log");
  if (!has_repeated_labels(log)) return {build_dfg(log), Mode::dfg, dfg_candidate(), false};
  const auto grid = default_grid();
  auto sel = select_model(log, grid, budget);
  return {std::move(sel.model), Mode::uj, sel.chosen, sel.fallback};
}

}  // namespace jm::pm
