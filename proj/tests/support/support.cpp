#include "support.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

namespace clara::testing {

const flows::Bundle& bundle() {
  static const flows::Bundle b = flows::load_bundle(CLARA_TEST_BUNDLE_DIR);
  return b;
}

std::filesystem::path data_dir() { return CLARA_TEST_DATA_DIR; }
std::filesystem::path bundle_dir() { return CLARA_TEST_BUNDLE_DIR; }

std::function<engine::Clock::time_point()> stepping_clock() {
  auto t = std::make_shared<engine::Clock::time_point>(engine::Clock::time_point(std::chrono::seconds(1714555800)));
  return [t] {
    *t += std::chrono::seconds(1);
    return *t;
  };
}

engine::Engine fixture_engine(Audience audience) { return bundle().engine_for(audience, stepping_clock()); }

engine::Bindings default_bindings(Audience audience) {
  if (audience == Audience::parent) return {{"child_name", "Sam"}};
  return {{"first_name", "Riley"}};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::size_t> random_walk(const engine::Engine& eng, Audience audience, std::uint64_t seed,
                                     std::mt19937_64& rng, std::size_t max_steps) {
  std::vector<std::size_t> choices;
  auto s = eng.start_session(audience, default_bindings(audience), seed);
  while (!s.finished && choices.size() < max_steps) {
    auto n = eng.current_step(s).choices.size();
    std::size_t pick = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    choices.push_back(pick);
    s = eng.advance(s, pick);
  }
  return choices;
}

std::set<std::string> presented_tags(const std::vector<engine::TranscriptEvent>& t) {
  std::set<std::string> out;
  for (const auto& e : t)
    if (e.kind == engine::EventKind::utterance)
      for (const auto& tag : e.payload.at("tags")) out.insert(tag.get<std::string>());
  return out;
}

namespace {

std::string node_key(const engine::SessionState& s, const std::set<std::string>& tags) {
  auto j = engine::to_json(s);
  for (const char* k : {"transcript", "pending", "warnings", "session_id"}) j.erase(k);
  if (j["game"].is_object()) j["game"].erase("attempts");
  j["seen"] = tags;
  return j.dump();
}

struct Frame {
  engine::SessionState state;
  std::set<std::string> tags;
  std::vector<std::size_t> path;
};

}  // namespace

Exploration explore(const engine::Engine& eng, Audience audience, const engine::Bindings& bindings) {
  Exploration out;
  std::unordered_set<std::string> seen;
  std::vector<Frame> stack;
  auto root = eng.start_session(audience, bindings, 7);
  auto root_tags = presented_tags(root.transcript);
  stack.push_back({std::move(root), std::move(root_tags), {}});
  while (!stack.empty()) {
    auto f = std::move(stack.back());
    stack.pop_back();
    if (!seen.insert(node_key(f.state, f.tags)).second) continue;
    ++out.nodes;
    if (f.state.finished) {
      const auto* st = eng.script().find_state(f.state.current);
      if (st && st->exit) {
        ++out.exits;
      } else {
        ++out.complete;
        if (out.complete_tag_sets.insert(f.tags).second) out.witnesses.push_back(f.path);
      }
      continue;
    }
    auto n = eng.current_step(f.state).choices.size();
    for (std::size_t i = 0; i < n; ++i) {
      Frame next{eng.advance(f.state, i), f.tags, f.path};
      next.path.push_back(i);
      for (std::size_t k = f.state.transcript.size(); k < next.state.transcript.size(); ++k) {
        const auto& e = next.state.transcript[k];
        if (e.kind == engine::EventKind::utterance)
          for (const auto& tag : e.payload.at("tags")) next.tags.insert(tag.get<std::string>());
      }
      next.state.transcript.clear();
      stack.push_back(std::move(next));
    }
  }
  return out;
}

double t_two_sided_p_oracle(double t, double df) {
  const double x = std::fabs(t);
  if (x == 0.0) return 1.0;
  const double logc = std::lgamma((df + 1) / 2) - std::lgamma(df / 2) - 0.5 * std::log(df * M_PI);
  auto density = [&](double u) { return std::exp(logc - (df + 1) / 2 * std::log1p(u * u / df)); };
  const int n = 2000;
  const double h = x / n;
  double sum = density(0) + density(x);
  for (int i = 1; i < n; ++i) sum += density(i * h) * (i % 2 ? 4 : 2);
  return 1.0 - 2.0 * (sum * h / 3);
}

}  // namespace clara::testing
