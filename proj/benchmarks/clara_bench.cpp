#include <benchmark/benchmark.h>

#include <random>

#include "clara/analytics/records.hpp"
#include "clara/analytics/stats.hpp"
#include "clara/flows/bundle.hpp"
#include "clara/nvb/annotator.hpp"
#include "clara/script/parser.hpp"
#include "clara/script/validator.hpp"

using namespace clara;

namespace {

const flows::Bundle& bundle() {
  static const flows::Bundle b = flows::load_bundle(CLARA_BENCH_BUNDLE_DIR);
  return b;
}

std::vector<std::size_t> walk(const engine::Engine& eng, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> out;
  auto s = eng.start_session(Audience::parent, {{"child_name", "Sam"}}, seed);
  while (!s.finished && out.size() < 400) {
    auto n = eng.current_step(s).choices.size();
    out.push_back(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
    s = eng.advance(s, out.back());
  }
  return out;
}

}  // namespace

static void BM_ParseParentScript(benchmark::State& state) {
  const auto dir = bundle().dir;
  const auto text = flows::read_file(dir / "parent.clara");
  auto resolver = flows::directory_resolver(dir);
  for (auto _ : state) benchmark::DoNotOptimize(script::parse_script(text, resolver));
}
BENCHMARK(BM_ParseParentScript);

static void BM_ValidateParentScript(benchmark::State& state) {
  const auto& b = bundle();
  auto opts = b.validation_options(Audience::parent);
  for (auto _ : state) benchmark::DoNotOptimize(script::validate_script(*b.parent, opts));
}
BENCHMARK(BM_ValidateParentScript);

static void BM_ReplayParentSession(benchmark::State& state) {
  auto eng = bundle().engine_for(Audience::parent);
  auto choices = walk(eng, 11);
  for (auto _ : state)
    benchmark::DoNotOptimize(eng.replay(Audience::parent, {{"child_name", "Sam"}}, 11, choices));
  state.counters["steps"] = double(choices.size());
}
BENCHMARK(BM_ReplayParentSession);

static void BM_Annotate(benchmark::State& state) {
  std::string text;
  for (int i = 0; i < state.range(0); ++i) text += i % 7 == 3 ? "but " : "vaccine ";
  std::vector<std::size_t> hints{1, 5};
  for (auto _ : state) benchmark::DoNotOptimize(nvb::annotate(text, hints, nvb::DiscourseRole::contrast));
}
BENCHMARK(BM_Annotate)->Arg(8)->Arg(64);

static void BM_StudentTP(benchmark::State& state) {
  double t = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(analytics::student_t_two_sided_p(t, 16));
    t = t > 5 ? 0.1 : t + 0.37;
  }
}
BENCHMARK(BM_StudentTP);

static void BM_ComputeDeltas(benchmark::State& state) {
  std::mt19937_64 rng(5);
  std::map<std::string, analytics::ParticipantScores> pre, post;
  std::map<std::string, analytics::ArmAssignment> arms;
  for (int i = 0; i < state.range(0); ++i) {
    auto id = "P" + std::to_string(i);
    arms[id] = {id, "D" + std::to_string(i / 2), kAllArms[i % 3], analytics::kAllRespondents[i % 2]};
    for (auto m : analytics::kAllMeasures) {
      pre[id].set(m, double(rng() % 11));
      post[id].set(m, double(rng() % 11));
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(analytics::compute_deltas(pre, post, arms));
}
BENCHMARK(BM_ComputeDeltas)->Arg(50)->Arg(1000);

BENCHMARK_MAIN();
