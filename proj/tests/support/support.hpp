#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "clara/engine/engine.hpp"
#include "clara/flows/bundle.hpp"

namespace clara::testing {

/// Source-tree bundle, loaded once.
const flows::Bundle& bundle();
std::filesystem::path data_dir();
std::filesystem::path bundle_dir();

/// Timestamps advance one second per call from a fixed origin.
std::function<engine::Clock::time_point()> stepping_clock();

engine::Engine fixture_engine(Audience audience);
engine::Bindings default_bindings(Audience audience);

std::string slurp(const std::filesystem::path& p);

/// Uniformly random legal choices until the session ends or `max_steps` is hit.
std::vector<std::size_t> random_walk(const engine::Engine& eng, Audience audience, std::uint64_t seed,
                                     std::mt19937_64& rng, std::size_t max_steps = 400);

struct Exploration {
  std::size_t nodes = 0;
  std::size_t complete = 0;  // distinct states reaching a non-exit terminal
  std::size_t exits = 0;
  std::set<std::set<std::string>> complete_tag_sets;
  /// Choice sequence reaching each distinct complete tag set.
  std::vector<std::vector<std::size_t>> witnesses;
};

/// Exhaustive search over the session state space. Nodes are identified by
/// position, call stack, variables, fact statuses, game progress and the
/// content tags presented so far, so the search is exact.
Exploration explore(const engine::Engine& eng, Audience audience, const engine::Bindings& bindings);

/// Content tags of every utterance event in `t`.
std::set<std::string> presented_tags(const std::vector<engine::TranscriptEvent>& t);

/// Two-sided Student t p-value by composite Simpson integration of the density.
double t_two_sided_p_oracle(double t, double df);

}  // namespace clara::testing
