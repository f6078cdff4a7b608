#pragma once

// One seeded run: movement, prediction refresh, balancing sweep and metrics
// per iteration. Repetitions derive their seeds from the base seed.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "crowdcharge/balancing.hpp"
#include "crowdcharge/metrics.hpp"
#include "crowdcharge/mobility.hpp"
#include "crowdcharge/rng.hpp"
#include "crowdcharge/social.hpp"

namespace crowdcharge {

struct RunConfig {
  SimParams params;
  StrategyKind strategy = StrategyKind::MoSaBa;
  std::size_t repetition = 0;
  // When set, used instead of drawing a random graph.
  std::shared_ptr<const SocialGraph> graph;

  std::uint64_t effective_seed() const { return params.seed + repetition; }
};

struct World {
  CrowdState crowd;
  SocialGraph graph;
  std::vector<MobilityHistory> histories;
};

struct RunObservers {
  MeetingObserver meeting;
  // Called after the metrics of an iteration are recorded.
  std::function<void(std::size_t iteration, const World&)> iteration;
};

// Energies uniform on [0, max_energy], locations uniform, empty histories,
// everyone Incomplete. The graph comes from graph_rng unless fixed_graph is
// given.
World init_crowd(Rng& init_rng, Rng& graph_rng, const SimParams& params,
                 const SocialGraph* fixed_graph = nullptr);

MetricsTrace run_simulation(const RunConfig& config, const RunObservers& observers = {});

// Runs repetitions 0..reps-1 (seed = base seed + repetition) on up to
// `threads` workers. The result is ordered by repetition.
std::vector<MetricsTrace> run_repetitions(const RunConfig& config, std::size_t reps,
                                          std::size_t threads = 1);

// Per-iteration means over the repetitions.
MetricsTrace run_experiment(const RunConfig& config, std::size_t reps, std::size_t threads = 1);

}  // namespace crowdcharge
