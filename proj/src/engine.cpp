#include "crowdcharge/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace crowdcharge {

World init_crowd(Rng& init_rng, Rng& graph_rng, const SimParams& params,
                 const SocialGraph* fixed_graph) {
  World w;
  w.crowd = CrowdState(params.users);
  for (auto& e : w.crowd.energies) e = uniform(init_rng, 0.0, params.max_energy);
  for (auto& l : w.crowd.locations) l = draw_location(init_rng, params);
  if (fixed_graph) {
    if (fixed_graph->users() != params.users) {
      throw std::invalid_argument("init_crowd: social graph size does not match user count");
    }
    w.graph = *fixed_graph;
  } else {
    w.graph = SocialGraph::erdos_renyi(params.users, params.social_p, graph_rng);
  }
  w.histories.resize(params.users);
  return w;
}

MetricsTrace run_simulation(const RunConfig& config, const RunObservers& observers) {
  const SimParams& params = config.params;
  params.validate();
  const std::uint64_t seed = config.effective_seed();
  Rng init_rng = make_stream(seed, StreamPurpose::Init);
  Rng graph_rng = make_stream(seed, StreamPurpose::Graph);
  Rng move_rng = make_stream(seed, StreamPurpose::Movement);

  World world = init_crowd(init_rng, graph_rng, params, config.graph.get());
  CrowdState& crowd = world.crowd;
  const auto strategy = make_strategy(config.strategy);
  const TargetLevel target = target_energy(params.loss, params.max_energy);
  // P_GO is mobility-blind; everything else consults the predictor.
  const bool uses_predictor = config.strategy != StrategyKind::GreedyOptimal &&
                              config.strategy != StrategyKind::FriendTransfer;
  std::vector<Prediction> predictions(params.users);

  MetricsTrace trace;
  trace.method = std::string(strategy->tag());
  trace.initial_total_energy = total_energy(crowd);
  trace.records.reserve(params.iterations);

  for (std::size_t t = 1; t <= params.iterations; ++t) {
    crowd.iteration = t;
    const double arrival = static_cast<double>(t - 1) * params.iteration_minutes;
    step_movement(move_rng, crowd, world.graph, params);
    for (std::size_t i = 0; i < params.users; ++i) {
      world.histories[i].record_visit(crowd.locations[i], arrival, crowd.stays[i]);
    }
    if (uses_predictor) {
      for (std::size_t i = 0; i < params.users; ++i) {
        predictions[i] = predict_next(world.histories[i], params, 0.0, crowd.locations[i]);
      }
    }

    const auto started = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < params.users; ++i) {
      if (crowd.states[i] == BalanceState::Incomplete &&
          std::abs(crowd.energies[i] - target.absolute) <= params.balance_tolerance) {
        crowd.states[i] = BalanceState::Complete;
      }
    }
    const IterationStats stats =
        run_iteration(*strategy, crowd, world.histories, world.graph,
                      uses_predictor ? std::span<const Prediction>(predictions)
                                     : std::span<const Prediction>(),
                      params, observers.meeting);
    const auto wall = std::chrono::steady_clock::now() - started;

    std::fill(crowd.elapsed.begin(), crowd.elapsed.end(), 0.0);
    trace.records.push_back(iteration_metrics(
        crowd, t, stats.meetings, stats.transmitted,
        std::chrono::duration_cast<std::chrono::nanoseconds>(wall)));
    if (observers.iteration) observers.iteration(t, world);
  }
  return trace;
}

std::vector<MetricsTrace> run_repetitions(const RunConfig& config, std::size_t reps,
                                          std::size_t threads) {
  if (reps == 0) throw std::invalid_argument("run_repetitions: need at least one repetition");
  std::vector<MetricsTrace> out(reps);
  auto run_one = [&](std::size_t r) {
    RunConfig c = config;
    c.repetition = r;
    out[r] = run_simulation(c);
  };

  threads = std::clamp<std::size_t>(threads, 1, reps);
  if (threads == 1) {
    for (std::size_t r = 0; r < reps; ++r) run_one(r);
    return out;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t r = next++; r < reps && !failed; r = next++) {
        try {
          run_one(r);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
  return out;
}

MetricsTrace run_experiment(const RunConfig& config, std::size_t reps, std::size_t threads) {
  const auto traces = run_repetitions(config, reps, threads);
  return aggregate(traces);
}

}  // namespace crowdcharge
