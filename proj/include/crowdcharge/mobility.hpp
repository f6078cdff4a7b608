#pragma once

// Ground-truth movement of users between locations and the order-k Markov
// predictor (with fallback to shorter contexts) used to anticipate where a
// user goes next and how long the user stays.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "crowdcharge/model.hpp"
#include "crowdcharge/rng.hpp"

namespace crowdcharge {

class SocialGraph;

struct Visit {
  LocationId location;
  double arrival;  // minutes since the start of the run
  double stay;     // minutes
};

class MobilityHistory {
 public:
  // Throws std::invalid_argument if arrival does not strictly increase or
  // the stay is negative.
  void record_visit(LocationId loc, double arrival, double stay);

  std::span<const Visit> visits() const { return visits_; }
  std::span<const LocationId> sequence() const { return sequence_; }
  std::size_t size() const { return visits_.size(); }
  bool empty() const { return visits_.empty(); }

 private:
  std::vector<Visit> visits_;
  std::vector<LocationId> sequence_;
};

// The most recent min(k, |history|) locations, oldest first.
using LocationContext = std::vector<LocationId>;

LocationContext location_context(const MobilityHistory& history, std::size_t k);

// Overlapping occurrences of pattern in the visited-location sequence.
std::size_t pattern_count(const MobilityHistory& history, std::span<const LocationId> pattern);

// Occurrences of context that are followed by at least one more visit.
std::size_t successor_count(const MobilityHistory& history, std::span<const LocationId> context);

// N(context x) / N(context followed by anything); nullopt when the context
// never appears with a successor.
std::optional<double> transition_estimate(const MobilityHistory& history,
                                          std::span<const LocationId> context, LocationId x);

// Stays at the last context position for every occurrence of context x.
std::vector<double> stay_samples(const MobilityHistory& history,
                                 std::span<const LocationId> context, LocationId x);

// Empirical P(elapsed <= s < elapsed + horizon) over the samples.
std::optional<double> stay_cdf_estimate(std::span<const double> samples, double elapsed,
                                        double horizon);
std::optional<double> stay_cdf_estimate(const MobilityHistory& history,
                                        std::span<const LocationId> context, LocationId x,
                                        double elapsed, double horizon);

// Probability of moving to x within the horizon: transition times stay CDF.
std::optional<double> predict_move_within(const MobilityHistory& history,
                                          std::span<const LocationId> context, LocationId x,
                                          double elapsed, double horizon);

struct Prediction {
  LocationId next_location{};
  double move_within_prob = 0.0;
  double expected_stay = 0.0;
  std::size_t order = 0;  // context length that produced the estimate, 0 for frequency
};

// Total function: falls back through shorter contexts, then to the most
// visited location, then to `current` for an empty history. Ties resolve to
// the lowest LocationId.
Prediction predict_next(const MobilityHistory& history, const SimParams& params,
                        double elapsed, LocationId current);

LocationId draw_location(Rng& rng, const SimParams& params);

// Uniform(stay_min, stay_max) plus Uniform(0, friends_present), clamped to
// one iteration.
double draw_stay(Rng& rng, std::size_t friends_present, const SimParams& params);

// Moves every user to a uniformly drawn location, then draws each stay
// given the friends that ended up at the same place. Resets elapsed time.
void step_movement(Rng& rng, CrowdState& crowd, const SocialGraph& graph,
                   const SimParams& params);

}  // namespace crowdcharge
