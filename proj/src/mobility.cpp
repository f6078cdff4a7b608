#include "crowdcharge/mobility.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

#include <fmt/core.h>

#include "crowdcharge/social.hpp"

namespace crowdcharge {

namespace {

bool matches_at(std::span<const LocationId> seq, std::size_t pos,
                std::span<const LocationId> pattern) {
  return std::equal(pattern.begin(), pattern.end(), seq.begin() + static_cast<std::ptrdiff_t>(pos));
}

// Calls fn(pos) for every start position where context occurs and a
// successor visit exists.
template <typename Fn>
void for_each_successor_match(std::span<const LocationId> seq,
                              std::span<const LocationId> context, Fn&& fn) {
  if (context.empty() || seq.size() <= context.size()) return;
  for (std::size_t pos = 0; pos + context.size() < seq.size(); ++pos) {
    if (matches_at(seq, pos, context)) fn(pos);
  }
}

double mean(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

std::vector<LocationId> visited_locations(std::span<const LocationId> seq) {
  std::vector<LocationId> out(seq.begin(), seq.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

void MobilityHistory::record_visit(LocationId loc, double arrival, double stay) {
  if (!visits_.empty() && !(arrival > visits_.back().arrival)) {
    throw std::invalid_argument(fmt::format(
        "record_visit: arrival {} not after previous arrival {}", arrival, visits_.back().arrival));
  }
  if (stay < 0.0) throw std::invalid_argument("record_visit: negative stay");
  visits_.push_back({loc, arrival, stay});
  sequence_.push_back(loc);
}

LocationContext location_context(const MobilityHistory& history, std::size_t k) {
  const auto seq = history.sequence();
  const std::size_t len = std::min(k, seq.size());
  return {seq.end() - static_cast<std::ptrdiff_t>(len), seq.end()};
}

std::size_t pattern_count(const MobilityHistory& history, std::span<const LocationId> pattern) {
  if (pattern.empty()) throw std::invalid_argument("pattern_count: empty pattern");
  const auto seq = history.sequence();
  if (pattern.size() > seq.size()) return 0;
  std::size_t n = 0;
  for (std::size_t pos = 0; pos + pattern.size() <= seq.size(); ++pos) {
    if (matches_at(seq, pos, pattern)) ++n;
  }
  return n;
}

std::size_t successor_count(const MobilityHistory& history, std::span<const LocationId> context) {
  std::size_t n = 0;
  for_each_successor_match(history.sequence(), context, [&](std::size_t) { ++n; });
  return n;
}

std::optional<double> transition_estimate(const MobilityHistory& history,
                                          std::span<const LocationId> context, LocationId x) {
  const auto seq = history.sequence();
  std::size_t total = 0;
  std::size_t hits = 0;
  for_each_successor_match(seq, context, [&](std::size_t pos) {
    ++total;
    if (seq[pos + context.size()] == x) ++hits;
  });
  if (total == 0) return std::nullopt;
  return static_cast<double>(hits) / static_cast<double>(total);
}

std::vector<double> stay_samples(const MobilityHistory& history,
                                 std::span<const LocationId> context, LocationId x) {
  const auto seq = history.sequence();
  const auto visits = history.visits();
  std::vector<double> out;
  for_each_successor_match(seq, context, [&](std::size_t pos) {
    const std::size_t last = pos + context.size() - 1;
    if (seq[last + 1] == x) out.push_back(visits[last].stay);
  });
  return out;
}

std::optional<double> stay_cdf_estimate(std::span<const double> samples, double elapsed,
                                        double horizon) {
  if (samples.empty()) return std::nullopt;
  std::ptrdiff_t below_end = 0;
  std::ptrdiff_t below_start = 0;
  for (double s : samples) {
    below_end += s < elapsed + horizon;
    below_start += s < elapsed;
  }
  return static_cast<double>(below_end - below_start) / static_cast<double>(samples.size());
}

std::optional<double> stay_cdf_estimate(const MobilityHistory& history,
                                        std::span<const LocationId> context, LocationId x,
                                        double elapsed, double horizon) {
  const auto samples = stay_samples(history, context, x);
  return stay_cdf_estimate(samples, elapsed, horizon);
}

std::optional<double> predict_move_within(const MobilityHistory& history,
                                          std::span<const LocationId> context, LocationId x,
                                          double elapsed, double horizon) {
  const auto transition = transition_estimate(history, context, x);
  if (!transition) return std::nullopt;
  if (*transition == 0.0) return 0.0;
  const auto cdf = stay_cdf_estimate(history, context, x, elapsed, horizon);
  if (!cdf) return std::nullopt;
  return *transition * *cdf;
}

Prediction predict_next(const MobilityHistory& history, const SimParams& params,
                        double elapsed, LocationId current) {
  const double default_stay = 0.5 * (params.stay_min_minutes + params.stay_max_minutes);
  Prediction out;
  if (history.empty()) {
    out.next_location = current;
    out.expected_stay = default_stay;
    return out;
  }

  const auto seq = history.sequence();
  const auto candidates = visited_locations(seq);
  const std::size_t top = std::min(params.markov_order, seq.size());
  for (std::size_t order = top; order >= 1; --order) {
    const LocationContext context = location_context(history, order);
    if (successor_count(history, context) == 0) continue;

    double best = -1.0;
    for (LocationId x : candidates) {
      const double p =
          predict_move_within(history, context, x, elapsed, params.iteration_minutes).value_or(0.0);
      if (p > best) {
        best = p;
        out.next_location = x;
      }
    }
    out.move_within_prob = best;
    out.order = order;
    const auto samples = stay_samples(history, context, out.next_location);
    if (!samples.empty()) {
      out.expected_stay = mean(samples);
    } else {
      std::vector<double> all;
      for (const Visit& v : history.visits()) all.push_back(v.stay);
      out.expected_stay = mean(all);
    }
    return out;
  }

  // Order 0: most frequently visited location.
  std::map<LocationId, std::size_t> counts;
  for (LocationId l : seq) ++counts[l];
  std::size_t best = 0;
  for (const auto& [l, n] : counts) {
    if (n > best) {
      best = n;
      out.next_location = l;
    }
  }
  out.move_within_prob = static_cast<double>(best) / static_cast<double>(seq.size());
  std::vector<double> all;
  for (const Visit& v : history.visits()) all.push_back(v.stay);
  out.expected_stay = mean(all);
  return out;
}

LocationId draw_location(Rng& rng, const SimParams& params) {
  std::uniform_int_distribution<std::size_t> pick(0, params.locations - 1);
  return location(pick(rng));
}

double draw_stay(Rng& rng, std::size_t friends_present, const SimParams& params) {
  double stay = uniform(rng, params.stay_min_minutes, params.stay_max_minutes);
  stay += uniform(rng, 0.0, static_cast<double>(friends_present));
  return std::min(stay, params.iteration_minutes);
}

void step_movement(Rng& rng, CrowdState& crowd, const SocialGraph& graph,
                   const SimParams& params) {
  for (auto& loc : crowd.locations) loc = draw_location(rng, params);
  for (std::size_t i = 0; i < crowd.size(); ++i) {
    std::size_t friends = 0;
    for (UserId f : graph.friends(user(i))) {
      friends += crowd.locations[index(f)] == crowd.locations[i];
    }
    crowd.stays[i] = draw_stay(rng, friends, params);
    crowd.elapsed[i] = 0.0;
  }
}

}  // namespace crowdcharge
