#include "crowdcharge/balancing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <utility>

#include <fmt/core.h>

#include "crowdcharge/benchmarks.hpp"

namespace crowdcharge {

namespace {

bool available(BalanceState s, bool allow_busy) {
  return s == BalanceState::Incomplete || (allow_busy && s == BalanceState::Busy);
}

BalanceState settle(double energy, const TargetLevel& target, double tolerance) {
  return std::abs(energy - target.absolute) <= tolerance ? BalanceState::Complete
                                                         : BalanceState::Incomplete;
}

// Lowest score wins; candidates arrive in ascending id order so the first
// minimum is the lowest id.
template <typename Score>
std::optional<UserId> argmin(std::span<const UserId> candidates, Score&& score) {
  std::optional<UserId> best;
  double best_score = std::numeric_limits<double>::infinity();
  for (UserId j : candidates) {
    const double s = score(j);
    if (!best || s < best_score) {
      best = j;
      best_score = s;
    }
  }
  return best;
}

// Energy terms of the selectivity score for candidate j relative to seed i.
std::pair<double, double> energy_terms(const CrowdState& crowd, UserId i, UserId j,
                                       const TargetLevel& target) {
  if (crowd.energy(i) > target.absolute) return {target.absolute, crowd.energy(j)};
  return {crowd.energy(j), target.absolute};
}

class MoSaBaMobility final : public Strategy {
 public:
  StrategyKind kind() const override { return StrategyKind::MoSaBaMobility; }
  std::optional<UserId> choose(const SelectionContext& ctx, UserId,
                               std::span<const UserId> candidates) const override {
    return pair_mobility(ctx.crowd, ctx.target, candidates);
  }
};

class MoSaBaSocialContext final : public Strategy {
 public:
  StrategyKind kind() const override { return StrategyKind::MoSaBaSocialContext; }
  std::optional<UserId> choose(const SelectionContext& ctx, UserId seed,
                               std::span<const UserId> candidates) const override {
    return pair_social_context(ctx.crowd, seed, candidates, ctx.histories,
                               ctx.params.weights, ctx.target, ctx.params.max_energy);
  }
};

class MoSaBaFull final : public Strategy {
 public:
  StrategyKind kind() const override { return StrategyKind::MoSaBa; }
  std::optional<UserId> choose(const SelectionContext& ctx, UserId seed,
                               std::span<const UserId> candidates) const override {
    return pair_social_relations(ctx.crowd, seed, candidates, ctx.histories, ctx.graph,
                                 ctx.params.weights, ctx.target, ctx.params.max_energy);
  }
};

constexpr std::pair<StrategyKind, std::string_view> kTags[] = {
    {StrategyKind::MoSaBa, "mosaba"},
    {StrategyKind::MoSaBaSocialContext, "mosaba-sc"},
    {StrategyKind::MoSaBaMobility, "mosaba-mob"},
    {StrategyKind::MobiWeb, "mobiweb"},
    {StrategyKind::GreedyOptimal, "pgo"},
    {StrategyKind::FriendTransfer, "pft"},
};

}  // namespace

std::string_view strategy_tag(StrategyKind kind) {
  for (const auto& [k, tag] : kTags) {
    if (k == kind) return tag;
  }
  return "unknown";
}

std::optional<StrategyKind> parse_strategy_tag(std::string_view tag) {
  for (const auto& [k, t] : kTags) {
    if (t == tag) return k;
  }
  return std::nullopt;
}

std::unique_ptr<Strategy> make_strategy(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::MoSaBa:
      return std::make_unique<MoSaBaFull>();
    case StrategyKind::MoSaBaSocialContext:
      return std::make_unique<MoSaBaSocialContext>();
    case StrategyKind::MoSaBaMobility:
      return std::make_unique<MoSaBaMobility>();
    case StrategyKind::MobiWeb:
      return std::make_unique<MobiWebStrategy>();
    case StrategyKind::GreedyOptimal:
      return std::make_unique<GreedyOptimalStrategy>();
    case StrategyKind::FriendTransfer:
      return std::make_unique<FriendTransferStrategy>();
  }
  throw std::invalid_argument("make_strategy: unknown strategy");
}

TargetLevel target_energy(double loss, double max_energy) {
  if (!(loss >= 0.0 && loss < 1.0)) {
    throw std::domain_error(fmt::format("target_energy: loss {} outside [0, 1)", loss));
  }
  // Same closed form rewritten without the 0/0 at loss = 0:
  // (sqrt(1-b) - (1-b)) / b == sqrt(1-b) / (1 + sqrt(1-b)).
  const double root = std::sqrt(1.0 - loss);
  const double normalized = root / (1.0 + root);
  return {normalized, normalized * max_energy};
}

bool opposite_sides(double a, double b, const TargetLevel& target) {
  return (a - target.absolute) * (b - target.absolute) < 0.0;
}

std::vector<UserId> Strategy::candidates(const SelectionContext& ctx, UserId seed,
                                         bool allow_busy) const {
  auto out = candidate_neighbors(ctx.crowd, seed, ctx.params, ctx.target, allow_busy);
  if (ctx.predictions.empty()) return out;
  // Mobility-aware strategies also require the predictor to expect both
  // users to stay long enough for a transfer.
  const double seed_stay = ctx.predictions[index(seed)].expected_stay;
  std::erase_if(out, [&](UserId j) {
    return std::min(seed_stay, ctx.predictions[index(j)].expected_stay) <
           ctx.params.min_contact_minutes;
  });
  return out;
}

ExchangeOutcome Strategy::exchange(CrowdState& crowd, UserId tx, UserId rx, double s1,
                                   double s2, const SimParams& params,
                                   const TargetLevel& target) const {
  return p2p_energy_balance(crowd, tx, rx, s1, s2, params, target);
}

std::optional<UserId> select_seed(const CrowdState& crowd, const TargetLevel& target,
                                  std::span<const std::uint8_t> skip) {
  std::optional<UserId> best;
  double best_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < crowd.size(); ++i) {
    if (crowd.states[i] != BalanceState::Incomplete) continue;
    if (!skip.empty() && skip[i]) continue;
    const double gap = std::abs(target.absolute - crowd.energies[i]);
    if (gap < best_gap) {
      best_gap = gap;
      best = user(i);
    }
  }
  return best;
}

std::vector<UserId> candidate_neighbors(const CrowdState& crowd, UserId i,
                                        const SimParams& params, const TargetLevel& target,
                                        bool allow_busy) {
  std::vector<UserId> out;
  const double mine = crowd.energy(i);
  for (std::size_t j = 0; j < crowd.size(); ++j) {
    const UserId other = user(j);
    if (other == i || !available(crowd.states[j], allow_busy)) continue;
    if (!opposite_sides(mine, crowd.energies[j], target)) continue;
    if (is_valid_contact(crowd, i, other, params)) out.push_back(other);
  }
  return out;
}

std::optional<UserId> pair_mobility(const CrowdState& crowd, const TargetLevel& target,
                                    std::span<const UserId> candidates) {
  return argmin(candidates,
                [&](UserId j) { return std::abs(target.absolute - crowd.energy(j)); });
}

std::optional<UserId> pair_social_context(const CrowdState& crowd, UserId i,
                                          std::span<const UserId> candidates,
                                          std::span<const MobilityHistory> histories,
                                          const Weights& weights, const TargetLevel& target,
                                          double max_energy) {
  const LocationId here = crowd.location_of(i);
  const double la_i = location_attachment(histories[index(i)], here);
  return argmin(candidates, [&](UserId j) {
    const double la_j = location_attachment(histories[index(j)], here);
    const auto [e1, e2] = energy_terms(crowd, i, j, target);
    return peer_selectivity_sc(la_i, la_j, e1, e2, weights, max_energy);
  });
}

std::optional<UserId> pair_social_relations(const CrowdState& crowd, UserId i,
                                            std::span<const UserId> candidates,
                                            std::span<const MobilityHistory> histories,
                                            const SocialGraph& graph, const Weights& weights,
                                            const TargetLevel& target, double max_energy) {
  const LocationId here = crowd.location_of(i);
  const double la_i = location_attachment(histories[index(i)], here);
  const double sa_i = social_attachment(graph, crowd, i);
  return argmin(candidates, [&](UserId j) {
    const double la_j = location_attachment(histories[index(j)], here);
    const double sa_j = social_attachment(graph, crowd, j);
    const auto [e1, e2] = energy_terms(crowd, i, j, target);
    return peer_selectivity_scr(la_i, la_j, sa_i, sa_j, e1, e2, weights, max_energy);
  });
}

ExchangeOutcome p2p_energy_balance(CrowdState& crowd, UserId u1, UserId u2, double s1,
                                   double s2, const SimParams& params,
                                   const TargetLevel& target) {
  if (u1 == u2) throw std::invalid_argument("p2p_energy_balance: u1 == u2");
  ExchangeOutcome out;
  auto logical = [](BalanceState s) {
    return s == BalanceState::Busy ? BalanceState::Incomplete : s;
  };
  out.tx_state = logical(crowd.state(u1));
  out.rx_state = logical(crowd.state(u2));

  const double window = std::min({s1, s2, params.iteration_minutes});
  out.meeting_minutes = std::max(0.0, window);
  const double surplus = crowd.energy(u1) - target.absolute;
  const double deficit = target.absolute - crowd.energy(u2);
  if (window <= 0.0 || surplus <= 0.0 || deficit <= 0.0) return out;

  const double keep = 1.0 - params.loss;
  // Whichever side reaches the target first decides the required amount;
  // on the receiver side the loss is paid by sending more.
  const double required = surplus * keep < deficit ? surplus : deficit / keep;
  const double budget = params.charge_rate * window;
  out.eta = required <= budget ? 0 : 1;
  out.transmitted = std::min(required, budget);
  apply_transfer(crowd, u1, u2, out.transmitted, params.loss, params.max_energy);
  out.lambda = out.transmitted / params.charge_rate;

  const double start = std::max(crowd.elapsed[index(u1)], crowd.elapsed[index(u2)]);
  crowd.elapsed[index(u1)] = start + out.lambda;
  crowd.elapsed[index(u2)] = start + out.lambda;

  out.tx_state = settle(crowd.energy(u1), target, params.balance_tolerance);
  out.rx_state = settle(crowd.energy(u2), target, params.balance_tolerance);
  crowd.states[index(u1)] = out.tx_state;
  crowd.states[index(u2)] = out.rx_state;
  return out;
}

IterationStats run_iteration(const Strategy& strategy, CrowdState& crowd,
                             std::span<const MobilityHistory> histories,
                             const SocialGraph& graph, std::span<const Prediction> predictions,
                             const SimParams& params, const MeetingObserver& observer) {
  const TargetLevel target = target_energy(params.loss, params.max_energy);
  const SelectionContext ctx{crowd, histories, graph, predictions, params, target};
  const std::size_t m = crowd.size();
  const auto per_user_cap = static_cast<std::size_t>(
      std::ceil(params.iteration_minutes / params.min_contact_minutes));

  auto complete_count = [&] {
    return static_cast<std::size_t>(
        std::count(crowd.states.begin(), crowd.states.end(), BalanceState::Complete));
  };
  const std::size_t complete_before = complete_count();

  IterationStats stats;
  std::vector<std::size_t> meetings_of(m, 0);
  // Pairs that finished a full (uncapped) exchange without either side
  // completing have already reached their agreed level.
  std::set<std::pair<UserId, UserId>> settled;

  auto remaining = [&](std::size_t u) {
    return std::min(crowd.stays[u], params.iteration_minutes) - crowd.elapsed[u];
  };

  auto filter = [&](std::vector<UserId> cands, UserId seed) {
    std::erase_if(cands, [&](UserId j) {
      return meetings_of[index(j)] >= per_user_cap ||
             settled.count(std::minmax(seed, j)) > 0;
    });
    return cands;
  };

  auto execute = [&](UserId seed, UserId partner) {
    const bool seed_sends = crowd.energy(seed) > target.absolute;
    const UserId tx = seed_sends ? seed : partner;
    const UserId rx = seed_sends ? partner : seed;
    const double start = std::max(crowd.elapsed[index(tx)], crowd.elapsed[index(rx)]);
    const double s1 = std::min(crowd.stays[index(tx)], params.iteration_minutes) - start;
    const double s2 = std::min(crowd.stays[index(rx)], params.iteration_minutes) - start;

    MeetingEvent event{tx, rx, crowd.energy(tx), crowd.energy(rx),
                       std::min({s1, s2, params.iteration_minutes}), {}};
    event.outcome = strategy.exchange(crowd, tx, rx, s1, s2, params, target);

    ++stats.meetings;
    stats.transmitted += event.outcome.transmitted;
    ++meetings_of[index(tx)];
    ++meetings_of[index(rx)];
    if (event.outcome.eta == 0 && event.outcome.tx_state != BalanceState::Complete &&
        event.outcome.rx_state != BalanceState::Complete) {
      settled.insert(std::minmax(tx, rx));
    }
    for (UserId u : {tx, rx}) {
      if (crowd.state(u) != BalanceState::Complete) crowd.states[index(u)] = BalanceState::Busy;
    }
    if (observer) observer(event);
  };

  // First sweep: everyone free at the start of the iteration.
  std::vector<std::uint8_t> tried(m, 0);
  while (const auto seed = select_seed(crowd, target, tried)) {
    tried[index(*seed)] = 1;
    const auto cands = filter(strategy.candidates(ctx, *seed, false), *seed);
    if (const auto partner = strategy.choose(ctx, *seed, cands)) execute(*seed, *partner);
  }

  // Re-pair users with time left, least elapsed first.
  std::vector<std::uint8_t> done(m, 0);
  while (true) {
    std::optional<UserId> next;
    for (std::size_t u = 0; u < m; ++u) {
      if (done[u] || crowd.states[u] == BalanceState::Complete) continue;
      if (meetings_of[u] >= per_user_cap || remaining(u) < params.min_contact_minutes) continue;
      if (!next || crowd.elapsed[u] < crowd.elapsed[index(*next)]) next = user(u);
    }
    if (!next) break;
    const auto cands = filter(strategy.candidates(ctx, *next, true), *next);
    const auto partner = strategy.choose(ctx, *next, cands);
    if (!partner) {
      done[index(*next)] = 1;
      continue;
    }
    execute(*next, *partner);
  }

  for (auto& s : crowd.states) {
    if (s == BalanceState::Busy) s = BalanceState::Incomplete;
  }
  stats.newly_complete = complete_count() - complete_before;
  return stats;
}

}  // namespace crowdcharge
