#include "crowdcharge/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crowdcharge {

namespace {

bool available(BalanceState s, bool allow_busy) {
  return s == BalanceState::Incomplete || (allow_busy && s == BalanceState::Busy);
}

bool overlap_long_enough(const CrowdState& crowd, UserId i, UserId j, const SimParams& params) {
  return contact_window(crowd, i, j, params).duration >= params.min_contact_minutes;
}

}  // namespace

std::optional<UserId> mobiweb_pair(const CrowdState& crowd, const TargetLevel& target,
                                   std::span<const UserId> candidates) {
  return pair_mobility(crowd, target, candidates);
}

std::vector<UserId> pgo_candidates(const CrowdState& crowd, UserId i, const SimParams& params,
                                   const TargetLevel& target, bool allow_busy) {
  std::vector<UserId> out;
  for (std::size_t j = 0; j < crowd.size(); ++j) {
    const UserId other = user(j);
    if (other == i || !available(crowd.states[j], allow_busy)) continue;
    if (!opposite_sides(crowd.energy(i), crowd.energies[j], target)) continue;
    if (overlap_long_enough(crowd, i, other, params)) out.push_back(other);
  }
  return out;
}

std::optional<UserId> pgo_pair(const CrowdState& crowd, UserId i, const SimParams& params,
                               const TargetLevel& target) {
  const auto cands = pgo_candidates(crowd, i, params, target);
  return pair_mobility(crowd, target, cands);
}

std::vector<UserId> pft_candidates(const CrowdState& crowd, UserId i, const SocialGraph& graph,
                                   const SimParams& params, const TargetLevel& target,
                                   bool allow_busy) {
  std::vector<UserId> out;
  for (UserId f : graph.friends(i)) {
    if (!available(crowd.state(f), allow_busy)) continue;
    if (!opposite_sides(crowd.energy(i), crowd.energy(f), target)) continue;
    if (is_valid_contact(crowd, i, f, params)) out.push_back(f);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<UserId> pft_pair(const CrowdState& crowd, UserId i, const SocialGraph& graph,
                               const SimParams& params, const TargetLevel& target) {
  const auto cands = pft_candidates(crowd, i, graph, params, target);
  return pair_mobility(crowd, target, cands);
}

ExchangeOutcome pft_exchange(CrowdState& crowd, UserId u1, UserId u2, double s1, double s2,
                             const SimParams& params, const TargetLevel& target) {
  if (u1 == u2) throw std::invalid_argument("pft_exchange: u1 == u2");
  ExchangeOutcome out;
  auto logical = [](BalanceState s) {
    return s == BalanceState::Busy ? BalanceState::Incomplete : s;
  };
  out.tx_state = logical(crowd.state(u1));
  out.rx_state = logical(crowd.state(u2));

  const double window = std::min({s1, s2, params.iteration_minutes});
  out.meeting_minutes = std::max(0.0, window);
  const double midpoint = 0.5 * (crowd.energy(u1) + crowd.energy(u2));
  const double required = crowd.energy(u1) - midpoint;
  if (window <= 0.0 || required <= 0.0) return out;

  const double budget = params.charge_rate * window;
  out.eta = required <= budget ? 0 : 1;
  out.transmitted = std::min(required, budget);
  apply_transfer(crowd, u1, u2, out.transmitted, params.loss, params.max_energy);
  out.lambda = out.transmitted / params.charge_rate;

  const double start = std::max(crowd.elapsed[index(u1)], crowd.elapsed[index(u2)]);
  crowd.elapsed[index(u1)] = start + out.lambda;
  crowd.elapsed[index(u2)] = start + out.lambda;

  auto settle = [&](UserId u) {
    return std::abs(crowd.energy(u) - target.absolute) <= params.balance_tolerance
               ? BalanceState::Complete
               : BalanceState::Incomplete;
  };
  out.tx_state = settle(u1);
  out.rx_state = settle(u2);
  crowd.states[index(u1)] = out.tx_state;
  crowd.states[index(u2)] = out.rx_state;
  return out;
}

std::optional<UserId> MobiWebStrategy::choose(const SelectionContext& ctx, UserId,
                                              std::span<const UserId> candidates) const {
  return mobiweb_pair(ctx.crowd, ctx.target, candidates);
}

std::vector<UserId> GreedyOptimalStrategy::candidates(const SelectionContext& ctx, UserId seed,
                                                      bool allow_busy) const {
  return pgo_candidates(ctx.crowd, seed, ctx.params, ctx.target, allow_busy);
}

std::optional<UserId> GreedyOptimalStrategy::choose(const SelectionContext& ctx, UserId,
                                                    std::span<const UserId> candidates) const {
  return pair_mobility(ctx.crowd, ctx.target, candidates);
}

std::vector<UserId> FriendTransferStrategy::candidates(const SelectionContext& ctx, UserId seed,
                                                       bool allow_busy) const {
  return pft_candidates(ctx.crowd, seed, ctx.graph, ctx.params, ctx.target, allow_busy);
}

std::optional<UserId> FriendTransferStrategy::choose(const SelectionContext& ctx, UserId,
                                                     std::span<const UserId> candidates) const {
  return pair_mobility(ctx.crowd, ctx.target, candidates);
}

ExchangeOutcome FriendTransferStrategy::exchange(CrowdState& crowd, UserId tx, UserId rx,
                                                 double s1, double s2, const SimParams& params,
                                                 const TargetLevel& target) const {
  return pft_exchange(crowd, tx, rx, s1, s2, params, target);
}

}  // namespace crowdcharge
