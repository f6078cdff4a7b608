#pragma once

// Comparison strategies: mobility-aware balancing without social input
// (MobiWEB), greedy optimal pairing that ignores mobility (P_GO), and the
// friends-only equal-split transfer (P_FT). All of them pair users on
// opposite sides of the target and are bounded by the meeting time.

#include <optional>
#include <span>
#include <vector>

#include "crowdcharge/balancing.hpp"

namespace crowdcharge {

std::optional<UserId> mobiweb_pair(const CrowdState& crowd, const TargetLevel& target,
                                   std::span<const UserId> candidates);

// Opposite-side available users anywhere in the area whose stays overlap for
// at least t_min.
std::vector<UserId> pgo_candidates(const CrowdState& crowd, UserId i, const SimParams& params,
                                   const TargetLevel& target, bool allow_busy = false);
std::optional<UserId> pgo_pair(const CrowdState& crowd, UserId i, const SimParams& params,
                               const TargetLevel& target);

// Co-located friends on the opposite side of the target.
std::vector<UserId> pft_candidates(const CrowdState& crowd, UserId i, const SocialGraph& graph,
                                   const SimParams& params, const TargetLevel& target,
                                   bool allow_busy = false);
std::optional<UserId> pft_pair(const CrowdState& crowd, UserId i, const SocialGraph& graph,
                               const SimParams& params, const TargetLevel& target);

// u1 (the richer user) sends until it sits at the pair's mean, capped by
// alpha * min(s1, s2, iteration).
ExchangeOutcome pft_exchange(CrowdState& crowd, UserId u1, UserId u2, double s1, double s2,
                             const SimParams& params, const TargetLevel& target);

class MobiWebStrategy final : public Strategy {
 public:
  StrategyKind kind() const override { return StrategyKind::MobiWeb; }
  std::optional<UserId> choose(const SelectionContext& ctx, UserId seed,
                               std::span<const UserId> candidates) const override;
};

class GreedyOptimalStrategy final : public Strategy {
 public:
  StrategyKind kind() const override { return StrategyKind::GreedyOptimal; }
  std::vector<UserId> candidates(const SelectionContext& ctx, UserId seed,
                                 bool allow_busy) const override;
  std::optional<UserId> choose(const SelectionContext& ctx, UserId seed,
                               std::span<const UserId> candidates) const override;
};

class FriendTransferStrategy final : public Strategy {
 public:
  StrategyKind kind() const override { return StrategyKind::FriendTransfer; }
  std::vector<UserId> candidates(const SelectionContext& ctx, UserId seed,
                                 bool allow_busy) const override;
  std::optional<UserId> choose(const SelectionContext& ctx, UserId seed,
                               std::span<const UserId> candidates) const override;
  ExchangeOutcome exchange(CrowdState& crowd, UserId tx, UserId rx, double s1, double s2,
                           const SimParams& params, const TargetLevel& target) const override;
};

}  // namespace crowdcharge
