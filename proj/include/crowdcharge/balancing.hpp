#pragma once

// Target balance level, peer selection for the MoSaBa family and the bounded
// pairwise exchange, plus the per-iteration selection sweep shared by every
// strategy.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "crowdcharge/mobility.hpp"
#include "crowdcharge/model.hpp"
#include "crowdcharge/social.hpp"

namespace crowdcharge {

/// Loss-adjusted level every user is driven towards.
struct TargetLevel {
  double normalized = 0.5;  // in [0, 1]
  double absolute = 50.0;   // normalized * max_energy
};

// (-(1 - loss) + sqrt(1 - loss)) / loss, with the limit 1/2 at loss = 0.
// Throws std::domain_error for loss outside [0, 1).
TargetLevel target_energy(double loss, double max_energy);

// True when a and b lie strictly on different sides of the target.
bool opposite_sides(double a, double b, const TargetLevel& target);

struct ExchangeOutcome {
  double transmitted = 0.0;  // energy leaving the transmitter
  double lambda = 0.0;       // minutes the exchange takes, transmitted / alpha
  int eta = 0;               // 1 when the meeting time capped the transfer
  double meeting_minutes = 0.0;
  BalanceState tx_state = BalanceState::Incomplete;
  BalanceState rx_state = BalanceState::Incomplete;
};

struct SelectionContext {
  const CrowdState& crowd;
  std::span<const MobilityHistory> histories;
  const SocialGraph& graph;
  std::span<const Prediction> predictions;  // may be empty
  const SimParams& params;
  TargetLevel target;
};

enum class StrategyKind {
  MoSaBa,               // social context and relations
  MoSaBaSocialContext,  // social context only
  MoSaBaMobility,       // mobility only
  MobiWeb,
  GreedyOptimal,
  FriendTransfer,
};

std::string_view strategy_tag(StrategyKind kind);
std::optional<StrategyKind> parse_strategy_tag(std::string_view tag);

/// A peer-selection policy. The sweep picks seeds; the strategy decides who
/// may partner with a seed, which candidate wins, and how much is exchanged.
class Strategy {
 public:
  virtual ~Strategy() = default;

  virtual StrategyKind kind() const = 0;
  std::string_view tag() const { return strategy_tag(kind()); }

  // With allow_busy, users that already exchanged this iteration are
  // eligible once they are free again.
  virtual std::vector<UserId> candidates(const SelectionContext& ctx, UserId seed,
                                         bool allow_busy) const;

  virtual std::optional<UserId> choose(const SelectionContext& ctx, UserId seed,
                                       std::span<const UserId> candidates) const = 0;

  // s1 and s2 are the minutes each side can still spend at the location.
  virtual ExchangeOutcome exchange(CrowdState& crowd, UserId tx, UserId rx, double s1,
                                   double s2, const SimParams& params,
                                   const TargetLevel& target) const;
};

std::unique_ptr<Strategy> make_strategy(StrategyKind kind);

// Incomplete user closest to the target; lowest id on ties. Users flagged in
// skip (one byte per user, may be empty) are ignored.
std::optional<UserId> select_seed(const CrowdState& crowd, const TargetLevel& target,
                                  std::span<const std::uint8_t> skip = {});

// Co-located users in valid contact with i whose energy sits strictly on the
// other side of the target.
std::vector<UserId> candidate_neighbors(const CrowdState& crowd, UserId i,
                                        const SimParams& params, const TargetLevel& target,
                                        bool allow_busy = false);

// Candidate closest to the target.
std::optional<UserId> pair_mobility(const CrowdState& crowd, const TargetLevel& target,
                                    std::span<const UserId> candidates);

std::optional<UserId> pair_social_context(const CrowdState& crowd, UserId i,
                                          std::span<const UserId> candidates,
                                          std::span<const MobilityHistory> histories,
                                          const Weights& weights, const TargetLevel& target,
                                          double max_energy);

std::optional<UserId> pair_social_relations(const CrowdState& crowd, UserId i,
                                            std::span<const UserId> candidates,
                                            std::span<const MobilityHistory> histories,
                                            const SocialGraph& graph, const Weights& weights,
                                            const TargetLevel& target, double max_energy);

// u1 above the target transmits to u2 below it until whichever reaches the
// target first does so, within alpha * min(s1, s2, iteration). Updates
// energies, states and elapsed time of both users.
ExchangeOutcome p2p_energy_balance(CrowdState& crowd, UserId u1, UserId u2, double s1,
                                   double s2, const SimParams& params,
                                   const TargetLevel& target);

struct MeetingEvent {
  UserId tx{};
  UserId rx{};
  double tx_before = 0.0;
  double rx_before = 0.0;
  double window = 0.0;  // t_p2p
  ExchangeOutcome outcome;
};

using MeetingObserver = std::function<void(const MeetingEvent&)>;

struct IterationStats {
  std::size_t meetings = 0;
  std::size_t newly_complete = 0;
  double transmitted = 0.0;
};

// One selection sweep: seeds in order of closeness to the target, then
// re-pairing of users with time left in ascending elapsed order, until no
// valid pair remains. Busy users revert to Incomplete at the end.
IterationStats run_iteration(const Strategy& strategy, CrowdState& crowd,
                             std::span<const MobilityHistory> histories,
                             const SocialGraph& graph, std::span<const Prediction> predictions,
                             const SimParams& params, const MeetingObserver& observer = {});

}  // namespace crowdcharge
