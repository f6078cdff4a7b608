#pragma once

// Social context (how strongly a user is attached to a place) and social
// relations (friendships among co-located users), and the two peer
// selectivity scores built from them. Lower scores mean better pairs.

#include <cstddef>
#include <istream>
#include <optional>
#include <span>
#include <vector>

#include "crowdcharge/mobility.hpp"
#include "crowdcharge/model.hpp"
#include "crowdcharge/rng.hpp"

namespace crowdcharge {

/// Undirected friendship relation without self-loops.
class SocialGraph {
 public:
  SocialGraph() = default;
  explicit SocialGraph(std::size_t users);

  // Returns false if the edge already existed. Throws std::invalid_argument
  // for self-loops or ids out of range.
  bool add_edge(UserId a, UserId b);
  bool connected(UserId a, UserId b) const;
  std::span<const UserId> friends(UserId u) const { return friends_[index(u)]; }

  std::size_t users() const { return friends_.size(); }
  std::size_t edge_count() const { return edges_; }

  // G(users, p), every unordered pair drawn independently.
  static SocialGraph erdos_renyi(std::size_t users, double p, Rng& rng);

  // One "i j" pair per line; blank lines and lines starting with '#' are
  // skipped, duplicates ignored. Throws std::runtime_error with the line
  // number on malformed input.
  static SocialGraph load(std::istream& in, std::size_t users);

 private:
  std::vector<std::uint8_t> adjacency_;  // users x users
  std::vector<std::vector<UserId>> friends_;
  std::size_t edges_ = 0;
};

// Mean stay at l; nullopt when l was never visited.
std::optional<double> avg_stay_duration(const MobilityHistory& history, LocationId l);

// Share of the summed average stays that belongs to l. Zero for an empty
// history or an unvisited location.
double location_attachment(const MobilityHistory& history, LocationId l);

int social_connection(const SocialGraph& graph, UserId i, UserId j);

// Friends of i at i's location divided by everyone there, i included.
double social_attachment(const SocialGraph& graph, const CrowdState& crowd, UserId i);

// e1/e2 follow the seed's side of the target: above -> (target, E_j),
// below -> (E_j, target).
double peer_selectivity_sc(double la_i, double la_j, double e1, double e2,
                           const Weights& weights, double max_energy);

double peer_selectivity_scr(double la_i, double la_j, double sa_i, double sa_j, double e1,
                            double e2, const Weights& weights, double max_energy);

}  // namespace crowdcharge
