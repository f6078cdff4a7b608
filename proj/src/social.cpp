#include "crowdcharge/social.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include <fmt/core.h>

namespace crowdcharge {

SocialGraph::SocialGraph(std::size_t users)
    : adjacency_(users * users, 0), friends_(users) {}

bool SocialGraph::add_edge(UserId a, UserId b) {
  const std::size_t n = users();
  if (index(a) >= n || index(b) >= n) {
    throw std::invalid_argument(
        fmt::format("add_edge: ({}, {}) outside {} users", index(a), index(b), n));
  }
  if (a == b) throw std::invalid_argument("add_edge: self-loop");
  auto& cell = adjacency_[index(a) * n + index(b)];
  if (cell) return false;
  cell = 1;
  adjacency_[index(b) * n + index(a)] = 1;
  friends_[index(a)].push_back(b);
  friends_[index(b)].push_back(a);
  ++edges_;
  return true;
}

bool SocialGraph::connected(UserId a, UserId b) const {
  if (a == b) return false;
  return adjacency_[index(a) * users() + index(b)] != 0;
}

SocialGraph SocialGraph::erdos_renyi(std::size_t users, double p, Rng& rng) {
  SocialGraph g(users);
  std::bernoulli_distribution coin(p);
  for (std::size_t i = 0; i < users; ++i) {
    for (std::size_t j = i + 1; j < users; ++j) {
      if (coin(rng)) g.add_edge(user(i), user(j));
    }
  }
  return g;
}

SocialGraph SocialGraph::load(std::istream& in, std::size_t users) {
  SocialGraph g(users);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    long long a = -1;
    long long b = -1;
    std::string rest;
    if (!(fields >> a >> b) || (fields >> rest)) {
      throw std::runtime_error(fmt::format("social graph line {}: expected \"i j\"", line_no));
    }
    if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= users ||
        static_cast<std::size_t>(b) >= users || a == b) {
      throw std::runtime_error(
          fmt::format("social graph line {}: invalid edge ({}, {}) for {} users", line_no, a, b,
                      users));
    }
    g.add_edge(user(static_cast<std::size_t>(a)), user(static_cast<std::size_t>(b)));
  }
  return g;
}

std::optional<double> avg_stay_duration(const MobilityHistory& history, LocationId l) {
  double sum = 0.0;
  std::size_t visits = 0;
  for (const Visit& v : history.visits()) {
    if (v.location != l) continue;
    sum += v.stay;
    ++visits;
  }
  if (visits == 0) return std::nullopt;
  return sum / static_cast<double>(visits);
}

double location_attachment(const MobilityHistory& history, LocationId l) {
  std::map<LocationId, std::pair<double, std::size_t>> per_location;
  for (const Visit& v : history.visits()) {
    auto& [sum, n] = per_location[v.location];
    sum += v.stay;
    ++n;
  }
  double total = 0.0;
  double mine = 0.0;
  for (const auto& [loc, acc] : per_location) {
    const double tau = acc.first / static_cast<double>(acc.second);
    total += tau;
    if (loc == l) mine = tau;
  }
  if (total <= 0.0) {
    // Every recorded stay was zero: spread the attachment evenly.
    return per_location.count(l) ? 1.0 / static_cast<double>(per_location.size()) : 0.0;
  }
  return mine / total;
}

int social_connection(const SocialGraph& graph, UserId i, UserId j) {
  return graph.connected(i, j) ? 1 : 0;
}

double social_attachment(const SocialGraph& graph, const CrowdState& crowd, UserId i) {
  const LocationId here = crowd.location_of(i);
  std::size_t friends = 0;
  for (UserId f : graph.friends(i)) friends += crowd.location_of(f) == here;
  return static_cast<double>(friends) / static_cast<double>(users_at_location(crowd, here));
}

double peer_selectivity_sc(double la_i, double la_j, double e1, double e2,
                           const Weights& weights, double max_energy) {
  return weights.location * std::abs(la_i - la_j) + weights.energy * (e1 - e2) / max_energy;
}

double peer_selectivity_scr(double la_i, double la_j, double sa_i, double sa_j, double e1,
                            double e2, const Weights& weights, double max_energy) {
  return peer_selectivity_sc(la_i, la_j, e1, e2, weights, max_energy) +
         weights.social * std::abs(sa_i - sa_j);
}

}  // namespace crowdcharge
