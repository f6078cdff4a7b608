#include "crowdcharge/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/core.h>

namespace crowdcharge {

namespace {

constexpr double kBoundsSlack = 1e-9;

void require(bool ok, const char* field, const char* what) {
  if (!ok) {
    throw std::invalid_argument(fmt::format("{}: {}", field, what));
  }
}

}  // namespace

void SimParams::validate() const {
  require(locations >= 1, "locations", "need at least one location");
  require(loss >= 0.0 && loss < 1.0, "beta", "must lie in [0, 1)");
  require(charge_rate > 0.0, "alpha", "must be positive");
  require(iteration_minutes > 0.0, "iteration_minutes", "must be positive");
  require(max_energy > 0.0, "max_energy", "must be positive");
  require(markov_order >= 1, "k", "Markov order must be at least 1");
  require(min_contact_minutes > 0.0, "t_min", "must be positive");
  require(balance_tolerance >= 0.0, "balance_tolerance", "must be non-negative");
  require(social_p >= 0.0 && social_p <= 1.0, "social_p", "must lie in [0, 1]");
  require(stay_min_minutes >= 0.0 && stay_min_minutes <= stay_max_minutes,
          "stay", "need 0 <= stay_min <= stay_max");
  for (auto [w, name] : {std::pair{weights.location, "wl"},
                         std::pair{weights.social, "ws"},
                         std::pair{weights.energy, "we"}}) {
    require(w >= 0.0 && w <= 1.0, name, "weight must lie in [0, 1]");
  }
}

std::vector<std::string> SimParams::warnings() const {
  std::vector<std::string> out;
  const double sum = weights.location + weights.social + weights.energy;
  if (std::abs(sum - 1.0) > 0.02) {
    out.push_back(fmt::format("weights sum to {:.3f}, expected about 1", sum));
  }
  return out;
}

CrowdState::CrowdState(std::size_t users)
    : energies(users, 0.0),
      locations(users, LocationId{}),
      states(users, BalanceState::Incomplete),
      elapsed(users, 0.0),
      stays(users, 0.0) {}

double total_energy(std::span<const double> energies) {
  return std::accumulate(energies.begin(), energies.end(), 0.0);
}

double total_energy(const CrowdState& crowd) { return total_energy(crowd.energies); }

double average_energy(const CrowdState& crowd) {
  if (crowd.size() == 0) throw std::invalid_argument("average_energy: empty crowd");
  return total_energy(crowd) / static_cast<double>(crowd.size());
}

std::vector<double> energy_distribution(std::span<const double> energies) {
  const double total = total_energy(energies);
  if (!(total > 0.0)) {
    throw std::domain_error("energy_distribution: crowd holds no energy");
  }
  std::vector<double> p(energies.size());
  std::transform(energies.begin(), energies.end(), p.begin(),
                 [total](double e) { return e / total; });
  return p;
}

std::vector<double> energy_distribution(const CrowdState& crowd) {
  return energy_distribution(crowd.energies);
}

double variation_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw std::length_error(
        fmt::format("variation_distance: sizes differ ({} vs {})", p.size(), q.size()));
  }
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) d += std::abs(p[i] - q[i]);
  return d;
}

std::size_t users_at_location(const CrowdState& crowd, LocationId l) {
  return static_cast<std::size_t>(std::count(crowd.locations.begin(), crowd.locations.end(), l));
}

ContactWindow contact_window(const CrowdState& crowd, UserId i, UserId j,
                             const SimParams& params) {
  const std::size_t a = index(i);
  const std::size_t b = index(j);
  const double end =
      std::min({crowd.stays[a], crowd.stays[b], params.iteration_minutes});
  const double start = std::max(crowd.elapsed[a], crowd.elapsed[b]);
  return {std::max(0.0, end - start), crowd.locations[a] == crowd.locations[b]};
}

bool is_valid_contact(const CrowdState& crowd, UserId i, UserId j,
                      const SimParams& params) {
  if (i == j) throw std::invalid_argument("is_valid_contact: a user cannot contact itself");
  const ContactWindow w = contact_window(crowd, i, j, params);
  return w.co_located && w.duration >= params.min_contact_minutes;
}

void apply_transfer(CrowdState& crowd, UserId tx, UserId rx, double e, double loss,
                    double max_energy) {
  double& from = crowd.energies[index(tx)];
  double& to = crowd.energies[index(rx)];
  const double received = (1.0 - loss) * e;
  if (e < 0.0 || e > from + kBoundsSlack) {
    throw std::out_of_range(
        fmt::format("apply_transfer: cannot send {} from a user holding {}", e, from));
  }
  if (to + received > max_energy + kBoundsSlack) {
    throw std::out_of_range(
        fmt::format("apply_transfer: receiver at {} would exceed {}", to, max_energy));
  }
  from = std::max(0.0, from - e);
  to += received;
}

}  // namespace crowdcharge
