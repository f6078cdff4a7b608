#pragma once

// Core domain types of the crowd-charging simulator: users, locations,
// energy bookkeeping and the contact rule between two users.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace crowdcharge {

enum class UserId : std::uint32_t {};
enum class LocationId : std::uint32_t {};

constexpr std::size_t index(UserId u) { return static_cast<std::size_t>(u); }
constexpr std::size_t index(LocationId l) { return static_cast<std::size_t>(l); }
constexpr UserId user(std::size_t i) { return static_cast<UserId>(i); }
constexpr LocationId location(std::size_t i) { return static_cast<LocationId>(i); }

enum class BalanceState : std::uint8_t { Incomplete, Busy, Complete };

/// Relative importance of location attachment, social attachment and the
/// energy gap when ranking candidate peers.
struct Weights {
  double location = 0.33;
  double social = 0.33;
  double energy = 0.33;
};

struct SimParams {
  std::size_t users = 100;           // m
  std::size_t locations = 5;         // n
  double loss = 0.2;                 // beta, fraction lost per transfer
  double charge_rate = 0.5;          // alpha, energy units per minute
  double iteration_minutes = 40.0;   // length of one movement epoch
  std::size_t iterations = 30;       // T
  double max_energy = 100.0;
  Weights weights{};
  std::size_t markov_order = 2;      // k
  double min_contact_minutes = 1.0;  // t_min
  double balance_tolerance = 0.5;    // energy units around the target
  double social_p = 0.1;             // Erdos-Renyi edge probability
  double stay_min_minutes = 10.0;
  double stay_max_minutes = 40.0;
  std::uint64_t seed = 42;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
  // Soft problems that do not prevent a run (e.g. weights not summing to 1).
  std::vector<std::string> warnings() const;
};

/// Snapshot of the whole crowd at the current iteration. All vectors have
/// one entry per user.
struct CrowdState {
  std::vector<double> energies;
  std::vector<LocationId> locations;
  std::vector<BalanceState> states;
  std::vector<double> elapsed;  // minutes spent exchanging this iteration
  std::vector<double> stays;    // stay drawn at the current location
  std::size_t iteration = 0;

  CrowdState() = default;
  explicit CrowdState(std::size_t users);

  std::size_t size() const { return energies.size(); }
  double energy(UserId u) const { return energies[index(u)]; }
  LocationId location_of(UserId u) const { return locations[index(u)]; }
  BalanceState state(UserId u) const { return states[index(u)]; }
};

struct ContactWindow {
  double duration = 0.0;  // minutes both users remain available together
  bool co_located = false;
};

double total_energy(const CrowdState& crowd);
double total_energy(std::span<const double> energies);

// Throws std::invalid_argument on an empty crowd.
double average_energy(const CrowdState& crowd);

// Share of the total energy held by each user. Throws std::domain_error when
// the crowd holds no energy at all.
std::vector<double> energy_distribution(std::span<const double> energies);
std::vector<double> energy_distribution(const CrowdState& crowd);

// Sum of absolute differences; lies in [0, 2] for probability vectors.
// Throws std::length_error on size mismatch.
double variation_distance(std::span<const double> p, std::span<const double> q);

std::size_t users_at_location(const CrowdState& crowd, LocationId l);

// Overlap of the two users' remaining stays inside the current iteration,
// starting once the busier of the two is free.
ContactWindow contact_window(const CrowdState& crowd, UserId i, UserId j,
                             const SimParams& params);

// Co-located and able to stay together for at least t_min.
// Throws std::invalid_argument when i == j.
bool is_valid_contact(const CrowdState& crowd, UserId i, UserId j,
                      const SimParams& params);

// Moves e units out of tx; rx receives (1 - loss) * e. Throws
// std::out_of_range if tx would go negative or rx above max_energy.
void apply_transfer(CrowdState& crowd, UserId tx, UserId rx, double e,
                    double loss, double max_energy);

}  // namespace crowdcharge
