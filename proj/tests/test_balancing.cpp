#include <doctest.h>

#include <stdexcept>
#include <vector>

#include "crowdcharge/balancing.hpp"
#include "oracles.hpp"

using namespace crowdcharge;

namespace {

constexpr LocationId A = location(0);
constexpr LocationId B = location(1);

// Same place, full stays, nobody busy yet.
CrowdState together(std::vector<double> energies, double stay = 40.0) {
  CrowdState c(energies.size());
  c.energies = std::move(energies);
  c.stays.assign(c.size(), stay);
  return c;
}

// Location attachment at A equals a / (a + b).
MobilityHistory attached(double a, double b) {
  MobilityHistory h;
  if (a > 0) h.record_visit(A, 0, a);
  if (b > 0) h.record_visit(B, 40, b);
  return h;
}

const TargetLevel kTarget = target_energy(0.2, 100.0);

}  // namespace

TEST_CASE("target level") {
  CHECK(target_energy(0.0, 1.0).normalized == 0.5);
  CHECK(target_energy(1e-12, 1.0).normalized == doctest::Approx(0.5));
  CHECK(target_energy(0.2, 1.0).normalized == doctest::Approx(0.472136).epsilon(1e-6));
  CHECK(target_energy(0.2, 100.0).absolute == doctest::Approx(47.2136).epsilon(1e-6));
  CHECK(target_energy(0.4, 1.0).normalized == doctest::Approx(0.436492).epsilon(1e-6));
  for (double b : {0.05, 0.2, 0.3, 0.4, 0.9}) {
    CHECK(std::abs(target_energy(b, 1.0).normalized - oracle::target_level(b)) < 1e-12);
  }
  CHECK_THROWS_AS(target_energy(1.0, 100.0), std::domain_error);
  CHECK_THROWS_AS(target_energy(-0.1, 100.0), std::domain_error);
}

TEST_CASE("strategy tags round-trip") {
  for (auto k : {StrategyKind::MoSaBa, StrategyKind::MoSaBaSocialContext,
                 StrategyKind::MoSaBaMobility, StrategyKind::MobiWeb,
                 StrategyKind::GreedyOptimal, StrategyKind::FriendTransfer}) {
    CHECK(parse_strategy_tag(strategy_tag(k)) == k);
    CHECK(make_strategy(k)->kind() == k);
  }
  CHECK_FALSE(parse_strategy_tag("mosaba2").has_value());
}

TEST_CASE("seed selection") {
  auto c = together({10, 46, 90});
  CHECK(select_seed(c, kTarget) == user(1));

  c.states.assign(3, BalanceState::Complete);
  CHECK_FALSE(select_seed(c, kTarget).has_value());

  c = together({kTarget.absolute + 5, kTarget.absolute - 5});
  CHECK(select_seed(c, kTarget) == user(0));

  const std::vector<std::uint8_t> skip{1, 0};
  CHECK(select_seed(c, kTarget, skip) == user(1));
}

TEST_CASE("candidates sit on the other side of the target") {
  SimParams params;
  auto c = together({60, 10, 20, 70, 30});
  c.locations[4] = B;
  CHECK(candidate_neighbors(c, user(0), params, kTarget) == std::vector{user(1), user(2)});

  c.states[2] = BalanceState::Busy;
  CHECK(candidate_neighbors(c, user(0), params, kTarget) == std::vector{user(1)});
  CHECK(candidate_neighbors(c, user(0), params, kTarget, true) == std::vector{user(1), user(2)});

  c.energies[0] = kTarget.absolute;
  CHECK(candidate_neighbors(c, user(0), params, kTarget).empty());

  auto alone = together({60, 10});
  alone.locations[1] = B;
  CHECK(candidate_neighbors(alone, user(0), params, kTarget).empty());
}

TEST_CASE("mobility-only pairing takes the candidate nearest the target") {
  const auto c = together({60, 20, 40});
  CHECK(pair_mobility(c, kTarget, std::vector{user(1), user(2)}) == user(2));
  CHECK(pair_mobility(c, kTarget, std::vector{user(1)}) == user(1));
  CHECK_FALSE(pair_mobility(c, kTarget, std::vector<UserId>{}).has_value());
}

TEST_CASE("social-context pairing") {
  const Weights w{0.33, 0.33, 0.33};
  auto c = together({60, 20, 40});

  SUBCASE("identical attachments reduce to the energy gap") {
    const std::vector<MobilityHistory> h(3, attached(20, 30));
    CHECK(pair_social_context(c, user(0), std::vector{user(1), user(2)}, h, w, kTarget, 100) ==
          user(2));
  }
  SUBCASE("attachment can outweigh a smaller gap") {
    // Scores: user 1 about 0.090, user 2 about 0.156.
    const std::vector<MobilityHistory> h{attached(20, 30), attached(20, 30), attached(0, 30)};
    CHECK(pair_social_context(c, user(0), std::vector{user(1), user(2)}, h, w, kTarget, 100) ==
          user(1));
    CHECK(pair_mobility(c, kTarget, std::vector{user(1), user(2)}) == user(2));
  }
  SUBCASE("seed below the target") {
    c.energies = {30, 55, 80};
    const std::vector<MobilityHistory> h(3, attached(20, 30));
    CHECK(pair_social_context(c, user(0), std::vector{user(1), user(2)}, h, w, kTarget, 100) ==
          user(1));
  }
  const std::vector<MobilityHistory> h(3);
  CHECK_FALSE(
      pair_social_context(c, user(0), std::vector<UserId>{}, h, w, kTarget, 100).has_value());
}

TEST_CASE("social-relations pairing") {
  const Weights w{0.33, 0.33, 0.33};
  // Four users at A; seed 0 is above the target.
  auto c = together({60, 20, 40, 60});
  const std::vector<MobilityHistory> h(4, attached(20, 30));
  const std::vector cands{user(1), user(2)};

  SocialGraph none(4);
  CHECK(pair_social_relations(c, user(0), cands, h, none, w, kTarget, 100) ==
        pair_social_context(c, user(0), cands, h, w, kTarget, 100));

  // SA: user 0 = 0.5, user 1 = 0.5, user 2 = 0. Scores about 0.090 vs 0.189.
  SocialGraph g(4);
  g.add_edge(user(0), user(1));
  g.add_edge(user(0), user(3));
  g.add_edge(user(1), user(3));
  CHECK(pair_social_relations(c, user(0), cands, h, g, w, kTarget, 100) == user(1));
  CHECK(pair_social_context(c, user(0), cands, h, w, kTarget, 100) == user(2));
  CHECK_FALSE(pair_social_relations(c, user(0), std::vector<UserId>{}, h, g, w, kTarget, 100)
                  .has_value());
}

TEST_CASE("bounded exchange: transmitter reaches the target first") {
  SimParams params;
  const double t = 100.0 * oracle::target_level(0.2);
  auto c = together({60, 30});
  const auto out = p2p_energy_balance(c, user(0), user(1), 30, 30, params, kTarget);
  const double e = 60.0 - t;
  CHECK(std::abs(out.transmitted - e) < 1e-9);
  CHECK(std::abs(c.energies[0] - t) < 1e-9);
  CHECK(std::abs(c.energies[1] - (30.0 + 0.8 * e)) < 1e-9);
  CHECK(std::abs(out.lambda - e / 0.5) < 1e-9);
  CHECK(out.eta == 0);
  CHECK(out.tx_state == BalanceState::Complete);
  CHECK(out.rx_state == BalanceState::Incomplete);
  CHECK(c.elapsed[0] == doctest::Approx(out.lambda));
  CHECK(c.elapsed[1] == doctest::Approx(out.lambda));
}

TEST_CASE("bounded exchange: meeting time caps the transfer") {
  SimParams params;
  auto c = together({60, 30});
  const auto out = p2p_energy_balance(c, user(0), user(1), 10, 25, params, kTarget);
  CHECK(std::abs(out.transmitted - 5.0) < 1e-9);
  CHECK(std::abs(c.energies[0] - 55.0) < 1e-9);
  CHECK(std::abs(c.energies[1] - 34.0) < 1e-9);
  CHECK(std::abs(out.lambda - 10.0) < 1e-9);
  CHECK(out.eta == 1);
  CHECK(out.tx_state == BalanceState::Incomplete);
  CHECK(out.rx_state == BalanceState::Incomplete);
}

TEST_CASE("bounded exchange: receiver reaches the target first") {
  SimParams params;
  const double t = 100.0 * oracle::target_level(0.2);
  auto c = together({90, 40});
  const auto out = p2p_energy_balance(c, user(0), user(1), 40, 40, params, kTarget);
  const double e = (t - 40.0) / 0.8;
  CHECK(std::abs(out.transmitted - e) < 1e-9);
  CHECK(std::abs(c.energies[1] - t) < 1e-9);
  CHECK(std::abs(c.energies[0] - (90.0 - e)) < 1e-9);
  CHECK(out.rx_state == BalanceState::Complete);
  CHECK(out.tx_state == BalanceState::Incomplete);
}

TEST_CASE("bounded exchange: nothing to do") {
  SimParams params;
  auto c = together({kTarget.absolute, kTarget.absolute});
  const auto out = p2p_energy_balance(c, user(0), user(1), 30, 30, params, kTarget);
  CHECK(out.transmitted == 0.0);
  CHECK(out.lambda == 0.0);
  CHECK(c.energies[0] == kTarget.absolute);
  CHECK(c.states[0] == BalanceState::Incomplete);

  c = together({60, 30});
  const auto none = p2p_energy_balance(c, user(0), user(1), 0, 30, params, kTarget);
  CHECK(none.transmitted == 0.0);
  CHECK(c.energies[0] == 60.0);
  CHECK_THROWS_AS(p2p_energy_balance(c, user(0), user(0), 30, 30, params, kTarget),
                  std::invalid_argument);
}

TEST_CASE("iteration sweep") {
  SimParams params;
  const auto strategy = make_strategy(StrategyKind::MoSaBa);

  SUBCASE("single user") {
    auto c = together({80});
    const std::vector<MobilityHistory> h(1);
    const auto stats = run_iteration(*strategy, c, h, SocialGraph(1), {}, params);
    CHECK(stats.meetings == 0);
  }
  SUBCASE("one opposite-side pair") {
    auto c = together({60, 30});
    const std::vector<MobilityHistory> h(2);
    std::vector<MeetingEvent> events;
    const auto stats = run_iteration(*strategy, c, h, SocialGraph(2), {}, params,
                                     [&](const MeetingEvent& e) { events.push_back(e); });
    CHECK(stats.meetings == 1);
    REQUIRE(events.size() == 1);
    CHECK(events[0].tx == user(0));
    CHECK(stats.newly_complete == 1);
    CHECK(c.states[1] == BalanceState::Incomplete);
  }
  SUBCASE("everyone on one side") {
    auto c = together({60, 70, 80, 90});
    const std::vector<MobilityHistory> h(4);
    CHECK(run_iteration(*strategy, c, h, SocialGraph(4), {}, params).meetings == 0);
  }
  SUBCASE("capped pair meets again after the first sweep only if time remains") {
    auto c = together({90, 10}, 20);
    const std::vector<MobilityHistory> h(2);
    const auto stats = run_iteration(*strategy, c, h, SocialGraph(2), {}, params);
    CHECK(stats.meetings == 1);
    CHECK(stats.transmitted == doctest::Approx(10.0));
    CHECK(c.states == std::vector(2, BalanceState::Incomplete));
  }
  SUBCASE("busy users return to incomplete") {
    auto c = together({60, 30, 70, 20});
    const std::vector<MobilityHistory> h(4);
    run_iteration(*strategy, c, h, SocialGraph(4), {}, params);
    for (auto s : c.states) CHECK(s != BalanceState::Busy);
  }
}
