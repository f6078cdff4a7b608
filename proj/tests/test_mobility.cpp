#include <doctest.h>

#include <initializer_list>
#include <stdexcept>
#include <vector>

#include "crowdcharge/mobility.hpp"
#include "crowdcharge/social.hpp"
#include "oracles.hpp"

using namespace crowdcharge;

namespace {

constexpr LocationId A = location(0);
constexpr LocationId B = location(1);
constexpr LocationId C = location(2);

MobilityHistory history_of(std::initializer_list<LocationId> locs, double stay = 20.0) {
  MobilityHistory h;
  double t = 0.0;
  for (LocationId l : locs) {
    h.record_visit(l, t, stay);
    t += 40.0;
  }
  return h;
}

MobilityHistory history_of(const std::vector<LocationId>& locs, const std::vector<double>& stays) {
  MobilityHistory h;
  for (std::size_t i = 0; i < locs.size(); ++i) h.record_visit(locs[i], 40.0 * i, stays[i]);
  return h;
}

}  // namespace

TEST_CASE("recording visits") {
  MobilityHistory h;
  h.record_visit(A, 0, 20);
  CHECK(h.size() == 1);
  CHECK_THROWS_AS(h.record_visit(B, -5, 20), std::invalid_argument);
  CHECK_THROWS_AS(h.record_visit(B, 0, 20), std::invalid_argument);
  CHECK_THROWS_AS(h.record_visit(B, 10, -1), std::invalid_argument);
  h.record_visit(B, 40, 15);
  h.record_visit(C, 80, 30);
  REQUIRE(h.size() == 3);
  CHECK(h.visits()[0].arrival < h.visits()[1].arrival);
  CHECK(h.visits()[1].arrival < h.visits()[2].arrival);
  CHECK(h.sequence()[2] == C);
}

TEST_CASE("location context keeps the most recent visits") {
  const auto h = history_of({A, B, C});
  CHECK(location_context(h, 2) == LocationContext{B, C});
  CHECK(location_context(h, 5) == LocationContext{A, B, C});
  CHECK(location_context(MobilityHistory{}, 2).empty());
}

TEST_CASE("pattern counts overlap") {
  const auto h = history_of({A, B, A, B, A});
  CHECK(pattern_count(h, std::vector{A}) == 3);
  CHECK(pattern_count(h, std::vector{A, B}) == 2);
  CHECK(pattern_count(h, std::vector{A, B, A}) == 2);
  CHECK(pattern_count(h, std::vector{A, B, A, B, A, B}) == 0);
  CHECK_THROWS_AS(pattern_count(h, std::vector<LocationId>{}), std::invalid_argument);
  CHECK(successor_count(h, std::vector{A}) == 2);
}

TEST_CASE("transition estimate") {
  CHECK(*transition_estimate(history_of({A, B, A, B, A}), std::vector{A}, B) == 1.0);
  CHECK(*transition_estimate(history_of({A, B, A, C, A}), std::vector{A}, B) == 0.5);
  CHECK_FALSE(transition_estimate(history_of({A, B, A}), std::vector{C}, A).has_value());
  // A context only seen at the end has no successor either.
  CHECK_FALSE(transition_estimate(history_of({A, A, B}), std::vector{B}, A).has_value());
}

TEST_CASE("stay distribution estimate") {
  const std::vector<double> s{5, 15, 25};
  CHECK(*stay_cdf_estimate(s, 0, 10) == doctest::Approx(1.0 / 3.0));
  CHECK(*stay_cdf_estimate(s, 0, 100) == 1.0);
  CHECK(*stay_cdf_estimate(s, 30, 10) == 0.0);
  CHECK_FALSE(stay_cdf_estimate(std::vector<double>{}, 0, 10).has_value());
}

TEST_CASE("stay samples come from the last context position") {
  const auto h = history_of({A, B, A, B, A}, {5, 15, 25, 35, 45});
  CHECK(stay_samples(h, std::vector{A}, B) == std::vector<double>{5, 25});
  CHECK(stay_samples(h, std::vector{A, B}, A) == std::vector<double>{15, 35});
  CHECK(stay_samples(h, std::vector{A}, C).empty());
  CHECK(*stay_cdf_estimate(h, std::vector{A}, B, 0, 10) == 0.5);
}

TEST_CASE("move-within probability is the product of both estimates") {
  // Transition 1.0 and stays {5, 15, 25}.
  const auto h = history_of({A, B, A, B, A, B, A}, {5, 1, 15, 1, 25, 1, 1});
  CHECK(*predict_move_within(h, std::vector{A}, B, 0, 10) == doctest::Approx(1.0 / 3.0));
  CHECK(*predict_move_within(h, std::vector{A}, A, 0, 10) == 0.0);
  // Transition 0.5 and stays {5}.
  const auto h2 = history_of({A, B, A, C, A}, {5, 1, 5, 1, 1});
  CHECK(*predict_move_within(h2, std::vector{A}, B, 0, 100) == doctest::Approx(0.5));
  CHECK_FALSE(predict_move_within(h2, std::vector{C, C}, A, 0, 10).has_value());
}

TEST_CASE("next-location prediction") {
  SimParams params;
  params.markov_order = 1;

  auto p = predict_next(history_of({A, B, A, B}), params, 0, C);
  CHECK(p.next_location == A);
  CHECK(p.order == 1);

  p = predict_next(history_of({A, A, B}), params, 0, C);
  CHECK(p.next_location == A);
  CHECK(p.order == 0);
  CHECK(p.move_within_prob == doctest::Approx(2.0 / 3.0));

  p = predict_next(MobilityHistory{}, params, 0, C);
  CHECK(p.next_location == C);
  CHECK(p.expected_stay == 25.0);
}

TEST_CASE("higher-order context falls back to shorter ones") {
  SimParams params;
  params.markov_order = 2;
  // Context [C, A] is new, but A on its own was always followed by B.
  const auto p = predict_next(history_of({A, B, A, B, C, A}), params, 0, A);
  CHECK(p.order == 1);
  CHECK(p.next_location == B);
}

TEST_CASE("prediction ties go to the lowest location") {
  SimParams params;
  params.markov_order = 1;
  const auto p = predict_next(history_of({C, B, C, A, C}), params, 0, C);
  CHECK(p.next_location == A);
}

TEST_CASE("expected stay falls back to the mean of all stays") {
  SimParams params;
  params.markov_order = 1;
  // Every stay exceeds the horizon, so all probabilities are 0 and B wins
  // the tie; B never follows B, leaving S_x empty.
  const auto h = history_of({B, C, B}, {100, 200, 300});
  const auto p = predict_next(h, params, 0, B);
  CHECK(p.next_location == B);
  CHECK(p.expected_stay == doctest::Approx(200.0));
  const auto o = oracle::predict({1, 2, 1}, {100, 200, 300}, 1, 0, 40, 1, 25);
  CHECK(o.next == 1);
  CHECK(o.expected_stay == doctest::Approx(200.0));
}

TEST_CASE("predictor agrees with the brute-force oracle on a sample") {
  SimParams params;
  params.markov_order = 2;
  const std::vector<LocationId> locs{A, B, C, A, B, A, B, C};
  const std::vector<double> stays{12, 33, 27, 8, 19, 39, 22, 14};
  std::vector<int> raw;
  for (auto l : locs) raw.push_back(static_cast<int>(index(l)));
  const auto h = history_of(locs, stays);
  const auto p = predict_next(h, params, 0, A);
  const auto o = oracle::predict(raw, stays, 2, 0, params.iteration_minutes, 0, 25);
  CHECK(static_cast<int>(index(p.next_location)) == o.next);
  CHECK(p.expected_stay == doctest::Approx(o.expected_stay));
  CHECK(p.order == o.order);
}

TEST_CASE("movement draws") {
  SimParams params;
  Rng rng(7);
  params.locations = 1;
  for (int i = 0; i < 50; ++i) CHECK(draw_location(rng, params) == A);

  params = {};
  for (int i = 0; i < 500; ++i) {
    const double s = draw_stay(rng, 0, params);
    CHECK(s >= 10.0);
    CHECK(s <= 40.0);
  }
  params.iteration_minutes = 1000.0;
  double top = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const double s = draw_stay(rng, 4, params);
    CHECK(s >= 10.0);
    CHECK(s <= 44.0);
    top = std::max(top, s);
  }
  CHECK(top > 40.0);

  params = {};
  params.iteration_minutes = 30.0;
  for (int i = 0; i < 200; ++i) CHECK(draw_stay(rng, 4, params) <= 30.0);
}

TEST_CASE("step movement relocates everyone and resets elapsed time") {
  SimParams params;
  params.users = 30;
  Rng rng(11);
  CrowdState crowd(params.users);
  crowd.elapsed.assign(params.users, 17.0);
  SocialGraph graph(params.users);
  step_movement(rng, crowd, graph, params);
  std::size_t placed = 0;
  for (std::size_t l = 0; l < params.locations; ++l) placed += users_at_location(crowd, location(l));
  CHECK(placed == params.users);
  for (std::size_t i = 0; i < params.users; ++i) {
    CHECK(crowd.elapsed[i] == 0.0);
    CHECK(crowd.stays[i] >= params.stay_min_minutes);
    CHECK(crowd.stays[i] <= params.iteration_minutes);
  }
}
