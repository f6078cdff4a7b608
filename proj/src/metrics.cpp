#include "crowdcharge/metrics.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/core.h>

namespace crowdcharge {

namespace {

double sorted_mean(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

double variation_from_uniform(const CrowdState& crowd) {
  const std::size_t m = crowd.size();
  if (m == 0 || !(total_energy(crowd) > 0.0)) return 0.0;
  const std::vector<double> p = energy_distribution(crowd);
  const std::vector<double> q(m, 1.0 / static_cast<double>(m));
  return variation_distance(p, q);
}

IterationRecord iteration_metrics(const CrowdState& crowd, std::size_t iteration,
                                  std::size_t meetings, double transmitted,
                                  std::chrono::nanoseconds wall_clock) {
  IterationRecord r;
  r.iteration = iteration;
  r.total_energy = total_energy(crowd);
  r.variation_distance = variation_from_uniform(crowd);
  r.meetings = static_cast<double>(meetings);
  r.balanced_count = static_cast<double>(
      std::count(crowd.states.begin(), crowd.states.end(), BalanceState::Complete));
  r.exec_time_us = static_cast<double>(wall_clock.count()) / 1000.0;
  r.transmitted = transmitted;
  return r;
}

MetricsTrace aggregate(std::span<const MetricsTrace> traces) {
  if (traces.empty()) throw std::length_error("aggregate: no traces");
  const std::size_t len = traces.front().records.size();
  for (const auto& t : traces) {
    if (t.records.size() != len) {
      throw std::length_error(
          fmt::format("aggregate: ragged traces ({} vs {} iterations)", t.records.size(), len));
    }
  }

  MetricsTrace out;
  out.method = traces.front().method;
  out.rep_count = 0;
  for (const auto& t : traces) out.rep_count += t.rep_count;

  std::vector<double> column(traces.size());
  auto mean_of = [&](auto&& field) {
    for (std::size_t r = 0; r < traces.size(); ++r) column[r] = field(traces[r]);
    return sorted_mean(column);
  };
  out.initial_total_energy = mean_of([](const MetricsTrace& t) { return t.initial_total_energy; });

  out.records.resize(len);
  for (std::size_t i = 0; i < len; ++i) {
    IterationRecord& rec = out.records[i];
    rec.iteration = traces.front().records[i].iteration;
    rec.total_energy = mean_of([i](const MetricsTrace& t) { return t.records[i].total_energy; });
    rec.variation_distance =
        mean_of([i](const MetricsTrace& t) { return t.records[i].variation_distance; });
    rec.meetings = mean_of([i](const MetricsTrace& t) { return t.records[i].meetings; });
    rec.balanced_count =
        mean_of([i](const MetricsTrace& t) { return t.records[i].balanced_count; });
    rec.exec_time_us = mean_of([i](const MetricsTrace& t) { return t.records[i].exec_time_us; });
    rec.transmitted = mean_of([i](const MetricsTrace& t) { return t.records[i].transmitted; });
  }
  return out;
}

}  // namespace crowdcharge
