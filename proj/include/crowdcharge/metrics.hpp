#pragma once

#include <chrono>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "crowdcharge/model.hpp"

namespace crowdcharge {

// Reals so that aggregated (mean) traces share the type.
struct IterationRecord {
  std::size_t iteration = 0;  // 1-based
  double total_energy = 0.0;
  double variation_distance = 0.0;
  double meetings = 0.0;
  double balanced_count = 0.0;
  double exec_time_us = 0.0;
  double transmitted = 0.0;  // not part of the CSV schema
};

struct MetricsTrace {
  std::string method;
  std::size_t rep_count = 1;
  double initial_total_energy = 0.0;
  std::vector<IterationRecord> records;
};

// Variation distance between the crowd's energy distribution and the
// uniform one; 0 for an empty or fully drained crowd.
double variation_from_uniform(const CrowdState& crowd);

IterationRecord iteration_metrics(const CrowdState& crowd, std::size_t iteration,
                                  std::size_t meetings, double transmitted,
                                  std::chrono::nanoseconds wall_clock);

// Element-wise mean. Throws std::length_error for an empty list or traces of
// different lengths. Each column is summed in sorted order, so the result
// does not depend on the order of the inputs.
MetricsTrace aggregate(std::span<const MetricsTrace> traces);

}  // namespace crowdcharge
