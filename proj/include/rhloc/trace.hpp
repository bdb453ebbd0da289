#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "rhloc/cost.hpp"

namespace rhloc {

struct TraceRow {
  std::int64_t iter = 0;
  double cost = 0.0;
  double residual = 0.0;
  std::int64_t messages = 0;  // cumulative scalar deliveries
  int activated_node = -1;    // async only
};

/// Outcome of a sync or async run. Non-convergence is reported, not thrown.
struct SolveResult {
  Positions positions;
  StackedVariables z;
  std::vector<TraceRow> trace;
  std::int64_t iterations = 0;
  std::int64_t messages = 0;
  bool converged = false;
};

/// CSV: iter,cost,residual,messages_cumulative[,activated_node]
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace, bool with_activation);
void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& trace,
                     bool with_activation);

/// Final messages_cumulative of a trace CSV written by write_trace_csv.
std::int64_t read_trace_message_total(const std::filesystem::path& path);

}  // namespace rhloc
