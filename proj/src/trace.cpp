#include "rhloc/trace.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace rhloc {

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace, bool with_activation) {
  out << "iter,cost,residual,messages_cumulative";
  if (with_activation) out << ",activated_node";
  out << '\n';
  for (const auto& row : trace) {
    out << row.iter << ',' << fmt_double(row.cost) << ',' << fmt_double(row.residual) << ','
        << row.messages;
    if (with_activation) out << ',' << row.activated_node;
    out << '\n';
  }
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& trace,
                     bool with_activation) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_trace_csv(out, trace, with_activation);
}

std::int64_t read_trace_message_total(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string header;
  if (!std::getline(in, header) || header.rfind("iter,cost,residual,messages_cumulative", 0) != 0) {
    throw std::runtime_error(path.string() + " is not a trace file");
  }
  std::string line;
  std::string last;
  while (std::getline(in, line)) {
    if (!line.empty()) last = line;
  }
  if (last.empty()) throw std::runtime_error(path.string() + " has no trace rows");
  std::stringstream row(last);
  std::string field;
  for (int column = 0; column < 4; ++column) {
    if (!std::getline(row, field, ',')) throw std::runtime_error("truncated trace row");
  }
  return std::stoll(field);
}

}  // namespace rhloc
