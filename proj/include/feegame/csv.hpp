#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "feegame/incircle.hpp"
#include "feegame/sim.hpp"

namespace feegame {

// RFC 4180: CRLF line endings, fields quoted only when needed.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
};

std::string csv_escape(const std::string& field);
// Shortest text that reads back to the same double.
std::string csv_number(double v);

void write_trace_csv(std::ostream& out, const std::vector<SimTrace>& traces);
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows);
void write_gap_csv(std::ostream& out, const GapProfile& profile);
void write_supermodular_csv(std::ostream& out, const SupermodularReport& report);

}  // namespace feegame
