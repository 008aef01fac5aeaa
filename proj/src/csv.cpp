#include "feegame/csv.hpp"

#include <fmt/core.h>

namespace feegame {

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_number(double v) { return fmt::format("{}", v); }

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (k) out_ << ',';
    out_ << csv_escape(fields[k]);
  }
  out_ << "\r\n";
}

namespace {

std::string optional_number(const std::optional<double>& v) { return v ? csv_number(*v) : std::string(); }

std::string flag(bool b) { return b ? "true" : "false"; }

}  // namespace

void write_trace_csv(std::ostream& out, const std::vector<SimTrace>& traces) {
  CsvWriter w(out);
  w.row({"run", "round", "phase", "fee_level", "miner_level", "s_m", "s_u", "e_target", "branch", "p_e", "kappa",
         "start_time"});
  for (const SimTrace& t : traces) {
    for (const RoundRecord& r : t.records) {
      w.row({std::to_string(t.run), std::to_string(r.round), r.phase == Phase::main ? "main" : "prelim",
             std::to_string(r.fee_level), std::to_string(r.miner_level), csv_number(r.s_m), csv_number(r.s_u),
             optional_number(r.e_target), r.branch == Branch::none ? "" : branch_name(r.branch), csv_number(r.p_e),
             optional_number(r.kappa), csv_number(r.start_time)});
    }
  }
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  CsvWriter w(out);
  w.row({"round", "metric", "mean", "std"});
  for (const AggregateRow& r : rows) w.row({std::to_string(r.round), r.metric, csv_number(r.mean), csv_number(r.std)});
}

void write_gap_csv(std::ostream& out, const GapProfile& profile) {
  CsvWriter w(out);
  w.row({"t", "income", "cost", "in_gap"});
  for (const GapSample& s : profile.samples) {
    w.row({csv_number(s.t), csv_number(s.income), csv_number(s.cost), flag(s.in_gap)});
  }
}

void write_supermodular_csv(std::ostream& out, const SupermodularReport& report) {
  CsvWriter w(out);
  w.row({"side", "v_i", "v_j", "condition_a", "condition_b", "user_condition", "mixed_partial"});
  for (const MinerGridPoint& p : report.miner) {
    w.row({"miner", csv_number(p.x_i), csv_number(p.x_j), flag(p.condition_a), flag(p.condition_b), "",
           csv_number(p.mixed_partial)});
  }
  for (const UserGridPoint& p : report.user) {
    w.row({"user", csv_number(p.y_k), csv_number(p.y_l), "", "", flag(p.condition), csv_number(p.mixed_partial)});
  }
}

}  // namespace feegame
