#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bdris {

/// One (sweep point, trial) row. Failed trials keep NaN metrics and a
/// non-"ok" status.
struct ResultRow {
  std::string sweep_kind;
  std::string sweep_value;
  int trial = 0;
  std::uint64_t seed = 0;
  std::string stage1;
  std::string stage2;
  int m = 0;
  int mg = 0;
  double pt_dbm = 0.0;
  double il = 0.0;
  double delta_inr_db = 0.0;
  double sum_rate = 0.0;
  std::vector<double> rates;
  int iters_stage1 = 0;
  double wall_ms_stage1 = 0.0;
  double wall_ms_stage2 = 0.0;
  std::string status = "ok";

  bool operator==(const ResultRow&) const;
};

struct ResultTable {
  int users = 0;  // number of rate_k columns
  std::vector<ResultRow> rows;

  bool operator==(const ResultTable&) const = default;
};

enum class ResultFormat { csv, jsonl };

ResultFormat parse_format(const std::string& text);

std::vector<std::string> result_columns(int users);

/// Floats are written with 17 significant digits, so reading back is exact.
void write_results(const ResultTable& table, const std::string& path, ResultFormat format);
ResultTable read_results(const std::string& path, ResultFormat format);

}  // namespace bdris
