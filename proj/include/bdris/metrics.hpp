#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bdris/channel.hpp"
#include "bdris/ris_solvers.hpp"
#include "bdris/types.hpp"

namespace bdris {

/// 10 log10 of the leakage with theta over the leakage without a RIS.
double delta_inr_db(const ChannelSet& ch, const Matrix& theta);

struct TrialResult {
  double il = 0.0;
  double delta_inr_db = 0.0;
  std::vector<double> rates;
  double sum_rate = 0.0;
  std::map<std::string, IterTrace> traces;
};

/// Builds a result with sum_rate = sum of rates.
TrialResult make_trial_result(double il, double delta_inr_db, std::vector<double> rates);

struct Statistic {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single value
  std::size_t count = 0;
};

Statistic summarize(const std::vector<double>& values);

enum class InrAveraging { db, linear };

struct Summary {
  Statistic il;
  Statistic delta_inr_db;  // with linear averaging, mean is 10 log10 of the mean ratio
  Statistic sum_rate;
  std::vector<Statistic> rates;
};

Summary aggregate(const std::vector<TrialResult>& results,
                  InrAveraging inr = InrAveraging::db);

}  // namespace bdris
