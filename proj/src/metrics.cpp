#include "bdris/metrics.hpp"

#include <cmath>
#include <numeric>

#include "bdris/leakage.hpp"

namespace bdris {

double delta_inr_db(const ChannelSet& ch, const Matrix& theta) {
  const double direct = direct_leakage(ch);
  if (!(direct > 0.0)) {
    throw ContractViolation("delta_inr_db: undefined for zero direct-channel leakage");
  }
  return 10.0 * std::log10(interference_leakage(ch, theta) / direct);
}

TrialResult make_trial_result(double il, double delta_inr, std::vector<double> rates) {
  TrialResult r;
  r.il = il;
  r.delta_inr_db = delta_inr;
  r.sum_rate = std::accumulate(rates.begin(), rates.end(), 0.0);
  r.rates = std::move(rates);
  return r;
}

Statistic summarize(const std::vector<double>& values) {
  Statistic s;
  s.count = values.size();
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double acc = 0.0;
    for (double v : values) acc += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(acc / (n - 1.0));
  }
  return s;
}

Summary aggregate(const std::vector<TrialResult>& results, InrAveraging inr) {
  if (results.empty()) throw ContractViolation("aggregate: empty result list");
  const std::size_t k_users = results.front().rates.size();
  std::vector<double> il, inr_vals, sr;
  std::vector<std::vector<double>> rates(k_users);
  for (const auto& r : results) {
    if (r.rates.size() != k_users) {
      throw InvalidDimension("aggregate: inconsistent user count across trials");
    }
    il.push_back(r.il);
    inr_vals.push_back(inr == InrAveraging::db ? r.delta_inr_db
                                               : std::pow(10.0, r.delta_inr_db / 10.0));
    sr.push_back(r.sum_rate);
    for (std::size_t k = 0; k < k_users; ++k) rates[k].push_back(r.rates[k]);
  }
  Summary s;
  s.il = summarize(il);
  s.delta_inr_db = summarize(inr_vals);
  if (inr == InrAveraging::linear) {
    s.delta_inr_db.mean = 10.0 * std::log10(s.delta_inr_db.mean);
    s.delta_inr_db.std = summarize([&] {
                           std::vector<double> db;
                           for (const auto& r : results) db.push_back(r.delta_inr_db);
                           return db;
                         }()).std;
  }
  s.sum_rate = summarize(sr);
  for (auto& col : rates) s.rates.push_back(summarize(col));
  return s;
}

}  // namespace bdris
