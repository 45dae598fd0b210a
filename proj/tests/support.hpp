#pragma once

#include <random>

#include "bdris/channel.hpp"
#include "bdris/linalg.hpp"
#include "bdris/runner.hpp"

namespace testing {

using bdris::ChannelSet;
using bdris::Index;
using bdris::Matrix;

inline Matrix random_symmetric(Index m, std::mt19937_64& rng) {
  const Matrix b = bdris::linalg::complex_gaussian(m, m, rng);
  return b + b.transpose();
}

inline Matrix random_symmetric_unitary(Index m, std::mt19937_64& rng) {
  const Matrix u = bdris::linalg::random_unitary(m, rng);
  return u * u.transpose();
}

// Unit-variance links, sigma^2 = 1.
inline ChannelSet random_channels(int users, Index nr, Index nt, Index m,
                                  std::mt19937_64& rng) {
  ChannelSet ch;
  ch.h_direct.assign(users, std::vector<Matrix>(users));
  for (int l = 0; l < users; ++l) {
    for (int k = 0; k < users; ++k) {
      ch.h_direct[l][k] = bdris::linalg::complex_gaussian(nr, nt, rng);
    }
  }
  for (int k = 0; k < users; ++k) ch.f_ris.push_back(bdris::linalg::complex_gaussian(nr, m, rng));
  for (int l = 0; l < users; ++l) ch.g_ris.push_back(bdris::linalg::complex_gaussian(nt, m, rng));
  ch.noise_power = 1.0;
  return ch;
}

inline ChannelSet paper_channels(const bdris::ScenarioConfig& cfg, int trial) {
  std::mt19937_64 rng(bdris::trial_seed(cfg.seed, 0, trial));
  return bdris::draw_channels(cfg, rng);
}

inline bdris::ScenarioConfig paper_config(int elements) {
  bdris::ScenarioConfig cfg;
  cfg.elements = elements;
  return cfg;
}

}  // namespace testing
