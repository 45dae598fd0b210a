#pragma once

#include "bdris/channel.hpp"
#include "bdris/leakage.hpp"
#include "bdris/ris_solvers.hpp"
#include "bdris/scattering.hpp"

namespace bdris {

struct JointOptions {
  int max_outer = 50;
  double epsilon = 1e-4;      // stop when an outer pass gains < epsilon * IL without RIS
  int mo_iters = 100;         // MO budget per Theta update, warm-started
  int init_iters = 100;       // min-IL iterations for the RIS-free initialization
  OptimizerOptions mo;        // line-search settings for the Theta step
};

struct JointResult {
  ScatteringMatrix theta;
  Matrix q;                   // theta = q q^T
  Beamformers beamformers;
  IterTrace trace;            // initial IL, then one value per AO step (3 per pass)
  double il_no_ris = 0.0;     // leakage of the initial beamformers with theta = 0
};

/// Alternates decoders, precoders and a fully-connected Theta, starting from
/// the RIS-free min-IL beamformers and Theta = I.
JointResult joint_min_il(const ChannelSet& ch, Index d, double p_t,
                         const JointOptions& options = {});

}  // namespace bdris
