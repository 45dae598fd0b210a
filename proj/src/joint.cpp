#include "bdris/joint.hpp"

#include <chrono>

#include "bdris/precoders.hpp"

namespace bdris {

JointResult joint_min_il(const ChannelSet& ch, Index d, double p_t,
                         const JointOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  ch.validate();
  if (options.max_outer < 1 || options.mo_iters < 1 || options.init_iters < 0 ||
      !(options.epsilon > 0.0)) {
    throw InvalidConfig("joint_min_il: invalid options");
  }
  const Index m = ch.elements();

  JointResult res;
  const PrecoderReport init = min_il_beamformers(ch.h_direct, d, p_t, options.init_iters);
  res.beamformers = init.beamformers;
  res.il_no_ris = il_with_beamformers(ch.h_direct, res.beamformers);
  res.q = Matrix::Identity(m, m);
  Matrix theta = Matrix::Identity(m, m);

  OptimizerOptions mo = options.mo;
  mo.max_iters = options.mo_iters;

  auto& trace = res.trace.il_values;
  trace.push_back(il_with_beamformers(ch, theta, res.beamformers));
  const double threshold = options.epsilon * res.il_no_ris;

  for (int pass = 0; pass < options.max_outer; ++pass) {
    res.trace.iterations = pass + 1;
    const double before = trace.back();

    LinkMatrices eff = effective_channels(ch, theta);
    update_min_il_decoders(eff, res.beamformers, d);
    trace.push_back(il_with_beamformers(eff, res.beamformers));

    update_min_il_precoders(eff, res.beamformers, d, p_t);
    trace.push_back(il_with_beamformers(eff, res.beamformers));

    const ChannelSet reduced = precoded_channels(ch, res.beamformers);
    const MoResult step = minimize_il_mo(reduced, res.q, mo);
    res.q = step.q;
    theta = step.theta.theta;
    trace.push_back(il_with_beamformers(ch, theta, res.beamformers));

    if (before - trace.back() < threshold || trace.back() == 0.0) {
      res.trace.converged = true;
      break;
    }
  }

  res.theta = ScatteringMatrix{theta, Architecture::fully, 0};
  res.trace.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
          .count();
  return res;
}

}  // namespace bdris
