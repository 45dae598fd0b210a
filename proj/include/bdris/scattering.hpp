#pragma once

#include <string>

#include "bdris/types.hpp"

namespace bdris {

enum class Architecture { fully, group, diagonal, relaxed_symmetric };

std::string to_string(Architecture arch);

/// BD-RIS scattering matrix tagged with the circuit topology it must obey.
struct ScatteringMatrix {
  Matrix theta;
  Architecture architecture = Architecture::fully;
  Index group_size = 0;  // only meaningful for Architecture::group

  Index elements() const { return theta.rows(); }
};

/// Largest constraint violation of `s` against its architecture:
///   fully    -> max(|theta^T - theta|, |theta^H theta - I|)
///   group    -> the same per block, plus off-block mass
///   diagonal -> max(off-diagonal mass, max | |theta_mm| - 1 |)
///   relaxed  -> max(|theta^T - theta|, max(0, tr(theta^H theta) - M))
double feasibility_defect(const ScatteringMatrix& s);

/// feasibility_defect(s) <= tol (defaults to the unitary tolerance).
bool is_feasible(const ScatteringMatrix& s, double tol = kUnitaryTol);

}  // namespace bdris
