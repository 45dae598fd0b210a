#include "bdris/scattering.hpp"

#include <algorithm>
#include <cmath>

#include "bdris/linalg.hpp"

namespace bdris {

std::string to_string(Architecture arch) {
  switch (arch) {
    case Architecture::fully: return "fully";
    case Architecture::group: return "group";
    case Architecture::diagonal: return "diagonal";
    case Architecture::relaxed_symmetric: return "relaxed";
  }
  return "unknown";
}

namespace {

double symmetric_unitary_defect(const Matrix& block) {
  return std::max(linalg::symmetry_defect(block), linalg::unitarity_defect(block));
}

}  // namespace

double feasibility_defect(const ScatteringMatrix& s) {
  const Matrix& t = s.theta;
  const Index m = t.rows();
  if (t.cols() != m) return INFINITY;
  if (!t.allFinite()) return INFINITY;
  switch (s.architecture) {
    case Architecture::fully:
      return symmetric_unitary_defect(t);
    case Architecture::group: {
      const Index g = s.group_size;
      if (g < 1 || m % g != 0) return INFINITY;
      double defect = 0.0;
      Matrix off = t;
      for (Index b = 0; b < m; b += g) {
        defect = std::max(defect, symmetric_unitary_defect(t.block(b, b, g, g)));
        off.block(b, b, g, g).setZero();
      }
      return std::max(defect, off.norm());
    }
    case Architecture::diagonal: {
      Matrix off = t;
      off.diagonal().setZero();
      double defect = off.norm();
      for (Index i = 0; i < m; ++i) {
        defect = std::max(defect, std::abs(std::abs(t(i, i)) - 1.0));
      }
      return defect;
    }
    case Architecture::relaxed_symmetric: {
      const double excess = t.squaredNorm() - static_cast<double>(m) * (1.0 + 1e-9);
      return std::max(linalg::symmetry_defect(t), std::max(0.0, excess));
    }
  }
  return INFINITY;
}

bool is_feasible(const ScatteringMatrix& s, double tol) {
  return feasibility_defect(s) <= tol;
}

}  // namespace bdris
