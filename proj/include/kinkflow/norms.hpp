#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "kinkflow/grid.hpp"
#include "kinkflow/profile.hpp"

namespace kinkflow {

// Weighted sup-norm over a time window: max over all nodes and time levels of
// |u| / Phi, with Phi built from the per-time reference interfaces.
inline double weighted_norm(const std::vector<Field>& fields,
                            const std::vector<InterfaceVector>& xi0_of_t,
                            double sigma) {
  if (fields.empty()) throw std::invalid_argument("weighted_norm: empty window");
  if (fields.size() != xi0_of_t.size())
    throw std::invalid_argument("weighted_norm: field/interface count mismatch");
  double worst = 0.0;
  for (std::size_t s = 0; s < fields.size(); ++s) {
    const Grid& grid = *fields[s].grid;
    for (int i = 0; i < grid.n; ++i) {
      const double phi = weight_phi(grid.nodes[i], xi0_of_t[s], sigma);
      worst = std::max(worst, std::abs(fields[s].values[i]) / phi);
    }
  }
  return worst;
}

}  // namespace kinkflow
