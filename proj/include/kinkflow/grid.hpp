#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace kinkflow {

// Uniform nodes on [-half_width, half_width].
struct Grid {
  double half_width;
  int n;
  double h;
  std::vector<double> nodes;

  Grid(double half_width_, int n_) : half_width(half_width_), n(n_) {
    if (!(half_width > 0.0)) throw std::invalid_argument("Grid: half_width > 0");
    if (n < 3) throw std::invalid_argument("Grid: need at least 3 nodes");
    h = 2.0 * half_width / (n - 1);
    nodes.resize(n);
    for (int i = 0; i < n; ++i) nodes[i] = -half_width + i * h;
  }
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr make_grid(double half_width, double target_h) {
  if (!(target_h > 0.0)) throw std::invalid_argument("make_grid: target_h > 0");
  const int n = static_cast<int>(std::lround(2.0 * half_width / target_h)) + 1;
  return std::make_shared<Grid>(half_width, n);
}

struct Field {
  GridPtr grid;
  std::vector<double> values;

  Field() = default;
  Field(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
    if (!grid) throw std::invalid_argument("Field: null grid");
    if (static_cast<int>(values.size()) != grid->n)
      throw std::invalid_argument("Field: value count does not match grid");
  }
};

template <typename F>
Field sample(const GridPtr& grid, F&& f) {
  std::vector<double> v(grid->n);
  for (int i = 0; i < grid->n; ++i) v[i] = f(grid->nodes[i]);
  return Field(grid, std::move(v));
}

inline Field zero_field(const GridPtr& grid) {
  return Field(grid, std::vector<double>(grid->n, 0.0));
}

// Trapezoid rule on the grid.
inline double trapezoid(const Grid& grid, std::span<const double> values) {
  double acc = 0.5 * (values.front() + values.back());
  for (int i = 1; i + 1 < grid.n; ++i) acc += values[i];
  return acc * grid.h;
}

inline double inner_product(const Field& a, const Field& b) {
  if (a.grid.get() != b.grid.get() && a.grid->n != b.grid->n)
    throw std::invalid_argument("inner_product: fields on different grids");
  const int n = a.grid->n;
  double acc = 0.5 * (a.values[0] * b.values[0] +
                      a.values[n - 1] * b.values[n - 1]);
  for (int i = 1; i + 1 < n; ++i) acc += a.values[i] * b.values[i];
  return acc * a.grid->h;
}

}  // namespace kinkflow
