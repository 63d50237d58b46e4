#pragma once

#include <vector>

#include "sdifflab/fields.hpp"

namespace sdifflab {

/// Uniform tensor quadrature grid on T^d used for pointwise nonlinear
/// operations (exp, log, |grad W|^2). The trapezoidal rule on the torus
/// integrates trigonometric polynomials of per-axis degree < n exactly, so
/// sampling with n >= 4K keeps products and transforms alias-controlled.
class QuadratureGrid {
  public:
    QuadratureGrid(int dim, int points_per_axis);

    int dim() const { return dim_; }
    int points_per_axis() const { return n_; }
    size_t size() const { return points_.size(); }
    const std::vector<Vec>& points() const { return points_; }

    std::vector<double> sample(const ScalarField& f) const;

    /// L2-project grid samples onto the band |k|_inf <= trunc.
    ScalarField project(const std::vector<double>& values, int trunc) const;

    /// Max abs difference between samples of f and the given values.
    double max_error(const ScalarField& f, const std::vector<double>& values) const;

  private:
    int dim_;
    int n_;
    std::vector<Vec> points_;
};

/// Convenience: apply a pointwise map to a field on an oversampled grid and
/// project back to the requested band.
ScalarField pointwise_map(const ScalarField& f, const QuadratureGrid& grid, int out_trunc,
                          double (*fn)(double));

}  // namespace sdifflab
