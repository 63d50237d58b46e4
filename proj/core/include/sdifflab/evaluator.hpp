#pragma once

#include <vector>

#include "sdifflab/diffops.hpp"
#include "sdifflab/fields.hpp"

namespace sdifflab {

/// Flat-array field evaluator for particle loops. Per-axis cos/sin tables are
/// built by the Chebyshev-style recurrence from one sincos per axis, and each
/// mode costs a handful of multiply-adds via angle addition. Summation order
/// is fixed, so results are deterministic (they may differ from
/// ScalarField::eval in the last ulp).
class ScalarEvaluator {
  public:
    ScalarEvaluator() = default;
    explicit ScalarEvaluator(const ScalarField& f);
    double operator()(const Vec& theta) const;
    int dim() const { return dim_; }

  private:
    friend class VectorEvaluator;
    struct Term {
        std::array<int16_t, 3> k;
        uint8_t parity;
        double coeff;
    };
    int dim_ = 0;
    int trunc_ = 0;
    std::vector<Term> terms_;
};

/// Evaluates a vector field and, optionally, its spatial Jacobian in one pass.
class VectorEvaluator {
  public:
    VectorEvaluator() = default;
    explicit VectorEvaluator(const VectorField& u);

    Vec operator()(const Vec& theta) const;
    /// Value and Jacobian d(u_i)/d(theta_j).
    Vec eval_with_jacobian(const Vec& theta, Mat& jac_out) const;
    int dim() const { return dim_; }

  private:
    struct Term {
        std::array<int16_t, 3> k;
        uint8_t parity;
        std::array<double, 3> coeff;
    };
    int dim_ = 0;
    int trunc_ = 0;
    std::vector<Term> terms_;
};

}  // namespace sdifflab
