#include "sdifflab/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace sdifflab {

QuadratureGrid::QuadratureGrid(int dim, int points_per_axis) : dim_(dim), n_(points_per_axis) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("QuadratureGrid: dim must be 1..3");
    if (n_ < 2) throw std::invalid_argument("QuadratureGrid: need at least 2 points per axis");
    size_t total = 1;
    for (int i = 0; i < dim_; ++i) total *= static_cast<size_t>(n_);
    points_.reserve(total);
    const double h = kTwoPi / n_;
    std::array<int, 3> idx{0, 0, 0};
    for (size_t flat = 0; flat < total; ++flat) {
        size_t rem = flat;
        for (int i = dim_ - 1; i >= 0; --i) {
            idx[i] = static_cast<int>(rem % static_cast<size_t>(n_));
            rem /= static_cast<size_t>(n_);
        }
        Vec p(dim_);
        for (int i = 0; i < dim_; ++i) p[i] = idx[i] * h;
        points_.push_back(p);
    }
}

std::vector<double> QuadratureGrid::sample(const ScalarField& f) const {
    if (f.dim() != dim_) throw std::invalid_argument("sample: dimension mismatch");
    std::vector<double> out(points_.size());
    for (size_t i = 0; i < points_.size(); ++i) out[i] = f.eval(points_[i]);
    return out;
}

ScalarField QuadratureGrid::project(const std::vector<double>& values, int trunc) const {
    if (values.size() != points_.size())
        throw std::invalid_argument("project: sample count mismatch");
    if (2 * trunc >= n_)
        throw std::invalid_argument("project: band too wide for this grid, oversample");
    ScalarField out(dim_, trunc);
    const double w0 = 1.0 / static_cast<double>(points_.size());
    const double w = 2.0 * w0;
    std::array<int, 3> k{0, 0, 0};
    std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
    for (int i = 0; i < dim_; ++i) {
        lo[i] = -trunc;
        hi[i] = trunc;
    }
    for (k[0] = lo[0]; k[0] <= hi[0]; ++k[0])
        for (k[1] = lo[1]; k[1] <= hi[1]; ++k[1])
            for (k[2] = lo[2]; k[2] <= hi[2]; ++k[2]) {
                int sign = canonical_sign(k);
                if (sign < 0) continue;
                Mode mc{k, Parity::cos};
                if (sign == 0) {
                    double s = 0.0;
                    for (size_t i = 0; i < points_.size(); ++i) s += values[i];
                    out.add(mc, s * w0);
                    continue;
                }
                Mode ms{k, Parity::sin};
                double sc = 0.0, ss = 0.0;
                for (size_t i = 0; i < points_.size(); ++i) {
                    double ph = mc.phase(points_[i]);
                    sc += values[i] * std::cos(ph);
                    ss += values[i] * std::sin(ph);
                }
                out.add(mc, sc * w);
                out.add(ms, ss * w);
            }
    return out;
}

double QuadratureGrid::max_error(const ScalarField& f, const std::vector<double>& values) const {
    if (values.size() != points_.size())
        throw std::invalid_argument("max_error: sample count mismatch");
    double e = 0.0;
    for (size_t i = 0; i < points_.size(); ++i)
        e = std::max(e, std::abs(f.eval(points_[i]) - values[i]));
    return e;
}

ScalarField pointwise_map(const ScalarField& f, const QuadratureGrid& grid, int out_trunc,
                          double (*fn)(double)) {
    std::vector<double> v = grid.sample(f);
    for (double& x : v) x = fn(x);
    return grid.project(v, out_trunc);
}

}  // namespace sdifflab
