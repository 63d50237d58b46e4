#include "sdifflab/evaluator.hpp"

#include <cmath>

namespace sdifflab {

namespace {

constexpr int kMaxTable = 128;

// cos/sin(j * x) for j = 0..n via the angle-addition recurrence.
inline void fill_tables(double x, int n, double* c, double* s) {
    c[0] = 1.0;
    s[0] = 0.0;
    if (n == 0) return;
    const double c1 = std::cos(x), s1 = std::sin(x);
    c[1] = c1;
    s[1] = s1;
    for (int j = 2; j <= n; ++j) {
        c[j] = c[j - 1] * c1 - s[j - 1] * s1;
        s[j] = s[j - 1] * c1 + c[j - 1] * s1;
    }
}

// cos/sin of k.theta from per-axis tables, signed indices folded by symmetry.
inline void mode_trig(const std::array<int16_t, 3>& k, int dim, const double* ct, const double* st,
                      int stride, double& cos_out, double& sin_out) {
    double cr = 1.0, sr = 0.0;
    for (int ax = 0; ax < dim; ++ax) {
        int kk = k[static_cast<size_t>(ax)];
        int a = kk < 0 ? -kk : kk;
        double ca = ct[ax * stride + a];
        double sa = st[ax * stride + a];
        if (kk < 0) sa = -sa;
        double cn = cr * ca - sr * sa;
        double sn = sr * ca + cr * sa;
        cr = cn;
        sr = sn;
    }
    cos_out = cr;
    sin_out = sr;
}

}  // namespace

ScalarEvaluator::ScalarEvaluator(const ScalarField& f) : dim_(f.dim()), trunc_(f.trunc()) {
    if (trunc_ >= kMaxTable) throw std::invalid_argument("ScalarEvaluator: truncation too large");
    terms_.reserve(f.mode_count());
    for (const auto& [m, a] : f.coeffs()) {
        if (a == 0.0) continue;
        Term t;
        for (int i = 0; i < 3; ++i) t.k[i] = static_cast<int16_t>(m.k[i]);
        t.parity = static_cast<uint8_t>(m.parity);
        t.coeff = a;
        terms_.push_back(t);
    }
}

double ScalarEvaluator::operator()(const Vec& theta) const {
    if (terms_.empty()) return 0.0;
    const int stride = trunc_ + 1;
    double ct[3 * (kMaxTable + 1)];
    double st[3 * (kMaxTable + 1)];
    for (int ax = 0; ax < dim_; ++ax)
        fill_tables(theta[ax], trunc_, ct + ax * stride, st + ax * stride);
    double acc = 0.0;
    for (const Term& t : terms_) {
        double c, s;
        mode_trig(t.k, dim_, ct, st, stride, c, s);
        acc += t.coeff * (t.parity == 0 ? c : s);
    }
    return acc;
}

VectorEvaluator::VectorEvaluator(const VectorField& u) : dim_(u.dim()), trunc_(u.trunc()) {
    if (trunc_ >= kMaxTable) throw std::invalid_argument("VectorEvaluator: truncation too large");
    terms_.reserve(u.mode_count());
    for (const auto& [m, a] : u.coeffs()) {
        Term t;
        for (int i = 0; i < 3; ++i) t.k[i] = static_cast<int16_t>(m.k[i]);
        t.parity = static_cast<uint8_t>(m.parity);
        t.coeff = a;
        terms_.push_back(t);
    }
}

Vec VectorEvaluator::operator()(const Vec& theta) const {
    if (terms_.empty()) return Vec(dim_);
    const int stride = trunc_ + 1;
    double ct[3 * (kMaxTable + 1)];
    double st[3 * (kMaxTable + 1)];
    for (int ax = 0; ax < dim_; ++ax)
        fill_tables(theta[ax], trunc_, ct + ax * stride, st + ax * stride);
    Vec acc(dim_);
    for (const Term& t : terms_) {
        double c, s;
        mode_trig(t.k, dim_, ct, st, stride, c, s);
        const double w = t.parity == 0 ? c : s;
        for (int i = 0; i < dim_; ++i) acc[i] += t.coeff[static_cast<size_t>(i)] * w;
    }
    return acc;
}

Vec VectorEvaluator::eval_with_jacobian(const Vec& theta, Mat& jac_out) const {
    const int stride = trunc_ + 1;
    double ct[3 * (kMaxTable + 1)];
    double st[3 * (kMaxTable + 1)];
    for (int ax = 0; ax < dim_; ++ax)
        fill_tables(theta[ax], trunc_, ct + ax * stride, st + ax * stride);
    Vec acc(dim_);
    jac_out = Mat(dim_);
    for (const Term& t : terms_) {
        double c, s;
        mode_trig(t.k, dim_, ct, st, stride, c, s);
        // d/dtheta_j of cos(k.theta) = -k_j sin, of sin(k.theta) = k_j cos
        const double w = t.parity == 0 ? c : s;
        const double dw = t.parity == 0 ? -s : c;
        for (int i = 0; i < dim_; ++i) {
            const double a = t.coeff[static_cast<size_t>(i)];
            acc[i] += a * w;
            for (int j = 0; j < dim_; ++j)
                jac_out(i, j) += a * dw * t.k[static_cast<size_t>(j)];
        }
    }
    return acc;
}

}  // namespace sdifflab
