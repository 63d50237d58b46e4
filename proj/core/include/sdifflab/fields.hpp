#pragma once

#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "sdifflab/mode.hpp"
#include "sdifflab/vec.hpp"

namespace sdifflab {

/// Band-limited real scalar function on T^d:
///   f(theta) = sum_k  a_k cos(k.theta) + b_k sin(k.theta)
/// over canonical wavevectors with |k|_inf <= trunc. Coefficients of the
/// non-canonical sign partner are implied (cos even, sin odd).
class ScalarField {
  public:
    ScalarField() = default;
    ScalarField(int dim, int trunc) : dim_(dim), trunc_(trunc) {
        if (dim < 1 || dim > 3) throw std::invalid_argument("ScalarField: dim must be 1..3");
        if (trunc < 0) throw std::invalid_argument("ScalarField: negative truncation");
    }

    int dim() const { return dim_; }
    int trunc() const { return trunc_; }

    double coeff(const Mode& m) const {
        auto it = coeffs_.find(m);
        return it == coeffs_.end() ? 0.0 : it->second;
    }

    /// Accumulate into a canonical in-band mode. Throws on out-of-band or
    /// non-canonical modes; sin(0) is rejected rather than silently dropped.
    void add(const Mode& m, double value);
    void set(const Mode& m, double value);

    /// Accumulate a raw trigonometric term cos/sin(k.theta) with arbitrary
    /// sign of k, folding it onto the canonical representative.
    void add_term(Parity parity, const std::array<int, 3>& k, double value);

    double eval(const Vec& theta) const;

    ScalarField& operator+=(const ScalarField& o);
    ScalarField& operator-=(const ScalarField& o);
    ScalarField& operator*=(double s);
    friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
    friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
    friend ScalarField operator*(double s, ScalarField a) { return a *= s; }

    const std::map<Mode, double>& coeffs() const { return coeffs_; }
    size_t mode_count() const { return coeffs_.size(); }
    double max_abs_coeff() const;
    double mean() const { return coeff(Mode{}); }

    /// Drop stored coefficients with |a| <= tol (exact zeros by default).
    void prune(double tol = 0.0);

  private:
    void check_mode(const Mode& m) const;

    int dim_ = 0;
    int trunc_ = 0;
    std::map<Mode, double> coeffs_;
};

/// Band-limited vector field on T^d, one coefficient vector per mode.
/// div_free is a certificate maintained by the operators that guarantee it
/// (Leray projection, basis construction), never inferred.
class VectorField {
  public:
    VectorField() = default;
    VectorField(int dim, int trunc) : dim_(dim), trunc_(trunc) {
        if (dim < 1 || dim > 3) throw std::invalid_argument("VectorField: dim must be 1..3");
        if (trunc < 0) throw std::invalid_argument("VectorField: negative truncation");
    }

    int dim() const { return dim_; }
    int trunc() const { return trunc_; }
    bool div_free() const { return div_free_; }
    void set_div_free(bool f) { div_free_ = f; }

    Vec coeff(const Mode& m) const {
        auto it = coeffs_.find(m);
        if (it == coeffs_.end()) return Vec(dim_);
        Vec v(dim_);
        for (int i = 0; i < dim_; ++i) v[i] = it->second[i];
        return v;
    }
    double coeff(const Mode& m, int component) const {
        auto it = coeffs_.find(m);
        return it == coeffs_.end() ? 0.0 : it->second[static_cast<size_t>(component)];
    }

    void add(const Mode& m, const Vec& value);
    void add(const Mode& m, int component, double value);
    void add_term(Parity parity, const std::array<int, 3>& k, int component, double value);

    Vec eval(const Vec& theta) const;
    std::vector<Vec> eval(const std::vector<Vec>& thetas) const;

    VectorField& operator+=(const VectorField& o);
    VectorField& operator-=(const VectorField& o);
    VectorField& operator*=(double s);
    friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
    friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
    friend VectorField operator*(double s, VectorField a) { return a *= s; }

    const std::map<Mode, std::array<double, 3>>& coeffs() const { return coeffs_; }
    size_t mode_count() const { return coeffs_.size(); }
    double max_abs_coeff() const;
    void prune(double tol = 0.0);

  private:
    void check_mode(const Mode& m) const;

    int dim_ = 0;
    int trunc_ = 0;
    std::map<Mode, std::array<double, 3>> coeffs_;
    bool div_free_ = false;
};

/// Mixing truncations is an error everywhere; moving a field between bands is
/// always explicit.
ScalarField extend_to(const ScalarField& f, int trunc);
VectorField extend_to(const VectorField& u, int trunc);
ScalarField retruncate(const ScalarField& f, int trunc);
VectorField retruncate(const VectorField& u, int trunc);

ScalarField component(const VectorField& u, int c);
VectorField assemble(const std::vector<ScalarField>& comps, bool div_free = false);

void require_compatible(const ScalarField& a, const ScalarField& b, const char* what);
void require_compatible(const VectorField& a, const VectorField& b, const char* what);

}  // namespace sdifflab
