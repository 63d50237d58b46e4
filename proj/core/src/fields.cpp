#include "sdifflab/fields.hpp"

#include <cmath>

namespace sdifflab {

void ScalarField::check_mode(const Mode& m) const {
    if (!is_canonical(m)) throw std::invalid_argument("ScalarField: non-canonical mode");
    if (m.norm_inf() > trunc_) throw std::invalid_argument("ScalarField: mode outside truncation");
    if (m.is_zero() && m.parity == Parity::sin)
        throw std::invalid_argument("ScalarField: sin(0) is not a basis element");
    if (m.pol != 0) throw std::invalid_argument("ScalarField: scalar modes carry no polarization");
    for (int i = dim_; i < 3; ++i)
        if (m.k[i] != 0) throw std::invalid_argument("ScalarField: wavevector exceeds dimension");
}

void ScalarField::add(const Mode& m, double value) {
    check_mode(m);
    coeffs_[m] += value;
}

void ScalarField::set(const Mode& m, double value) {
    check_mode(m);
    coeffs_[m] = value;
}

void ScalarField::add_term(Parity parity, const std::array<int, 3>& k, double value) {
    int sign = canonical_sign(k);
    if (sign == 0) {
        if (parity == Parity::cos) coeffs_[Mode{}] += value;  // cos(0) = 1
        return;                                               // sin(0) = 0
    }
    Mode m{sign > 0 ? k : negated(k), parity};
    // cos is even in k, sin is odd
    double folded = (parity == Parity::sin && sign < 0) ? -value : value;
    check_mode(m);
    coeffs_[m] += folded;
}

double ScalarField::eval(const Vec& theta) const {
    if (theta.dim != dim_) throw std::invalid_argument("eval: point dimension mismatch");
    double s = 0.0;
    for (const auto& [m, a] : coeffs_) {
        double ph = m.phase(theta);
        s += a * (m.parity == Parity::cos ? std::cos(ph) : std::sin(ph));
    }
    return s;
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
    require_compatible(*this, o, "operator+=");
    for (const auto& [m, a] : o.coeffs_) coeffs_[m] += a;
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
    require_compatible(*this, o, "operator-=");
    for (const auto& [m, a] : o.coeffs_) coeffs_[m] -= a;
    return *this;
}

ScalarField& ScalarField::operator*=(double s) {
    for (auto& [m, a] : coeffs_) a *= s;
    return *this;
}

double ScalarField::max_abs_coeff() const {
    double s = 0.0;
    for (const auto& [m, a] : coeffs_) s = std::max(s, std::abs(a));
    return s;
}

void ScalarField::prune(double tol) {
    for (auto it = coeffs_.begin(); it != coeffs_.end();) {
        if (std::abs(it->second) <= tol)
            it = coeffs_.erase(it);
        else
            ++it;
    }
}

void VectorField::check_mode(const Mode& m) const {
    if (!is_canonical(m)) throw std::invalid_argument("VectorField: non-canonical mode");
    if (m.norm_inf() > trunc_) throw std::invalid_argument("VectorField: mode outside truncation");
    if (m.is_zero() && m.parity == Parity::sin)
        throw std::invalid_argument("VectorField: sin(0) is not a basis element");
    if (m.pol != 0) throw std::invalid_argument("VectorField: stored modes carry no polarization");
    for (int i = dim_; i < 3; ++i)
        if (m.k[i] != 0) throw std::invalid_argument("VectorField: wavevector exceeds dimension");
}

void VectorField::add(const Mode& m, const Vec& value) {
    check_mode(m);
    auto& slot = coeffs_[m];
    for (int i = 0; i < dim_; ++i) slot[i] += value[i];
    div_free_ = false;
}

void VectorField::add(const Mode& m, int component, double value) {
    check_mode(m);
    coeffs_[m][static_cast<size_t>(component)] += value;
    div_free_ = false;
}

void VectorField::add_term(Parity parity, const std::array<int, 3>& k, int component,
                           double value) {
    int sign = canonical_sign(k);
    if (sign == 0) {
        if (parity == Parity::cos) coeffs_[Mode{}][static_cast<size_t>(component)] += value;
        div_free_ = false;
        return;
    }
    Mode m{sign > 0 ? k : negated(k), parity};
    double folded = (parity == Parity::sin && sign < 0) ? -value : value;
    check_mode(m);
    coeffs_[m][static_cast<size_t>(component)] += folded;
    div_free_ = false;
}

Vec VectorField::eval(const Vec& theta) const {
    if (theta.dim != dim_) throw std::invalid_argument("eval: point dimension mismatch");
    Vec s(dim_);
    for (const auto& [m, a] : coeffs_) {
        double ph = m.phase(theta);
        double w = m.parity == Parity::cos ? std::cos(ph) : std::sin(ph);
        for (int i = 0; i < dim_; ++i) s[i] += a[i] * w;
    }
    return s;
}

std::vector<Vec> VectorField::eval(const std::vector<Vec>& thetas) const {
    std::vector<Vec> out;
    out.reserve(thetas.size());
    for (const auto& t : thetas) out.push_back(eval(t));
    return out;
}

VectorField& VectorField::operator+=(const VectorField& o) {
    require_compatible(*this, o, "operator+=");
    for (const auto& [m, a] : o.coeffs_) {
        auto& slot = coeffs_[m];
        for (int i = 0; i < dim_; ++i) slot[i] += a[i];
    }
    div_free_ = div_free_ && o.div_free_;
    return *this;
}

VectorField& VectorField::operator-=(const VectorField& o) {
    require_compatible(*this, o, "operator-=");
    for (const auto& [m, a] : o.coeffs_) {
        auto& slot = coeffs_[m];
        for (int i = 0; i < dim_; ++i) slot[i] -= a[i];
    }
    div_free_ = div_free_ && o.div_free_;
    return *this;
}

VectorField& VectorField::operator*=(double s) {
    for (auto& [m, a] : coeffs_)
        for (int i = 0; i < dim_; ++i) a[i] *= s;
    return *this;
}

double VectorField::max_abs_coeff() const {
    double s = 0.0;
    for (const auto& [m, a] : coeffs_)
        for (int i = 0; i < dim_; ++i) s = std::max(s, std::abs(a[i]));
    return s;
}

void VectorField::prune(double tol) {
    for (auto it = coeffs_.begin(); it != coeffs_.end();) {
        bool all_small = true;
        for (int i = 0; i < dim_; ++i)
            if (!(std::abs(it->second[i]) <= tol)) {  // NaN compares false: kept
                all_small = false;
                break;
            }
        if (all_small)
            it = coeffs_.erase(it);
        else
            ++it;
    }
}

ScalarField extend_to(const ScalarField& f, int trunc) {
    if (trunc < f.trunc()) throw std::invalid_argument("extend_to: target band smaller than source");
    ScalarField out(f.dim(), trunc);
    for (const auto& [m, a] : f.coeffs()) out.add(m, a);
    return out;
}

VectorField extend_to(const VectorField& u, int trunc) {
    if (trunc < u.trunc()) throw std::invalid_argument("extend_to: target band smaller than source");
    VectorField out(u.dim(), trunc);
    for (const auto& [m, a] : u.coeffs()) {
        Vec v(u.dim());
        for (int i = 0; i < u.dim(); ++i) v[i] = a[i];
        out.add(m, v);
    }
    out.set_div_free(u.div_free());
    return out;
}

ScalarField retruncate(const ScalarField& f, int trunc) {
    ScalarField out(f.dim(), trunc);
    for (const auto& [m, a] : f.coeffs())
        if (m.norm_inf() <= trunc) out.add(m, a);
    return out;
}

VectorField retruncate(const VectorField& u, int trunc) {
    VectorField out(u.dim(), trunc);
    for (const auto& [m, a] : u.coeffs())
        if (m.norm_inf() <= trunc) {
            Vec v(u.dim());
            for (int i = 0; i < u.dim(); ++i) v[i] = a[i];
            out.add(m, v);
        }
    out.set_div_free(u.div_free());
    return out;
}

ScalarField component(const VectorField& u, int c) {
    ScalarField out(u.dim(), u.trunc());
    for (const auto& [m, a] : u.coeffs()) out.add(m, a[static_cast<size_t>(c)]);
    return out;
}

VectorField assemble(const std::vector<ScalarField>& comps, bool div_free) {
    if (comps.empty()) throw std::invalid_argument("assemble: no components");
    const int d = static_cast<int>(comps.size());
    VectorField out(d, comps[0].trunc());
    for (int c = 0; c < d; ++c) {
        if (comps[c].dim() != d || comps[c].trunc() != comps[0].trunc())
            throw std::invalid_argument("assemble: incompatible components");
        for (const auto& [m, a] : comps[c].coeffs()) out.add(m, c, a);
    }
    out.set_div_free(div_free);
    return out;
}

void require_compatible(const ScalarField& a, const ScalarField& b, const char* what) {
    if (a.dim() != b.dim())
        throw std::invalid_argument(std::string(what) + ": dimension mismatch");
    if (a.trunc() != b.trunc())
        throw std::invalid_argument(std::string(what) +
                                    ": mixing truncations is an error, resample explicitly");
}

void require_compatible(const VectorField& a, const VectorField& b, const char* what) {
    if (a.dim() != b.dim())
        throw std::invalid_argument(std::string(what) + ": dimension mismatch");
    if (a.trunc() != b.trunc())
        throw std::invalid_argument(std::string(what) +
                                    ": mixing truncations is an error, resample explicitly");
}

}  // namespace sdifflab
