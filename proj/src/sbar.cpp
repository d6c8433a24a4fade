#include "fl3/sbar.hpp"

#include <algorithm>
#include <memory>

namespace fl3 {

const SbarRing& SbarRing::get(int p, int f, const FqField& field) {
    static std::vector<std::unique_ptr<SbarRing>> cache;
    for (const auto& r : cache)
        if (r->p == p && r->f == f && r->F == &field) return *r;
    cache.push_back(std::make_unique<SbarRing>(p, f, field));
    return *cache.back();
}

int SbarRing::inv_frob_exp(int a) const {
    long long r = mod_e(a);
    for (int i = 0; i < f - 1; ++i) r = (r * p) % e;
    return int(r);
}

SbarPoly SbarPoly::monomial(const SbarRing& R, const Tensor& t, int deg) {
    SbarPoly x(R);
    if (deg < R.ep) x.set_coeff(deg, t);
    return x;
}

bool SbarPoly::is_zero() const {
    for (auto v : c_)
        if (v) return false;
    return true;
}

Tensor SbarPoly::coeff(int deg) const {
    Tensor t;
    t.F = R_->F;
    t.c.assign(size_t(R_->f), 0);
    if (deg >= 0 && deg < R_->ep)
        for (int k = 0; k < R_->f; ++k) t.c[size_t(k)] = c_[size_t(deg) * R_->f + k];
    return t;
}

void SbarPoly::set_coeff(int deg, const Tensor& t) {
    if (deg < 0 || deg >= R_->ep) throw UsageError("degree out of range");
    for (int k = 0; k < R_->f; ++k) c_[size_t(deg) * R_->f + k] = t.c[size_t(k)];
}

std::vector<uint16_t> SbarPoly::component(int t) const {
    std::vector<uint16_t> r(size_t(R_->ep));
    for (int i = 0; i < R_->ep; ++i) r[size_t(i)] = c_[size_t(i) * R_->f + t];
    return r;
}

SbarPoly SbarPoly::operator+(const SbarPoly& o) const {
    SbarPoly r = *this;
    const FqField& F = *R_->F;
    for (size_t i = 0; i < c_.size(); ++i) r.c_[i] = F.add(c_[i], o.c_[i]);
    return r;
}

SbarPoly SbarPoly::operator-(const SbarPoly& o) const {
    SbarPoly r = *this;
    const FqField& F = *R_->F;
    for (size_t i = 0; i < c_.size(); ++i) r.c_[i] = F.sub(c_[i], o.c_[i]);
    return r;
}

SbarPoly SbarPoly::operator-() const {
    SbarPoly r = *this;
    const FqField& F = *R_->F;
    for (size_t i = 0; i < c_.size(); ++i) r.c_[i] = F.neg(c_[i]);
    return r;
}

SbarPoly SbarPoly::operator*(const SbarPoly& o) const {
    SbarPoly r(*R_);
    const FqField& F = *R_->F;
    int ep = R_->ep, f = R_->f;
    for (int i = 0; i < ep; ++i) {
        bool rowzero = true;
        for (int k = 0; k < f; ++k)
            if (c_[size_t(i) * f + k]) rowzero = false;
        if (rowzero) continue;
        for (int j = 0; j + i < ep; ++j) {
            for (int k = 0; k < f; ++k) {
                uint16_t x = c_[size_t(i) * f + k], y = o.c_[size_t(j) * f + k];
                if (x && y) {
                    size_t idx = size_t(i + j) * f + k;
                    r.c_[idx] = F.add(r.c_[idx], F.mul(x, y));
                }
            }
        }
    }
    return r;
}

SbarPoly SbarPoly::phi() const {
    SbarPoly r(*R_);
    int ep = R_->ep, f = R_->f;
    for (int i = 0; i * R_->p < ep; ++i) {
        Tensor t = coeff(i);
        if (!t.is_zero()) r.set_coeff(i * R_->p, t.frob_shift());
    }
    return r;
}

int SbarPoly::ord() const {
    for (int i = 0; i < R_->ep; ++i)
        for (int k = 0; k < R_->f; ++k)
            if (c_[size_t(i) * R_->f + k]) return i;
    return R_->ep;
}

bool SbarPoly::isotypic_in(int cls) const {
    cls = R_->mod_e(cls);
    for (int i = 0; i < R_->ep; ++i) {
        if (R_->mod_e(i) == cls) continue;
        for (int k = 0; k < R_->f; ++k)
            if (c_[size_t(i) * R_->f + k]) return false;
    }
    return true;
}

SbarPoly SbarPoly::inv_unit() const {
    const FqField& F = *R_->F;
    int ep = R_->ep, f = R_->f;
    SbarPoly r(*R_);
    for (int k = 0; k < f; ++k) {
        if (!c_[k]) throw NotAUnit("constant term vanishes in a component");
        // series inversion per component
        std::vector<uint16_t> inv(size_t(ep), 0);
        uint16_t c0inv = F.inv(c_[size_t(k)]);
        inv[0] = c0inv;
        for (int i = 1; i < ep; ++i) {
            uint16_t s = 0;
            for (int j = 1; j <= i; ++j) {
                uint16_t aj = c_[size_t(j) * f + k];
                if (aj) s = F.add(s, F.mul(aj, inv[size_t(i - j)]));
            }
            inv[size_t(i)] = F.neg(F.mul(s, c0inv));
        }
        for (int i = 0; i < ep; ++i) r.c_[size_t(i) * f + k] = inv[size_t(i)];
    }
    return r;
}

SbarPoly SbarPoly::divide_exact_u(int k) const {
    SbarPoly r(*R_);
    for (int i = 0; i < k && i < R_->ep; ++i)
        if (!coeff(i).is_zero()) throw Error("inexact division by u^k");
    for (int i = k; i < R_->ep; ++i) r.set_coeff(i - k, coeff(i));
    return r;
}

SbarPoly SbarPoly::truncated(int cap) const {
    SbarPoly r = *this;
    for (int i = std::max(cap, 0); i < R_->ep; ++i)
        for (int kk = 0; kk < R_->f; ++kk) r.c_[size_t(i) * R_->f + kk] = 0;
    return r;
}

GradedMatrix::GradedMatrix(const SbarRing& R, int n, GradingRule rule, std::vector<int> row_types,
                           std::vector<int> col_types)
    : R_(&R), n_(n), rule_(rule), row_types_(std::move(row_types)), col_types_(std::move(col_types)) {
    a_.assign(size_t(n) * n, SbarPoly(R));
    cls_.assign(size_t(n) * n, 0);
    recompute_classes();
}

void GradedMatrix::recompute_classes() {
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) {
            int c = 0;
            switch (rule_) {
                case GradingRule::Filtration:
                    c = R_->mod_e(R_->inv_frob_exp(col_types_[size_t(j)]) - row_types_[size_t(i)]);
                    break;
                case GradingRule::Frobenius:
                    c = R_->mod_e(col_types_[size_t(j)] - row_types_[size_t(i)]);
                    break;
                case GradingRule::PhiConj:
                    c = R_->inv_frob_exp(col_types_[size_t(j)] - row_types_[size_t(i)]);
                    break;
                case GradingRule::Custom:
                    c = cls_[size_t(i) * n_ + j];
                    break;
            }
            cls_[size_t(i) * n_ + j] = c;
        }
}

bool GradedMatrix::isotypic_check() const {
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            if (!at(i, j).isotypic_in(entry_class(i, j))) return false;
    return true;
}

bool GradedMatrix::operator==(const GradedMatrix& o) const {
    if (n_ != o.n_) return false;
    for (size_t i = 0; i < a_.size(); ++i)
        if (!(a_[i] == o.a_[i])) return false;
    return true;
}

GradedMatrix GradedMatrix::operator+(const GradedMatrix& o) const {
    GradedMatrix r = *this;
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] + o.a_[i];
    return r;
}

GradedMatrix GradedMatrix::operator-(const GradedMatrix& o) const {
    GradedMatrix r = *this;
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] - o.a_[i];
    return r;
}

GradedMatrix GradedMatrix::mul(const GradedMatrix& o) const {
    if (n_ != o.n_) throw UsageError("size mismatch");
    GradedMatrix r(*R_, n_, GradingRule::Custom, row_types_, o.col_types_);
    // compose rules where the product has a uniform class
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) {
            SbarPoly s(*R_);
            int cls = -1;
            for (int k = 0; k < n_; ++k) {
                s = s + at(i, k) * o.at(k, j);
                int c = R_->mod_e(entry_class(i, k) + o.entry_class(k, j));
                if (cls < 0) cls = c;
                else if (cls != c && !(at(i, k).is_zero() || o.at(k, j).is_zero()))
                    throw GradingViolation("product classes disagree");
            }
            r.at(i, j) = s;
            r.cls_[size_t(i) * n_ + j] = cls < 0 ? 0 : cls;
        }
    // recognize the standard compositions
    if (rule_ == GradingRule::Frobenius && o.rule_ == GradingRule::Filtration)
        r.rule_ = GradingRule::Filtration;
    else if (rule_ == GradingRule::Filtration && o.rule_ == GradingRule::PhiConj)
        r.rule_ = GradingRule::Filtration;
    else if (rule_ == GradingRule::Frobenius && o.rule_ == GradingRule::Frobenius)
        r.rule_ = GradingRule::Frobenius;
    return r;
}

GradedMatrix GradedMatrix::phi() const {
    GradedMatrix r = *this;
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i].phi();
    for (auto& c : r.cls_) c = R_->mod_e(int64_t(c) * R_->p);
    if (rule_ == GradingRule::PhiConj) r.rule_ = GradingRule::Frobenius;
    else r.rule_ = GradingRule::Custom;
    return r;
}

GradedMatrix GradedMatrix::transpose() const {
    GradedMatrix r(*R_, n_, GradingRule::Custom, col_types_, row_types_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) {
            r.at(i, j) = at(j, i);
            r.cls_[size_t(i) * n_ + j] = entry_class(j, i);
        }
    return r;
}

SbarPoly GradedMatrix::det() const {
    if (n_ == 1) return at(0, 0);
    if (n_ == 2) return at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0);
    if (n_ == 3) {
        SbarPoly s = at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1));
        s = s - at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0));
        s = s + at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
        return s;
    }
    throw UsageError("det: n <= 3 only");
}

GradedMatrix GradedMatrix::adjugate() const {
    GradedMatrix r(*R_, n_, GradingRule::Custom, col_types_, row_types_);
    if (n_ == 1) {
        Tensor one(*R_->F, R_->f, 1);
        r.at(0, 0) = SbarPoly::constant(*R_, one);
        r.cls_[0] = 0;
        return r;
    }
    if (n_ == 2) {
        r.at(0, 0) = at(1, 1);
        r.at(0, 1) = -at(0, 1);
        r.at(1, 0) = -at(1, 0);
        r.at(1, 1) = at(0, 0);
    } else if (n_ == 3) {
        auto cof = [&](int i, int j) {
            int r0 = (i + 1) % 3, r1 = (i + 2) % 3, c0 = (j + 1) % 3, c1 = (j + 2) % 3;
            return at(r0, c0) * at(r1, c1) - at(r0, c1) * at(r1, c0);
        };
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.at(i, j) = cof(j, i);
    } else {
        throw UsageError("adjugate: n <= 3 only");
    }
    // classes: adj_{ij} = det-class - class(j, i)
    SbarPoly d = det();
    int dcls = 0;
    {
        int deg = d.ord();
        if (deg < R_->ep) dcls = R_->mod_e(deg);
        else {
            // zero det: classes from the cofactor structure of row/col types
            int s = 0;
            for (int k = 0; k < n_; ++k) s += entry_class(k, k);
            dcls = R_->mod_e(s);
        }
    }
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) r.cls_[size_t(i) * n_ + j] = R_->mod_e(dcls - entry_class(j, i));
    return r;
}

GradedMatrix GradedMatrix::invert_unit() const {
    SbarPoly d = det();
    if (!d.is_unit()) throw NotAUnit("determinant is not a unit");
    SbarPoly dinv = d.inv_unit();
    GradedMatrix r = adjugate();
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) r.at(i, j) = r.at(i, j) * dinv;
    if (rule_ == GradingRule::Frobenius) r.rule_ = GradingRule::Frobenius;
    if (rule_ == GradingRule::PhiConj) r.rule_ = GradingRule::PhiConj;
    return r;
}

GradedMatrix GradedMatrix::scalar_mul(const SbarPoly& s) const {
    GradedMatrix r = *this;
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] * s;
    return r;
}

GradedMatrix GradedMatrix::divide_exact_u(int k) const {
    GradedMatrix r = *this;
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i].divide_exact_u(k);
    return r;
}

bool GradedMatrix::congruent_mod_u(const GradedMatrix& o, int k) const {
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) {
            SbarPoly d = at(i, j) - o.at(i, j);
            if (d.ord() < std::min(k, R_->ep)) return false;
        }
    return true;
}

GradedMatrix GradedMatrix::identity(const SbarRing& R, const std::vector<int>& types) {
    GradedMatrix r(R, int(types.size()), GradingRule::Frobenius, types, types);
    Tensor one(*R.F, R.f, 1);
    for (int i = 0; i < r.n(); ++i) r.at(i, i) = SbarPoly::constant(R, one);
    return r;
}

std::vector<int> smith_exponents_poly(std::vector<std::vector<std::vector<uint16_t>>> W,
                                      const FqField& F, int cap) {
    int n = int(W.size());
    auto ordp = [&](const std::vector<uint16_t>& v) {
        for (int i = 0; i < cap; ++i)
            if (v[size_t(i)]) return i;
        return cap;
    };
    std::vector<int> exps;
    for (int step = 0; step < n; ++step) {
        int bi = -1, bj = -1, bord = cap;
        for (int i = step; i < n; ++i)
            for (int j = step; j < n; ++j) {
                int o = ordp(W[size_t(i)][size_t(j)]);
                if (o < bord) {
                    bord = o;
                    bi = i;
                    bj = j;
                }
            }
        if (bi < 0) throw SingularModCap("matrix singular modulo u^cap");
        std::swap(W[size_t(step)], W[size_t(bi)]);
        for (int i = 0; i < n; ++i) std::swap(W[size_t(i)][size_t(step)], W[size_t(i)][size_t(bj)]);
        int v = bord;
        // normalize the pivot to exactly u^v: multiply the row by the inverse
        // of its unit-series part
        std::vector<uint16_t> unit(size_t(cap), 0);
        for (int i = v; i < cap; ++i) unit[size_t(i - v)] = W[size_t(step)][size_t(step)][size_t(i)];
        std::vector<uint16_t> uinv(size_t(cap), 0);
        uinv[0] = F.inv(unit[0]);
        for (int i = 1; i < cap; ++i) {
            uint16_t s = 0;
            for (int j = 1; j <= i; ++j)
                if (unit[size_t(j)]) s = F.add(s, F.mul(unit[size_t(j)], uinv[size_t(i - j)]));
            uinv[size_t(i)] = F.neg(F.mul(s, uinv[0]));
        }
        auto mulp = [&](const std::vector<uint16_t>& a, const std::vector<uint16_t>& b) {
            std::vector<uint16_t> r(size_t(cap), 0);
            for (int i = 0; i < cap; ++i) {
                if (!a[size_t(i)]) continue;
                for (int j = 0; j + i < cap; ++j)
                    if (b[size_t(j)]) r[size_t(i + j)] = F.add(r[size_t(i + j)], F.mul(a[size_t(i)], b[size_t(j)]));
            }
            return r;
        };
        for (int j = step; j < n; ++j) W[size_t(step)][size_t(j)] = mulp(W[size_t(step)][size_t(j)], uinv);
        // clear the column below and the row to the right
        for (int i = step + 1; i < n; ++i) {
            auto& x = W[size_t(i)][size_t(step)];
            if (ordp(x) >= cap) continue;
            std::vector<uint16_t> g(size_t(cap), 0);  // x / u^v
            for (int d = v; d < cap; ++d) g[size_t(d - v)] = x[size_t(d)];
            for (int j = step; j < n; ++j) {
                auto prod = mulp(g, W[size_t(step)][size_t(j)]);
                for (int d = 0; d < cap; ++d)
                    W[size_t(i)][size_t(j)][size_t(d)] = F.sub(W[size_t(i)][size_t(j)][size_t(d)], prod[size_t(d)]);
            }
        }
        for (int j = step + 1; j < n; ++j) {
            auto& x = W[size_t(step)][size_t(j)];
            if (ordp(x) >= cap) continue;
            std::vector<uint16_t> g(size_t(cap), 0);
            for (int d = v; d < cap; ++d) g[size_t(d - v)] = x[size_t(d)];
            for (int i = step; i < n; ++i) {
                auto prod = mulp(g, W[size_t(i)][size_t(step)]);
                for (int d = 0; d < cap; ++d)
                    W[size_t(i)][size_t(j)][size_t(d)] = F.sub(W[size_t(i)][size_t(j)][size_t(d)], prod[size_t(d)]);
            }
        }
        exps.push_back(v);
    }
    std::sort(exps.begin(), exps.end());
    return exps;
}

std::vector<int> smith_exponents(const GradedMatrix& M, int cap) {
    const SbarRing& R = M.ring();
    if (cap > R.ep) cap = R.ep;
    std::vector<int> result;
    for (int t = 0; t < R.f; ++t) {
        std::vector<std::vector<std::vector<uint16_t>>> W(
            size_t(M.n()), std::vector<std::vector<uint16_t>>(size_t(M.n())));
        for (int i = 0; i < M.n(); ++i)
            for (int j = 0; j < M.n(); ++j) {
                auto v = M.at(i, j).component(t);
                v.resize(size_t(cap));
                W[size_t(i)][size_t(j)] = std::move(v);
            }
        auto exps = smith_exponents_poly(std::move(W), *R.F, cap);
        if (t == 0) result = exps;
        else if (result != exps)
            throw ComponentMismatch("smith exponents differ across idempotent components");
    }
    return result;
}

}  // namespace fl3
