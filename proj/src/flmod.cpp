#include "fl3/flmod.hpp"

#include <algorithm>
#include <random>

namespace fl3 {

TMat TMat::identity(const FqField& field, int f, int n) {
    TMat m(field, f, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = Tensor(field, f, 1);
    return m;
}

TMat TMat::mul(const TMat& o) const {
    TMat r(*F, f, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Tensor s(*F, f, 0);
            for (int k = 0; k < n; ++k) s = s + at(i, k) * o.at(k, j);
            r.at(i, j) = s;
        }
    return r;
}

std::vector<uint16_t> TMat::component(int t) const {
    std::vector<uint16_t> m(size_t(n) * n);
    for (size_t i = 0; i < a.size(); ++i) m[i] = a[i].c[size_t(t)];
    return m;
}

void TMat::set_component(int t, const std::vector<uint16_t>& m) {
    for (size_t i = 0; i < a.size(); ++i) a[i].c[size_t(t)] = m[i];
}

TMat TMat::inv() const {
    TMat r(*F, f, n);
    for (int t = 0; t < f; ++t) {
        auto m = component(t);
        // Gauss-Jordan over F_q
        std::vector<uint16_t> inv(size_t(n) * n, 0);
        for (int i = 0; i < n; ++i) inv[size_t(i) * n + i] = 1;
        for (int col = 0; col < n; ++col) {
            int piv = -1;
            for (int i = col; i < n; ++i)
                if (m[size_t(i) * n + col]) {
                    piv = i;
                    break;
                }
            if (piv < 0) throw NotInvertible("singular matrix component");
            for (int j = 0; j < n; ++j) {
                std::swap(m[size_t(col) * n + j], m[size_t(piv) * n + j]);
                std::swap(inv[size_t(col) * n + j], inv[size_t(piv) * n + j]);
            }
            uint16_t d = F->inv(m[size_t(col) * n + col]);
            for (int j = 0; j < n; ++j) {
                m[size_t(col) * n + j] = F->mul(m[size_t(col) * n + j], d);
                inv[size_t(col) * n + j] = F->mul(inv[size_t(col) * n + j], d);
            }
            for (int i = 0; i < n; ++i) {
                if (i == col) continue;
                uint16_t c = m[size_t(i) * n + col];
                if (!c) continue;
                for (int j = 0; j < n; ++j) {
                    m[size_t(i) * n + j] = F->sub(m[size_t(i) * n + j], F->mul(c, m[size_t(col) * n + j]));
                    inv[size_t(i) * n + j] = F->sub(inv[size_t(i) * n + j], F->mul(c, inv[size_t(col) * n + j]));
                }
            }
        }
        r.set_component(t, inv);
    }
    return r;
}

TMat TMat::transpose() const {
    TMat r(*F, f, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r.at(i, j) = at(j, i);
    return r;
}

TMat TMat::frob_shift() const {
    TMat r = *this;
    for (auto& t : r.a) t = t.frob_shift();
    return r;
}

TSeries TSeries::monomial(const FqField& field, int f, int prec, const Tensor& t, int deg) {
    TSeries s(field, f, prec);
    if (deg < prec) s.set_coeff(deg, t);
    return s;
}

Tensor TSeries::coeff(int d) const {
    Tensor t;
    t.F = F_;
    t.c.assign(size_t(f_), 0);
    if (d >= 0 && d < prec_)
        for (int k = 0; k < f_; ++k) t.c[size_t(k)] = c_[size_t(d) * f_ + k];
    return t;
}

void TSeries::set_coeff(int d, const Tensor& t) {
    if (d < 0 || d >= prec_) throw UsageError("series degree out of range");
    for (int k = 0; k < f_; ++k) c_[size_t(d) * f_ + k] = t.c[size_t(k)];
}

bool TSeries::is_zero() const {
    for (auto v : c_)
        if (v) return false;
    return true;
}

int TSeries::ord() const {
    for (int d = 0; d < prec_; ++d)
        for (int k = 0; k < f_; ++k)
            if (c_[size_t(d) * f_ + k]) return d;
    return prec_;
}

TSeries TSeries::operator+(const TSeries& o) const {
    TSeries r = *this;
    for (size_t i = 0; i < c_.size(); ++i) r.c_[i] = F_->add(c_[i], o.c_[i]);
    return r;
}

TSeries TSeries::operator-(const TSeries& o) const {
    TSeries r = *this;
    for (size_t i = 0; i < c_.size(); ++i) r.c_[i] = F_->sub(c_[i], o.c_[i]);
    return r;
}

TSeries TSeries::operator-() const {
    TSeries r = *this;
    for (size_t i = 0; i < c_.size(); ++i) r.c_[i] = F_->neg(c_[i]);
    return r;
}

TSeries TSeries::operator*(const TSeries& o) const {
    TSeries r(*F_, f_, prec_);
    for (int i = 0; i < prec_; ++i) {
        bool nz = false;
        for (int k = 0; k < f_; ++k)
            if (c_[size_t(i) * f_ + k]) nz = true;
        if (!nz) continue;
        for (int j = 0; j + i < prec_; ++j)
            for (int k = 0; k < f_; ++k) {
                uint16_t x = c_[size_t(i) * f_ + k], y = o.c_[size_t(j) * f_ + k];
                if (x && y) {
                    size_t idx = size_t(i + j) * f_ + k;
                    r.c_[idx] = F_->add(r.c_[idx], F_->mul(x, y));
                }
            }
    }
    return r;
}

TSeries TSeries::phi(int p) const {
    TSeries r(*F_, f_, prec_);
    for (int d = 0; int64_t(d) * p < prec_; ++d) {
        Tensor t = coeff(d);
        if (!t.is_zero()) r.set_coeff(d * p, t.frob_shift());
    }
    return r;
}

TSeries TSeries::inv_unit() const {
    TSeries r(*F_, f_, prec_);
    for (int k = 0; k < f_; ++k) {
        if (!c_[size_t(k)]) throw NotAUnit("series constant term vanishes");
        std::vector<uint16_t> inv(size_t(prec_), 0);
        uint16_t c0i = F_->inv(c_[size_t(k)]);
        inv[0] = c0i;
        for (int i = 1; i < prec_; ++i) {
            uint16_t s = 0;
            for (int j = 1; j <= i; ++j) {
                uint16_t aj = c_[size_t(j) * f_ + k];
                if (aj) s = F_->add(s, F_->mul(aj, inv[size_t(i - j)]));
            }
            inv[size_t(i)] = F_->neg(F_->mul(s, c0i));
        }
        for (int i = 0; i < prec_; ++i) r.c_[size_t(i) * f_ + k] = inv[size_t(i)];
    }
    return r;
}

TSeries TSeries::divide_exact(int k) const {
    for (int d = 0; d < k && d < prec_; ++d)
        if (!coeff(d).is_zero()) throw Error("inexact pbar-division");
    TSeries r(*F_, f_, prec_);
    for (int d = k; d < prec_; ++d) r.set_coeff(d - k, coeff(d));
    return r;
}

PhiPSeriesMatrix::PhiPSeriesMatrix(const FqField& field, int f, int p_, int n_, int prec_)
    : p(p_), n(n_), prec(prec_) {
    a.assign(size_t(n_) * n_, TSeries(field, f, prec_));
}

PhiPSeriesMatrix PhiPSeriesMatrix::mul(const PhiPSeriesMatrix& o) const {
    PhiPSeriesMatrix r(field(), f(), p, n, prec);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            TSeries s(field(), f(), prec);
            for (int k = 0; k < n; ++k) s = s + at(i, k) * o.at(k, j);
            r.at(i, j) = s;
        }
    return r;
}

PhiPSeriesMatrix PhiPSeriesMatrix::phi() const {
    PhiPSeriesMatrix r = *this;
    for (auto& s : r.a) s = s.phi(p);
    return r;
}

PhiPSeriesMatrix PhiPSeriesMatrix::inv_unit() const {
    if (n > 3) throw UsageError("inv_unit: n <= 3 only");
    PhiPSeriesMatrix r(field(), f(), p, n, prec);
    // adjugate / det over the series ring
    auto det2 = [&](int r0, int r1, int c0, int c1) {
        return at(r0, c0) * at(r1, c1) - at(r0, c1) * at(r1, c0);
    };
    TSeries d(field(), f(), prec);
    if (n == 1) d = at(0, 0);
    else if (n == 2) d = det2(0, 1, 0, 1);
    else
        d = at(0, 0) * det2(1, 2, 1, 2) - at(0, 1) * det2(1, 2, 0, 2) + at(0, 2) * det2(1, 2, 0, 1);
    TSeries dinv = d.inv_unit();
    if (n == 1) {
        r.at(0, 0) = dinv;
        return r;
    }
    if (n == 2) {
        r.at(0, 0) = at(1, 1) * dinv;
        r.at(0, 1) = -at(0, 1) * dinv;
        r.at(1, 0) = -at(1, 0) * dinv;
        r.at(1, 1) = at(0, 0) * dinv;
        return r;
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            int r0 = (j + 1) % 3, r1 = (j + 2) % 3, c0 = (i + 1) % 3, c1 = (i + 2) % 3;
            r.at(i, j) = det2(r0, r1, c0, c1) * dinv;
        }
    return r;
}

bool PhiPSeriesMatrix::congruent(const PhiPSeriesMatrix& o, int k) const {
    for (size_t i = 0; i < a.size(); ++i) {
        TSeries d = a[i] - o.a[i];
        if (d.ord() < std::min(k, prec)) return false;
    }
    return true;
}

ProjPoint fl_invariant_fq(const FqField& F, const std::vector<uint16_t>& m) {
    // m is 3x3 row-major upper triangular
    uint16_t mu0 = m[0], mu1 = m[4], mu2 = m[8];
    uint16_t a01 = m[1], a02 = m[2], a12 = m[5];
    if (m[3] || m[6] || m[7]) throw UsageError("matrix not upper triangular");
    if (!mu0 || !mu1 || !mu2) throw NotInvertible("vanishing diagonal entry");
    if (!a01 || !a12) throw NotMaximallyNonSplit("a01 a12 = 0");
    if (!a02) return ProjPoint::infinity();
    uint16_t num = F.sub(F.mul(a01, a12), F.mul(a02, mu1));
    uint16_t den = F.neg(a02);
    return ProjPoint::of(Fq::raw(F, F.mul(num, F.inv(den))));
}

ProjPoint fl_invariant(const TMat& M) {
    if (M.n != 3) throw UsageError("fl_invariant: 3x3 only");
    ProjPoint out;
    for (int t = 0; t < M.f; ++t) {
        ProjPoint x = fl_invariant_fq(*M.F, M.component(t));
        if (t == 0) out = x;
        else if (!(out == x))
            throw ComponentMismatch("FL class differs across components");
    }
    return out;
}

std::pair<TMat, TMat> upper_triangularize(const TMat& Fm) {
    if (Fm.n != 3) throw UsageError("upper_triangularize: 3x3 only");
    const FqField& F = *Fm.F;
    TMat A(F, Fm.f, 3), U(F, Fm.f, 3);
    for (int t = 0; t < Fm.f; ++t) {
        auto m = Fm.component(t);
        if (!m[0]) throw PivotFailure("F(0,0) = 0");
        // clear below the (0,0) pivot with lower-unipotent row operations
        std::vector<uint16_t> L(9, 0);
        L[0] = L[4] = L[8] = 1;
        auto rowop = [&](int i, int k, uint16_t c) {  // row_i += c * row_k
            for (int j = 0; j < 3; ++j) m[size_t(i) * 3 + j] = F.add(m[size_t(i) * 3 + j], F.mul(c, m[size_t(k) * 3 + j]));
            for (int j = 0; j < 3; ++j) L[size_t(i) * 3 + j] = F.add(L[size_t(i) * 3 + j], F.mul(c, L[size_t(k) * 3 + j]));
        };
        rowop(1, 0, F.neg(F.mul(m[3], F.inv(m[0]))));
        rowop(2, 0, F.neg(F.mul(m[6], F.inv(m[0]))));
        if (!m[4]) throw PivotFailure("leading 2x2 minor vanishes");
        rowop(2, 1, F.neg(F.mul(m[7], F.inv(m[4]))));
        if (!m[8]) throw NotInvertible("matrix is singular");
        A.set_component(t, L);
        U.set_component(t, m);
    }
    return {A, U};
}

TMat fl_dual(const TMat& Fm) {
    if (Fm.n != 3) throw UsageError("fl_dual: 3x3 only");
    TMat Finv = Fm.inv().transpose();
    TMat r(*Fm.F, Fm.f, 3);
    // J M J with J the antidiagonal: reverse rows and columns
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.at(i, j) = Finv.at(2 - i, 2 - j);
    return r;
}

PhiPSeriesMatrix fl_to_phi_matrix(const FLModule& M, int prec) {
    if (prec < 0) prec = default_pbar_prec(M.p);
    const FqField& F = *M.frobenius.F;
    PhiPSeriesMatrix r(F, M.frobenius.f, M.p, M.n, prec);
    for (int i = 0; i < M.n; ++i)
        for (int j = 0; j < M.n; ++j)
            r.at(i, j) = TSeries::monomial(F, M.frobenius.f, prec, M.frobenius.at(i, j), M.weights[size_t(i)]);
    return r;
}

namespace {

// Smith decomposition over F[[pbar]] truncated at prec, per component in
// lockstep: returns exponents (ascending) and U, V with U Phi V = D.
struct SeriesSmith {
    std::vector<int> exps;
    PhiPSeriesMatrix U, V;
};

SeriesSmith series_smith(const PhiPSeriesMatrix& Phi) {
    const FqField& F = Phi.field();
    int f = Phi.f(), n = Phi.n, prec = Phi.prec, p = Phi.p;
    PhiPSeriesMatrix W = Phi;
    PhiPSeriesMatrix U(F, f, p, n, prec), V(F, f, p, n, prec);
    Tensor one(F, f, 1);
    for (int i = 0; i < n; ++i) {
        U.at(i, i) = TSeries::monomial(F, f, prec, one, 0);
        V.at(i, i) = TSeries::monomial(F, f, prec, one, 0);
    }
    SeriesSmith out{{}, U, V};
    for (int step = 0; step < n; ++step) {
        int bi = -1, bj = -1, bord = prec;
        for (int i = step; i < n; ++i)
            for (int j = step; j < n; ++j) {
                int o = W.at(i, j).ord();
                if (o < bord) {
                    bord = o;
                    bi = i;
                    bj = j;
                }
            }
        if (bi < 0) throw SingularModCap("phi-matrix singular at working precision");
        // the pivot's leading coefficient must be a unit across components
        if (!W.at(bi, bj).coeff(bord).is_unit())
            throw ComponentMismatch("pivot orders differ across idempotent components");
        for (int j = 0; j < n; ++j) std::swap(W.at(step, j), W.at(bi, j));
        for (int j = 0; j < n; ++j) std::swap(out.U.at(step, j), out.U.at(bi, j));
        for (int i = 0; i < n; ++i) std::swap(W.at(i, step), W.at(i, bj));
        for (int i = 0; i < n; ++i) std::swap(out.V.at(i, step), out.V.at(i, bj));
        int v = bord;
        TSeries unit = W.at(step, step).divide_exact(v);
        TSeries uinv = unit.inv_unit();
        for (int j = 0; j < n; ++j) {
            W.at(step, j) = uinv * W.at(step, j);
            out.U.at(step, j) = uinv * out.U.at(step, j);
        }
        for (int i = step + 1; i < n; ++i) {
            if (W.at(i, step).ord() >= prec) continue;
            TSeries g = W.at(i, step).divide_exact(v);
            for (int j = 0; j < n; ++j) {
                W.at(i, j) = W.at(i, j) - g * W.at(step, j);
                out.U.at(i, j) = out.U.at(i, j) - g * out.U.at(step, j);
            }
        }
        for (int j = step + 1; j < n; ++j) {
            if (W.at(step, j).ord() >= prec) continue;
            TSeries g = W.at(step, j).divide_exact(v);
            for (int i = 0; i < n; ++i) {
                W.at(i, j) = W.at(i, j) - g * W.at(i, step);
                out.V.at(i, j) = out.V.at(i, j) - g * out.V.at(i, step);
            }
        }
        out.exps.push_back(v);
    }
    return out;
}

TMat constant_term(const PhiPSeriesMatrix& M) {
    TMat r(M.field(), M.f(), M.n);
    for (int i = 0; i < M.n; ++i)
        for (int j = 0; j < M.n; ++j) r.at(i, j) = M.at(i, j).coeff(0);
    return r;
}

bool tmat_invertible(const TMat& m) {
    try {
        (void)m.inv();
        return true;
    } catch (const NotInvertible&) {
        return false;
    }
}

}  // namespace

NormalForm phi_matrix_normal_form(const PhiPSeriesMatrix& Phi) {
    const FqField& F = Phi.field();
    const int f = Phi.f(), n = Phi.n, prec = Phi.prec, p = Phi.p;
    auto sm = series_smith(Phi);
    for (int m : sm.exps)
        if (m > p - 2) throw OutOfFLRange("weight exponent exceeds p-2");
    const std::vector<int>& w = sm.exps;  // ascending
    const int wmax = w.empty() ? 0 : w.back();
    if (prec < wmax + 2) throw PrecisionExhausted("insufficient pbar precision");

    Tensor one(F, f, 1);

    // Fast path: the matrix is already Diag(pbar^{m_i}) * constant.
    {
        bool normal = true;
        TMat Fc(F, f, n);
        for (int i = 0; i < n && normal; ++i)
            for (int j = 0; j < n && normal; ++j) {
                const TSeries& s = Phi.at(i, j);
                Tensor c = s.coeff(w[size_t(i)]);
                if (!(s == TSeries::monomial(F, f, prec, c, w[size_t(i)]))) normal = false;
                Fc.at(i, j) = c;
            }
        if (normal && tmat_invertible(Fc)) {
            NormalForm out;
            out.weights = w;
            out.F = Fc;
            out.C = PhiPSeriesMatrix(F, f, p, n, prec);
            for (int i = 0; i < n; ++i) out.C.at(i, i) = TSeries::monomial(F, f, prec, one, 0);
            return out;
        }
    }

    // Canonical filtration: in the FL range (weights <= p-2 < p) the higher
    // series coefficients of a vector cannot influence Phi phi(x) below
    // pbar^p, so Fil^v is cut out by constant vectors with Phi x == 0 mod
    // pbar^v. Everything splits along the idempotent components, with the
    // Frobenius coupling component c of the output to component c-1 of the
    // argument.
    //
    // Per component: flag bases adapted to Fil, then the Frobenius matrix
    // F_{ij} = coefficient of x_i in pbar^{-m_j} Phi x_j mod pbar.
    std::vector<int> mult(size_t(wmax + 1), 0);  // #{j : m_j >= v}
    for (int v = 0; v <= wmax; ++v)
        for (int m : w)
            if (m >= v) ++mult[size_t(v)];

    // reduced row echelon of an r x n matrix over F_q; returns pivot columns
    auto rref = [&](std::vector<std::vector<uint16_t>>& rows) {
        std::vector<int> pivs;
        size_t rr = 0;
        for (int col = 0; col < n && rr < rows.size(); ++col) {
            size_t sel = rows.size();
            for (size_t i = rr; i < rows.size(); ++i)
                if (rows[i][size_t(col)]) {
                    sel = i;
                    break;
                }
            if (sel == rows.size()) continue;
            std::swap(rows[rr], rows[sel]);
            uint16_t inv = F.inv(rows[rr][size_t(col)]);
            for (int t = 0; t < n; ++t) rows[rr][size_t(t)] = F.mul(rows[rr][size_t(t)], inv);
            for (size_t i = 0; i < rows.size(); ++i) {
                if (i == rr) continue;
                uint16_t c = rows[i][size_t(col)];
                if (!c) continue;
                for (int t = 0; t < n; ++t)
                    rows[i][size_t(t)] = F.sub(rows[i][size_t(t)], F.mul(c, rows[rr][size_t(t)]));
            }
            pivs.push_back(col);
            ++rr;
        }
        rows.resize(pivs.size());
        return pivs;
    };

    // nullspace of {x in F_q^n : Phi^{(pc)} x == 0 mod pbar^v}
    auto fil_space = [&](int pc, int v) {
        std::vector<std::vector<uint16_t>> rows;
        for (int i = 0; i < n; ++i)
            for (int d = 0; d < v; ++d) {
                std::vector<uint16_t> row(size_t(n), 0);
                bool nz = false;
                for (int j = 0; j < n; ++j) {
                    uint16_t c = Phi.at(i, j).coeff(d).c[size_t(pc)];
                    row[size_t(j)] = c;
                    nz = nz || c;
                }
                if (nz) rows.push_back(std::move(row));
            }
        auto pivs = rref(rows);
        // free columns give the nullspace basis
        std::vector<std::vector<uint16_t>> basis;
        std::vector<bool> is_piv(size_t(n), false);
        for (int c : pivs) is_piv[size_t(c)] = true;
        for (int freec = 0; freec < n; ++freec) {
            if (is_piv[size_t(freec)]) continue;
            std::vector<uint16_t> vvec(size_t(n), 0);
            vvec[size_t(freec)] = 1;
            for (size_t r = 0; r < pivs.size(); ++r)
                vvec[size_t(pivs[r])] = F.neg(rows[r][size_t(freec)]);
            basis.push_back(std::move(vvec));
        }
        return basis;
    };

    // adapted flag basis per x-component: columns ordered by ascending weight
    std::vector<std::vector<std::vector<uint16_t>>> adapted;  // [comp][j] = vector
    adapted.resize(static_cast<size_t>(f));
    for (int cc = 0; cc < f; ++cc) {
        int pc = (cc + 1) % f;
        // bases of Fil^v for v = wmax .. 0, extended downwards
        std::vector<std::vector<uint16_t>> chosen;  // accumulates, deepest first
        std::vector<std::vector<uint16_t>> span;    // echelon of chosen
        auto indep = [&](const std::vector<uint16_t>& x) {
            std::vector<std::vector<uint16_t>> test = span;
            test.push_back(x);
            rref(test);
            return int(test.size()) == int(span.size()) + 1;
        };
        for (int v = wmax; v >= 0; --v) {
            auto basis = fil_space(pc, v);
            if (int(basis.size()) != mult[size_t(std::max(v, 0))] && v > 0)
                throw PrecisionExhausted("filtration dimensions off the weight multiset: not in the FL image");
            for (const auto& x : basis) {
                if (int(chosen.size()) >= (v > 0 ? mult[size_t(v)] : n)) break;
                if (indep(x)) {
                    chosen.push_back(x);
                    span.push_back(x);
                    rref(span);
                }
            }
            size_t want = v > 0 ? size_t(mult[size_t(v)]) : size_t(n);
            if (chosen.size() < want)
                throw PrecisionExhausted("cannot complete an adapted flag basis");
        }
        // deepest-first -> ascending weights
        std::reverse(chosen.begin(), chosen.end());
        adapted[size_t(cc)] = std::move(chosen);
    }

    // Frobenius matrix: component c column j reads pbar^{-m_j} Phi^{(c)}
    // applied to the component (c-1) basis vector, in the component-c basis.
    TMat Fc(F, f, n);
    for (int c = 0; c < f; ++c) {
        int src = (c - 1 + f) % f;
        // solve adapted[c] * coords = y for each column
        std::vector<std::vector<uint16_t>> B(size_t(n), std::vector<uint16_t>(size_t(n), 0));
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) B[size_t(i)][size_t(j)] = adapted[size_t(c)][size_t(j)][size_t(i)];
        // invert B by Gauss-Jordan
        std::vector<std::vector<uint16_t>> Binv(size_t(n), std::vector<uint16_t>(size_t(n), 0));
        {
            auto A = B;
            for (int i = 0; i < n; ++i) Binv[size_t(i)][size_t(i)] = 1;
            for (int col = 0; col < n; ++col) {
                int piv = -1;
                for (int i = col; i < n; ++i)
                    if (A[size_t(i)][size_t(col)]) {
                        piv = i;
                        break;
                    }
                if (piv < 0) throw PrecisionExhausted("adapted basis degenerate");
                std::swap(A[size_t(col)], A[size_t(piv)]);
                std::swap(Binv[size_t(col)], Binv[size_t(piv)]);
                uint16_t inv = F.inv(A[size_t(col)][size_t(col)]);
                for (int t = 0; t < n; ++t) {
                    A[size_t(col)][size_t(t)] = F.mul(A[size_t(col)][size_t(t)], inv);
                    Binv[size_t(col)][size_t(t)] = F.mul(Binv[size_t(col)][size_t(t)], inv);
                }
                for (int i = 0; i < n; ++i) {
                    if (i == col) continue;
                    uint16_t cmul = A[size_t(i)][size_t(col)];
                    if (!cmul) continue;
                    for (int t = 0; t < n; ++t) {
                        A[size_t(i)][size_t(t)] = F.sub(A[size_t(i)][size_t(t)], F.mul(cmul, A[size_t(col)][size_t(t)]));
                        Binv[size_t(i)][size_t(t)] = F.sub(Binv[size_t(i)][size_t(t)], F.mul(cmul, Binv[size_t(col)][size_t(t)]));
                    }
                }
            }
        }
        for (int j = 0; j < n; ++j) {
            // y_i = coefficient of pbar^{m_j} in (Phi^{(c)} x_j^{(src)})_i
            std::vector<uint16_t> y(size_t(n), 0);
            for (int i = 0; i < n; ++i) {
                uint16_t s = 0;
                for (int kk = 0; kk < n; ++kk)
                    s = F.add(s, F.mul(Phi.at(i, kk).coeff(w[size_t(j)]).c[size_t(c)],
                                       adapted[size_t(src)][size_t(j)][size_t(kk)]));
                y[size_t(i)] = s;
            }
            for (int i = 0; i < n; ++i) {
                uint16_t s = 0;
                for (int kk = 0; kk < n; ++kk) s = F.add(s, F.mul(Binv[size_t(i)][size_t(kk)], y[size_t(kk)]));
                Fc.at(i, j).c[size_t(c)] = s;
            }
        }
    }
    if (!tmat_invertible(Fc)) throw PrecisionExhausted("canonical Frobenius degenerate");

    // Base change: solve the F-linear system Phi phi(C) = C Diag(pbar^m) F
    // truncated at the working precision, and pick a solution with an
    // invertible constant term (one exists: the true base change).
    const int nu = n * n * prec * f;
    auto uidx = [&](int i, int j, int d, int c) { return ((i * n + j) * prec + d) * f + c; };
    std::vector<std::vector<uint16_t>> rows;  // equations over the unknowns
    rows.reserve(size_t(nu));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int d = 0; d < prec; ++d)
                for (int c = 0; c < f; ++c) {
                    std::vector<uint16_t> row(size_t(nu), 0);
                    bool nz = false;
                    // (Phi phi(C))_{ij}[d], component c: sum over k, t with pt <= d
                    for (int k = 0; k < n; ++k)
                        for (int t = 0; p * t <= d && t < prec; ++t) {
                            uint16_t pc = Phi.at(i, k).coeff(d - p * t).c[size_t(c)];
                            if (!pc) continue;
                            int cc = (c - 1 + f) % f;  // phi reads component c-1
                            auto& pos = row[size_t(uidx(k, j, t, cc))];
                            pos = F.add(pos, pc);
                            nz = true;
                        }
                    // -(C D F)_{ij}[d], component c: sum over k with d >= m_k
                    for (int k = 0; k < n; ++k) {
                        if (d < w[size_t(k)]) continue;
                        uint16_t fc = Fc.at(k, j).c[size_t(c)];
                        if (!fc) continue;
                        auto& pos = row[size_t(uidx(i, k, d - w[size_t(k)], c))];
                        pos = F.sub(pos, fc);
                        nz = true;
                    }
                    if (nz) rows.push_back(std::move(row));
                }
    // nullspace of the homogeneous system
    std::vector<int> pivs;
    {
        size_t rr = 0;
        for (int col = 0; col < nu && rr < rows.size(); ++col) {
            size_t sel = rows.size();
            for (size_t i = rr; i < rows.size(); ++i)
                if (rows[i][size_t(col)]) {
                    sel = i;
                    break;
                }
            if (sel == rows.size()) continue;
            std::swap(rows[rr], rows[sel]);
            uint16_t inv = F.inv(rows[rr][size_t(col)]);
            for (int t = col; t < nu; ++t) rows[rr][size_t(t)] = F.mul(rows[rr][size_t(t)], inv);
            for (size_t i = 0; i < rows.size(); ++i) {
                if (i == rr) continue;
                uint16_t c = rows[i][size_t(col)];
                if (!c) continue;
                for (int t = col; t < nu; ++t)
                    rows[i][size_t(t)] = F.sub(rows[i][size_t(t)], F.mul(c, rows[rr][size_t(t)]));
            }
            pivs.push_back(col);
            ++rr;
        }
        rows.resize(pivs.size());
    }
    std::vector<bool> is_piv(size_t(nu), false);
    for (int c : pivs) is_piv[size_t(c)] = true;
    std::vector<int> free_cols;
    for (int c = 0; c < nu; ++c)
        if (!is_piv[size_t(c)]) free_cols.push_back(c);
    auto build = [&](const std::vector<uint16_t>& freevals) {
        std::vector<uint16_t> x(size_t(nu), 0);
        for (size_t t = 0; t < free_cols.size(); ++t) x[size_t(free_cols[t])] = freevals[t];
        for (size_t r = 0; r < pivs.size(); ++r) {
            uint16_t s = 0;
            for (size_t t = 0; t < free_cols.size(); ++t) {
                uint16_t c = rows[r][size_t(free_cols[t])];
                if (c && freevals[t]) s = F.add(s, F.mul(c, freevals[t]));
            }
            x[size_t(pivs[r])] = F.neg(s);
        }
        return x;
    };
    auto to_matrix = [&](const std::vector<uint16_t>& x) {
        PhiPSeriesMatrix C(F, f, p, n, prec);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                TSeries s(F, f, prec);
                for (int d = 0; d < prec; ++d) {
                    Tensor t(F, f, 0);
                    for (int c = 0; c < f; ++c) t.c[size_t(c)] = x[size_t(uidx(i, j, d, c))];
                    if (!t.is_zero()) s.set_coeff(d, t);
                }
                C.at(i, j) = s;
            }
        return C;
    };
    std::mt19937_64 rng(0x51f3u);
    PhiPSeriesMatrix C(F, f, p, n, prec);
    bool found = false;
    for (int attempt = 0; attempt < 200 && !found; ++attempt) {
        std::vector<uint16_t> freevals(free_cols.size(), 0);
        for (auto& v : freevals) v = uint16_t(rng() % F.q);
        PhiPSeriesMatrix cand = to_matrix(build(freevals));
        if (tmat_invertible(constant_term(cand))) {
            C = cand;
            found = true;
        }
    }
    if (!found) throw PrecisionExhausted("no invertible base change to normal form: not in the FL image");

    NormalForm out;
    out.weights = w;
    out.F = Fc;
    out.C = C;
    return out;
}

}  // namespace fl3
