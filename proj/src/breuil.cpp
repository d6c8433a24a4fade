#include "fl3/breuil.hpp"

#include <algorithm>
#include <array>
#include <random>

namespace fl3 {

namespace {

using Raw3 = std::array<SbarPoly, 9>;

Raw3 raw_of(const GradedMatrix& M) {
    Raw3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r[size_t(i) * 3 + j] = M.at(i, j);
    return r;
}

Raw3 raw_mul(const SbarRing& R, const Raw3& x, const Raw3& y) {
    Raw3 r;
    for (auto& e : r) e = SbarPoly(R);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            SbarPoly s(R);
            for (int k = 0; k < 3; ++k) s = s + x[size_t(i) * 3 + k] * y[size_t(k) * 3 + j];
            r[size_t(i) * 3 + j] = s;
        }
    return r;
}

bool raw_congruent(const Raw3& x, const Raw3& y, int cap) {
    for (size_t i = 0; i < 9; ++i) {
        SbarPoly d = x[i] - y[i];
        if (d.ord() < cap) return false;
    }
    return true;
}

int min_ord_below(const Raw3& x, int cap) {
    int m = cap;
    for (const auto& e : x) m = std::min(m, e.ord());
    return m;
}

// slot description for the residual filtration shapes of Prop 2.5.2
struct CasePattern {
    std::vector<std::array<int, 3>> base;   // (i, j, deg), coefficient 1
    std::vector<std::array<int, 3>> slots;  // (i, j, deg), free constant
};

CasePattern case_pattern(SDShape shape, int e, int a, int b) {
    switch (shape) {
        case SDShape::CaseA:
            return {{{0, 2, e + a}, {1, 1, e}, {2, 0, e - a}},
                    {{0, 0, e}, {0, 1, e + b}, {1, 0, e - b}}};
        case SDShape::CaseB:
            return {{{0, 1, e + b}, {1, 2, e + (a - b)}, {2, 0, e - a}},
                    {{0, 0, e}, {1, 0, e - b}}};
        case SDShape::CaseC:
            return {{{0, 2, e + a}, {1, 0, e - b}, {2, 1, e - (a - b)}},
                    {{0, 0, e}, {0, 1, e + b}}};
        default:
            throw UsageError("no constant-slot pattern for this shape");
    }
}

GradedMatrix pattern_matrix(const SbarRing& R, const std::vector<int>& types,
                            const CasePattern& pat, const std::vector<Tensor>& c) {
    GradedMatrix V(R, 3, GradingRule::Filtration, types, types);
    Tensor one(*R.F, R.f, 1);
    for (const auto& b : pat.base) V.at(b[0], b[1]) = SbarPoly::monomial(R, one, b[2]);
    for (size_t k = 0; k < pat.slots.size(); ++k)
        V.at(pat.slots[k][0], pat.slots[k][1]) = SbarPoly::monomial(R, c[k], pat.slots[k][2]);
    if (!V.isotypic_check()) throw GradingViolation("pattern matrix is not framed");
    return V;
}

bool matches_pattern(const GradedMatrix& V, const CasePattern& pat) {
    const SbarRing& R = V.ring();
    Tensor one(*R.F, R.f, 1);
    std::vector<std::vector<bool>> allowed(3, std::vector<bool>(3, false));
    for (const auto& b : pat.base) {
        allowed[size_t(b[0])][size_t(b[1])] = true;
        if (!(V.at(b[0], b[1]) == SbarPoly::monomial(R, one, b[2]))) return false;
    }
    for (const auto& s : pat.slots) {
        allowed[size_t(s[0])][size_t(s[1])] = true;
        const SbarPoly& x = V.at(s[0], s[1]);
        // a single constant coefficient at the slot degree
        if (!(x == SbarPoly::monomial(R, x.coeff(s[2]), s[2]))) return false;
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (!allowed[size_t(i)][size_t(j)] && !V.at(i, j).is_zero()) return false;
    return true;
}

bool diag_constant(const GradedMatrix& A) {
    const SbarRing& R = A.ring();
    for (int i = 0; i < A.n(); ++i)
        for (int j = 0; j < A.n(); ++j) {
            if (i != j && !A.at(i, j).is_zero()) return false;
            if (i == j) {
                Tensor c0 = A.at(i, i).coeff(0);
                if (!c0.is_unit()) return false;
                if (!(A.at(i, i) == SbarPoly::constant(R, c0))) return false;
            }
        }
    return true;
}

// W with V W = u^{2e} Id, for the case shapes (det V = s u^{3e}, s = +-1)
Raw3 filtration_complement(const GradedMatrix& V) {
    const SbarRing& R = V.ring();
    SbarPoly d = V.det();
    if (d.ord() != 3 * R.e || !(d == SbarPoly::monomial(R, d.coeff(3 * R.e), 3 * R.e)))
        throw ShapeMismatch("det(V) is not a scalar times u^{3e}");
    Tensor s = d.coeff(3 * R.e);
    if (!s.is_unit()) throw ShapeMismatch("det(V) not of unit leading coefficient");
    GradedMatrix adj = V.adjugate();
    Tensor sinv = s.inv();
    Raw3 W;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            W[size_t(i) * 3 + j] = (adj.at(i, j) * SbarPoly::constant(R, sinv)).divide_exact_u(R.e);
    return W;
}

}  // namespace

void BreuilModuleData::validate() const {
    if (!V.isotypic_check()) throw GradingViolation("filtration matrix not framed");
    if (!A.isotypic_check()) throw GradingViolation("Frobenius matrix not framed");
    if (!A.det().is_unit()) throw NotAUnit("Frobenius matrix not invertible");
    auto exps = smith_exponents(V, R->ep);
    for (int d : exps)
        if (d > 2 * R->e) throw AxiomViolation("u^{2e} M not contained in Fil^2 M");
}

GradedMatrix mns_filtration(Fq lam, Fq mu, Fq nu, int a2, int a1, int a0, int p) {
    if (!(a1 - a0 > 2 && a2 - a1 > 2 && p - 3 > a2 - a0)) throw GenericityViolation("(2.1.6) fails");
    if (lam.is_zero() || mu.is_zero()) throw UsageError("lambda mu = 0");
    const FqField& F = *lam.F;
    const SbarRing& R = SbarRing::get(p, 1, F);
    GradedMatrix V(R, 3, GradingRule::Filtration, {a0, a1, a2}, {a0, a1, a2});
    int e = R.e;
    auto t = [&](Fq x) { return Tensor::scalar(F, 1, x); };
    V.at(0, 0) = SbarPoly::monomial(R, t(Fq(F, 1)), e);
    V.at(1, 0) = SbarPoly::monomial(R, t(mu), e - (a1 - a0));
    V.at(2, 0) = SbarPoly::monomial(R, t(nu), e - (a2 - a0));
    V.at(1, 1) = SbarPoly::monomial(R, t(Fq(F, 1)), e);
    V.at(2, 1) = SbarPoly::monomial(R, t(lam), e - (a2 - a1));
    V.at(2, 2) = SbarPoly::monomial(R, t(Fq(F, 1)), e);
    if (!V.isotypic_check()) throw GradingViolation("mns filtration not framed");
    return V;
}

int elementary_divisor_case(Fq lam, Fq mu, Fq nu) {
    if (lam.is_zero() || mu.is_zero()) throw UsageError("lambda mu = 0");
    if (nu.is_zero()) return 3;
    if (nu == lam * mu) return 2;
    return 1;
}

std::vector<int> expected_divisors(int regime, int a2, int a1, int a0, int e) {
    int a = a2 - a0, b = a1 - a0;
    std::vector<int> r;
    if (regime == 1) r = {e - a, e, e + a};
    else if (regime == 2) r = {e - a, e + (a - b), e + b};
    else if (regime == 3) r = {e - (a2 - a1), e - b, e + a};
    else throw UsageError("regime must be 1, 2 or 3");
    std::sort(r.begin(), r.end());
    return r;
}

BreuilModuleData change_of_basis(const BreuilModuleData& M, const GradedMatrix& Vp,
                                 const GradedMatrix& B) {
    const SbarRing& R = *M.R;
    if (!Vp.isotypic_check()) throw GradingViolation("V' not framed for the filtration rule");
    if (B.rule() != GradingRule::PhiConj || !B.isotypic_check())
        throw GradingViolation("B must satisfy the Lemma 2.2.8 grading");
    if (!B.det().is_unit()) throw NotAUnit("B not invertible");
    Raw3 lhs = raw_mul(R, raw_of(M.A), raw_of(Vp));
    Raw3 rhs = raw_mul(R, raw_of(M.V), raw_of(B));
    if (!raw_congruent(lhs, rhs, 3 * R.e)) throw CongruenceFailure("A V' != V B mod u^{3e}");
    BreuilModuleData out;
    out.R = M.R;
    out.types = M.types;
    out.V = Vp;
    out.A = B.phi();
    if (!out.A.isotypic_check()) throw GradingViolation("phi(B) not framed");
    return out;
}

GradedMatrix case_filtration(SDShape shape, const SbarRing& R, const std::vector<int>& types) {
    int e = R.e;
    Tensor one(*R.F, R.f, 1);
    if (shape == SDShape::Niveau2) throw UsageError("niveau-2 filtrations carry parameters; use niveau2_module");
    int a = R.mod_e(types[2] - types[0]);
    int b = R.mod_e(types[1] - types[0]);
    auto pat = case_pattern(shape, e, a, b);
    std::vector<Tensor> zeros(pat.slots.size(), Tensor(*R.F, R.f, 0));
    return pattern_matrix(R, types, pat, zeros);
}

BreuilModuleData case_module(SDShape shape, const SbarRing& R, const std::vector<int>& types,
                             GradedMatrix A) {
    BreuilModuleData M;
    M.R = &SbarRing::get(R.p, R.f, *R.F);
    M.types = types;
    M.V = case_filtration(shape, *M.R, types);
    M.A = std::move(A);
    M.validate();
    return M;
}

namespace {

// one Lemma 2.2.8 step for the constant-slot shapes: solve for the slot
// constants making W A V_next = u^{2e} B, then pass to (V_next, phi(B))
BreuilModuleData abc_step(const BreuilModuleData& M, SDShape shape) {
    const SbarRing& R = *M.R;
    if (R.f != 1) throw UsageError("constant-slot diagonalization is a niveau-1 procedure");
    const FqField& F = *R.F;
    int e = R.e;
    int a = R.mod_e(M.types[2] - M.types[0]);
    int b = R.mod_e(M.types[1] - M.types[0]);
    auto pat = case_pattern(shape, e, a, b);
    Raw3 W = filtration_complement(M.V);
    Raw3 WA = raw_mul(R, W, raw_of(M.A));

    int ns = int(pat.slots.size());
    // P(c) = WA * V(c) is affine in the slot constants; collect all
    // coefficients below u^{2e} and solve the (tiny) linear system.
    auto low_coeffs = [&](const Raw3& P) {
        std::vector<uint16_t> v;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int d = 0; d < 2 * e; ++d) v.push_back(P[size_t(i) * 3 + j].coeff(d).c[0]);
        return v;
    };
    std::vector<Tensor> zero_c(size_t(ns), Tensor(F, 1, 0));
    Raw3 P0 = raw_mul(R, WA, raw_of(pattern_matrix(R, M.types, pat, zero_c)));
    auto b0 = low_coeffs(P0);
    size_t rows = b0.size();
    std::vector<std::vector<uint16_t>> cols;  // column k: d/dc_k of the low coefficients
    for (int k = 0; k < ns; ++k) {
        auto ck = zero_c;
        ck[size_t(k)] = Tensor(F, 1, 1);
        Raw3 Pk = raw_mul(R, WA, raw_of(pattern_matrix(R, M.types, pat, ck)));
        auto vk = low_coeffs(Pk);
        for (size_t t = 0; t < rows; ++t) vk[t] = F.sub(vk[t], b0[t]);
        cols.push_back(std::move(vk));
    }
    // solve sum_k c_k cols[k] = -b0 (Gauss-Jordan on the slot columns)
    std::vector<uint16_t> target(rows);
    for (size_t t = 0; t < rows; ++t) target[t] = F.neg(b0[t]);
    std::vector<int> piv_row, piv_col;
    std::vector<bool> used(rows, false);
    for (int k = 0; k < ns; ++k) {
        size_t pr = rows;
        for (size_t t = 0; t < rows; ++t)
            if (!used[t] && cols[size_t(k)][t]) {
                pr = t;
                break;
            }
        if (pr == rows) continue;
        used[pr] = true;
        piv_row.push_back(int(pr));
        piv_col.push_back(k);
        uint16_t inv = F.inv(cols[size_t(k)][pr]);
        for (size_t t = 0; t < rows; ++t) cols[size_t(k)][t] = F.mul(cols[size_t(k)][t], inv);
        for (int k2 = 0; k2 < ns; ++k2) {
            if (k2 == k) continue;
            uint16_t c = cols[size_t(k2)][pr];
            if (!c) continue;
            for (size_t t = 0; t < rows; ++t)
                cols[size_t(k2)][t] = F.sub(cols[size_t(k2)][t], F.mul(c, cols[size_t(k)][t]));
        }
    }
    std::vector<uint16_t> x(size_t(ns), 0);
    std::vector<uint16_t> res = target;
    for (size_t idx = 0; idx < piv_row.size(); ++idx) {
        int k = piv_col[size_t(idx)];
        uint16_t c = res[size_t(piv_row[size_t(idx)])];
        x[size_t(k)] = c;
        if (c)
            for (size_t t = 0; t < rows; ++t) res[t] = F.sub(res[t], F.mul(c, cols[size_t(k)][t]));
    }
    for (size_t t = 0; t < rows; ++t)
        if (res[t]) throw ShapeMismatch("slot system inconsistent: input not of the declared case shape");
    std::vector<Tensor> sol(size_t(ns), Tensor(F, 1, 0));
    for (int k = 0; k < ns; ++k) sol[size_t(k)] = Tensor::scalar(F, 1, Fq::raw(F, x[size_t(k)]));

    GradedMatrix Vnext = pattern_matrix(R, M.types, pat, sol);
    Raw3 prod = raw_mul(R, WA, raw_of(Vnext));
    GradedMatrix B(R, 3, GradingRule::PhiConj, M.types, M.types);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) B.at(i, j) = prod[size_t(i) * 3 + j].divide_exact_u(2 * e);
    if (!B.isotypic_check()) throw GradingViolation("B fails the Lemma 2.2.8 grading");
    return change_of_basis(M, Vnext, B);
}

// Explicit Claim 2.6.5 / 2.6.6 steps at f = 2.
BreuilModuleData niveau2_step(const BreuilModuleData& M) {
    const SbarRing& R = *M.R;
    int e = R.e;
    int k1 = R.mod_e(M.types[1] - M.types[0]);
    int k2 = R.mod_e(M.types[2] - M.types[0]);
    int r1e = k2 - k1;            // r1 (p-1)
    int r2e = 2 * e - r1e;        // r2 (p-1)
    if (r1e <= 0 || r1e >= e) throw ShapeMismatch("niveau-2 exponent relations fail");

    auto shape_err = []() { return ShapeMismatch("matrix outside the Claim 2.6.5 form"); };
    // V = [[u^e,,],[x0 u^{e-k1}, u^{r1(p-1)}, z0],[y0' u^{e-k2},, u^{r2(p-1)}]]
    const GradedMatrix& V = M.V;
    Tensor one(*R.F, R.f, 1);
    if (!(V.at(0, 0) == SbarPoly::monomial(R, one, e))) throw shape_err();
    if (!V.at(0, 1).is_zero() || !V.at(0, 2).is_zero() || !V.at(2, 1).is_zero()) throw shape_err();
    if (!(V.at(1, 1) == SbarPoly::monomial(R, one, r1e))) throw shape_err();
    if (!(V.at(2, 2) == SbarPoly::monomial(R, one, r2e))) throw shape_err();
    SbarPoly x0 = V.at(1, 0).is_zero() ? SbarPoly(R) : V.at(1, 0).divide_exact_u(R.mod_e(e - k1));
    SbarPoly z0 = V.at(1, 2);
    // Claim 2.6.6: the (2,0) entry must be divisible by u^{e + (e-k2)}
    SbarPoly y0(R);
    if (!V.at(2, 0).is_zero()) {
        SbarPoly yp = V.at(2, 0).divide_exact_u(R.mod_e(e - k2));
        if (yp.ord() < e) throw AxiomViolation("Claim 2.6.6 fails: y'_0 not divisible by u^e");
        y0 = yp.divide_exact_u(e);
    }
    const GradedMatrix& A = M.A;
    if (!A.at(0, 1).is_zero() || !A.at(0, 2).is_zero() || !A.at(2, 1).is_zero()) throw shape_err();
    SbarPoly lam0 = A.at(0, 0), mu0 = A.at(1, 1), nu0 = A.at(2, 2);
    if (!lam0.is_unit() || !mu0.is_unit() || !nu0.is_unit()) throw shape_err();
    SbarPoly alpha0 = A.at(1, 0).is_zero() ? SbarPoly(R) : A.at(1, 0).divide_exact_u(R.mod_e(e - k1));
    SbarPoly beta0 = A.at(2, 0).is_zero() ? SbarPoly(R) : A.at(2, 0).divide_exact_u(R.mod_e(e - k2));
    SbarPoly gamma0 = A.at(1, 2).is_zero() ? SbarPoly(R) : A.at(1, 2).divide_exact_u(r1e);

    SbarPoly ue = SbarPoly::monomial(R, one, e);
    SbarPoly u2e = SbarPoly::monomial(R, one, 2 * e);
    SbarPoly y1 = nu0.inv_unit() * (lam0 * y0 - beta0);
    SbarPoly z1 = mu0.inv_unit() * (nu0 * z0 - gamma0 * u2e);
    SbarPoly zeta1 = -(lam0 * x0) + (alpha0 + y1 * gamma0) * ue;

    GradedMatrix V1(R, 3, GradingRule::Filtration, M.types, M.types);
    V1.at(0, 0) = ue;
    V1.at(1, 1) = SbarPoly::monomial(R, one, r1e);
    V1.at(1, 2) = z1;
    V1.at(2, 0) = y1 * SbarPoly::monomial(R, one, 2 * e - k2);
    V1.at(2, 2) = SbarPoly::monomial(R, one, r2e);
    GradedMatrix B0(R, 3, GradingRule::PhiConj, M.types, M.types);
    B0.at(0, 0) = lam0;
    B0.at(1, 0) = zeta1 * SbarPoly::monomial(R, one, R.mod_e(e - k2));
    B0.at(1, 1) = mu0;
    B0.at(2, 2) = nu0;
    return change_of_basis(M, V1, B0);
}

// restore constant y, z slots: f' = f C with unipotent graded C
BreuilModuleData niveau2_constantify(const BreuilModuleData& M) {
    const SbarRing& R = *M.R;
    int e = R.e;
    int k1 = R.mod_e(M.types[1] - M.types[0]);
    int k2 = R.mod_e(M.types[2] - M.types[0]);
    int r1e = k2 - k1;
    SbarPoly y1 = M.V.at(2, 0).is_zero() ? SbarPoly(R)
                                         : M.V.at(2, 0).divide_exact_u(2 * e - k2);
    SbarPoly z1 = M.V.at(1, 2);
    Tensor one(*R.F, R.f, 1);
    SbarPoly c20 = -((y1 - SbarPoly::constant(R, y1.coeff(0))).divide_exact_u(e));
    SbarPoly c12 = -((z1 - SbarPoly::constant(R, z1.coeff(0))).divide_exact_u(e));
    SbarPoly c10 = -(z1 * c20);
    GradedMatrix C(R, 3, GradingRule::PhiConj, M.types, M.types);
    C.at(0, 0) = SbarPoly::constant(R, one);
    C.at(1, 1) = SbarPoly::constant(R, one);
    C.at(2, 2) = SbarPoly::constant(R, one);
    C.at(1, 0) = c10 * SbarPoly::monomial(R, one, R.mod_e(e - k2));  // e - k1 - r1(p-1)
    C.at(1, 2) = c12 * SbarPoly::monomial(R, one, e - r1e);
    C.at(2, 0) = c20 * SbarPoly::monomial(R, one, R.mod_e(e - k1));  // 3e - k2 - r2(p-1)
    if (!C.isotypic_check()) throw GradingViolation("niveau-2 corrector not graded");
    BreuilModuleData out;
    out.R = M.R;
    out.types = M.types;
    Raw3 vc = raw_mul(R, raw_of(M.V), raw_of(C));
    out.V = GradedMatrix(R, 3, GradingRule::Filtration, M.types, M.types);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out.V.at(i, j) = vc[size_t(i) * 3 + j];
    if (!out.V.isotypic_check()) throw GradingViolation("corrected filtration not framed");
    Raw3 ac = raw_mul(R, raw_of(M.A), raw_of(C.phi()));
    out.A = GradedMatrix(R, 3, GradingRule::Frobenius, M.types, M.types);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out.A.at(i, j) = ac[size_t(i) * 3 + j];
    if (!out.A.isotypic_check()) throw GradingViolation("corrected Frobenius not framed");
    return out;
}

bool niveau2_clean(const BreuilModuleData& M) {
    const SbarRing& R = *M.R;
    if (!diag_constant(M.A)) return false;
    if (!M.V.at(1, 0).is_zero()) return false;
    SbarPoly z = M.V.at(1, 2);
    if (!(z == SbarPoly::constant(R, z.coeff(0)))) return false;
    if (!M.V.at(2, 0).is_zero()) {
        int k2 = R.mod_e(M.types[2] - M.types[0]);
        SbarPoly y = M.V.at(2, 0).divide_exact_u(2 * R.e - k2);
        if (!(y == SbarPoly::constant(R, y.coeff(0)))) return false;
    }
    return true;
}

}  // namespace

BreuilModuleData diagonalize_frobenius(const BreuilModuleData& M, SDShape shape, int* steps) {
    BreuilModuleData cur = M;
    int count = 0;
    const int limit = 8;
    if (shape == SDShape::Niveau2) {
        while (!niveau2_clean(cur)) {
            if (++count > limit) throw ShapeMismatch("niveau-2 diagonalization did not terminate");
            cur = niveau2_constantify(niveau2_step(cur));
        }
    } else {
        const SbarRing& R = *M.R;
        int a = R.mod_e(M.types[2] - M.types[0]);
        int b = R.mod_e(M.types[1] - M.types[0]);
        auto pat = case_pattern(shape, R.e, a, b);
        if (!matches_pattern(cur.V, pat)) throw ShapeMismatch("filtration not of the declared case shape");
        while (!diag_constant(cur.A)) {
            if (++count > limit) throw ShapeMismatch("diagonalization did not terminate");
            cur = abc_step(cur, shape);
        }
    }
    if (steps) *steps = count;
    return cur;
}

GradedMatrix breuil_to_phi_module(const BreuilModuleData& M, std::vector<int>* eps_types) {
    const SbarRing& R = *M.R;
    GradedMatrix Ainv = M.A.invert_unit();
    GradedMatrix Phi = M.V.transpose().mul(Ainv.transpose());
    if (eps_types) {
        eps_types->clear();
        for (int t : M.types) eps_types->push_back(R.mod_e(-R.inv_frob_exp(t)));
    }
    return Phi;
}

PhiPSeriesMatrix ungrade_descend(const GradedMatrix& Phi, const std::vector<int>& twists,
                                 int prec_cap) {
    const SbarRing& R = Phi.ring();
    int n = Phi.n();
    int e = R.e;
    // available pbar-precision after the twist
    long long minknow = R.ep;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            minknow = std::min(minknow,
                               (long long)R.ep + (long long)R.p * twists[size_t(j)] - twists[size_t(i)]);
    int prec = int(minknow / e);
    if (prec_cap > 0) prec = std::min(prec, prec_cap);
    if (prec < 2) throw PrecisionExhausted("no usable pbar precision after the twist");
    PhiPSeriesMatrix out(*R.F, R.f, R.p, n, prec);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            long long shift = (long long)R.p * twists[size_t(j)] - twists[size_t(i)];
            TSeries s(*R.F, R.f, prec);
            for (int d = 0; d < R.ep; ++d) {
                Tensor c = Phi.at(i, j).coeff(d);
                if (c.is_zero()) continue;
                long long de = d + shift;
                if (de < 0 || de % e != 0)
                    throw NotUngradeable("twisted exponent not a multiple of e");
                if (de / e < prec) {
                    Tensor prev = s.coeff(int(de / e));
                    s.set_coeff(int(de / e), prev + c);
                }
            }
            out.at(i, j) = s;
        }
    return out;
}

ProjPoint breuil_to_fl(const BreuilModuleData& M) {
    const SbarRing& R = *M.R;
    // twist so the first type is trivial; the invariant is twist-insensitive
    BreuilModuleData N = M;
    int a0 = N.types[0];
    for (auto& t : N.types) t = R.mod_e(t - a0);
    // the grading classes only involve type differences, so V and A carry over
    GradedMatrix V(R, 3, GradingRule::Filtration, N.types, N.types);
    GradedMatrix A(R, 3, GradingRule::Frobenius, N.types, N.types);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            V.at(i, j) = M.V.at(i, j);
            A.at(i, j) = M.A.at(i, j);
        }
    N.V = V;
    N.A = A;

    std::vector<int> eps_types;
    GradedMatrix Phi = breuil_to_phi_module(N, &eps_types);
    std::vector<int> twists;
    for (int t : eps_types) twists.push_back(R.mod_e(-t));
    PhiPSeriesMatrix P = ungrade_descend(Phi, twists);
    NormalForm nf = phi_matrix_normal_form(P);
    auto tri = upper_triangularize(nf.F);
    return fl_invariant(tri.second);
}

std::array<RamifiedVal, 3> sd_case_valuations(const SDCase& c) {
    RamifiedVal zero(0), one(1), two(2);
    RamifiedVal va = c.ord_alpha, vb = c.ord_beta;
    switch (c.shape) {
        case SDShape::CaseA:
            if (!(zero < va && va < two)) throw UsageError("Case A needs 0 < ord(alpha) < 2");
            return {two - va, one, va};
        case SDShape::CaseB:
        case SDShape::CaseC: {
            if (!(zero < vb && vb < one)) throw UsageError("need 0 < ord(beta) < 1");
            if (!(zero < va && va < vb + one)) throw UsageError("need 0 < ord(alpha) < ord(beta)+1");
            if (c.shape == SDShape::CaseB) return {two - va, vb, one + va - vb};
            return {one + vb - va, two - vb, va};
        }
        default:
            throw UsageError("no valuation table for this shape");
    }
}

ProjPoint theorem251_fl(RamifiedVal ord_lambda1, std::optional<Fq> unit_residue, int p) {
    RamifiedVal zero(0), one(1), two(2);
    if (!(zero < ord_lambda1 && ord_lambda1 < two)) throw UsageError("need 0 < ord(lambda_1) < 2");
    const FqField& F = FqField::get(p, 1);
    if (ord_lambda1 < one) return ProjPoint::of(Fq(F, 0));
    if (one < ord_lambda1) return ProjPoint::infinity();
    if (!unit_residue || unit_residue->is_zero())
        throw UsageError("ord(lambda_1) = 1 requires the unit residue of lambda_1 / p");
    return ProjPoint::of(unit_residue->inv());
}

BreuilModuleData niveau2_module(const Tensor& lam, const Tensor& mu, const Tensor& nu,
                                const Tensor& y, const Tensor& z, int a, int b, int c, int p) {
    if (!(b - c > 2 && a - b > 2 && p - 3 > a - c)) throw GenericityViolation("(2.1.6) fails");
    if (!lam.is_unit() || !mu.is_unit() || !nu.is_unit()) throw UsageError("lambda, mu, nu must be units");
    const FqField& F = *lam.F;
    int A = a - c, B = b - c;
    int k1 = A + 1 + p * (B - 1);
    int k2 = B - 1 + p * (A + 1);
    int r1 = A - B + 2, r2 = 2 * p - (A - B);
    const SbarRing& R = SbarRing::get(p, 2, F);
    int e = R.e;
    if (k1 + r1 * (p - 1) != k2 || (p - 1) * (r1 + r2) != 2 * e)
        throw Error("internal exponent relations fail");
    if (!(0 < k1 && k1 < e && 0 < k2 && k2 < e)) throw Error("type exponents out of range");

    BreuilModuleData M;
    M.R = &R;
    M.types = {0, k1, k2};
    Tensor one(F, 2, 1);
    M.V = GradedMatrix(R, 3, GradingRule::Filtration, M.types, M.types);
    M.V.at(0, 0) = SbarPoly::monomial(R, one, e);
    M.V.at(1, 1) = SbarPoly::monomial(R, one, r1 * (p - 1));
    M.V.at(1, 2) = SbarPoly::constant(R, z);
    M.V.at(2, 0) = SbarPoly::monomial(R, y, 2 * e - k2);
    M.V.at(2, 2) = SbarPoly::monomial(R, one, r2 * (p - 1));
    M.A = GradedMatrix(R, 3, GradingRule::Frobenius, M.types, M.types);
    M.A.at(0, 0) = SbarPoly::constant(R, lam);
    M.A.at(1, 1) = SbarPoly::constant(R, mu);
    M.A.at(2, 2) = SbarPoly::constant(R, nu);
    M.validate();
    return M;
}

std::vector<Niveau2RankOne> rank1_niveau2_constraints(int p) {
    int e = p * p - 1;
    std::vector<Niveau2RankOne> out;
    for (int r = 0; r <= 2 * (p + 1); ++r)
        for (int k = 0; k < e; ++k)
            if ((k + p * r) % (p + 1) == 0) out.push_back({k, r, (k + p * r) % e});
    return out;
}

GradedMatrix random_gl_square(const SbarRing& R, const std::vector<int>& types, uint64_t seed,
                              int extra_terms) {
    std::mt19937_64 rng(seed);
    const FqField& F = *R.F;
    GradedMatrix A(R, 3, GradingRule::Frobenius, types, types);
    auto rand_tensor = [&](bool unit) {
        Tensor t(F, R.f, 0);
        for (int k = 0; k < R.f; ++k) {
            uint32_t v = uint32_t(rng() % F.q);
            if (unit && v == 0) v = 1 + uint32_t(rng() % (F.q - 1));
            t.c[size_t(k)] = uint16_t(v);
        }
        return t;
    };
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            int cls = A.entry_class(i, j);
            SbarPoly x(R);
            if (i == j) x = x + SbarPoly::constant(R, rand_tensor(true));
            for (int t = 0; t < extra_terms; ++t) {
                int max_k = (R.ep - 1 - cls) / R.e;
                int deg = cls + R.e * int(rng() % uint64_t(max_k + 1));
                if (deg == 0 && i != j && cls == 0) deg = R.e;  // keep A = diag mod u
                if (deg > 0 || i == j) x = x + SbarPoly::monomial(R, rand_tensor(false), deg);
            }
            A.at(i, j) = x;
        }
    if (!A.det().is_unit()) return random_gl_square(R, types, seed + 0x9e3779b97f4a7c15ULL, extra_terms);
    return A;
}

}  // namespace fl3
