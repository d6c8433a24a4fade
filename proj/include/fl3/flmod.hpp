#pragma once

#include <vector>

#include "fl3/fq.hpp"
#include "fl3/padic.hpp"

namespace fl3 {

// Constant n x n matrix over k (x) F in idempotent coordinates.
struct TMat {
    const FqField* F = nullptr;
    int f = 1;
    int n = 0;
    std::vector<Tensor> a;  // row-major

    TMat() = default;
    TMat(const FqField& field, int f_, int n_) : F(&field), f(f_), n(n_) {
        a.assign(size_t(n_) * n_, Tensor(field, f_, 0));
    }
    static TMat identity(const FqField& field, int f, int n);

    Tensor& at(int i, int j) { return a[size_t(i) * n + j]; }
    const Tensor& at(int i, int j) const { return a[size_t(i) * n + j]; }

    TMat mul(const TMat& o) const;
    TMat inv() const;  // per-component Gaussian elimination
    TMat transpose() const;
    TMat frob_shift() const;  // phi (x) 1 entrywise
    bool operator==(const TMat& o) const { return a == o.a; }

    // extract / rebuild a single idempotent component as an F_q matrix
    std::vector<uint16_t> component(int t) const;
    void set_component(int t, const std::vector<uint16_t>& m);
};

// Truncated power series over k (x) F in one variable (pbar), semilinear
// Frobenius pbar -> pbar^p.
class TSeries {
  public:
    TSeries() = default;
    TSeries(const FqField& field, int f, int prec) : F_(&field), f_(f), prec_(prec) {
        c_.assign(size_t(prec) * f, 0);
    }
    static TSeries monomial(const FqField& field, int f, int prec, const Tensor& t, int deg);

    int prec() const { return prec_; }
    int f() const { return f_; }
    const FqField& field() const { return *F_; }
    Tensor coeff(int d) const;
    void set_coeff(int d, const Tensor& t);
    bool is_zero() const;
    int ord() const;  // prec if zero

    TSeries operator+(const TSeries& o) const;
    TSeries operator-(const TSeries& o) const;
    TSeries operator*(const TSeries& o) const;
    TSeries operator-() const;
    bool operator==(const TSeries& o) const { return c_ == o.c_; }
    TSeries phi(int p) const;  // coefficients shifted, degree *= p
    TSeries inv_unit() const;
    TSeries divide_exact(int k) const;

  private:
    const FqField* F_ = nullptr;
    int f_ = 1;
    int prec_ = 0;
    std::vector<uint16_t> c_;
};

// n x n matrix of truncated pbar-series; the matrix of a semilinear phi.
struct PhiPSeriesMatrix {
    int p = 0;
    int n = 0;
    int prec = 0;
    std::vector<TSeries> a;

    PhiPSeriesMatrix() = default;
    PhiPSeriesMatrix(const FqField& field, int f, int p_, int n_, int prec_);

    TSeries& at(int i, int j) { return a[size_t(i) * n + j]; }
    const TSeries& at(int i, int j) const { return a[size_t(i) * n + j]; }

    PhiPSeriesMatrix mul(const PhiPSeriesMatrix& o) const;
    PhiPSeriesMatrix phi() const;  // entrywise semilinear Frobenius
    PhiPSeriesMatrix inv_unit() const;
    bool congruent(const PhiPSeriesMatrix& o, int k) const;
    const FqField& field() const { return a.at(0).field(); }
    int f() const { return a.at(0).f(); }
};

// Fontaine-Laffaille module with parallel weights: Frobenius matrix in a
// basis compatible with the Hodge filtration.
struct FLModule {
    int p = 0;
    int n = 0;
    std::vector<int> weights;  // nondecreasing, in [0, p-2]
    TMat frobenius;
};

// FL(rho) = det( (a01, a02), (mu1, a12) ) / (-a02), with oo at a02 = 0.
// Input is the upper-triangular Frobenius matrix over F (one component).
ProjPoint fl_invariant_fq(const FqField& F, const std::vector<uint16_t>& mat3x3);
// Per-component evaluation; the components must agree.
ProjPoint fl_invariant(const TMat& F);

// A * F = U with A lower unipotent, U upper triangular; throws PivotFailure
// when the leading principal minors degenerate (a Frobenius matrix that is
// not maximally non-split).
std::pair<TMat, TMat> upper_triangularize(const TMat& F);

// J * F^{-T} * J with J the antidiagonal permutation.
TMat fl_dual(const TMat& F);

// Lemma-2.2.7 direction: Mat(phi) = Diag(pbar^{m_i}) * F.
PhiPSeriesMatrix fl_to_phi_matrix(const FLModule& M, int prec = -1);

struct NormalForm {
    std::vector<int> weights;
    TMat F;
    PhiPSeriesMatrix C;  // C^{-1} Phi phi(C) = Diag(pbar^{m_i}) F
};

// Inverse of Lemma 2.2.7: Smith exponents give the weight multiset, then a
// twisted-conjugation successive approximation removes the positive-degree
// tail. Converges in the Fontaine-Laffaille range (all weights <= p-2): a
// degree-k perturbation moves to degree >= min(k+1, pk-(p-2)).
NormalForm phi_matrix_normal_form(const PhiPSeriesMatrix& Phi);

// default pbar-precision used by the pipeline
inline int default_pbar_prec(int p) { return 3 * (p - 1); }

}  // namespace fl3
