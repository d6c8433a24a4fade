#pragma once

#include <vector>

#include "fl3/fq.hpp"
#include "fl3/padic.hpp"

namespace fl3 {

// The residual Breuil ring Sbar = (k (x) F)[u]/(u^{ep}) with e = p^f - 1.
// Elements are dense coefficient vectors of Tensors; the descent-data
// grading is tracked degree mod e.
struct SbarRing {
    int p;
    int f;
    int e;   // p^f - 1
    int ep;  // e * p
    const FqField* F;

    SbarRing(int p_, int f_, const FqField& field) : p(p_), f(f_), e(1), ep(0), F(&field) {
        e = 1;
        for (int i = 0; i < f; ++i) e *= p;
        e -= 1;
        ep = e * p;
    }
    bool operator==(const SbarRing& o) const { return p == o.p && f == o.f && F == o.F; }

    static const SbarRing& get(int p, int f, const FqField& field);

    int mod_e(long long x) const {
        long long r = x % e;
        return int(r < 0 ? r + e : r);
    }
    // p^{-1} a mod e (p^{f-1} a, since p^f == 1 mod e)
    int inv_frob_exp(int a) const;
};

class SbarPoly {
  public:
    SbarPoly() = default;
    explicit SbarPoly(const SbarRing& R) : R_(&R), c_(size_t(R.ep) * R.f, 0) {}
    static SbarPoly monomial(const SbarRing& R, const Tensor& t, int deg);
    static SbarPoly constant(const SbarRing& R, const Tensor& t) { return monomial(R, t, 0); }

    const SbarRing& ring() const { return *R_; }
    bool is_zero() const;
    Tensor coeff(int deg) const;
    void set_coeff(int deg, const Tensor& t);
    // component t as a dense F-polynomial of length ep
    std::vector<uint16_t> component(int t) const;

    SbarPoly operator+(const SbarPoly& o) const;
    SbarPoly operator-(const SbarPoly& o) const;
    SbarPoly operator*(const SbarPoly& o) const;
    SbarPoly operator-() const;
    bool operator==(const SbarPoly& o) const { return c_ == o.c_; }

    // semilinear Frobenius: coefficients through phi (x) 1, u -> u^p
    SbarPoly phi() const;

    // lowest nonzero u-degree, or ep if zero; per-component minimum
    int ord() const;
    // true iff all nonzero coefficients sit in degrees == cls mod e
    bool isotypic_in(int cls) const;
    // multiplicative inverse; requires every component's constant term to be
    // nonzero (series inversion mod u^{ep})
    SbarPoly inv_unit() const;
    bool is_unit() const { return coeff(0).is_unit(); }
    // quotient by u^k; throws unless all coefficients below k vanish.
    // The top k coefficients of the result are unknown and set to zero.
    SbarPoly divide_exact_u(int k) const;
    SbarPoly truncated(int cap) const;  // drop coefficients at degrees >= cap

  private:
    const SbarRing* R_ = nullptr;
    std::vector<uint16_t> c_;  // c_[deg * f + comp]
    friend class GradedMatrix;
};

enum class GradingRule { Filtration, Frobenius, PhiConj, Custom };

// n x n matrix over Sbar with row/column descent types and a per-entry
// isotypic class. Filtration rule: entry (i,j) in class p^{-1}a_j - a_i.
// Frobenius rule: a_j - a_i. PhiConj (the B of Lemma 2.2.8): p^{-1}(a_j - a_i).
class GradedMatrix {
  public:
    GradedMatrix() = default;
    GradedMatrix(const SbarRing& R, int n, GradingRule rule, std::vector<int> row_types,
                 std::vector<int> col_types);

    const SbarRing& ring() const { return *R_; }
    int n() const { return n_; }
    GradingRule rule() const { return rule_; }
    const std::vector<int>& row_types() const { return row_types_; }
    const std::vector<int>& col_types() const { return col_types_; }
    int entry_class(int i, int j) const { return cls_[size_t(i) * n_ + j]; }

    const SbarPoly& at(int i, int j) const { return a_[size_t(i) * n_ + j]; }
    SbarPoly& at(int i, int j) { return a_[size_t(i) * n_ + j]; }

    bool isotypic_check() const;
    bool operator==(const GradedMatrix& o) const;

    GradedMatrix operator+(const GradedMatrix& o) const;
    GradedMatrix operator-(const GradedMatrix& o) const;
    GradedMatrix mul(const GradedMatrix& o) const;
    GradedMatrix phi() const;        // entrywise phi; classes scale by p
    GradedMatrix transpose() const;  // classes transpose; rule becomes Custom
    SbarPoly det() const;
    GradedMatrix adjugate() const;   // M * adj(M) = det(M) * I
    GradedMatrix invert_unit() const;
    GradedMatrix scalar_mul(const SbarPoly& s) const;  // s must be class-0
    GradedMatrix divide_exact_u(int k) const;
    bool congruent_mod_u(const GradedMatrix& o, int k) const;

    // identity in the Frobenius grading for the given types
    static GradedMatrix identity(const SbarRing& R, const std::vector<int>& types);

  private:
    const SbarRing* R_ = nullptr;
    int n_ = 0;
    GradingRule rule_ = GradingRule::Custom;
    std::vector<int> row_types_, col_types_;
    std::vector<int> cls_;
    std::vector<SbarPoly> a_;
    void recompute_classes();
};

// Elementary divisor exponents (d_1 <= ... <= d_n) of the cokernel of M over
// F[u]/u^cap, computed per idempotent component by valuation-pivot
// elimination; the components must agree.
std::vector<int> smith_exponents(const GradedMatrix& M, int cap);
std::vector<int> smith_exponents_poly(std::vector<std::vector<std::vector<uint16_t>>> W,
                                      const FqField& F, int cap);

}  // namespace fl3
