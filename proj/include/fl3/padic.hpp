#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <string>

#include "fl3/errors.hpp"
#include "fl3/fq.hpp"

namespace fl3 {

// Element of Q_p known at finite precision: unit * p^val + O(p^{val+prec}).
// prec == 0 encodes "O(p^val)": a quantity known only to vanish to that
// order. Exact zero is a separate state. Units are stored mod p^prec in a
// uint64, which caps prec at 17 for p = 13; products go through __int128.
class PadicScalar {
  public:
    PadicScalar() : p_(0), exact_zero_(true), val_(0), unit_(0), prec_(0) {}

    static PadicScalar zero(int64_t p) {
        PadicScalar x;
        x.p_ = p;
        return x;
    }
    static PadicScalar from_int(int64_t p, int64_t n, int prec);
    // unit * p^val with the unit given mod p^prec
    static PadicScalar make(int64_t p, int64_t val, uint64_t unit, int prec);
    static PadicScalar o_of(int64_t p, int64_t val) {  // O(p^val)
        PadicScalar x;
        x.p_ = p;
        x.exact_zero_ = false;
        x.val_ = val;
        x.prec_ = 0;
        return x;
    }

    int64_t p() const { return p_; }
    bool is_exact_zero() const { return exact_zero_; }
    // zero at the working precision (exact zero or O(p^k) with k >= 1 digit)
    bool is_zero_at_prec() const { return exact_zero_ || prec_ == 0; }
    int64_t val() const;          // valuation; throws on exact zero
    uint64_t unit() const;        // unit part mod p^prec
    int prec() const { return prec_; }
    uint64_t residue() const;     // unit mod p when val == 0

    PadicScalar operator+(const PadicScalar& o) const;
    PadicScalar operator-(const PadicScalar& o) const;
    PadicScalar operator*(const PadicScalar& o) const;
    PadicScalar operator-() const;
    PadicScalar inv() const;
    PadicScalar operator/(const PadicScalar& o) const { return *this * o.inv(); }
    PadicScalar pow(int64_t n) const;

    // truncate the unit to k known digits (k <= prec)
    PadicScalar truncated(int k) const;

    // x - y in O(p^k)?
    static bool congruent(const PadicScalar& x, const PadicScalar& y, int64_t k);

    std::string str() const;

  private:
    int64_t p_;
    bool exact_zero_;
    int64_t val_;
    uint64_t unit_;
    int prec_;
    void normalize();
};

// Exact rational valuation, normalized by ord_p(p) = 1. Pure bookkeeping for
// the ramified Frobenius-eigenvalue data.
struct RamifiedVal {
    int64_t num = 0;
    int64_t den = 1;

    RamifiedVal() = default;
    RamifiedVal(int64_t n, int64_t d = 1) : num(n), den(d) { reduce(); }

    void reduce() {
        if (den == 0) throw UsageError("zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }
    RamifiedVal operator+(RamifiedVal o) const { return {num * o.den + o.num * den, den * o.den}; }
    RamifiedVal operator-(RamifiedVal o) const { return {num * o.den - o.num * den, den * o.den}; }
    bool operator==(RamifiedVal o) const { return num == o.num && den == o.den; }
    bool operator<(RamifiedVal o) const { return num * o.den < o.num * den; }
    bool operator>(RamifiedVal o) const { return o < *this; }
    std::string str() const { return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den); }
};

// Point of P^1(F) = F u {oo}.
struct ProjPoint {
    bool infinite = false;
    Fq value;  // meaningful when !infinite

    static ProjPoint infinity() {
        ProjPoint x;
        x.infinite = true;
        return x;
    }
    static ProjPoint of(Fq v) {
        ProjPoint x;
        x.value = v;
        return x;
    }
    bool operator==(const ProjPoint& o) const {
        if (infinite != o.infinite) return false;
        return infinite || value == o.value;
    }
    bool operator!=(const ProjPoint& o) const { return !(*this == o); }
    std::string str() const;
};

// 0 <-> oo, units to their inverses; involutive.
ProjPoint proj_invert(const ProjPoint& x);

// Specialization P^1(O_E) -> P^1(F) of the point [x : 1].
ProjPoint specialize(const PadicScalar& x);

// Multiplicative lift: t == x mod p, t^{p-1} = 1 (t = 0 for x = 0), at
// precision N. Hensel iteration t <- t^p.
PadicScalar teichmuller(int64_t x, int64_t p, int N);

// sum over lambda in F_p of teich(lambda)^i teich(1-lambda)^j, i, j > 0.
PadicScalar jacobi_sum(int64_t i, int64_t j, int64_t p, int N);

// Predicted unit residues mod p for kappa_1 and kappa_2 / p, with
// a = a2 - a0, b = a1 - a0:
//   kappa_1 == (p-1-b)! (p-(a-b))! / (p-a)!,
//   kappa_2/p == -( (a-b)! (p-a)! / (p-b)! ).
std::pair<uint64_t, uint64_t> kappa_congruence_targets(int a2, int a1, int a0, int64_t p);

uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m);
uint64_t powmod_u64(uint64_t a, uint64_t e, uint64_t m);
uint64_t inv_mod_prime_power(uint64_t a, int64_t p, int k);
uint64_t pow_u64(uint64_t base, int e);

}  // namespace fl3
