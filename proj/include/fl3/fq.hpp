#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "fl3/errors.hpp"

namespace fl3 {

// F_{p^d} for small p, d. Elements are indices in [0, p^d): the index
// sum c_i p^i encodes the residue of sum c_i x^i modulo the defining
// polynomial. The defining polynomial is the irreducible monic of degree d
// whose non-leading coefficient vector has the smallest index; it is
// recorded so reports can pin the arithmetic exactly.
//
// All group laws are table-driven (q <= 4096 is plenty here: the artifact
// uses d <= 2 at p <= 13).
class FqField {
  public:
    FqField(int p, int d = 1);

    int p;
    int d;
    uint32_t q;  // p^d

    // coefficients c_0..c_{d-1} of the defining polynomial x^d + ... + c_0
    std::vector<uint16_t> modulus;
    std::string modulus_string() const;

    uint16_t add(uint16_t a, uint16_t b) const { return add_[idx(a, b)]; }
    uint16_t sub(uint16_t a, uint16_t b) const { return add_[idx(a, neg_[b])]; }
    uint16_t mul(uint16_t a, uint16_t b) const { return mul_[idx(a, b)]; }
    uint16_t neg(uint16_t a) const { return neg_[a]; }
    uint16_t inv(uint16_t a) const {
        if (a == 0) throw NotInvertible("zero in F_q");
        return inv_[a];
    }
    uint16_t frob(uint16_t a) const { return frob_[a]; }  // x -> x^p
    uint16_t pow(uint16_t a, long long n) const;

    // canonical embedding F_p -> F_q (constant polynomials)
    uint16_t from_int(long long n) const;

    static const FqField& get(int p, int d = 1);  // interned per (p, d)

  private:
    std::vector<uint16_t> add_, mul_, neg_, inv_, frob_;
    size_t idx(uint16_t a, uint16_t b) const { return size_t(a) * q + b; }
};

// Value type over an interned field.
struct Fq {
    const FqField* F = nullptr;
    uint16_t v = 0;

    Fq() = default;
    Fq(const FqField& field, long long n) : F(&field), v(field.from_int(n)) {}
    static Fq raw(const FqField& field, uint16_t idx) {
        Fq x;
        x.F = &field;
        x.v = idx;
        return x;
    }

    bool is_zero() const { return v == 0; }
    bool is_one() const { return v == 1; }

    Fq operator+(Fq o) const { return raw(*F, F->add(v, o.v)); }
    Fq operator-(Fq o) const { return raw(*F, F->sub(v, o.v)); }
    Fq operator*(Fq o) const { return raw(*F, F->mul(v, o.v)); }
    Fq operator-() const { return raw(*F, F->neg(v)); }
    Fq inv() const { return raw(*F, F->inv(v)); }
    Fq frob() const { return raw(*F, F->frob(v)); }
    Fq pow(long long n) const { return raw(*F, F->pow(v, n)); }
    bool operator==(Fq o) const { return v == o.v; }
    bool operator!=(Fq o) const { return v != o.v; }
};

// Element of k tensor_{F_p} F, in idempotent coordinates: k = F_{p^f}
// embeds in F and the idempotents eps_sigma split the tensor product into f
// copies of F. The arithmetic Frobenius phi (x) 1 cycles the coordinates.
struct Tensor {
    const FqField* F = nullptr;
    std::vector<uint16_t> c;  // f components

    Tensor() = default;
    Tensor(const FqField& field, int f, long long n) : F(&field), c(f, field.from_int(n)) {}
    static Tensor scalar(const FqField& field, int f, Fq x) {
        Tensor t;
        t.F = &field;
        t.c.assign(f, x.v);
        return t;
    }

    int f() const { return int(c.size()); }
    bool is_zero() const {
        for (auto x : c)
            if (x) return false;
        return true;
    }
    bool is_unit() const {
        for (auto x : c)
            if (!x) return false;
        return true;
    }

    Tensor operator+(const Tensor& o) const;
    Tensor operator-(const Tensor& o) const;
    Tensor operator*(const Tensor& o) const;
    Tensor operator-() const;
    Tensor inv() const;
    Tensor frob_shift() const;  // phi (x) 1: cyclic shift of components
    bool operator==(const Tensor& o) const { return c == o.c; }
    bool operator!=(const Tensor& o) const { return c != o.c; }
};

}  // namespace fl3
