#include <random>

#include "doctest.h"
#include "fl3/fq.hpp"
#include "fl3/padic.hpp"

using namespace fl3;

TEST_CASE("F_q field laws") {
    const FqField& F11 = FqField::get(11, 1);
    CHECK(F11.q == 11);
    CHECK(F11.mul(3, 4) == 1);
    CHECK(F11.add(7, 6) == 2);
    const FqField& F121 = FqField::get(11, 2);
    CHECK(F121.q == 121);
    // x^{p^d} = x for every element
    for (uint32_t a = 0; a < F121.q; ++a) {
        uint16_t t = uint16_t(a);
        for (int i = 0; i < 2; ++i) t = F121.frob(t);
        CHECK(t == a);
    }
    // defining polynomial for p = 11, d = 2 is x^2 + 1 (smallest index)
    CHECK(F121.modulus == std::vector<uint16_t>{1, 0});
    for (uint32_t a = 1; a < F121.q; ++a) CHECK(F121.mul(uint16_t(a), F121.inv(uint16_t(a))) == 1);
    const FqField& F169 = FqField::get(13, 2);
    CHECK(F169.modulus == std::vector<uint16_t>{2, 0});  // x^2 + 2 (x^2 + 1 splits mod 13)
}

TEST_CASE("tensor scalars: componentwise ring, frobenius shift") {
    const FqField& F = FqField::get(11, 2);
    Tensor a(F, 2, 0), b(F, 2, 0);
    a.c = {3, 7};
    b.c = {5, 2};
    Tensor ab = a * b;
    CHECK(ab.c[0] == F.mul(3, 5));
    CHECK(ab.c[1] == F.mul(7, 2));
    Tensor s = a.frob_shift();
    CHECK(s.c[0] == 7);
    CHECK(s.c[1] == 3);
    CHECK(s.frob_shift() == a);
    CHECK((a * a.inv()).is_unit());
}

TEST_CASE("teichmuller: identity, -1, and brute-force oracle") {
    // x = 1 -> 1
    CHECK(teichmuller(1, 11, 6).unit() == 1);
    // x = p-1 -> -1 mod p^N
    for (int64_t p : {11, 13}) {
        auto t = teichmuller(p - 1, p, 5);
        CHECK(t.unit() == pow_u64(uint64_t(p), 5) - 1);
    }
    // x = 2, p = 11, N = 3: scan all residues mod 11^3 for t^10 = 1, t = 2 mod 11
    uint64_t m = 11 * 11 * 11;
    uint64_t expected = 0;
    int found = 0;
    for (uint64_t t = 0; t < m; ++t)
        if (t % 11 == 2 && powmod_u64(t, 10, m) == 1) {
            expected = t;
            ++found;
        }
    REQUIRE(found == 1);
    CHECK(teichmuller(2, 11, 3).unit() == expected);
}

TEST_CASE("teichmuller multiplicativity") {
    const int64_t p = 13;
    const int N = 9;
    for (int64_t x = 0; x < p; ++x)
        for (int64_t y = 0; y < p; ++y) {
            PadicScalar lhs = teichmuller(x, p, N) * teichmuller(y, p, N);
            PadicScalar rhs = teichmuller((x * y) % p, p, N);
            CHECK(PadicScalar::congruent(lhs, rhs, N));
        }
}

TEST_CASE("padic scalar arithmetic") {
    const int64_t p = 11;
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        auto rnd = [&]() {
            int64_t v = int64_t(rng() % 5) - 2;
            uint64_t u = 1 + rng() % 1000;
            while (u % uint64_t(p) == 0) ++u;
            return PadicScalar::make(p, v, u, 10);
        };
        PadicScalar x = rnd(), y = rnd(), z = rnd();
        // tolerances relative to the valuation: 6 significant digits
        int64_t v3 = x.val() + y.val() + z.val();
        CHECK(PadicScalar::congruent((x * y) * z, x * (y * z), v3 + 6));
        CHECK((x * y).val() == x.val() + y.val());
        int64_t vd = x.val() + std::min(y.val(), z.val());
        CHECK(PadicScalar::congruent(x * (y + z), x * y + x * z, vd + 6));
        CHECK(PadicScalar::congruent(x * x.inv(), PadicScalar::from_int(p, 1, 10), 8));
    }
    // reduction of an integral product = product of reductions
    for (int trial = 0; trial < 100; ++trial) {
        uint64_t a = 1 + rng() % 500, b = 1 + rng() % 500;
        PadicScalar x = PadicScalar::from_int(p, int64_t(a), 8);
        PadicScalar y = PadicScalar::from_int(p, int64_t(b), 8);
        PadicScalar xy = x * y;
        uint64_t red = xy.is_zero_at_prec() ? 0 : (xy.val() > 0 ? 0 : xy.residue());
        CHECK(red == (a % p) * (b % p) % uint64_t(p));
    }
}

TEST_CASE("jacobi sums: paper valuations and trivial value") {
    const int64_t p = 11;
    const int a = 6, b = 3;  // (a2, a1, a0) = (6, 3, 0)
    auto k1 = jacobi_sum(p - 1 - b, p - (a - b), p, 6);
    auto k2 = jacobi_sum(a - b, p - a, p, 6);
    CHECK(k1.val() == 0);
    CHECK(k2.val() == 1);
    // (p-1, p-1) -> p-2: each nonzero Teichmuller factor is 1
    auto jp = jacobi_sum(p - 1, p - 1, p, 6);
    CHECK(jp.val() == 0);
    CHECK(jp.unit() % uint64_t(p) == uint64_t(p - 2));
    // symmetry under lambda -> 1 - lambda
    for (int i = 1; i <= 5; ++i)
        for (int j = 1; j <= 5; ++j)
            CHECK(PadicScalar::congruent(jacobi_sum(i, j, p, 6), jacobi_sum(j, i, p, 6), 6));
}

TEST_CASE("kappa congruence targets match direct jacobi evaluation") {
    for (int64_t p : {11, 13}) {
        std::vector<std::array<int, 3>> triples =
            p == 11 ? std::vector<std::array<int, 3>>{{6, 3, 0}, {7, 3, 0}}
                    : std::vector<std::array<int, 3>>{{6, 3, 0}, {8, 4, 0}};
        for (auto [a2, a1, a0] : triples) {
            int a = a2 - a0, b = a1 - a0;
            auto [t1, t2] = kappa_congruence_targets(a2, a1, a0, int(p));
            auto k1 = jacobi_sum(p - 1 - b, p - (a - b), p, 4);
            auto k2 = jacobi_sum(a - b, p - a, p, 4);
            CHECK(t1 != 0);  // ord(kappa_1) = 0
            CHECK(k1.residue() == t1);
            CHECK(k2.val() == 1);
            CHECK(k2.unit() % uint64_t(p) == t2);  // kappa_2 / p mod p
        }
    }
}

TEST_CASE("specialization map") {
    const int64_t p = 11;
    // unit: t = 4, x = t^{-1}
    PadicScalar t = PadicScalar::from_int(p, 4, 8);
    auto x = specialize(t.inv());
    CHECK(!x.infinite);
    CHECK(x.value.v == 3);  // 4 * 3 = 12 = 1 mod 11
    CHECK(specialize(PadicScalar::make(p, 1, 5, 8)).value.v == 0);
    CHECK(specialize(PadicScalar::make(p, -1, 5, 8)).infinite);
    CHECK(specialize(PadicScalar::zero(p)).value.v == 0);
}

TEST_CASE("projective inversion") {
    const FqField& F = FqField::get(11, 1);
    ProjPoint zero = ProjPoint::of(Fq(F, 0));
    ProjPoint inf = ProjPoint::infinity();
    CHECK(proj_invert(zero) == inf);
    CHECK(proj_invert(inf) == zero);
    CHECK(proj_invert(ProjPoint::of(Fq(F, 3))).value.v == 4);
    for (int v = 0; v < 11; ++v) {
        ProjPoint x = ProjPoint::of(Fq(F, v));
        CHECK(proj_invert(proj_invert(x)) == x);
    }
    CHECK(proj_invert(proj_invert(inf)) == inf);
}

TEST_CASE("ramified valuations") {
    RamifiedVal a(3, 2), b(1, 2);
    CHECK((a + b) == RamifiedVal(2));
    CHECK((a - b) == RamifiedVal(1));
    CHECK(b < a);
    CHECK(RamifiedVal(4, 6) == RamifiedVal(2, 3));
}
