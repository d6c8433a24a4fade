#include <random>

#include "doctest.h"
#include "fl3/breuil.hpp"
#include "fl3/sbar.hpp"

using namespace fl3;

namespace {
SbarPoly rand_isotypic(const SbarRing& R, int cls, std::mt19937_64& rng, int terms) {
    SbarPoly x(R);
    for (int t = 0; t < terms; ++t) {
        int max_k = (R.ep - 1 - R.mod_e(cls)) / R.e;
        int deg = R.mod_e(cls) + R.e * int(rng() % uint64_t(max_k + 1));
        Tensor c(*R.F, R.f, 0);
        for (int k = 0; k < R.f; ++k) c.c[size_t(k)] = uint16_t(rng() % R.F->q);
        x.set_coeff(deg, x.coeff(deg) + c);
    }
    return x;
}
}  // namespace

TEST_CASE("inv_frob_exp") {
    const FqField& F11 = FqField::get(11, 1);
    const SbarRing& R1 = SbarRing::get(11, 1, F11);
    for (int a = 0; a < R1.e; ++a) CHECK(R1.inv_frob_exp(a) == a);  // p == 1 mod p-1
    const FqField& F121 = FqField::get(11, 2);
    const SbarRing& R2 = SbarRing::get(11, 2, F121);
    CHECK(R2.e == 120);
    CHECK(R2.inv_frob_exp(7) == 77);  // p^{-1} == p mod p^2 - 1
    std::mt19937_64 rng(3);
    for (int t = 0; t < 50; ++t) {
        int a = int(rng() % uint64_t(R2.e));
        CHECK(R2.mod_e(11 * R2.inv_frob_exp(a)) == a);
    }
}

TEST_CASE("isotypic_check") {
    const FqField& F = FqField::get(11, 1);
    const SbarRing& R = SbarRing::get(11, 1, F);
    GradedMatrix Z(R, 3, GradingRule::Filtration, {0, 3, 6}, {0, 3, 6});
    CHECK(Z.isotypic_check());  // zero matrix
    GradedMatrix I(R, 3, GradingRule::Frobenius, {2, 2, 2}, {2, 2, 2});
    Tensor one(F, 1, 1);
    for (int i = 0; i < 3; ++i) I.at(i, i) = SbarPoly::monomial(R, one, R.e);
    CHECK(I.isotypic_check());  // u^e on equal types: class 0
    // the Prop 2.4.1 filtration matrix is framed by construction
    GradedMatrix V = mns_filtration(Fq(F, 1), Fq(F, 1), Fq(F, 2), 6, 3, 0, 11);
    CHECK(V.isotypic_check());
    // planting a coefficient off the class breaks it
    GradedMatrix W = V;
    W.at(0, 1) = SbarPoly::monomial(R, one, 1);  // class of (0,1) is 3, degree 1 is off
    CHECK(!W.isotypic_check());
}

TEST_CASE("phi on Sbar") {
    const FqField& F = FqField::get(11, 1);
    const SbarRing& R = SbarRing::get(11, 1, F);
    Tensor one(F, 1, 1);
    // phi(u^e) = u^{ep} = 0
    CHECK(SbarPoly::monomial(R, one, R.e).phi().is_zero());
    // constants are fixed at f = 1
    Tensor c(F, 1, 5);
    CHECK(SbarPoly::constant(R, c).phi() == SbarPoly::constant(R, c));
    // ring homomorphism on random inputs (oracle: direct expansion)
    std::mt19937_64 rng(11);
    for (int t = 0; t < 30; ++t) {
        SbarPoly x = rand_isotypic(R, int(rng() % 10), rng, 3);
        SbarPoly y = rand_isotypic(R, int(rng() % 10), rng, 3);
        CHECK((x * y).phi() == x.phi() * y.phi());
        CHECK((x + y).phi() == x.phi() + y.phi());
    }
    // f = 2: the coefficient components cycle
    const FqField& F2 = FqField::get(11, 2);
    const SbarRing& R2 = SbarRing::get(11, 2, F2);
    Tensor tc(F2, 2, 0);
    tc.c = {4, 9};
    SbarPoly z = SbarPoly::monomial(R2, tc, 5);
    Tensor got = z.phi().coeff(55);
    CHECK(got.c[0] == 9);
    CHECK(got.c[1] == 4);
}

TEST_CASE("adjugate and unit inversion") {
    const FqField& F = FqField::get(11, 1);
    const SbarRing& R = SbarRing::get(11, 1, F);
    std::vector<int> types{0, 3, 6};
    GradedMatrix I = GradedMatrix::identity(R, types);
    CHECK(I.adjugate() == I);
    std::mt19937_64 rng(5);
    for (int t = 0; t < 20; ++t) {
        GradedMatrix A = random_gl_square(R, types, rng());
        GradedMatrix adj = A.adjugate();
        GradedMatrix prod = A.mul(adj);
        SbarPoly d = A.det();
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) CHECK(prod.at(i, j) == (i == j ? d : SbarPoly(R)));
        GradedMatrix inv = A.invert_unit();
        CHECK(inv.mul(A) == GradedMatrix::identity(R, types));
    }
    // diagonal of unit constants
    GradedMatrix D(R, 3, GradingRule::Frobenius, types, types);
    for (int i = 0; i < 3; ++i) D.at(i, i) = SbarPoly::constant(R, Tensor(F, 1, 2 + i));
    GradedMatrix Dinv = D.invert_unit();
    for (int i = 0; i < 3; ++i) {
        Tensor c = Dinv.at(i, i).coeff(0);
        CHECK((c * Tensor(F, 1, 2 + i)).c[0] == 1);
    }
    // non-unit determinant is rejected
    GradedMatrix S(R, 3, GradingRule::Frobenius, types, types);
    for (int i = 0; i < 3; ++i) S.at(i, i) = SbarPoly::monomial(R, Tensor(F, 1, 1), R.e);
    CHECK_THROWS_AS(S.invert_unit(), NotAUnit);
}

TEST_CASE("smith exponents: diagonal and identity") {
    const FqField& F = FqField::get(11, 1);
    const SbarRing& R = SbarRing::get(11, 1, F);
    std::vector<int> types{0, 0, 0};
    GradedMatrix I = GradedMatrix::identity(R, types);
    CHECK(smith_exponents(I, R.ep) == std::vector<int>{0, 0, 0});
    GradedMatrix D(R, 3, GradingRule::Frobenius, types, types);
    Tensor one(F, 1, 1);
    D.at(0, 0) = SbarPoly::monomial(R, one, 2);
    D.at(1, 1) = SbarPoly::monomial(R, one, 5);
    D.at(2, 2) = SbarPoly::monomial(R, one, 9);
    CHECK(smith_exponents(D, R.ep) == std::vector<int>{2, 5, 9});
    GradedMatrix Z(R, 3, GradingRule::Frobenius, types, types);
    CHECK_THROWS_AS(smith_exponents(Z, R.ep), SingularModCap);
}

TEST_CASE("smith exponents: unimodular invariance and determinant sum") {
    const FqField& F = FqField::get(11, 1);
    const SbarRing& R = SbarRing::get(11, 1, F);
    std::mt19937_64 rng(17);
    int a2 = 6, a1 = 3, a0 = 0;
    std::vector<int> types{a0, a1, a2};
    for (int t = 0; t < 25; ++t) {
        Fq lam(F, 1 + int(rng() % 10)), mu(F, 1 + int(rng() % 10)), nu(F, int(rng() % 11));
        GradedMatrix V = mns_filtration(lam, mu, nu, a2, a1, a0, 11);
        auto base = smith_exponents(V, R.ep);
        int sum = 0;
        for (int d : base) sum += d;
        CHECK(sum == 3 * R.e);  // determinant valuation of a weight-2 filtration
        // left by a Frobenius-graded unit, right by a PhiConj-graded unit
        GradedMatrix A = random_gl_square(R, types, rng());
        CHECK(smith_exponents(A.mul(V), R.ep) == base);
        // build a PhiConj-graded unit from a Frobenius-graded one via classes
        GradedMatrix B(R, 3, GradingRule::PhiConj, types, types);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                int cls = B.entry_class(i, j);
                B.at(i, j) = (i == j) ? SbarPoly::constant(R, Tensor(F, 1, 1 + int(rng() % 10)))
                                      : SbarPoly::monomial(R, Tensor(F, 1, int(rng() % 11)), cls);
            }
        REQUIRE(B.det().is_unit());
        CHECK(smith_exponents(V.mul(B), R.ep) == base);
    }
}

TEST_CASE("graded multiplication composes rules") {
    const FqField& F = FqField::get(11, 1);
    const SbarRing& R = SbarRing::get(11, 1, F);
    std::vector<int> types{0, 3, 6};
    std::mt19937_64 rng(23);
    GradedMatrix A = random_gl_square(R, types, rng());
    GradedMatrix V = mns_filtration(Fq(F, 2), Fq(F, 3), Fq(F, 5), 6, 3, 0, 11);
    GradedMatrix P = A.mul(V);
    CHECK(P.rule() == GradingRule::Filtration);
    CHECK(P.isotypic_check());
}
