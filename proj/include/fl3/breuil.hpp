#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "fl3/flmod.hpp"
#include "fl3/sbar.hpp"

namespace fl3 {

// Breuil module with tame descent data, presented by the matrix pair
// (V, A) = (matrix of Fil^2, matrix of phi_2) in a framed basis.
struct BreuilModuleData {
    const SbarRing* R = nullptr;
    std::vector<int> types;  // (a0, a1, a2) mod e
    GradedMatrix V;          // Filtration grading
    GradedMatrix A;          // Frobenius grading, unit-invertible

    void validate() const;  // isotypic checks + u^{2e} M <= Fil^2 M
};

enum class SDShape { CaseA, CaseB, CaseC, Niveau2 };

// Prop 2.4.1 shape: the filtration matrix of a maximally non-split rank-3
// Breuil module, with parameters lambda, mu, nu (lambda mu != 0).
GradedMatrix mns_filtration(Fq lam, Fq mu, Fq nu, int a2, int a1, int a0, int p);

// 1, 2, 3 for the three elementary-divisor regimes:
// nu (nu - lambda mu) != 0 / nu = lambda mu / nu = 0.
int elementary_divisor_case(Fq lam, Fq mu, Fq nu);

// expected exponents (ascending) for the given regime
std::vector<int> expected_divisors(int regime, int a2, int a1, int a0, int e);

// Lemma 2.2.8: from A V' == V B (mod u^{3e}) with B unit and
// suitably graded, pass to the basis e' = e A: the new pair is (V', phi(B)).
BreuilModuleData change_of_basis(const BreuilModuleData& M, const GradedMatrix& Vp,
                                 const GradedMatrix& B);

// The reduction-of-Prop-2.4.10 filtration matrix for the given case, and the
// clean niveau-2 matrix of Claim 2.6.5 (without parameters).
GradedMatrix case_filtration(SDShape shape, const SbarRing& R, const std::vector<int>& types);

// Bundle a case filtration with a Frobenius matrix.
BreuilModuleData case_module(SDShape shape, const SbarRing& R, const std::vector<int>& types,
                             GradedMatrix A);

// Iterated change_of_basis driving Mat(phi_2) to a constant diagonal while
// keeping Mat(Fil^2) in the declared residual shape; every step checks the
// Lemma 2.2.8 congruence. The number of basis changes is returned via steps.
BreuilModuleData diagonalize_frobenius(const BreuilModuleData& M, SDShape shape,
                                       int* steps = nullptr);

// Lemma 2.2.6: matrix of phi on the etale phi-module of the dual, given by
// the canonical degree-< ep lift of V^t (A^t)^{-1}; the basis carries the
// types -p^{-1} a_i (returned through eps_types).
GradedMatrix breuil_to_phi_module(const BreuilModuleData& M, std::vector<int>* eps_types);

// Twist by Diag(varpi^{t_i}) and substitute pbar = varpi^e. Throws
// NotUngradeable when a twisted exponent is negative or not divisible by e.
PhiPSeriesMatrix ungrade_descend(const GradedMatrix& Phi, const std::vector<int>& twists,
                                 int prec_cap = -1);

// Full chain: Breuil data -> etale phi-module -> ungraded phi-matrix ->
// Fontaine-Laffaille normal form -> FL invariant.
ProjPoint breuil_to_fl(const BreuilModuleData& M);

// Case bookkeeping for strongly divisible modules (Prop 2.4.10 parameters).
struct SDCase {
    SDShape shape;
    RamifiedVal ord_alpha;
    RamifiedVal ord_beta;  // unused in Case A
};

// Cor 2.4.11 Frobenius-eigenvalue valuations (ord lambda_0, lambda_1, lambda_2).
std::array<RamifiedVal, 3> sd_case_valuations(const SDCase& c);

// Thm 2.5.1: FL = red(p lambda_1^{-1}).
ProjPoint theorem251_fl(RamifiedVal ord_lambda1, std::optional<Fq> unit_residue, int p);

// Claim 2.6.5 module at f = 2 (types (0, k1, k2) for k1 = A+1+p(B-1),
// k2 = B-1+p(A+1), A = a-c, B = b-c).
BreuilModuleData niveau2_module(const Tensor& lam, const Tensor& mu, const Tensor& nu,
                                const Tensor& y, const Tensor& z, int a, int b, int c, int p);

struct Niveau2RankOne {
    int k;            // type exponent mod e
    int r;            // Fil^2 = u^{r(p-1)}
    int inertia_exp;  // k + p r mod e: T^2_st on inertia is omega_2^{k+pr}
};
// All (k, r) allowed by Lemma 2.6.2: 0 <= r <= 2(p+1), k + p r == 0 mod p+1.
std::vector<Niveau2RankOne> rank1_niveau2_constraints(int p);

// uniform random Frobenius matrix in GL-square for the given types
GradedMatrix random_gl_square(const SbarRing& R, const std::vector<int>& types, uint64_t seed,
                              int extra_terms = 2);

}  // namespace fl3
