#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fl3/padic.hpp"
#include "fl3/psmod.hpp"

namespace fl3 {

// 3x3 matrix over Q_p at working precision
struct PMatrix {
    int64_t p = 0;
    std::array<PadicScalar, 9> m;

    PadicScalar& at(int i, int j) { return m[size_t(i) * 3 + j]; }
    const PadicScalar& at(int i, int j) const { return m[size_t(i) * 3 + j]; }

    static PMatrix identity(int64_t p, int N);
    static PMatrix lift(const Mat3& g, int N);              // integer lifts 0..p-1
    static PMatrix teich_lift(const Mat3& g, int N);        // Teichmuller entry lifts
    static PMatrix pi(int64_t p, int N);                    // the Iwahori normalizer
    PMatrix mul(const PMatrix& o) const;
};

// principal series datum: chi_1 (x) chi_2 (x) chi_0 with chi_i|units =
// omega~^{a_i}; positions on the diagonal are (chi_1, chi_2, chi_0)
struct SmoothChar {
    int p = 0;
    int N = 0;
    std::array<int, 3> pos_exp;           // (a1, a2, a0)
    std::array<PadicScalar, 3> pos_at_p;  // (chi_1(p), chi_2(p), chi_0(p))

    static SmoothChar make(int a2, int a1, int a0, PadicScalar chi1p, PadicScalar chi2p,
                           PadicScalar chi0p);
    PadicScalar value_upper(const PMatrix& b) const;  // on B(Q_p)
};

// finite formal combination of right translates of vhat
struct InducedVector {
    SmoothChar chi;
    std::vector<std::pair<PadicScalar, PMatrix>> parts;
};

// g = b k with b upper triangular, k in GL_3(Z_p)
std::pair<PMatrix, PMatrix> iwasawa(const PMatrix& g);

// evaluation of the canonical Iwahori eigenvector: supp = B(Q_p) I, vhat(1)=1
PadicScalar vhat_eval(const PMatrix& g, const SmoothChar& chi);

InducedVector vhat(const SmoothChar& chi);
PadicScalar eval(const InducedVector& F, const PMatrix& h);
InducedVector translate(const InducedVector& F, const PMatrix& g);

struct PadicOp {
    std::vector<std::pair<PadicScalar, PMatrix>> terms;
};
InducedVector apply(const PadicOp& op, const InducedVector& F);

enum class LiftMode { Integer, Teichmuller };
PadicOp op_Shat(int a2, int a1, int a0, int p, int N, LiftMode lm = LiftMode::Integer);
PadicOp op_Sprimehat(int a2, int a1, int a0, int p, int N, LiftMode lm = LiftMode::Integer);
PadicOp op_U1(int p, int N);
PadicOp op_U2(int p, int N);

// values on Teichmuller lifts of the flag representatives (sufficient for
// K(1)-invariant vectors); the heavy kernel, OpenMP-parallel over points
std::vector<PadicScalar> flag_restrict(const InducedVector& F, Exec exec = Exec::Parallel);

// pointwise x - y in O(p^k)
bool restriction_congruent(const std::vector<PadicScalar>& x, const std::vector<PadicScalar>& y,
                           int64_t k);
// multiply a restriction by a scalar
std::vector<PadicScalar> scale_restriction(const std::vector<PadicScalar>& x, const PadicScalar& c);
// mod-p reduction (entries must be integral)
Vec reduce_restriction(const std::vector<PadicScalar>& x, int p);

// Lemma 3.2.5: Pi vhat = chi_1(p) sum_{lam, mu} [[lam,1,0],[mu,0,1],[1,0,0]] vhat
bool verify_lemma325(int a2, int a1, int a0, const SmoothChar& chi, Exec exec = Exec::Parallel,
                     std::string* detail = nullptr);

// Prop 3.2.2: Shat'(Pi vhat) = p chi_1(p) kappa Shat(vhat); returns kappa.
// Throws DegenerateRatio unless the two restrictions are proportional.
PadicScalar compute_kappa(int a2, int a1, int a0, const SmoothChar& chi, Exec exec = Exec::Parallel);

struct LgcResult {
    bool identity = false;    // exact operator identity at working precision
    bool congruence = false;  // constant == (-1)^{a-b} (b-c)/(a-b) t mod p
    uint64_t constant_residue = 0;
    uint64_t expected_residue = 0;
};
// Local-global constant demo at FL = t: operators at (a2,a1,a0) = (-c,-b,-a),
// p chi_1(p) = the Teichmuller lift of t.
LgcResult lgc_demo(int a, int b, int c, uint64_t t, int p, int N, Exec exec = Exec::Parallel);

}  // namespace fl3
