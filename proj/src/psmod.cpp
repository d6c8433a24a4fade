#include "fl3/psmod.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fl3 {

namespace {

inline uint32_t powmod_small(uint32_t b, int e, uint32_t p) {
    // exponent taken mod p-1 (b != 0); b = 0 gives 0 for e > 0, 1 for e == 0
    if (b == 0) return e == 0 ? 1u : 0u;
    int r = e % int(p - 1);
    if (r < 0) r += int(p - 1);
    uint32_t acc = 1;
    for (int i = 0; i < r; ++i) acc = acc * b % p;
    return acc;
}

}  // namespace

uint16_t PSSpace::chi_of(const Mat3& b) const {
    uint32_t p = uint32_t(X->p);
    uint32_t v = powmod_small(b.at(0, 0), chi[0], p);
    v = v * powmod_small(b.at(1, 1), chi[1], p) % p;
    v = v * powmod_small(b.at(2, 2), chi[2], p) % p;
    return uint16_t(v);
}

bool is_zero(const Vec& f) {
    for (auto v : f)
        if (v) return false;
    return true;
}

Vec apply_elem(const PSSpace& S, const Mat3& g, const Vec& f) {
    const FlagVariety& X = *S.X;
    Vec out(f.size(), 0);
    for (int x = 0; x < X.dim(); ++x) {
        auto [xp, b] = X.normalize(X.rep(x).mul(g));
        out[size_t(x)] = uint16_t(uint32_t(S.chi_of(b)) * f[size_t(xp)] % uint32_t(S.p()));
    }
    return out;
}

Vec apply(const PSSpace& S, const GroupAlgElem& op, const Vec& f, Exec exec) {
    const FlagVariety& X = *S.X;
    const int n = X.dim();
    const uint32_t p = uint32_t(S.p());
    Vec out(size_t(n), 0);
    auto body = [&](int x) {
        uint64_t acc = 0;
        const Mat3& r = X.rep(x);
        for (const auto& [g, c] : op.terms) {
            auto [xp, b] = X.normalize(r.mul(g));
            acc += uint64_t(c) * S.chi_of(b) % p * f[size_t(xp)];
        }
        out[size_t(x)] = uint16_t(acc % p);
    };
    if (exec == Exec::Parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
        for (int x = 0; x < n; ++x) body(x);
#else
        for (int x = 0; x < n; ++x) body(x);
#endif
    } else {
        for (int x = 0; x < n; ++x) body(x);
    }
    return out;
}

uint16_t evaluate(const PSSpace& S, const Vec& f, const Mat3& g) {
    auto [x, b] = S.X->normalize(g);
    return uint16_t(uint32_t(S.chi_of(b)) * f[size_t(x)] % uint32_t(S.p()));
}

GroupAlgElem op_S(int a2, int a1, int a0, int p) {
    GroupAlgElem e;
    e.p = p;
    Mat3 w0 = Mat3::w0(p);
    for (int x = 0; x < p; ++x)
        for (int z = 0; z < p; ++z) {
            uint32_t c = powmod_small(uint32_t(x), p - (a2 - a0), uint32_t(p)) *
                         powmod_small(uint32_t(z), p - (a1 - a0), uint32_t(p)) % uint32_t(p);
            for (int y = 0; y < p; ++y) {
                ++e.formal_terms;
                if (c) e.terms.push_back({Mat3::unip(p, x, y, z).mul(w0), uint16_t(c)});
            }
        }
    return e;
}

GroupAlgElem op_Sprime(int a2, int a1, int a0, int p) {
    GroupAlgElem e;
    e.p = p;
    Mat3 w0 = Mat3::w0(p);
    for (int x = 0; x < p; ++x)
        for (int z = 0; z < p; ++z) {
            uint32_t c = powmod_small(uint32_t(x), p - (a2 - a1), uint32_t(p)) *
                         powmod_small(uint32_t(z), p - (a2 - a0), uint32_t(p)) % uint32_t(p);
            for (int y = 0; y < p; ++y) {
                ++e.formal_terms;
                if (c) e.terms.push_back({Mat3::unip(p, x, y, z).mul(w0), uint16_t(c)});
            }
        }
    return e;
}

GroupAlgElem op_X(int p) {
    GroupAlgElem e;
    e.p = p;
    for (int y = 0; y < p; ++y) {
        ++e.formal_terms;
        uint32_t c = powmod_small(uint32_t(y), p - 2, uint32_t(p));
        if (c) e.terms.push_back({Mat3::unip(p, 0, y, 0), uint16_t(c)});
    }
    return e;
}

GroupAlgElem op_Uprime1(int p) {
    GroupAlgElem e;
    e.p = p;
    for (int x = 0; x < p; ++x)
        for (int y = 0; y < p; ++y) {
            ++e.formal_terms;
            e.terms.push_back({Mat3::from_rows(p, {x, 1, 0, y, 0, 1, 1, 0, 0}), 1});
        }
    return e;
}

GroupAlgElem op_Uprime2(int p) {
    GroupAlgElem e;
    e.p = p;
    Mat3 c3 = Mat3::from_rows(p, {0, 0, 1, 1, 0, 0, 0, 1, 0});
    for (int x = 0; x < p; ++x)
        for (int y = 0; y < p; ++y) {
            ++e.formal_terms;
            e.terms.push_back({Mat3::unip(p, x, y, 0).mul(c3), 1});
        }
    return e;
}

GroupAlgElem op_remark319(int a2, int a1, int a0, int p) {
    GroupAlgElem e;
    e.p = p;
    Mat3 w0 = Mat3::w0(p);
    int top = p - (a2 - a0);
    // inverses mod p for the 1/(i+1) factors
    std::vector<uint32_t> inv(size_t(p), 0);
    for (uint32_t v = 1; v < uint32_t(p); ++v) inv[v] = powmod_small(v, p - 2, uint32_t(p));
    // binomials mod p
    std::vector<std::vector<uint32_t>> binom(size_t(p + 1), std::vector<uint32_t>(size_t(p + 1), 0));
    for (int n = 0; n <= p; ++n) {
        binom[size_t(n)][0] = 1;
        for (int k = 1; k <= n; ++k)
            binom[size_t(n)][size_t(k)] =
                (binom[size_t(n - 1)][size_t(k - 1)] + binom[size_t(n - 1)][size_t(k)]) % uint32_t(p);
    }
    for (int x = 0; x < p; ++x)
        for (int y = 0; y < p; ++y)
            for (int z = 0; z < p; ++z) {
                ++e.formal_terms;
                uint32_t c = 0;
                for (int i = 0; i <= top; ++i) {
                    int bin_n = p - (a1 - a0), bin_k = top - i;
                    if (bin_k < 0 || bin_k > bin_n) continue;
                    uint32_t t = binom[size_t(bin_n)][size_t(bin_k)];
                    t = t * inv[size_t(i + 1)] % uint32_t(p);
                    if (i & 1) t = (uint32_t(p) - t) % uint32_t(p);
                    uint32_t xz = uint32_t(x) * z % uint32_t(p);
                    t = t * powmod_small(xz, p - 1 - i, uint32_t(p)) % uint32_t(p);
                    t = t * powmod_small(uint32_t(y), i + 1, uint32_t(p)) % uint32_t(p);
                    c = (c + t) % uint32_t(p);
                }
                if (c) e.terms.push_back({Mat3::unip(p, x, y, z).mul(w0), uint16_t(c)});
            }
    return e;
}

GroupAlgElem transport(const GroupAlgElem& op) {
    GroupAlgElem e;
    e.p = op.p;
    e.formal_terms = op.formal_terms;
    for (const auto& [g, c] : op.terms) e.terms.push_back({theta_transport(g), c});
    return e;
}

std::vector<Vec> iwahori_eigenvectors(const PSSpace& S, std::array<int, 3> eig) {
    const FlagVariety& X = *S.X;
    const int n = X.dim();
    const uint32_t p = uint32_t(S.p());
    // all constraints have the shape f(x) = c f(x'); solve by weighted DSU
    std::vector<int> parent(static_cast<size_t>(n), 0);
    std::vector<uint16_t> weight(static_cast<size_t>(n), 1);  // f(x) = weight * f(root)
    std::vector<bool> dead(static_cast<size_t>(n), false);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::pair<int, uint16_t>(int)> find = [&](int x) -> std::pair<int, uint16_t> {
        if (parent[size_t(x)] == x) return {x, uint16_t(1)};
        auto [r, w] = find(parent[size_t(x)]);
        parent[size_t(x)] = r;
        weight[size_t(x)] = uint16_t(uint32_t(weight[size_t(x)]) * w % p);
        return {r, weight[size_t(x)]};
    };
    auto inv_mod = [&](uint16_t a) { return uint16_t(powmod_small(a, int(p) - 2, p)); };
    auto add_constraint = [&](int x, uint16_t c, int xp) {
        // f(x) = c f(x')
        auto [rx, wx] = find(x);
        auto [ry, wy] = find(xp);
        if (c == 0) {
            dead[size_t(rx)] = true;
            return;
        }
        uint32_t cw = uint32_t(c) * wy % p;
        if (rx == ry) {
            if (wx != uint16_t(cw)) dead[size_t(rx)] = true;  // forced zero
            return;
        }
        // f(rx) = wx^{-1} f(x) .. attach ry under rx: f(ry) = ? f(rx):
        // f(x) = wx f(rx), f(x') = wy f(ry), f(x) = c f(x') => f(ry) = wx (c wy)^{-1} f(rx)
        parent[size_t(ry)] = rx;
        weight[size_t(ry)] = uint16_t(uint32_t(wx) * inv_mod(uint16_t(cw)) % p);
        if (dead[size_t(ry)]) dead[size_t(rx)] = true;
    };

    // generators of U(F_p), plus torus generators with the eigenvalue
    int g0 = 0;
    {  // a generator of F_p^*
        for (int c = 2; c < int(p); ++c) {
            int ordr = 1;
            uint32_t v = uint32_t(c);
            while (v != 1) {
                v = v * uint32_t(c) % p;
                ++ordr;
            }
            if (ordr == int(p) - 1) {
                g0 = c;
                break;
            }
        }
    }
    struct Constraint {
        Mat3 g;
        uint16_t lam;  // require g f = lam f
    };
    std::vector<Constraint> cons;
    cons.push_back({Mat3::unip(S.p(), 1, 0, 0), 1});
    cons.push_back({Mat3::unip(S.p(), 0, 0, 1), 1});
    cons.push_back({Mat3::unip(S.p(), 0, 1, 0), 1});
    for (int pos = 0; pos < 3; ++pos) {
        Mat3 t = Mat3::diag(S.p(), pos == 0 ? g0 : 1, pos == 1 ? g0 : 1, pos == 2 ? g0 : 1);
        cons.push_back({t, uint16_t(powmod_small(uint32_t(g0), eig[size_t(pos)], p))});
    }
    for (const auto& con : cons) {
        uint16_t lami = inv_mod(con.lam);
        for (int x = 0; x < n; ++x) {
            auto [xp, b] = X.normalize(X.rep(x).mul(con.g));
            // (g f)(x) = chi(b) f(x') = lam f(x)  =>  f(x) = lam^{-1} chi(b) f(x')
            uint16_t c = uint16_t(uint32_t(lami) * S.chi_of(b) % p);
            add_constraint(x, c, xp);
        }
    }
    // collect live components
    std::vector<int> roots;
    for (int x = 0; x < n; ++x) {
        auto [r, w] = find(x);
        (void)w;
        if (r == x && !dead[size_t(r)]) roots.push_back(r);
    }
    // weights may have been updated after dead-marking propagation; re-check
    std::vector<Vec> basis;
    for (int r : roots) {
        Vec v(size_t(n), 0);
        for (int x = 0; x < n; ++x) {
            auto [rx, wx] = find(x);
            if (rx == r) v[size_t(x)] = wx;
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

bool is_torus_eigen(const PSSpace& S, const Vec& f, std::array<int, 3> eig) {
    const uint32_t p = uint32_t(S.p());
    for (int pos = 0; pos < 3; ++pos)
        for (int d = 2; d < int(p); ++d) {
            Mat3 t = Mat3::diag(S.p(), pos == 0 ? d : 1, pos == 1 ? d : 1, pos == 2 ? d : 1);
            Vec tf = apply_elem(S, t, f);
            uint32_t lam = powmod_small(uint32_t(d), eig[size_t(pos)], p);
            for (size_t i = 0; i < f.size(); ++i)
                if (tf[i] != uint16_t(lam * f[i] % p)) return false;
        }
    return true;
}

namespace {

// dense row-echelon accumulator over F_p
struct Echelon {
    uint32_t p;
    int n;
    std::vector<Vec> rows;   // normalized: leading 1 at piv[i]
    std::vector<int> pivs;
    explicit Echelon(uint32_t p_, int n_) : p(p_), n(n_) {}

    // reduce v; returns true (and stores) if independent
    bool insert(Vec v) {
        for (size_t r = 0; r < rows.size(); ++r) {
            uint32_t c = v[size_t(pivs[r])];
            if (!c) continue;
            uint32_t mc = p - c;
            const Vec& b = rows[r];
            for (int j = 0; j < n; ++j) v[size_t(j)] = uint16_t((v[size_t(j)] + mc * b[size_t(j)]) % p);
        }
        int piv = -1;
        for (int j = 0; j < n; ++j)
            if (v[size_t(j)]) {
                piv = j;
                break;
            }
        if (piv < 0) return false;
        uint32_t s = powmod_small(v[size_t(piv)], int(p) - 2, p);
        for (int j = 0; j < n; ++j) v[size_t(j)] = uint16_t(uint32_t(v[size_t(j)]) * s % p);
        rows.push_back(std::move(v));
        pivs.push_back(piv);
        return true;
    }
};

}  // namespace

int submodule_dim(const PSSpace& S, const std::vector<Vec>& seeds, Exec exec) {
    const int n = S.dim();
    const int p = S.p();
    int g0 = 2;
    for (int c = 2; c < p; ++c) {
        int ordr = 1;
        uint32_t v = uint32_t(c);
        while (v != 1) {
            v = v * uint32_t(c) % uint32_t(p);
            ++ordr;
        }
        if (ordr == p - 1) {
            g0 = c;
            break;
        }
    }
    std::vector<Mat3> gens = {Mat3::unip(p, 1, 0, 0), Mat3::unip(p, 0, 0, 1), Mat3::s1(p),
                              Mat3::s2(p),            Mat3::diag(p, g0, 1, 1), Mat3::diag(p, 1, g0, 1),
                              Mat3::diag(p, 1, 1, g0)};
    // precompute the sparse action of each generator: x -> (x', coeff)
    const FlagVariety& X = *S.X;
    std::vector<std::vector<std::pair<int, uint16_t>>> act(gens.size());
    for (size_t gi = 0; gi < gens.size(); ++gi) {
        act[gi].resize(size_t(n));
        auto fill = [&](int x) {
            auto [xp, b] = X.normalize(X.rep(x).mul(gens[gi]));
            act[gi][size_t(x)] = {xp, S.chi_of(b)};
        };
        if (exec == Exec::Parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
            for (int x = 0; x < n; ++x) fill(x);
#else
            for (int x = 0; x < n; ++x) fill(x);
#endif
        } else {
            for (int x = 0; x < n; ++x) fill(x);
        }
    }
    Echelon ech(uint32_t(p), n);
    std::vector<Vec> queue;
    for (const auto& s : seeds)
        if (ech.insert(s)) queue.push_back(s);
    while (!queue.empty()) {
        Vec v = std::move(queue.back());
        queue.pop_back();
        for (size_t gi = 0; gi < gens.size(); ++gi) {
            Vec w(size_t(n), 0);
            const auto& a = act[gi];
            for (int x = 0; x < n; ++x)
                w[size_t(x)] = uint16_t(uint32_t(a[size_t(x)].second) * v[size_t(a[size_t(x)].first)] %
                                        uint32_t(p));
            if (ech.insert(w)) queue.push_back(std::move(w));
        }
    }
    return int(ech.rows.size());
}

bool verify_lemma317(int a2, int a1, int a0, int p, std::string* detail) {
    PSSpace S(p, {a2, a1, a0});
    auto eig = iwahori_eigenvectors(S, {a1, a2, a0});
    if (eig.size() != 1) return false;
    const Vec& f = eig[0];
    Vec Sf = apply(S, op_S(a2, a1, a0, p), f);
    Mat3 g = Mat3::from_rows(p, {0, 0, 1, 0, 1, 0, 1, -1, 0});
    uint32_t lhs = evaluate(S, Sf, g);
    // (-1)^{a2-1} binom(p - (a1 - a0), a2 - a1) f(s1)
    uint32_t binv = 1;
    {
        int nn = p - (a1 - a0), kk = a2 - a1;
        uint64_t num = 1, den = 1;
        for (int i = 0; i < kk; ++i) {
            num = num * uint64_t((nn - i) % p) % uint64_t(p);
            den = den * uint64_t(i + 1) % uint64_t(p);
        }
        binv = uint32_t(num % p) * powmod_small(uint32_t(den), p - 2, uint32_t(p)) % uint32_t(p);
    }
    uint32_t fs1 = evaluate(S, f, Mat3::s1(p));
    uint32_t rhs = binv * fs1 % uint32_t(p);
    if ((a2 - 1) % 2) rhs = (uint32_t(p) - rhs) % uint32_t(p);
    bool ok = lhs == rhs && lhs != 0;
    if (detail)
        *detail = "S(f)(g) = " + std::to_string(lhs) + ", closed form = " + std::to_string(rhs);
    return ok;
}

SObservables verify_S_observables(int a2, int a1, int a0, int p, Exec exec) {
    SObservables r;
    PSSpace S(p, {a2, a1, a0});
    auto fb = iwahori_eigenvectors(S, {a1, a2, a0});
    if (fb.size() != 1) return r;
    Vec Sf = apply(S, op_S(a2, a1, a0, p), fb[0], exec);
    r.s_nonzero = !is_zero(Sf);
    r.s_eigen = is_torus_eigen(S, Sf, {a2 - 1, a1, a0 + 1});
    r.s_fixed_u13 = true;
    for (int c = 1; c < p; ++c)
        if (apply_elem(S, Mat3::unip(p, 0, c, 0), Sf) != Sf) r.s_fixed_u13 = false;
    r.x_kills = is_zero(apply(S, op_X(p), Sf, exec));
    // S' on its own eigenvector
    auto fb2 = iwahori_eigenvectors(S, {a2, a0, a1});
    if (fb2.size() == 1) {
        Vec Spf = apply(S, op_Sprime(a2, a1, a0, p), fb2[0], exec);
        r.sprime_nonzero = !is_zero(Spf);
        r.sprime_eigen = is_torus_eigen(S, Spf, {a2 - 1, a1, a0 + 1});
        r.sprime_x_kills = is_zero(apply(S, op_X(p), Spf, exec));
    }
    // theta(S at (-a0, -a1, -a2)) = (-1)^{a0 + a1} S'
    {
        GroupAlgElem lhs = transport(op_S(-a0, -a1, -a2, p));
        GroupAlgElem rhs = op_Sprime(a2, a1, a0, p);
        auto keyed = [&](const GroupAlgElem& e, bool negate) {
            std::vector<std::pair<uint64_t, uint16_t>> v;
            for (const auto& [g, c] : e.terms) {
                uint16_t cc = negate ? uint16_t((p - c) % p) : c;
                v.push_back({g.key(), cc});
            }
            std::sort(v.begin(), v.end());
            return v;
        };
        bool neg = ((a0 + a1) % 2) != 0;
        r.transport_match = keyed(lhs, neg) == keyed(rhs, false);
    }
    return r;
}

}  // namespace fl3
