#include "fl3/typecomb.hpp"

#include <algorithm>
#include <set>

namespace fl3 {

namespace {
int modp(long long x, int m) {
    long long r = x % m;
    return int(r < 0 ? r + m : r);
}
}  // namespace

InertialTypeN1 make_n1(int i, int j, int k, int p) {
    InertialTypeN1 t{{modp(i, p - 1), modp(j, p - 1), modp(k, p - 1)}};
    std::sort(t.r.begin(), t.r.end());
    return t;
}

InertialTypeN2 make_n2(int x, long long y, int p) {
    int e = p * p - 1;
    int y0 = modp(y, e);
    if (y0 % (p + 1) == 0) throw UsageError("y == 0 mod p+1 is not of niveau 2");
    int y1 = modp((long long)p * y0, e);
    return {modp(x, p - 1), std::min(y0, y1)};
}

std::vector<InertialTypeN1> niveau1_allowed(const GenericTriple& t) {
    std::vector<InertialTypeN1> out;
    out.push_back(make_n1(t.a2, t.a1, t.a0, t.p));
    out.push_back(make_n1(t.a2 - 1, t.a1, t.a0 + 1, t.p));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<InertialTypeN2> niveau2_allowed(const GenericTriple& t) {
    const int p = t.p;
    // (delta, eps) with eps in {0,1} and delta + eps in {0,1}
    static const int de[4][2] = {{0, 0}, {1, 0}, {0, 1}, {-1, 1}};
    std::set<InertialTypeN2> out;
    for (auto [d, ee] : de) {
        long long shift = d - (long long)ee * (p - 1);
        // family (i), (ii), (iii)
        long long ys[3] = {t.a2 + (long long)p * t.a1 + shift, t.a2 + (long long)p * t.a0 + shift,
                           t.a1 + (long long)p * t.a0 + shift};
        int xs[3] = {t.a0 - d, t.a1 - d, t.a2 - d};
        for (int fam = 0; fam < 3; ++fam) {
            int e = p * p - 1;
            if (modp(ys[fam], e) % (p + 1) == 0) continue;
            out.insert(make_n2(xs[fam], ys[fam], p));
        }
    }
    return {out.begin(), out.end()};
}

std::optional<FLClass> fl_forcing(const GenericTriple& t, const InertialTypeN2& tau) {
    InertialTypeN2 inf_type = make_n2(t.a0, t.a2 + 1 + (long long)t.p * (t.a1 - 1), t.p);
    InertialTypeN2 zero_type = make_n2(t.a2, t.a0 - 1 + (long long)t.p * (t.a1 + 1), t.p);
    if (tau == inf_type) return FLClass::Infinity;
    if (tau == zero_type) return FLClass::Zero;
    return std::nullopt;
}

std::vector<SerreWeight> lemma443_list(int a, int b, int c, int p) {
    if (!is_generic(a, b, c, p)) throw GenericityViolation("triple fails (2.1.6)");
    return {
        {b + p - 1, a - 1, c + 1}, {a - 1, c + 1, b - p + 1}, {c + p, b, a - p},
        {b + p - 1, a, c},         {a, c, b - p + 1},         {c + p - 1, b, a - p + 1},
        {a - 1, b, c + 1},
    };
}

std::pair<std::vector<SerreWeight>, std::vector<SerreWeight>> serre_weight_bounds(
    int a, int b, int c, FLClass cls, int p) {
    if (!is_generic(a, b, c, p)) throw GenericityViolation("triple fails (2.1.6)");
    SerreWeight ordinary{a - 1, b, c + 1};
    SerreWeight obv{c + p - 1, b, a - p + 1};
    SerreWeight shadow_inf{a, c, b - p + 1};
    SerreWeight shadow_zero{b + p - 1, a, c};
    std::vector<SerreWeight> lower{ordinary}, upper{ordinary, obv};
    if (cls == FLClass::Infinity) {
        lower.push_back(shadow_inf);
        upper.push_back(shadow_inf);
    } else if (cls == FLClass::Zero) {
        lower.push_back(shadow_zero);
        upper.push_back(shadow_zero);
    }
    std::sort(lower.begin(), lower.end());
    std::sort(upper.begin(), upper.end());
    return {lower, upper};
}

}  // namespace fl3
