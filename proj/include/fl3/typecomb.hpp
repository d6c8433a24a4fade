#pragma once

#include <array>
#include <optional>
#include <vector>

#include "fl3/errors.hpp"

namespace fl3 {

// strict genericity (2.1.6)
inline bool is_generic(int a2, int a1, int a0, int p) {
    return a1 - a0 > 2 && a2 - a1 > 2 && p - 3 > a2 - a0;
}

struct GenericTriple {
    int a2, a1, a0;
    int p;
    GenericTriple(int a2_, int a1_, int a0_, int p_) : a2(a2_), a1(a1_), a0(a0_), p(p_) {
        if (!is_generic(a2, a1, a0, p)) throw GenericityViolation("triple fails (2.1.6)");
    }
};

// niveau 1 inertial type: unordered triple of residues mod p-1
struct InertialTypeN1 {
    std::array<int, 3> r;  // sorted ascending, in [0, p-1)
    bool operator==(const InertialTypeN1& o) const { return r == o.r; }
    bool operator<(const InertialTypeN1& o) const { return r < o.r; }
};
InertialTypeN1 make_n1(int i, int j, int k, int p);

// niveau 2 inertial type omega^x + omega_2^y + omega_2^{py}:
// x mod p-1, y mod p^2-1 with y != 0 mod p+1, and (x, y) ~ (x, py)
struct InertialTypeN2 {
    int x;  // canonical in [0, p-1)
    int y;  // canonical: min(y, p y mod e) in [0, p^2-1)
    bool operator==(const InertialTypeN2& o) const { return x == o.x && y == o.y; }
    bool operator<(const InertialTypeN2& o) const { return std::pair(x, y) < std::pair(o.x, o.y); }
};
InertialTypeN2 make_n2(int x, long long y, int p);

// Prop 2.6.1: exactly the two allowed niveau-1 types.
std::vector<InertialTypeN1> niveau1_allowed(const GenericTriple& t);

// Prop 2.6.3: the allowed niveau-2 types (three families, four (delta, eps)
// choices each, canonicalized and deduplicated).
std::vector<InertialTypeN2> niveau2_allowed(const GenericTriple& t);

enum class FLClass { Generic, Zero, Infinity };

// Prop 2.6.4: the two types that pin FL to oo resp. 0.
std::optional<FLClass> fl_forcing(const GenericTriple& t, const InertialTypeN2& tau);

// Serre weight F(x, y, z), p-restricted highest weight
struct SerreWeight {
    int x, y, z;
    bool operator==(const SerreWeight& o) const { return x == o.x && y == o.y && z == o.z; }
    bool operator<(const SerreWeight& o) const {
        return std::array{x, y, z} < std::array{o.x, o.y, o.z};
    }
};
inline bool p_restricted(const SerreWeight& w, int p) {
    return w.x - w.y >= 0 && w.x - w.y <= p - 1 && w.y - w.z >= 0 && w.y - w.z <= p - 1;
}

// Lemma 4.4.3: the seven candidate weights (section-4 labels a > b > c).
std::vector<SerreWeight> lemma443_list(int a, int b, int c, int p);

// Thm 4.4.1 containments; first = guaranteed lower set, second = upper bound.
std::pair<std::vector<SerreWeight>, std::vector<SerreWeight>> serre_weight_bounds(
    int a, int b, int c, FLClass cls, int p);

// (4.5.1) relabeling between the section-3 and section-4 conventions.
inline std::array<int, 3> weight_dual(int a, int b, int c) { return {-c, -b, -a}; }

}  // namespace fl3
