#include "fl3/padic.hpp"

#include <sstream>

namespace fl3 {

uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m) {
    return uint64_t((unsigned __int128)(a) * b % m);
}

uint64_t powmod_u64(uint64_t a, uint64_t e, uint64_t m) {
    uint64_t acc = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) acc = mulmod_u64(acc, a, m);
        a = mulmod_u64(a, a, m);
        e >>= 1;
    }
    return acc;
}

uint64_t pow_u64(uint64_t base, int e) {
    uint64_t r = 1;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

// Hensel: a^{-1} mod p lifted through p^k
uint64_t inv_mod_prime_power(uint64_t a, int64_t p, int k) {
    if (a % p == 0) throw NotInvertible("non-unit mod p^k");
    uint64_t m = pow_u64(uint64_t(p), 1);
    uint64_t x = powmod_u64(a % p, uint64_t(p - 2), uint64_t(p));
    int have = 1;
    while (have < k) {
        have = std::min(2 * have, k);
        m = pow_u64(uint64_t(p), have);
        // x <- x (2 - a x) mod p^have
        uint64_t ax = mulmod_u64(a % m, x, m);
        uint64_t twomax = (2 % m + m - ax % m) % m;
        x = mulmod_u64(x, twomax, m);
    }
    return x % pow_u64(uint64_t(p), k);
}

static const int kMaxPrec = 17;

PadicScalar PadicScalar::make(int64_t p, int64_t val, uint64_t unit, int prec) {
    if (prec < 0 || prec > kMaxPrec) throw UsageError("precision out of range");
    PadicScalar x;
    x.p_ = p;
    x.exact_zero_ = false;
    x.val_ = val;
    x.prec_ = prec;
    x.unit_ = prec ? unit % pow_u64(uint64_t(p), prec) : 0;
    x.normalize();
    return x;
}

PadicScalar PadicScalar::from_int(int64_t p, int64_t n, int prec) {
    if (n == 0) return zero(p);
    bool neg = n < 0;
    uint64_t u = uint64_t(neg ? -n : n);
    int64_t v = 0;
    while (u % uint64_t(p) == 0) {
        u /= uint64_t(p);
        ++v;
    }
    uint64_t m = pow_u64(uint64_t(p), prec);
    u %= m;
    if (neg) u = (m - u) % m;
    return make(p, v, u, prec);
}

void PadicScalar::normalize() {
    if (exact_zero_ || prec_ == 0) return;
    uint64_t m = pow_u64(uint64_t(p_), prec_);
    unit_ %= m;
    if (unit_ == 0) {  // vanishes to the full known precision
        val_ += prec_;
        prec_ = 0;
        return;
    }
    while (unit_ % uint64_t(p_) == 0) {
        unit_ /= uint64_t(p_);
        ++val_;
        --prec_;
    }
}

int64_t PadicScalar::val() const {
    if (exact_zero_) throw UsageError("valuation of exact zero");
    return val_;
}

uint64_t PadicScalar::unit() const {
    if (is_zero_at_prec()) throw UsageError("unit of a zero");
    return unit_;
}

uint64_t PadicScalar::residue() const {
    if (is_zero_at_prec()) {
        if (exact_zero_ || val_ >= 1) return 0;
        throw PrecisionExhausted("residue of O(p^k) with k <= 0");
    }
    if (val_ > 0) return 0;
    if (val_ < 0) throw UsageError("residue of negative-valuation scalar");
    return unit_ % uint64_t(p_);
}

PadicScalar PadicScalar::operator*(const PadicScalar& o) const {
    if (exact_zero_ || o.exact_zero_) return zero(p_ ? p_ : o.p_);
    if (prec_ == 0 || o.prec_ == 0) {
        // O(p^a) * (unit p^b + ...) = O(p^{a+b})
        int64_t v = val_ + o.val_;
        return o_of(p_, v);
    }
    int k = std::min(prec_, o.prec_);
    uint64_t m = pow_u64(uint64_t(p_), k);
    return make(p_, val_ + o.val_, mulmod_u64(unit_ % m, o.unit_ % m, m), k);
}

PadicScalar PadicScalar::operator-() const {
    if (exact_zero_ || prec_ == 0) return *this;
    uint64_t m = pow_u64(uint64_t(p_), prec_);
    return make(p_, val_, (m - unit_ % m) % m, prec_);
}

PadicScalar PadicScalar::operator+(const PadicScalar& o) const {
    if (exact_zero_) return o;
    if (o.exact_zero_) return *this;
    // known moduli
    int64_t Mx = val_ + prec_, My = o.val_ + o.prec_;
    int64_t M = std::min(Mx, My);
    int64_t a = std::min(val_, o.val_);
    a = std::min(a, M);
    if (M - a <= 0) return o_of(p_, M);
    if (M - a > kMaxPrec) M = a + kMaxPrec;
    uint64_t m = pow_u64(uint64_t(p_), int(M - a));
    uint64_t s = 0;
    if (prec_ && val_ - a < M - a) s = mulmod_u64(unit_, pow_u64(uint64_t(p_), int(val_ - a)), m);
    if (o.prec_ && o.val_ - a < M - a) s = (s + mulmod_u64(o.unit_, pow_u64(uint64_t(p_), int(o.val_ - a)), m)) % m;
    if (s == 0) return o_of(p_, M);
    return make(p_, a, s, int(M - a));
}

PadicScalar PadicScalar::operator-(const PadicScalar& o) const { return *this + (-o); }

PadicScalar PadicScalar::inv() const {
    if (is_zero_at_prec()) throw NotInvertible("inverse of zero");
    return make(p_, -val_, inv_mod_prime_power(unit_, p_, prec_), prec_);
}

PadicScalar PadicScalar::pow(int64_t n) const {
    if (exact_zero_) {
        if (n <= 0) throw UsageError("0^n, n <= 0");
        return *this;
    }
    PadicScalar base = n < 0 ? inv() : *this;
    int64_t e = n < 0 ? -n : n;
    PadicScalar acc = make(p_, 0, 1, prec_ ? prec_ : 1);
    while (e) {
        if (e & 1) acc = acc * base;
        base = base * base;
        e >>= 1;
    }
    return acc;
}

PadicScalar PadicScalar::truncated(int k) const {
    if (exact_zero_ || prec_ <= k) return *this;
    return make(p_, val_, unit_ % pow_u64(uint64_t(p_), k), k);
}

bool PadicScalar::congruent(const PadicScalar& x, const PadicScalar& y, int64_t k) {
    PadicScalar d = x - y;
    if (d.is_exact_zero()) return true;
    if (d.prec_ == 0) return d.val_ >= k;
    return d.val_ >= k;
}

std::string PadicScalar::str() const {
    if (exact_zero_) return "0";
    std::ostringstream os;
    if (prec_ == 0) {
        os << "O(p^" << val_ << ")";
        return os.str();
    }
    os << unit_ << "*p^" << val_ << " + O(p^" << val_ + prec_ << ")";
    return os.str();
}

std::string ProjPoint::str() const {
    if (infinite) return "oo";
    return std::to_string(value.v);
}

ProjPoint proj_invert(const ProjPoint& x) {
    if (x.infinite) return ProjPoint::of(Fq::raw(*x.value.F, 0));
    if (x.value.is_zero()) return ProjPoint::infinity();
    return ProjPoint::of(x.value.inv());
}

ProjPoint specialize(const PadicScalar& x) {
    const FqField& F = FqField::get(int(x.p()), 1);
    if (x.is_exact_zero()) return ProjPoint::of(Fq(F, 0));
    if (x.is_zero_at_prec()) {
        if (x.val() >= 1) return ProjPoint::of(Fq(F, 0));
        throw PrecisionExhausted("specialize: sign of valuation unknown");
    }
    if (x.val() > 0) return ProjPoint::of(Fq(F, 0));
    if (x.val() < 0) return ProjPoint::infinity();
    return ProjPoint::of(Fq(F, int64_t(x.residue())));
}

PadicScalar teichmuller(int64_t x, int64_t p, int N) {
    int64_t r = ((x % p) + p) % p;
    if (r == 0) return PadicScalar::zero(p);
    uint64_t m = pow_u64(uint64_t(p), N);
    uint64_t t = uint64_t(r);
    for (int i = 0; i < N; ++i) t = powmod_u64(t, uint64_t(p), m);
    return PadicScalar::make(p, 0, t, N);
}

PadicScalar jacobi_sum(int64_t i, int64_t j, int64_t p, int N) {
    if (i <= 0 || j <= 0) throw UsageError("jacobi_sum requires positive exponents");
    uint64_t m = pow_u64(uint64_t(p), N);
    // cache Teichmuller lifts once
    std::vector<uint64_t> teich(size_t(p), 0);
    for (int64_t l = 1; l < p; ++l) teich[size_t(l)] = teichmuller(l, p, N).unit();
    uint64_t s = 0;
    for (int64_t l = 2; l < p; ++l) {  // l = 0, 1 contribute zero
        uint64_t a = powmod_u64(teich[size_t(l)], uint64_t(i), m);
        uint64_t b = powmod_u64(teich[size_t(((1 - l) % p + p) % p)], uint64_t(j), m);
        s = (s + mulmod_u64(a, b, m)) % m;
    }
    if (s == 0) return PadicScalar::o_of(p, N);
    return PadicScalar::make(p, 0, s, N);
}

std::pair<uint64_t, uint64_t> kappa_congruence_targets(int a2, int a1, int a0, int64_t p) {
    int a = a2 - a0, b = a1 - a0;
    if (!(b > 2 && a2 - a1 > 2 && p - 3 > a)) throw GenericityViolation("triple fails (2.1.6)");
    auto fact = [p](int64_t n) {
        uint64_t r = 1;
        for (int64_t k = 2; k <= n; ++k) r = r * uint64_t(k) % uint64_t(p);
        return r;
    };
    uint64_t inv = [&](uint64_t x) { return powmod_u64(x, uint64_t(p - 2), uint64_t(p)); }(fact(p - a));
    uint64_t k1 = mulmod_u64(mulmod_u64(fact(p - 1 - b), fact(p - (a - b)), uint64_t(p)), inv, uint64_t(p));
    uint64_t num = mulmod_u64(fact(a - b), fact(p - a), uint64_t(p));
    uint64_t k2 = mulmod_u64(num, powmod_u64(fact(p - b), uint64_t(p - 2), uint64_t(p)), uint64_t(p));
    k2 = (uint64_t(p) - k2) % uint64_t(p);
    return {k1, k2};
}

}  // namespace fl3
