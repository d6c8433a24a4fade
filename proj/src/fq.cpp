#include "fl3/fq.hpp"

#include <map>
#include <mutex>
#include <sstream>

namespace fl3 {

namespace {

bool is_prime(int p) {
    if (p < 2) return false;
    for (int k = 2; k * k <= p; ++k)
        if (p % k == 0) return false;
    return true;
}

// polynomial arithmetic mod p on coefficient vectors, little-endian
using Poly = std::vector<int>;

Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& mod, int p) {
    Poly r(a.size() + b.size(), 0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
    // reduce by monic mod of degree d
    int d = int(mod.size()) - 1;
    for (int i = int(r.size()) - 1; i >= d; --i) {
        int c = r[i];
        if (!c) continue;
        r[i] = 0;
        for (int j = 0; j < d; ++j) r[i - d + j] = ((r[i - d + j] - c * mod[j]) % p + p) % p;
    }
    r.resize(d);
    return r;
}

bool poly_is_irreducible(const Poly& mod, int p) {
    // x^{p^k} == x mod (mod) has no roots in proper subfields: standard test
    // for tiny degrees: check that mod has no roots (d<=3 shortcut) and, for
    // d == 2 or 3, root-freeness is equivalent to irreducibility.
    int d = int(mod.size()) - 1;
    if (d == 1) return true;
    if (d <= 3) {
        for (int x = 0; x < p; ++x) {
            long long v = 0, xp = 1;
            for (int i = 0; i < d; ++i) {
                v = (v + mod[i] * xp) % p;
                xp = (xp * x) % p;
            }
            v = (v + xp) % p;
            if (v == 0) return false;
        }
        return true;
    }
    // general d: check gcd-freeness via x^{p^i} iterates
    Poly x = {0, 1};
    Poly t = x;
    for (int i = 1; i <= d / 2; ++i) {
        // t = t^p mod (mod)
        Poly s = {1};
        Poly base = t;
        int e = p;
        while (e) {
            if (e & 1) s = poly_mulmod(s, base, mod, p);
            base = poly_mulmod(base, base, mod, p);
            e >>= 1;
        }
        t = s;
        // gcd(t - x, mod) must be 1; since mod may be reducible just test
        // t != x componentwise combined with a root check above
        Poly diff = t;
        diff.resize(std::max(diff.size(), x.size()), 0);
        diff[1] = ((diff[1] - 1) % p + p) % p;
        bool zero = true;
        for (int c : diff)
            if (c % p) zero = false;
        if (zero) return false;
    }
    return true;
}

}  // namespace

FqField::FqField(int p_, int d_) : p(p_), d(d_) {
    if (!is_prime(p) || p < 5) throw UsageError("p must be a prime >= 5");
    if (d < 1) throw UsageError("extension degree must be >= 1");
    q = 1;
    for (int i = 0; i < d; ++i) q *= uint32_t(p);
    if (q > 4096) throw UsageError("field too large for table-driven F_q");

    // defining polynomial: smallest coefficient index such that
    // x^d + sum c_i x^i is irreducible
    Poly mod(d + 1, 0);
    mod[d] = 1;
    if (d > 1) {
        uint32_t pd = q / p;  // p^d / p = number of candidate tails... not used
        (void)pd;
        uint32_t limit = 1;
        for (int i = 0; i < d; ++i) limit *= uint32_t(p);
        bool found = false;
        for (uint32_t idx = 0; idx < limit && !found; ++idx) {
            uint32_t t = idx;
            for (int i = 0; i < d; ++i) {
                mod[i] = int(t % p);
                t /= p;
            }
            if (poly_is_irreducible(mod, p)) found = true;
        }
        if (!found) throw Error("no irreducible polynomial found");
    }
    modulus.assign(d, 0);
    for (int i = 0; i < d; ++i) modulus[i] = uint16_t(mod[i]);

    // element index <-> coefficient vector
    auto decode = [&](uint32_t v) {
        Poly c(d, 0);
        for (int i = 0; i < d; ++i) {
            c[i] = int(v % p);
            v /= p;
        }
        return c;
    };
    auto encode = [&](const Poly& c) {
        uint32_t v = 0;
        for (int i = d - 1; i >= 0; --i) v = v * p + uint32_t(c[i] % p);
        return v;
    };

    add_.resize(size_t(q) * q);
    mul_.resize(size_t(q) * q);
    neg_.resize(q);
    inv_.assign(q, 0);
    frob_.resize(q);

    for (uint32_t a = 0; a < q; ++a) {
        Poly pa = decode(a);
        Poly na(d);
        for (int i = 0; i < d; ++i) na[i] = (p - pa[i]) % p;
        neg_[a] = uint16_t(encode(na));
        for (uint32_t b = 0; b < q; ++b) {
            Poly pb = decode(b);
            Poly s(d);
            for (int i = 0; i < d; ++i) s[i] = (pa[i] + pb[i]) % p;
            add_[idx(uint16_t(a), uint16_t(b))] = uint16_t(encode(s));
            mul_[idx(uint16_t(a), uint16_t(b))] = uint16_t(encode(poly_mulmod(pa, pb, mod, p)));
        }
    }
    for (uint32_t a = 1; a < q; ++a) {
        if (inv_[a]) continue;
        for (uint32_t b = 1; b < q; ++b)
            if (mul_[idx(uint16_t(a), uint16_t(b))] == 1) {
                inv_[a] = uint16_t(b);
                inv_[b] = uint16_t(a);
                break;
            }
        if (!inv_[a]) throw Error("inverse not found; modulus not irreducible?");
    }
    for (uint32_t a = 0; a < q; ++a) {
        uint16_t r = uint16_t(a);
        uint16_t acc = 1;
        // a^p by square-and-multiply on the table
        int e = p;
        while (e) {
            if (e & 1) acc = mul_[idx(acc, r)];
            r = mul_[idx(r, r)];
            e >>= 1;
        }
        frob_[a] = acc;
    }
}

uint16_t FqField::pow(uint16_t a, long long n) const {
    if (n < 0) {
        a = inv(a);
        n = -n;
    }
    uint16_t acc = 1, base = a;
    while (n) {
        if (n & 1) acc = mul(acc, base);
        base = mul(base, base);
        n >>= 1;
    }
    return acc;
}

uint16_t FqField::from_int(long long n) const {
    long long r = n % p;
    if (r < 0) r += p;
    return uint16_t(r);
}

std::string FqField::modulus_string() const {
    std::ostringstream os;
    os << "x^" << d;
    for (int i = d - 1; i >= 0; --i)
        if (modulus[i]) os << " + " << modulus[i] << (i ? (i == 1 ? "*x" : "*x^" + std::to_string(i)) : "");
    return os.str();
}

const FqField& FqField::get(int p, int d) {
    static std::map<std::pair<int, int>, std::unique_ptr<FqField>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(p, d);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, std::make_unique<FqField>(p, d)).first;
    return *it->second;
}

Tensor Tensor::operator+(const Tensor& o) const {
    Tensor r = *this;
    for (size_t i = 0; i < c.size(); ++i) r.c[i] = F->add(c[i], o.c[i]);
    return r;
}

Tensor Tensor::operator-(const Tensor& o) const {
    Tensor r = *this;
    for (size_t i = 0; i < c.size(); ++i) r.c[i] = F->sub(c[i], o.c[i]);
    return r;
}

Tensor Tensor::operator*(const Tensor& o) const {
    Tensor r = *this;
    for (size_t i = 0; i < c.size(); ++i) r.c[i] = F->mul(c[i], o.c[i]);
    return r;
}

Tensor Tensor::operator-() const {
    Tensor r = *this;
    for (size_t i = 0; i < c.size(); ++i) r.c[i] = F->neg(c[i]);
    return r;
}

Tensor Tensor::inv() const {
    Tensor r = *this;
    for (size_t i = 0; i < c.size(); ++i) r.c[i] = F->inv(c[i]);
    return r;
}

Tensor Tensor::frob_shift() const {
    Tensor r = *this;
    size_t f = c.size();
    for (size_t i = 0; i < f; ++i) r.c[i] = c[(i + f - 1) % f];
    return r;
}

}  // namespace fl3
