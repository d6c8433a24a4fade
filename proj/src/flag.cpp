#include "fl3/flag.hpp"

#include <map>
#include <memory>
#include <mutex>

namespace fl3 {

namespace {
inline uint16_t modp(long long x, int p) {
    long long r = x % p;
    return uint16_t(r < 0 ? r + p : r);
}
}  // namespace

Mat3 Mat3::identity(int p) { return diag(p, 1, 1, 1); }

Mat3 Mat3::diag(int p, long long d0, long long d1, long long d2) {
    Mat3 r;
    r.p = p;
    r.at(0, 0) = modp(d0, p);
    r.at(1, 1) = modp(d1, p);
    r.at(2, 2) = modp(d2, p);
    return r;
}

Mat3 Mat3::unip(int p, long long x, long long y, long long z) {
    Mat3 r = identity(p);
    r.at(0, 1) = modp(x, p);
    r.at(0, 2) = modp(y, p);
    r.at(1, 2) = modp(z, p);
    return r;
}

Mat3 Mat3::from_rows(int p, std::array<long long, 9> rows) {
    Mat3 r;
    r.p = p;
    for (int i = 0; i < 9; ++i) r.m[size_t(i)] = modp(rows[size_t(i)], p);
    return r;
}

Mat3 Mat3::s1(int p) { return from_rows(p, {0, 1, 0, 1, 0, 0, 0, 0, 1}); }
Mat3 Mat3::s2(int p) { return from_rows(p, {1, 0, 0, 0, 0, 1, 0, 1, 0}); }
Mat3 Mat3::w0(int p) { return from_rows(p, {0, 0, 1, 0, 1, 0, 1, 0, 0}); }

Mat3 Mat3::mul(const Mat3& o) const {
    Mat3 r;
    r.p = p;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            uint32_t s = 0;
            for (int k = 0; k < 3; ++k) s += uint32_t(at(i, k)) * o.at(k, j);
            r.at(i, j) = uint16_t(s % uint32_t(p));
        }
    return r;
}

uint16_t Mat3::det() const {
    int64_t s = int64_t(at(0, 0)) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1)) -
                int64_t(at(0, 1)) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0)) +
                int64_t(at(0, 2)) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
    return modp(s, p);
}

Mat3 Mat3::inv() const {
    uint16_t d = det();
    if (!d) throw NotInvertible("singular matrix over F_p");
    // inverse of d mod p
    uint32_t dinv = 1, base = d, e = uint32_t(p - 2);
    while (e) {
        if (e & 1) dinv = dinv * base % uint32_t(p);
        base = base * base % uint32_t(p);
        e >>= 1;
    }
    Mat3 r;
    r.p = p;
    auto cof = [&](int i, int j) {
        int r0 = (i + 1) % 3, r1 = (i + 2) % 3, c0 = (j + 1) % 3, c1 = (j + 2) % 3;
        int64_t v = int64_t(at(r0, c0)) * at(r1, c1) - int64_t(at(r0, c1)) * at(r1, c0);
        return int64_t(modp(v, p));
    };
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.at(i, j) = modp(cof(j, i) * dinv, p);
    return r;
}

Mat3 Mat3::transpose() const {
    Mat3 r;
    r.p = p;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.at(i, j) = at(j, i);
    return r;
}

uint64_t Mat3::key() const {
    uint64_t k = 0;
    for (int i = 0; i < 9; ++i) k = (k << 4) | uint64_t(m[size_t(i)] & 0xf);
    return k;
}

Mat3 theta_transport(const Mat3& g) {
    Mat3 J = Mat3::w0(g.p);
    return J.mul(g.inv().transpose()).mul(J);
}

FlagVariety::FlagVariety(int p_) : p(p_) {
    // permutations as pivot-column tuples (c0, c1, c2); lengths by inversions
    static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                    {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (int w = 0; w < 6; ++w) {
        const int* c = perms[w];
        // free positions: (i, j) with j > c_i and j not a pivot of a lower row
        std::vector<std::pair<int, int>> free_pos;
        for (int i = 0; i < 3; ++i)
            for (int j = c[i] + 1; j < 3; ++j) {
                bool lower_pivot = false;
                for (int k = i + 1; k < 3; ++k)
                    if (c[k] == j) lower_pivot = true;
                if (!lower_pivot) free_pos.push_back({i, j});
            }
        int np = int(free_pos.size());
        int total = 1;
        for (int t = 0; t < np; ++t) total *= p;
        cell_sizes_[size_t(w)] = total;
        for (int v = 0; v < total; ++v) {
            Mat3 M;
            M.p = p;
            for (int i = 0; i < 3; ++i) M.at(i, c[i]) = 1;
            int t = v;
            for (auto [i, j] : free_pos) {
                M.at(i, j) = uint16_t(t % p);
                t /= p;
            }
            index_[M.key()] = int(reps_.size());
            reps_.push_back(M);
            weyl_.push_back(w);
        }
    }
}

std::pair<int, Mat3> FlagVariety::normalize(const Mat3& g) const {
    if (!g.det()) throw NotInvertible("singular element");
    // bottom-up reduction: row_i may absorb multiples of rows k > i and be
    // scaled; this computes the canonical coset representative
    Mat3 M = g;
    auto inv_mod = [&](uint16_t a) {
        uint32_t r = 1, b = a, e = uint32_t(p - 2);
        while (e) {
            if (e & 1) r = r * b % uint32_t(p);
            b = b * b % uint32_t(p);
            e >>= 1;
        }
        return uint16_t(r);
    };
    int piv[3] = {-1, -1, -1};
    for (int i = 2; i >= 0; --i) {
        // clear the pivot columns of the lower rows, smallest pivot first so a
        // later row operation cannot disturb an already-cleared column
        std::array<int, 2> ks{};
        int nk = 0;
        for (int k = i + 1; k < 3; ++k) ks[size_t(nk++)] = k;
        if (nk == 2 && piv[ks[0]] > piv[ks[1]]) std::swap(ks[0], ks[1]);
        for (int t = 0; t < nk; ++t) {
            int k = ks[size_t(t)];
            uint16_t c = M.at(i, piv[k]);
            if (!c) continue;
            for (int j = 0; j < 3; ++j)
                M.at(i, j) = uint16_t((M.at(i, j) + uint32_t(p - c) * M.at(k, j)) % uint32_t(p));
        }
        int pc = -1;
        for (int j = 0; j < 3; ++j)
            if (M.at(i, j)) {
                pc = j;
                break;
            }
        if (pc < 0) throw NotInvertible("singular element");
        piv[i] = pc;
        uint16_t s = inv_mod(M.at(i, pc));
        for (int j = 0; j < 3; ++j) M.at(i, j) = uint16_t(uint32_t(M.at(i, j)) * s % uint32_t(p));
    }
    auto it = index_.find(M.key());
    if (it == index_.end()) throw Error("canonical form not found");
    Mat3 b = g.mul(M.inv());
    return {it->second, b};
}

const FlagVariety& FlagVariety::get(int p) {
    static std::map<int, std::unique_ptr<FlagVariety>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(p);
    if (it == cache.end()) it = cache.emplace(p, std::make_unique<FlagVariety>(p)).first;
    return *it->second;
}

}  // namespace fl3
