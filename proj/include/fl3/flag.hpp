#pragma once

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "fl3/errors.hpp"

namespace fl3 {

// 3x3 matrix over F_p
struct Mat3 {
    int p = 0;
    std::array<uint16_t, 9> m{};

    uint16_t& at(int i, int j) { return m[size_t(i) * 3 + j]; }
    uint16_t at(int i, int j) const { return m[size_t(i) * 3 + j]; }

    static Mat3 identity(int p);
    static Mat3 diag(int p, long long d0, long long d1, long long d2);
    // upper unipotent with (0,1) = x, (0,2) = y, (1,2) = z
    static Mat3 unip(int p, long long x, long long y, long long z);
    static Mat3 s1(int p);  // swap rows 1,2
    static Mat3 s2(int p);  // swap rows 2,3
    static Mat3 w0(int p);  // s1 s2 s1
    static Mat3 from_rows(int p, std::array<long long, 9> rows);

    Mat3 mul(const Mat3& o) const;
    Mat3 inv() const;
    Mat3 transpose() const;
    uint16_t det() const;
    bool operator==(const Mat3& o) const { return m == o.m; }
    uint64_t key() const;
};

// theta(g) = J g^{-T} J, the outer automorphism used to transport the
// S-facts to S'
Mat3 theta_transport(const Mat3& g);

// The flag variety B(F_p) \ GL_3(F_p), enumerated by Bruhat cells. Each
// coset has a unique representative in bottom-up reduced echelon form; the
// free entries are the cell parameters.
class FlagVariety {
  public:
    explicit FlagVariety(int p);
    static const FlagVariety& get(int p);

    int p;
    int dim() const { return int(reps_.size()); }
    const Mat3& rep(int x) const { return reps_[size_t(x)]; }
    int weyl_of(int x) const { return weyl_[size_t(x)]; }  // 0..5
    const std::array<int, 6>& cell_sizes() const { return cell_sizes_; }

    // g = b * rep(x) with b upper triangular; returns (x, b)
    std::pair<int, Mat3> normalize(const Mat3& g) const;

  private:
    std::vector<Mat3> reps_;
    std::vector<int> weyl_;
    std::array<int, 6> cell_sizes_{};
    std::unordered_map<uint64_t, int> index_;
};

}  // namespace fl3
