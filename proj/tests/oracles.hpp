#pragma once
// Reference computations that do not go through the library's code paths.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;

inline double fact(int n) { return std::tgamma(n + 1.0); }

inline int64_t binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    int64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// dim of degree-m polynomials in n variables.
inline int64_t proj_dim(int n, int m) { return m < 0 ? 0 : binom(m + n - 1, n - 1); }

// Exponent vectors of degree m in n variables, z1^m first.
inline std::vector<std::vector<int>> monomials(int n, int m) {
    std::vector<std::vector<int>> out;
    std::vector<int> e(n, 0);
    std::function<void(int, int)> rec = [&](int i, int left) {
        if (i == n - 1) {
            e[i] = left;
            out.push_back(e);
            return;
        }
        for (int k = left; k >= 0; --k) {
            e[i] = k;
            rec(i + 1, left - k);
        }
    };
    rec(0, m);
    return out;
}

// Fock norm^2 of z^alpha from the symmetric-tensor picture: the symmetrized
// word has norm^2 1 / (number of words with these letter counts), counted
// by brute-force enumeration of all n^m words.
inline double fock_norm2_by_words(const std::vector<int>& alpha) {
    const int n = int(alpha.size());
    int m = 0;
    for (int a : alpha) m += a;
    int64_t total = 1;
    for (int i = 0; i < m; ++i) total *= n;
    int64_t hits = 0;
    for (int64_t w = 0; w < total; ++w) {
        std::vector<int> cnt(n, 0);
        int64_t x = w;
        for (int i = 0; i < m; ++i) {
            cnt[x % n]++;
            x /= n;
        }
        if (cnt == alpha) ++hits;
    }
    return 1.0 / double(hits);
}

// Integral of z^g conj(z)^h over the unit sphere of C^n, normalized measure.
inline double sphere_moment(const std::vector<int>& g, const std::vector<int>& h) {
    if (g != h) return 0.0;
    const int n = int(g.size());
    int deg = 0;
    double num = fact(n - 1);
    for (int a : g) {
        deg += a;
        num *= fact(a);
    }
    return num / fact(deg + n - 1);
}

// Scalar polynomial in z and conj(z): key = (hol exps, antihol exps).
using Poly = std::map<std::pair<std::vector<int>, std::vector<int>>, cplx>;

// Toeplitz matrix of f on degree-m polynomials of C^n in the Fock-orthonormal
// basis sqrt(m!/alpha!) z^alpha (z1^m first): entry [alpha, beta] is
// n_m * integral f e_beta conj(e_alpha), the sphere and Fock inner products
// being proportional on a single degree.
inline Eigen::MatrixXcd toeplitz_cp(int n, const Poly& f, int m) {
    auto mons = monomials(n, m);
    const int D = int(mons.size());
    Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(D, D);
    auto norm = [&](const std::vector<int>& a) {
        double v = fact(m);
        for (int x : a) v /= fact(x);
        return std::sqrt(v);
    };
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j)
            for (auto& [key, c] : f) {
                std::vector<int> g(n), h(n);
                for (int k = 0; k < n; ++k) {
                    g[k] = key.first[k] + mons[j][k];
                    h[k] = key.second[k] + mons[i][k];
                }
                T(i, j) += c * norm(mons[i]) * norm(mons[j]) * sphere_moment(g, h);
            }
    return T * double(D);
}

// Fraction p/q reduced, for exact comparisons of small rationals.
inline std::pair<int64_t, int64_t> reduce(int64_t p, int64_t q) {
    int64_t g = std::gcd(p, q);
    return {p / g, q / g};
}

}  // namespace oracle
