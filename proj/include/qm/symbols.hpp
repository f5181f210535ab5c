#pragma once

#include <string>

#include "qm/report.hpp"
#include "qm/space.hpp"

namespace qm {

// A matrix-valued function on the model, stored as a matrix A over
// B(GH_k) (x) M_N in orthonormal coordinates. Combined index (a, s) is
// a*N + s. Its value at a boundary point zeta is
//   sum_{a,b} psi_a(zeta) A[(a,s),(b,t)] conj(psi_b(zeta)),
// so the rank-one operator |psi_a><psi_b| has symbol psi_a conj(psi_b).
struct Symbol {
    ModelPtr model;
    int level = 0;
    int N = 1;
    Mat A;

    bool hermitian(double tol = 1e-12) const { return (A - A.adjoint()).norm() <= tol * std::max(1.0, A.norm()); }
    Symbol adjoint() const { return {model, level, N, A.adjoint()}; }
    Symbol operator+(const Symbol& o) const;
    Symbol operator-(const Symbol& o) const;
    Symbol scaled(cplx c) const { return {model, level, N, c * A}; }
};

Symbol identity_symbol(const ModelPtr& model, int N);

// The (s, t) block X[(a,s),(b,t)], a, b < n, of an (nN) x (nN) matrix.
using BlockView = Eigen::Map<Mat, 0, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>>;
using ConstBlockView = Eigen::Map<const Mat, 0, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>>;
inline ConstBlockView block_view(const Mat& X, int s, int t, int N, int n) {
    return ConstBlockView(X.data() + s + Eigen::Index(t) * X.rows(), n, n,
                          Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>(Eigen::Index(N) * X.rows(), N));
}
inline BlockView block_view(Mat& X, int s, int t, int N, int n) {
    return BlockView(X.data() + s + Eigen::Index(t) * X.rows(), n, n,
                     Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>(Eigen::Index(N) * X.rows(), N));
}
// Scalar symbol from a balanced polynomial in z and conj(z).
Symbol symbol_from_poly(const ModelPtr& model, const Poly& p);
Symbol symbol_from_string(const ModelPtr& model, const std::string& literal);
// FS(GH_k): the equivariant metric of the line bundle O(k), N = n_k.
Symbol fs_line_bundle(const ModelPtr& model, int k);
// 1 - zeta zeta^*: quotient of the trivial bundle C^n by the Euler line.
Symbol euler_complement(const ModelPtr& model);
// Covariant symbol of an operator X on GH_m (x) C^N (a tautological wrapper).
Symbol covariant_symbol(const ModelPtr& model, const Mat& X, int m, int N);

Symbol promote(const Symbol& s, int l);
// Pointwise matrix product.
Symbol mul(const Symbol& a, const Symbol& b);
// Pointwise tensor product, N = a.N * b.N, index s_a * b.N + s_b.
Symbol tensor(const Symbol& a, const Symbol& b);
Symbol direct_sum(const Symbol& a, const Symbol& b);
Symbol embed_left(const Symbol& a, int M);   // a (x) 1_M
Symbol embed_right(const Symbol& b, int M);  // 1_M (x) b

// Evaluation at a boundary point; throws OffVariety beyond tolerance.
Mat evaluate(const Symbol& s, const Vec& zeta, double tol = 1e-8);
// The same sum without the boundary check (used for interior points).
Mat evaluate_raw(const Symbol& s, const Vec& z);

// Normalized partial trace over GH_k.
Mat haar_state(const Symbol& s);
// Toeplitz operator on GH_m (x) C^N.
Mat toeplitz(const Symbol& s, int m);
Symbol berezin_transform(const Symbol& s, int m);

// Normalized trace phi_m(X) = Tr(X)/n_m on GH_m (x) C^N.
cplx phi(const ModelPtr& model, const Mat& X, int m);

// Maximum over sample points of ||F^2 - F|| + ||F - F^*||.
double idempotency_residual(const Symbol& s, const std::vector<Vec>& pts);
// Pointwise trace at a sample point, rounded.
int pointwise_rank(const Symbol& s, const Vec& zeta);

// Values of the operator-valued symbol for X at level m: the N x N matrix
// (u^T (x) 1) X (conj(u) (x) 1) with u = psi(z) at level m.
Mat partial_symbol(const Mat& X, const Vec& u, int N);

// Unitality of the Toeplitz map and of the covariant symbol on levels
// 1..mMax, and adjointness phi_m(toeplitz(f, m) X) = omega(f symbol(X)) on
// `pairs` random (f, X), f of level 1 or 2.
Report toeplitz_calculus_report(const ModelPtr& model, int mMax, int pairs, uint64_t seed, double tol = 1e-10);

}  // namespace qm
