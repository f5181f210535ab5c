#pragma once

#include <vector>

#include "qm/quotient.hpp"

namespace qm {

struct FiberSolve {
    Vec v;
    int m = 0;
    Mat basis;            // N x rank, orthonormal
    int rank = 0;
    double residual = 0.0;  // max ||(1 - P_{E,m})(p_m k_v (x) xi)|| over the basis
};

// Coordinates of p_m k_v in the orthonormal basis of GH_m.
Vec coherent_vector(const ModelPtr& model, int m, const Vec& v);

FiberSolve fiber(const GradedQuotient& q, int m, const Vec& v);

struct SpectralFiber {
    Mat P;                  // N x N projection
    int rank = 0;
    double minRetained = 0.0;
    double gapRatio = 0.0;  // smallest retained / largest discarded
};
// Eigenvectors of varsigma^(m)(P_{E,m})(x) with eigenvalue 1 (the limit of
// its powers). Eigenvalues strictly inside [1 - 1e-6, 1 - 1e-9) throw.
SpectralFiber spectral_fiber_projection(const GradedQuotient& q, int m, const Vec& x);

// Smallest M with r^{2(M+1)} < tail, i.e. (1 - r^2) sum_{m > M} r^{2m} < tail.
int abel_truncation(double r, double tail = 1e-8);

struct AbelResult {
    std::vector<double> r;
    std::vector<Mat> values;
    Mat extrapolant;        // linear in (1 - r) through the two largest r
    int M = 0;
};
// (1 - r^2) sum_{m <= M} r^{2m} varsigma^(m)(P_{E,m})(zeta) for each r.
// M < 0 picks the truncation for the largest r. Throws if M is too small.
AbelResult abel_symbol(const GradedQuotient& q, const Vec& zeta, const std::vector<double>& rList,
                       int M = -1, double tail = 1e-8);

// Truncated reproducing kernel sum_{m <= M} K_m(z, w), plus its bound.
struct KernelValue {
    cplx value;
    cplx closedForm;        // (1 - <z, w>)^{-1}
    double bound = 0.0;     // |<z,w>|^{M+1} / (1 - |<z,w>|)
};
KernelValue kernel_eval(const ModelPtr& model, const Vec& z, const Vec& w, int M);

// maxM, lowered on varieties until the ambient degree-M space has at most
// maxAmbient monomials (building the quotient level dominates there).
int kernel_truncation(const ModelPtr& model, int maxM = 60, int maxAmbient = 1000);

// Interior points: sampled boundary points scaled by radii in [rMin, rMax].
std::vector<Vec> interior_points(const ModelPtr& model, int count, uint64_t seed, double rMin = 0.2,
                                 double rMax = 0.9);

// Rank scan over points: fiber rank, spectral fiber rank, min retained
// eigenvalue and gap ratio. Rows are also used for the CSV output.
struct ScanRow {
    int point = 0;
    int m = 0;
    int rank = 0;
    double minRetained = 0.0;
    double gapRatio = 0.0;
};
std::vector<ScanRow> cd_scan(const GradedQuotient& q, int m, const std::vector<Vec>& points);
Report cd_report(const GradedQuotient& q, int m, int count, uint64_t seed, int expectedRank);

}  // namespace qm
