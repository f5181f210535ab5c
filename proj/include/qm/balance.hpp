#pragma once

#include <vector>

#include "qm/bundles.hpp"

namespace qm {

struct BalanceResult {
    double defect = 0.0;   // || T(metric) - c P_{E,m} ||
    double c = 0.0;        // n_m rank / dim GE_m
    int dim = 0;
    int rank = 0;
};
// Uses the Toeplitz-range realization of the metric itself.
BalanceResult balance_defect(const Symbol& metric, int m);
Report balance_report(const ModelPtr& model, const BundleSpec& spec, int mMin, int mMax);

// R P R with R = 1 - 2 zeta zeta^*: a non-equivariant conjugate of a
// rank-one projection metric on C^n (needs N == n).
Symbol reflected_metric(const Symbol& metric);

struct Quadrature {
    int samples = 20000;
    uint64_t seed = 42;
};

// Section values at quadrature points for a fixed level of a quotient.
struct SectionSamples {
    int m = 0;
    int rank = 0;                  // fiber rank
    int dim = 0;                   // dim GE_m
    double chi = 0.0;              // dim GE_m as a double
    int samples = 0;
    Mat R;                         // rank rows per point: V(x)^* F(x), V an orthonormal fiber basis
    std::vector<int> rankDrops;    // indices of points where the fiber rank dropped
};
SectionSamples sample_sections(const GradedQuotient& q, int m, const Quadrature& quad);

// One application of the T-map, normalized to unit normalized trace.
Mat tmap_step(const SectionSamples& ss, const Mat& G);

struct TmapTrace {
    std::vector<Mat> iterates;     // normalized G_0, G_1, ...
    std::vector<double> defects;   // ||T(G_i) - G_i|| per step
    double noiseFloor = 0.0;       // ||T_A(G) - T_B(G)|| for two seeds at the last iterate
    bool monotone = true;
    bool converged = false;
    int iterations = 0;
    std::vector<int> rankDrops;
};
TmapTrace tmap_iterate(const GradedQuotient& q, int m, const Mat& G0, const Quadrature& quad,
                       int maxIter = 50, double tol = 1e-12, double floorFactor = 3.0);

// Pointwise Cauchy differences of varsigma^(m)(P_{E,m}) across m and the
// deviation from the metric, with a quadratic-in-1/m extrapolation through
// the last three levels. PASS needs at least three levels, monotone
// deviations, and an extrapolated error within the extrapolation's own
// error estimate.
Report ym_limit_probe(const GradedQuotient& q, int mMin, int mMax, const std::vector<Vec>& points);

}  // namespace qm
