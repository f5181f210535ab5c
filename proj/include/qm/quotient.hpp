#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "qm/report.hpp"
#include "qm/symbols.hpp"

namespace qm {

// A homogeneous element of A^N: degree d and coordinates in GH_d (x) C^N
// (orthonormal basis, index a*N + s).
struct Generator {
    int degree = 0;
    Vec v;
};

// Generator from N polynomial strings, one per component.
Generator generator_from_strings(const ModelPtr& model, const std::vector<std::string>& comps);

enum class Provenance { Submodule, ToeplitzRange, Explicit };

struct QuotientLevel {
    int m = 0;
    Mat basis;                    // (n_m N) x rank, orthonormal columns
    Mat P;                        // basis basis^*
    int rank = 0;
    std::vector<double> cluster;  // retained Toeplitz eigenvalues (range provenance)
    double gapRatio = 0.0;        // +inf when the cut is at a zero eigenvalue
};

class GradedQuotient;
using QuotientPtr = std::shared_ptr<const GradedQuotient>;

class GradedQuotient {
public:
    static QuotientPtr from_submodule_generators(const ModelPtr& model, int N,
                                                 std::vector<Generator> gens);
    static QuotientPtr from_toeplitz_range(const Symbol& metric, int checkSamples = 16);
    // Hand-built projections, one per level; levels past the end are errors.
    static QuotientPtr from_projections(const ModelPtr& model, int N, std::vector<Mat> projections);

    const ModelPtr& model() const { return model_; }
    int N() const { return N_; }
    Provenance provenance() const { return prov_; }
    const std::vector<Generator>& generators() const { return gens_; }
    const std::optional<Symbol>& metric() const { return metric_; }
    int maxLevel() const { return maxLevel_; }

    const QuotientLevel& level(int m) const;
    const Mat& P(int m) const { return level(m).P; }
    int dim(int m) const { return level(m).rank; }

    // varsigma^(m)(P_{E,m}) at zeta. For submodules of ideal-free models with
    // large levels this avoids forming P_{E,m}.
    Mat symbol_at(int m, const Vec& zeta) const;
    // The pointwise fiber projection used for section values.
    Mat fiber_projection(const Vec& zeta) const;

private:
    GradedQuotient() = default;
    ModelPtr model_;
    int N_ = 1;
    Provenance prov_ = Provenance::Submodule;
    std::vector<Generator> gens_;
    std::optional<Symbol> metric_;
    std::vector<Mat> explicit_;
    int maxLevel_ = -1;  // only for explicit projections

    mutable std::mutex mu_;
    mutable std::map<int, std::shared_ptr<const QuotientLevel>> levels_;

    std::shared_ptr<const QuotientLevel> build(int m) const;
    Mat submodule_span(int m) const;
};

// Spectral cut of a hermitian operator: eigenvectors kept above the largest
// ratio gap (see README for the rule). Throws NoSpectralGap.
QuotientLevel range_projection(const Mat& T, int m);

// iota_{m,l}(X) for an operator on GH_m (x) C^N.
Mat iota(const ModelPtr& model, const Mat& X, int m, int l, int N);
// jmath^E_{l,m}(B): trace-adjoint of iota compressed to GE_m and normalized.
Mat jmath(const GradedQuotient& q, const Mat& B, int l, int m);

Report coinvariance_certificate(const GradedQuotient& q, int mMax);
Report arveson_rank(const GradedQuotient& q, int mMax);

struct CompressedShift {
    int m = 0;
    std::vector<Mat> blocks;  // GE_m -> GE_{m+1} in the levels' bases
};
CompressedShift compressed_shift(const GradedQuotient& q, int m);

// Per level: row residual of S_E S_E^*, the spread of |S_E|^2 around
// dim_{m+1}/dim_m, and the trace identity for B_p(S_E).
Report compressed_shift_report(const GradedQuotient& q, int mMax, int p);
// B_p(S_E) on GE_m.
Mat defect_operator_E(const GradedQuotient& q, int p, int m);
// max_{a,b} ||[S_{E,a}^*, S_{E,b}] p_m|| with its decay exponent, estimated
// from local exponents extrapolated in 1/m (see README).
Report essential_normality(const GradedQuotient& q, int mMin, int mMax);

// Submodule whose generators span the complements of P_{E,j}, j <= genDegree,
// not already generated in lower degree. Agrees with q on every level when
// q's module is generated in degrees <= genDegree (compare P(m) to confirm).
QuotientPtr submodule_realization(const GradedQuotient& q, int genDegree);

}  // namespace qm
