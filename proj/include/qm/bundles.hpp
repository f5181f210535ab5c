#pragma once

#include <string>
#include <vector>

#include "qm/quotient.hpp"

namespace qm {

struct BundleSpec {
    enum class Kind { Line, DirectSum, TangentTwist, CustomQuotient };
    Kind kind = Kind::Line;
    // Line: degree k. TangentTwist: twist t, the bundle whose level-m
    // sections are GH_{m+t} (x) C^n modulo the Euler image of GH_{m+t-1}.
    int k = 0;
    std::vector<BundleSpec> parts;             // DirectSum
    int N = 1;                                 // CustomQuotient
    std::vector<std::vector<std::string>> gens;  // CustomQuotient, N strings each

    static BundleSpec line(int k);
    static BundleSpec sum(std::vector<BundleSpec> parts);
    static BundleSpec tangent(int t = 1);
    static BundleSpec custom(int N, std::vector<std::vector<std::string>> gens);
    std::string str() const;
};

// "line:2", "tangent", "tangent:0", "sum(line:0,line:1)", or a JSON object
// such as {"kind":"line","k":2}.
BundleSpec parse_bundle(const std::string& text);

bool has_metric(const BundleSpec& spec);
// Canonical equivariant metric; throws PreconditionFailed for custom quotients.
Symbol metric_symbol(const ModelPtr& model, const BundleSpec& spec);
// Toeplitz-range realization when a metric exists, submodule otherwise.
QuotientPtr realize(const ModelPtr& model, const BundleSpec& spec);

// chi(E(m)) from closed forms over the model's Hilbert function, or from the
// quotient realization for custom specs.
int64_t chi(const ModelPtr& model, const BundleSpec& spec, int m);
int rank(const ModelPtr& model, const BundleSpec& spec);

struct HilbertFit {
    std::vector<int64_t> values;  // on the window
    int m0 = 0;
    RatPoly poly;
    int onset = 0;                // first m from which values follow poly
};
HilbertFit hilbert_poly(const ModelPtr& model, const BundleSpec& spec, int m0, int m1);
HilbertFit hilbert_poly(const GradedQuotient& q, int m0, int m1);

// c_{E,m} = n_m rank / chi(E(m)).
Rational c_constant(const ModelPtr& model, const BundleSpec& spec, int m);

}  // namespace qm
