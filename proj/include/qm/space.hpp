#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "qm/core.hpp"

namespace qm {

// Exponent vector with its degree; ordering of a level is graded lexicographic.
struct MultiIndex {
    std::vector<int> exps;
    int degree = 0;
    explicit MultiIndex(std::vector<int> e);
};

// All exponent vectors of total degree m in n variables, graded-lex
// (z1^m first, zn^m last).
std::vector<std::vector<int>> monomials(int n, int m);

// Polynomial in z1..zn and conj(z1)..conj(zn). A key holds 2n exponents:
// the holomorphic part first, the antiholomorphic part second.
class Poly {
public:
    explicit Poly(int n = 0) : n_(n) {}
    int nvars() const { return n_; }
    const std::map<std::vector<int>, cplx>& terms() const { return terms_; }
    void add(const std::vector<int>& key, cplx c);

    static Poly constant(int n, cplx c);
    static Poly variable(int n, int i, bool conjugate);

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly scaled(cplx c) const;
    Poly pow(int e) const;

    bool is_zero(double tol = 0.0) const;
    bool holomorphic() const;
    // Returns true if every term has the same (hol, antihol) bidegree.
    bool homogeneous() const;
    int hol_degree() const;     // of the first term; use with homogeneous()
    int anti_degree() const;
    cplx eval(const Vec& z) const;
    std::string str() const;

private:
    int n_;
    std::map<std::vector<int>, cplx> terms_;
};

// Parser for the polynomial syntax: z1..zn, conj(zk), numbers, complex
// literals such as 2i or 1.5i, `*`, `^`, `+`, `-` and parentheses.
// Errors carry the 1-based column.
Poly parse_poly(const std::string& src, int n);

enum class Preset { ProjectiveSpace, Segre11, VeroneseConic, Custom };
std::string preset_name(Preset p);

class SpaceModel;
using ModelPtr = std::shared_ptr<const SpaceModel>;
using Sampler = std::function<std::vector<Vec>(int count, uint64_t seed)>;

// Degree-m slice of the quotient space with its Fock inner product.
// Internally everything lives in normalized monomial coordinates
// e_alpha = sqrt(m!/alpha!) z^alpha, which are Fock-orthonormal; `onb`
// holds an orthonormal basis of GH_m in those coordinates.
struct FockLevel {
    int m = 0;
    int nvars = 0;
    std::vector<std::vector<int>> basis;   // ambient monomials, graded-lex
    std::map<std::vector<int>, int> index;
    RVec fockGram;                         // alpha!/m!
    bool full = true;                      // no ideal elements at this degree
    Mat onb;                               // D x dim, empty when full
    int dim = 0;
    int ambient() const { return int(basis.size()); }

    // Columns of the orthonormal basis in raw monomial coordinates.
    Mat onbChange() const;
    // Orthonormal-basis matrix in normalized coordinates (identity if full).
    Mat onbNormalized() const;
    // Values psi_a(z) of the orthonormal basis polynomials.
    Vec values(const Vec& z) const;
    // Normalized monomial values sqrt(m!/alpha!) z^alpha.
    Vec monomial_values(const Vec& z) const;
    // Coordinates in the orthonormal basis of a vector given in normalized
    // monomial coordinates (orthogonal projection onto GH_m).
    Mat to_onb(const Mat& normalized) const;
};
using LevelPtr = std::shared_ptr<const FockLevel>;

class SpaceModel : public std::enable_shared_from_this<SpaceModel> {
public:
    static ModelPtr projective(int n);
    static ModelPtr segre11();
    static ModelPtr veronese_conic();
    // Custom model from generator strings; dim < 0 means fit it.
    static ModelPtr custom(int n, const std::vector<std::string>& ideal, int dim = -1,
                           Sampler sampler = nullptr);
    static ModelPtr from_polys(int n, std::vector<Poly> ideal, Preset preset, int dim,
                               Sampler sampler);

    int n() const { return n_; }
    int dim() const { return d_; }
    Preset preset() const { return preset_; }
    const std::vector<Poly>& ideal() const { return ideal_; }
    bool idealFree() const { return ideal_.empty(); }

    LevelPtr level(int m) const;
    int nm(int m) const { return m < 0 ? 0 : level(m)->dim; }
    std::vector<int> hilbert_function(int mMax) const;

    // V*_{k,m}: GH_k (x) GH_m -> GH_{k+m}, an n_{k+m} x (n_k n_m) co-isometry;
    // column a*n_m + b is the product psi_a phi_b projected onto GH_{k+m}.
    std::shared_ptr<const Mat> product_map(int k, int m) const;
    // Shift block S_alpha: GH_m -> GH_{m+1} in orthonormal coordinates.
    std::shared_ptr<const Mat> shift(int alpha, int m) const;

    bool has_sampler() const;
    std::vector<Vec> sample_boundary(int count, uint64_t seed) const;
    // Residual max(| |z|-1 |, max_g |g(z)|).
    double boundary_residual(const Vec& z) const;
    double ideal_residual(const Vec& z) const;

private:
    SpaceModel() = default;
    int n_ = 0;
    int d_ = 0;
    Preset preset_ = Preset::Custom;
    std::vector<Poly> ideal_;
    Sampler sampler_;

    mutable std::mutex mu_;
    mutable std::map<int, LevelPtr> levels_;
    mutable std::map<std::pair<int, int>, std::shared_ptr<const Mat>> products_;
    mutable std::map<std::pair<int, int>, std::shared_ptr<const Mat>> shifts_;

    LevelPtr build_level(int m) const;
};

// The Segre and Veronese parametrizations used by the samplers.
Vec segre_point(const Vec& a, const Vec& c);
Vec veronese_point(cplx u, cplx v);

// Model definition: { "n", "ideal", "preset", "dim" } as a JSON string.
ModelPtr model_from_json(const std::string& text);
// Preset tags: cp1, cp2, ..., segre11, veronese.
ModelPtr model_from_preset(const std::string& tag);

// Polynomial degree that fits an integer sequence exactly on its tail.
int fitted_degree(const std::vector<int>& seq);

}  // namespace qm
