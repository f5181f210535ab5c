#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qm {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

// Errors named after the failure modes they report.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseError : Error {
    using Error::Error;
};
struct NoSamplerAvailable : Error {
    using Error::Error;
};
struct NoSpectralGap : Error {
    using Error::Error;
};
struct NearSingularA : Error {
    using Error::Error;
};
struct OffVariety : Error {
    using Error::Error;
};
struct ContainmentViolation : Error {
    using Error::Error;
};
struct PreconditionFailed : Error {
    using Error::Error;
};

// --- small dense helpers -------------------------------------------------

double opnorm(const Mat& a);            // largest singular value
double min_eig_herm(const Mat& a);      // smallest eigenvalue of (a+a^H)/2
double max_eig_herm(const Mat& a);
Mat herm_part(const Mat& a);
Mat kron(const Mat& a, const Mat& b);
Mat herm_sqrt(const Mat& a);            // PSD square root
Mat herm_inv_sqrt(const Mat& a);        // requires a positive definite
Mat herm_pinv(const Mat& a, double relTol = 1e-10);
bool is_projection(const Mat& p, double tol);

// Make each column's first coordinate above `tol` real positive.
void fix_phases(Mat& cols, double tol = 1e-12);

// Orthonormal basis for the column span of `b` (rank by relTol * sigma_max),
// and an orthonormal basis for its orthogonal complement.
struct SpanSplit {
    Mat range;
    Mat complement;
    int rank = 0;
};
SpanSplit split_span(const Mat& b, int rows, double relTol = 1e-10);

// Exact binomials / multinomials as doubles and their logs.
double binom(int n, int k);
double log_factorial(int n);
int64_t binom_int(int n, int k);

// Rational with 64-bit parts, used for Hilbert polynomials and c constants.
struct Rational {
    int64_t num = 0;
    int64_t den = 1;
    Rational() = default;
    Rational(int64_t n, int64_t d = 1);
    double value() const { return double(num) / double(den); }
    std::string str() const;
    Rational operator+(const Rational& o) const;
    Rational operator-(const Rational& o) const;
    Rational operator*(const Rational& o) const;
    Rational operator/(const Rational& o) const;
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
    bool operator<(const Rational& o) const;
};

// Polynomial in m with rational coefficients, coef[i] multiplies m^i.
struct RatPoly {
    std::vector<Rational> coef;
    int degree() const;
    Rational eval(int64_t m) const;
    Rational leading() const;
    std::string str() const;
};
RatPoly operator-(const RatPoly& a, const RatPoly& b);
RatPoly scaled(const RatPoly& p, const Rational& c);

// Exact interpolation of values[i] = p(m0 + i) by forward differences. The
// degree is the last non-vanishing difference; at least one vanishing row
// must be observed (a held-out point), otherwise Error is thrown.
RatPoly interpolate_sequence(const std::vector<int64_t>& values, int m0);

}  // namespace qm
