#include "qm/core.hpp"

#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace qm {

double opnorm(const Mat& a) {
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(a);
    return svd.singularValues()(0);
}

Mat herm_part(const Mat& a) { return 0.5 * (a + a.adjoint()); }

double min_eig_herm(const Mat& a) {
    if (a.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(herm_part(a), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

double max_eig_herm(const Mat& a) {
    if (a.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(herm_part(a), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(es.eigenvalues().size() - 1);
}

Mat kron(const Mat& a, const Mat& b) {
    Mat r(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return r;
}

Mat herm_sqrt(const Mat& a) {
    Eigen::SelfAdjointEigenSolver<Mat> es(herm_part(a));
    RVec ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

Mat herm_inv_sqrt(const Mat& a) {
    Eigen::SelfAdjointEigenSolver<Mat> es(herm_part(a));
    RVec ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) ev(i) = 1.0 / std::sqrt(ev(i));
    return es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

Mat herm_pinv(const Mat& a, double relTol) {
    Eigen::SelfAdjointEigenSolver<Mat> es(herm_part(a));
    RVec ev = es.eigenvalues();
    double top = ev.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        ev(i) = std::abs(ev(i)) > relTol * top ? 1.0 / ev(i) : 0.0;
    return es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

bool is_projection(const Mat& p, double tol) {
    if (p.rows() != p.cols()) return false;
    if ((p - p.adjoint()).norm() > tol * std::max<double>(1.0, double(p.rows()))) return false;
    return opnorm(p * p - p) < tol;
}

void fix_phases(Mat& cols, double tol) {
    for (Eigen::Index j = 0; j < cols.cols(); ++j) {
        for (Eigen::Index i = 0; i < cols.rows(); ++i) {
            double a = std::abs(cols(i, j));
            if (a > tol) {
                cols.col(j) *= std::conj(cols(i, j)) / a;
                cols(i, j) = a;
                break;
            }
        }
    }
}

SpanSplit split_span(const Mat& b, int rows, double relTol) {
    SpanSplit out;
    if (b.cols() == 0 || b.norm() == 0.0) {
        out.range = Mat(rows, 0);
        out.complement = Mat::Identity(rows, rows);
        return out;
    }
    Eigen::BDCSVD<Mat> svd(b, Eigen::ComputeFullU);
    const RVec& s = svd.singularValues();
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > relTol * s(0)) ++r;
    out.rank = r;
    out.range = svd.matrixU().leftCols(r);
    out.complement = svd.matrixU().rightCols(rows - r);
    fix_phases(out.range);
    fix_phases(out.complement);
    return out;
}

double log_factorial(int n) { return std::lgamma(double(n) + 1.0); }

double binom(int n, int k) {
    if (k < 0 || k > n || n < 0) return 0.0;
    return std::round(std::exp(log_factorial(n) - log_factorial(k) - log_factorial(n - k)));
}

int64_t binom_int(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0;
    k = std::min(k, n - k);
    int64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

Rational::Rational(int64_t n, int64_t d) {
    if (d == 0) throw Error("rational with zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    int64_t g = std::gcd(n < 0 ? -n : n, d);
    if (g == 0) g = 1;
    num = n / g;
    den = d / g;
}

std::string Rational::str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

Rational Rational::operator+(const Rational& o) const {
    __int128 n = (__int128)num * o.den + (__int128)o.num * den;
    __int128 d = (__int128)den * o.den;
    __int128 a = n < 0 ? -n : n, b = d;
    while (b != 0) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    if (a == 0) a = 1;
    return Rational(int64_t(n / a), int64_t(d / a));
}
Rational Rational::operator-(const Rational& o) const { return *this + Rational(-o.num, o.den); }
Rational Rational::operator*(const Rational& o) const {
    Rational a(num, o.den), b(o.num, den);
    return Rational(a.num * b.num, a.den * b.den);
}
Rational Rational::operator/(const Rational& o) const {
    if (o.num == 0) throw Error("rational division by zero");
    return *this * Rational(o.den, o.num);
}
bool Rational::operator<(const Rational& o) const {
    return (__int128)num * o.den < (__int128)o.num * den;
}

// ---------------------------------------------------------------- RatPoly

int RatPoly::degree() const {
    for (int i = int(coef.size()) - 1; i >= 0; --i)
        if (coef[i].num != 0) return i;
    return -1;
}

Rational RatPoly::eval(int64_t m) const {
    Rational acc(0);
    for (int i = int(coef.size()) - 1; i >= 0; --i) acc = acc * Rational(m) + coef[i];
    return acc;
}

Rational RatPoly::leading() const {
    int d = degree();
    return d < 0 ? Rational(0) : coef[d];
}

std::string RatPoly::str() const {
    std::string s;
    for (int i = degree(); i >= 0; --i) {
        if (coef[i].num == 0) continue;
        if (!s.empty()) s += " + ";
        s += (i > 0 && coef[i] == Rational(1)) ? "" : coef[i].str();
        if (i > 0) s += (coef[i] == Rational(1) ? "m" : "*m") + (i > 1 ? "^" + std::to_string(i) : "");
    }
    return s.empty() ? "0" : s;
}

RatPoly operator-(const RatPoly& a, const RatPoly& b) {
    RatPoly r;
    r.coef.assign(std::max(a.coef.size(), b.coef.size()), Rational(0));
    for (size_t i = 0; i < a.coef.size(); ++i) r.coef[i] = r.coef[i] + a.coef[i];
    for (size_t i = 0; i < b.coef.size(); ++i) r.coef[i] = r.coef[i] - b.coef[i];
    return r;
}

RatPoly scaled(const RatPoly& p, const Rational& c) {
    RatPoly r = p;
    for (auto& x : r.coef) x = x * c;
    return r;
}

RatPoly interpolate_sequence(const std::vector<int64_t>& values, int m0) {
    if (values.empty()) throw Error("empty sequence");
    // Rows of the difference table, first entries only.
    std::vector<int64_t> row = values, lead;
    int deg = -1;
    bool vanished = false;
    while (!row.empty()) {
        lead.push_back(row[0]);
        bool zero = true;
        for (auto v : row) zero = zero && v == 0;
        if (zero) {
            vanished = true;
            break;
        }
        deg = int(lead.size()) - 1;
        std::vector<int64_t> next;
        for (size_t i = 0; i + 1 < row.size(); ++i) next.push_back(row[i + 1] - row[i]);
        row.swap(next);
    }
    if (!vanished) throw Error("sequence is not polynomial on the window (no vanishing difference)");
    // p(m) = sum_k lead[k] * C(m - m0, k), expanded in powers of m.
    RatPoly p;
    p.coef.assign(size_t(std::max(deg, 0) + 1), Rational(0));
    std::vector<Rational> basis{Rational(1)};  // C(x, k) in powers of m
    for (int k = 0; k <= deg; ++k) {
        if (k > 0) {
            // multiply by (m - m0 - (k-1)) / k
            std::vector<Rational> nb(basis.size() + 1, Rational(0));
            Rational shift(-(int64_t(m0) + k - 1));
            for (size_t i = 0; i < basis.size(); ++i) {
                nb[i + 1] = nb[i + 1] + basis[i] / Rational(k);
                nb[i] = nb[i] + basis[i] * shift / Rational(k);
            }
            basis.swap(nb);
        }
        for (size_t i = 0; i < basis.size(); ++i) p.coef[i] = p.coef[i] + basis[i] * Rational(lead[k]);
    }
    return p;
}

}  // namespace qm
