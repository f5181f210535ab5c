#include "qm/symbols.hpp"

#include <cmath>
#include <random>

namespace qm {

static void same_shape(const Symbol& a, const Symbol& b) {
    if (a.model != b.model) throw Error("symbols belong to different models");
    if (a.N != b.N) throw Error("symbols have different matrix sizes");
}

Symbol Symbol::operator+(const Symbol& o) const {
    same_shape(*this, o);
    int l = std::max(level, o.level);
    Symbol a = promote(*this, l), b = promote(o, l);
    return {model, l, N, a.A + b.A};
}

Symbol Symbol::operator-(const Symbol& o) const { return *this + o.scaled(-1.0); }

Symbol identity_symbol(const ModelPtr& model, int N) {
    return {model, 0, N, Mat::Identity(N, N)};
}

Symbol symbol_from_poly(const ModelPtr& model, const Poly& p) {
    const int n = model->n();
    if (p.nvars() != n) throw Error("polynomial variable count does not match the model");
    int k = 0;
    for (auto& [key, c] : p.terms()) {
        int a = 0, b = 0;
        for (int i = 0; i < n; ++i) {
            a += key[i];
            b += key[n + i];
        }
        if (a != b) throw ParseError("symbol literal must have balanced bidegree: " + p.str());
        k = std::max(k, a);
    }
    Symbol out{model, k, 1, Mat::Zero(model->nm(k), model->nm(k))};
    for (int j = 0; j <= k; ++j) {
        LevelPtr lv = model->level(j);
        Mat aj = Mat::Zero(lv->dim, lv->dim);
        bool any = false;
        auto vec_of = [&](const std::vector<int>& e) {
            Vec x = Vec::Zero(lv->ambient());
            double l = -log_factorial(j);
            for (int v : e) l += log_factorial(v);
            x(lv->index.at(e)) = std::exp(0.5 * l);  // z^e = sqrt(e!/j!) e_hat
            return Vec(lv->to_onb(x));
        };
        for (auto& [key, c] : p.terms()) {
            std::vector<int> al(key.begin(), key.begin() + n), be(key.begin() + n, key.end());
            int deg = 0;
            for (int v : al) deg += v;
            if (deg != j) continue;
            any = true;
            aj += c * vec_of(al) * vec_of(be).adjoint();
        }
        if (any) out.A += promote(Symbol{model, j, 1, aj}, k).A;
    }
    return out;
}

Symbol symbol_from_string(const ModelPtr& model, const std::string& literal) {
    const std::string fs = "fs_line_bundle";
    const std::string id = "identity";
    if (literal.compare(0, fs.size(), fs) == 0) {
        int k = std::stoi(literal.substr(fs.size()));
        return fs_line_bundle(model, k);
    }
    if (literal.compare(0, id.size(), id) == 0) {
        std::string rest = literal.substr(id.size());
        int N = rest.find_first_not_of(' ') == std::string::npos ? 1 : std::stoi(rest);
        return identity_symbol(model, N);
    }
    return symbol_from_poly(model, parse_poly(literal, model->n()));
}

Symbol fs_line_bundle(const ModelPtr& model, int k) {
    if (k < 0) throw Error("line bundle degree must be non-negative");
    const int nk = model->nm(k);
    Mat A = Mat::Zero(nk * nk, nk * nk);
    for (int a = 0; a < nk; ++a)
        for (int s = 0; s < nk; ++s) A(a * nk + s, s * nk + a) = 1.0;
    return {model, k, nk, A};
}

Symbol euler_complement(const ModelPtr& model) {
    const int n = model->n();
    if (model->nm(1) != n) throw Error("Euler complement needs a model without linear relations");
    Mat A = Mat::Identity(n * n, n * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) A(a * n + a, b * n + b) -= 1.0;
    return {model, 1, n, A};
}

Symbol covariant_symbol(const ModelPtr& model, const Mat& X, int m, int N) {
    if (X.rows() != model->nm(m) * N || X.cols() != X.rows())
        throw Error("operator size does not match level and N");
    return {model, m, N, X};
}

Symbol promote(const Symbol& s, int l) {
    if (l < s.level) throw Error("cannot promote to a lower level");
    if (l == s.level) return s;
    const ModelPtr& model = s.model;
    const int k = s.level, c = l - s.level, N = s.N;
    const int nk = model->nm(k), nc = model->nm(c), nl = model->nm(l);
    const Mat& W = *model->product_map(k, c);  // nl x (nk nc)
    // (W_c (x) 1_N) A (W_c (x) 1_N)^*, one (s, t) block at a time.
    std::vector<Mat> Wc(nc, Mat(nl, nk));
    for (int cc = 0; cc < nc; ++cc)
        for (int a = 0; a < nk; ++a) Wc[cc].col(a) = W.col(a * nc + cc);
    Mat out(nl * N, nl * N);
    for (int s1 = 0; s1 < N; ++s1)
        for (int t1 = 0; t1 < N; ++t1) {
            Mat blk = Mat::Zero(nl, nl);
            auto in = block_view(s.A, s1, t1, N, nk);
            for (int cc = 0; cc < nc; ++cc) blk.noalias() += Wc[cc] * in * Wc[cc].adjoint();
            block_view(out, s1, t1, N, nl) = blk;
        }
    return {model, l, N, out};
}

Symbol mul(const Symbol& a, const Symbol& b) {
    same_shape(a, b);
    const ModelPtr& model = a.model;
    const int k = a.level, m = b.level, N = a.N;
    const int nk = model->nm(k), nm_ = model->nm(m), nl = model->nm(k + m);
    const Mat& W = *model->product_map(k, m);  // nl x (nk nm)
    const int P = nk * nm_;
    Mat out(nl * N, nl * N);
    for (int s = 0; s < N; ++s)
        for (int t = 0; t < N; ++t) {
            Mat K = Mat::Zero(P, P);
            for (int r = 0; r < N; ++r) {
                Mat Asr(nk, nk), Brt(nm_, nm_);
                for (int x = 0; x < nk; ++x)
                    for (int y = 0; y < nk; ++y) Asr(x, y) = a.A(x * N + s, y * N + r);
                for (int x = 0; x < nm_; ++x)
                    for (int y = 0; y < nm_; ++y) Brt(x, y) = b.A(x * N + r, y * N + t);
                if (Asr.isZero(0.0) || Brt.isZero(0.0)) continue;
                K += kron(Asr, Brt);
            }
            Mat C = W * K * W.adjoint();
            for (int x = 0; x < nl; ++x)
                for (int y = 0; y < nl; ++y) out(x * N + s, y * N + t) = C(x, y);
        }
    return {model, k + m, N, out};
}

Symbol embed_left(const Symbol& a, int M) {
    return {a.model, a.level, a.N * M, kron(a.A, Mat::Identity(M, M))};
}

Symbol embed_right(const Symbol& b, int M) {
    const int n = b.model->nm(b.level), N = b.N, NN = N * M;
    Mat out = Mat::Zero(n * NN, n * NN);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            for (int s = 0; s < N; ++s)
                for (int t = 0; t < N; ++t) {
                    cplx v = b.A(x * N + s, y * N + t);
                    if (v == cplx(0.0)) continue;
                    for (int mu = 0; mu < M; ++mu) out(x * NN + mu * N + s, y * NN + mu * N + t) = v;
                }
    return {b.model, b.level, NN, out};
}

Symbol tensor(const Symbol& a, const Symbol& b) {
    if (a.model != b.model) throw Error("symbols belong to different models");
    return mul(embed_left(a, b.N), embed_right(b, a.N));
}

Symbol direct_sum(const Symbol& a, const Symbol& b) {
    if (a.model != b.model) throw Error("symbols belong to different models");
    int l = std::max(a.level, b.level);
    Symbol pa = promote(a, l), pb = promote(b, l);
    const int n = a.model->nm(l), N = a.N + b.N;
    Mat out = Mat::Zero(n * N, n * N);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            for (int s = 0; s < a.N; ++s)
                for (int t = 0; t < a.N; ++t) out(x * N + s, y * N + t) = pa.A(x * a.N + s, y * a.N + t);
            for (int s = 0; s < b.N; ++s)
                for (int t = 0; t < b.N; ++t)
                    out(x * N + a.N + s, y * N + a.N + t) = pb.A(x * b.N + s, y * b.N + t);
        }
    return {a.model, l, N, out};
}

Mat partial_symbol(const Mat& X, const Vec& u, int N) {
    const int n = int(u.size());
    Mat LH = Mat::Zero(n * N, N);
    for (int a = 0; a < n; ++a)
        for (int s = 0; s < N; ++s) LH(a * N + s, s) = std::conj(u(a));
    return LH.adjoint() * X * LH;
}

Mat evaluate_raw(const Symbol& s, const Vec& z) {
    return partial_symbol(s.A, s.model->level(s.level)->values(z), s.N);
}

Mat evaluate(const Symbol& s, const Vec& zeta, double tol) {
    double r = s.model->boundary_residual(zeta);
    if (r > tol) throw OffVariety("evaluation point is off the boundary (residual " + std::to_string(r) + ")");
    return evaluate_raw(s, zeta);
}

Mat haar_state(const Symbol& s) {
    const int n = s.model->nm(s.level), N = s.N;
    Mat out = Mat::Zero(N, N);
    for (int a = 0; a < n; ++a) out += s.A.block(a * N, a * N, N, N);
    return out / double(n);
}

Mat toeplitz(const Symbol& s, int m) {
    const ModelPtr& model = s.model;
    const int k = s.level, N = s.N;
    const int nk = model->nm(k), nm_ = model->nm(m), nkm = model->nm(k + m);
    const Mat& W = *model->product_map(k, m);
    const Mat Q = W.adjoint() * W;  // (nk nm) square, index c*nm + a
    const double scale = double(nm_) / double(nkm);
    Mat T = Mat::Zero(nm_ * N, nm_ * N);
    for (int s1 = 0; s1 < N; ++s1)
        for (int t1 = 0; t1 < N; ++t1) {
            Mat blk = Mat::Zero(nm_, nm_);
            for (int c = 0; c < nk; ++c)
                for (int c2 = 0; c2 < nk; ++c2) {
                    cplx v = s.A(c * N + s1, c2 * N + t1);
                    if (v == cplx(0.0)) continue;
                    blk += v * Q.block(c2 * nm_, c * nm_, nm_, nm_);
                }
            for (int b = 0; b < nm_; ++b)
                for (int a = 0; a < nm_; ++a) T(b * N + s1, a * N + t1) = scale * blk(b, a);
        }
    return T;
}

Symbol berezin_transform(const Symbol& s, int m) {
    return covariant_symbol(s.model, toeplitz(s, m), m, s.N);
}

cplx phi(const ModelPtr& model, const Mat& X, int m) { return X.trace() / double(model->nm(m)); }

double idempotency_residual(const Symbol& s, const std::vector<Vec>& pts) {
    double worst = 0.0;
    for (auto& z : pts) {
        Mat f = evaluate(s, z);
        worst = std::max(worst, opnorm(f * f - f) + opnorm(f - f.adjoint()));
    }
    return worst;
}

int pointwise_rank(const Symbol& s, const Vec& zeta) {
    return int(std::lround(evaluate(s, zeta).trace().real()));
}

static Mat random_matrix(std::mt19937_64& rng, int r, int c) {
    std::normal_distribution<double> g;
    Mat x(r, c);
    for (int j = 0; j < c; ++j)
        for (int i = 0; i < r; ++i) x(i, j) = cplx(g(rng), g(rng));
    return x;
}

Report toeplitz_calculus_report(const ModelPtr& model, int mMax, int pairs, uint64_t seed, double tol) {
    Report r;
    r.check = "toeplitz_calculus";
    if (mMax < 1) throw Error("toeplitz calculus needs mMax >= 1");
    std::mt19937_64 rng(seed);
    std::vector<double> adj(mMax + 1, 0.0);
    for (int i = 0; i < pairs; ++i) {
        const int m = 1 + i % mMax, k = 1 + i % 2;
        const int nk = model->nm(k), nm = model->nm(m);
        Symbol f{model, k, 1, random_matrix(rng, nk, nk) / double(nk)};
        Mat X = random_matrix(rng, nm, nm) / double(nm);
        cplx lhs = phi(model, toeplitz(f, m) * X, m);
        cplx rhs = haar_state(mul(f, covariant_symbol(model, X, m, 1)))(0, 0);
        adj[m] = std::max(adj[m], std::abs(lhs - rhs));
    }
    Symbol one = identity_symbol(model, 1);
    double worst = 0.0;
    for (int m = 1; m <= mMax; ++m) {
        const int nm = model->nm(m);
        double unit = opnorm(toeplitz(one, m) - Mat::Identity(nm, nm));
        double cov = std::abs(haar_state(covariant_symbol(model, Mat::Identity(nm, nm), m, 1))(0, 0) - 1.0);
        auto& e = r.add_level(m, std::max({unit, cov, adj[m]}));
        e["unitality"] = unit;
        e["symbolUnitality"] = cov;
        e["adjointness"] = adj[m];
        worst = std::max(worst, std::max({unit, cov, adj[m]}));
    }
    r.fit["pairs"] = pairs;
    r.fit["maxResidual"] = worst;
    r.fit["tolerance"] = tol;
    r.pass = worst < tol;
    return r;
}

}  // namespace qm
