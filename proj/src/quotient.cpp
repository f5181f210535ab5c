#include "qm/quotient.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace qm {

Generator generator_from_strings(const ModelPtr& model, const std::vector<std::string>& comps) {
    const int n = model->n(), N = int(comps.size());
    std::vector<Poly> ps;
    int d = -1;
    for (auto& c : comps) {
        Poly p = parse_poly(c, n);
        if (!p.holomorphic()) throw ParseError("generator component must be holomorphic: " + c);
        if (!p.homogeneous()) throw ParseError("generator component is not homogeneous: " + c);
        if (!p.is_zero()) {
            if (d >= 0 && p.hol_degree() != d) throw ParseError("generator components differ in degree");
            d = p.hol_degree();
        }
        ps.push_back(p);
    }
    if (d < 0) throw ParseError("zero generator");
    LevelPtr lv = model->level(d);
    Generator g;
    g.degree = d;
    g.v = Vec::Zero(lv->dim * N);
    for (int s = 0; s < N; ++s) {
        Vec x = Vec::Zero(lv->ambient());
        for (auto& [key, c] : ps[s].terms()) {
            std::vector<int> a(key.begin(), key.begin() + n);
            double l = -log_factorial(d);
            for (int e : a) l += log_factorial(e);
            x(lv->index.at(a)) += c * std::exp(0.5 * l);
        }
        Vec y = lv->to_onb(x);
        for (int a = 0; a < lv->dim; ++a) g.v(a * N + s) = y(a);
    }
    return g;
}

QuotientPtr GradedQuotient::from_submodule_generators(const ModelPtr& model, int N,
                                                      std::vector<Generator> gens) {
    if (N < 1) throw Error("N must be positive");
    for (auto& g : gens)
        if (g.v.size() != model->nm(g.degree) * N) throw Error("generator has the wrong size");
    auto q = std::shared_ptr<GradedQuotient>(new GradedQuotient());
    q->model_ = model;
    q->N_ = N;
    q->prov_ = Provenance::Submodule;
    q->gens_ = std::move(gens);
    return q;
}

QuotientPtr GradedQuotient::from_toeplitz_range(const Symbol& metric, int checkSamples) {
    if (!metric.hermitian(1e-10)) throw PreconditionFailed("metric symbol must be hermitian");
    if (checkSamples > 0 && metric.model->has_sampler()) {
        auto pts = metric.model->sample_boundary(checkSamples, 1234);
        double r = idempotency_residual(metric, pts);
        if (r > 1e-8)
            throw PreconditionFailed("metric is not pointwise idempotent (residual " + std::to_string(r) + ")");
    }
    auto q = std::shared_ptr<GradedQuotient>(new GradedQuotient());
    q->model_ = metric.model;
    q->N_ = metric.N;
    q->prov_ = Provenance::ToeplitzRange;
    q->metric_ = metric;
    return q;
}

QuotientPtr GradedQuotient::from_projections(const ModelPtr& model, int N, std::vector<Mat> projections) {
    auto q = std::shared_ptr<GradedQuotient>(new GradedQuotient());
    q->model_ = model;
    q->N_ = N;
    q->prov_ = Provenance::Explicit;
    q->maxLevel_ = int(projections.size()) - 1;
    for (int m = 0; m <= q->maxLevel_; ++m)
        if (projections[m].rows() != model->nm(m) * N) throw Error("projection has the wrong size");
    q->explicit_ = std::move(projections);
    return q;
}

const QuotientLevel& GradedQuotient::level(int m) const {
    if (m < 0) throw Error("negative level");
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = levels_.find(m);
        if (it != levels_.end()) return *it->second;
    }
    auto lv = build(m);
    std::lock_guard<std::mutex> lk(mu_);
    return *levels_.emplace(m, lv).first->second;
}

Mat GradedQuotient::submodule_span(int m) const {
    const int nm_ = model_->nm(m), N = N_;
    std::vector<Mat> cols;
    int total = 0;
    for (auto& g : gens_) {
        if (g.degree > m) continue;
        const int d = g.degree, c = m - d;
        const int nd = model_->nm(d), nc = model_->nm(c);
        const Mat& W = *model_->product_map(d, c);
        Mat G(nd, N);
        for (int a = 0; a < nd; ++a)
            for (int s = 0; s < N; ++s) G(a, s) = g.v(a * N + s);
        Mat block(nm_ * N, nc);
        Mat Wc(nm_, nd);
        for (int cc = 0; cc < nc; ++cc) {
            for (int a = 0; a < nd; ++a) Wc.col(a) = W.col(a * nc + cc);
            Mat img = Wc * G;  // nm x N
            for (int x = 0; x < nm_; ++x)
                for (int s = 0; s < N; ++s) block(x * N + s, cc) = img(x, s);
        }
        total += nc;
        cols.push_back(std::move(block));
    }
    Mat B(nm_ * N, total);
    int at = 0;
    for (auto& b : cols) {
        B.middleCols(at, b.cols()) = b;
        at += int(b.cols());
    }
    return B;
}

QuotientLevel range_projection(const Mat& T, int m) {
    QuotientLevel out;
    out.m = m;
    const int D = int(T.rows());
    Eigen::SelfAdjointEigenSolver<Mat> es(herm_part(T));
    RVec ev = es.eigenvalues().reverse();
    Mat vecs = es.eigenvectors().rowwise().reverse();
    const double top = D > 0 ? ev(0) : 0.0;
    int keep = 0;
    if (D == 0 || top <= 0.0) {
        out.gapRatio = std::numeric_limits<double>::infinity();
    } else {
        const double zeroTol = 1e-10 * top;
        int nz = 0;
        while (nz < D && ev(nz) > zeroTol) ++nz;
        if (ev(nz - 1) >= top / 10.0) {
            keep = nz;
            out.gapRatio = nz < D ? std::numeric_limits<double>::infinity() : top / ev(nz - 1);
        } else {
            double best = 0.0;
            for (int i = 0; i < nz; ++i) {
                double r = (i + 1 < nz) ? ev(i) / ev(i + 1) : std::numeric_limits<double>::infinity();
                if (i + 1 == nz && nz == D) break;  // no zero eigenvalue to cut at
                if (r > best) {
                    best = r;
                    keep = i + 1;
                }
            }
            out.gapRatio = best;
            if (best < 10.0)
                throw NoSpectralGap("largest eigenvalue ratio " + std::to_string(best) + " at level " +
                                    std::to_string(m) + " is below 10");
        }
    }
    out.rank = keep;
    out.basis = vecs.leftCols(keep);
    fix_phases(out.basis);
    out.P = out.basis * out.basis.adjoint();
    for (int i = 0; i < keep; ++i) out.cluster.push_back(ev(i));
    return out;
}

std::shared_ptr<const QuotientLevel> GradedQuotient::build(int m) const {
    auto out = std::make_shared<QuotientLevel>();
    const int D = model_->nm(m) * N_;
    switch (prov_) {
        case Provenance::Submodule: {
            out->m = m;
            Mat B = submodule_span(m);
            SpanSplit sp = split_span(B, D);
            out->basis = sp.complement;
            out->rank = D - sp.rank;
            out->P = out->basis * out->basis.adjoint();
            out->gapRatio = std::numeric_limits<double>::infinity();
            break;
        }
        case Provenance::ToeplitzRange:
            *out = range_projection(toeplitz(*metric_, m), m);
            break;
        case Provenance::Explicit: {
            if (m > maxLevel_) throw Error("explicit quotient has no level " + std::to_string(m));
            out->m = m;
            const Mat& P = explicit_[m];
            Eigen::SelfAdjointEigenSolver<Mat> es(herm_part(P));
            std::vector<int> idx;
            for (int i = 0; i < D; ++i)
                if (es.eigenvalues()(i) > 0.5) idx.push_back(i);
            out->basis = Mat(D, idx.size());
            for (size_t i = 0; i < idx.size(); ++i) out->basis.col(i) = es.eigenvectors().col(idx[i]);
            fix_phases(out->basis);
            out->rank = int(idx.size());
            out->P = P;
            break;
        }
    }
    return out;
}

// ----------------------------------------------------------- symbol values

namespace {

using SpMat = Eigen::SparseMatrix<cplx>;

// varsigma^(m)(P_sub)(z) for the submodule generated by `gens` on an
// ideal-free model, with P_sub = B (B^* B)^+ B^*.
Mat submodule_symbol_sparse(int n, int N, int m, const std::vector<Generator>& gens, const Vec& z) {
    auto mons = monomials(n, m);
    std::map<std::vector<int>, int> idx;
    for (int i = 0; i < int(mons.size()); ++i) idx.emplace(mons[i], i);
    FockLevel tmp;
    tmp.m = m;
    tmp.nvars = n;
    tmp.basis = mons;
    Vec u = tmp.monomial_values(z);

    std::vector<Eigen::Triplet<cplx>> trip;
    int col = 0;
    std::vector<int> gam(n);
    for (auto& g : gens) {
        if (g.degree > m) continue;
        const int d = g.degree, c = m - d;
        auto md = monomials(n, d), mc = monomials(n, c);
        const double base = log_factorial(d) + log_factorial(c) - log_factorial(m);
        for (auto& beta : mc) {
            for (int ai = 0; ai < int(md.size()); ++ai) {
                double l = base;
                for (int t = 0; t < n; ++t) {
                    gam[t] = md[ai][t] + beta[t];
                    l += log_factorial(gam[t]) - log_factorial(md[ai][t]) - log_factorial(beta[t]);
                }
                const double mu = std::exp(0.5 * l);
                const int row = idx.at(gam);
                for (int s = 0; s < N; ++s) {
                    cplx v = g.v(ai * N + s);
                    if (v != cplx(0.0)) trip.emplace_back(row * N + s, col, mu * v);
                }
            }
            ++col;
        }
    }
    const int rows = int(mons.size()) * N;
    const double unit = std::pow(z.squaredNorm(), m);
    if (col == 0) return unit * Mat::Identity(N, N);
    SpMat B(rows, col);
    B.setFromTriplets(trip.begin(), trip.end());
    Mat Y = Mat::Zero(N, col);  // (u^T (x) 1) B
    for (int k = 0; k < B.outerSize(); ++k)
        for (SpMat::InnerIterator it(B, k); it; ++it)
            Y(it.row() % N, it.col()) += u(it.row() / N) * it.value();
    SpMat K = SpMat(B.adjoint()) * B;
    Eigen::SimplicialLDLT<SpMat> ldlt(K);
    bool ok = ldlt.info() == Eigen::Success;
    if (ok) {
        const auto& Dg = ldlt.vectorD();
        double dmax = Dg.cwiseAbs().maxCoeff(), dmin = Dg.real().minCoeff();
        ok = dmin > 1e-12 * dmax;
    }
    Mat X;
    if (ok) {
        X = ldlt.solve(Mat(Y.adjoint()));
    } else {
        X = herm_pinv(Mat(K), 1e-10) * Y.adjoint();  // syzygies: rank-deficient Gram
    }
    return unit * Mat::Identity(N, N) - Y * X;
}

}  // namespace

Mat GradedQuotient::symbol_at(int m, const Vec& zeta) const {
    const int D = model_->nm(m) * N_;
    if (prov_ == Provenance::Submodule && model_->idealFree() && D > 400)
        return submodule_symbol_sparse(model_->n(), N_, m, gens_, zeta);
    return partial_symbol(P(m), model_->level(m)->values(zeta), N_);
}

Mat GradedQuotient::fiber_projection(const Vec& zeta) const {
    switch (prov_) {
        case Provenance::ToeplitzRange:
            return herm_part(evaluate(*metric_, zeta));
        case Provenance::Submodule: {
            Mat vals(N_, gens_.size());
            for (size_t j = 0; j < gens_.size(); ++j) {
                Vec u = model_->level(gens_[j].degree)->values(zeta);
                for (int s = 0; s < N_; ++s) {
                    cplx acc = 0.0;
                    for (int a = 0; a < int(u.size()); ++a) acc += u(a) * gens_[j].v(a * N_ + s);
                    vals(s, j) = acc;
                }
            }
            SpanSplit sp = split_span(vals, N_, 1e-9);
            return sp.complement * sp.complement.adjoint();
        }
        case Provenance::Explicit:
            break;
    }
    throw PreconditionFailed("explicit quotients carry no fiber metric");
}

// ------------------------------------------------------------ iota / jmath

Mat iota(const ModelPtr& model, const Mat& X, int m, int l, int N) {
    return promote(Symbol{model, m, N, X}, l).A;
}

Mat jmath(const GradedQuotient& q, const Mat& B, int l, int m) {
    if (m > l) throw Error("jmath needs m <= l");
    const ModelPtr& model = q.model();
    const int N = q.N(), c = l - m;
    const int nm_ = model->nm(m), nc = model->nm(c), nl = model->nm(l);
    if (B.rows() != nl * N) throw Error("operator size does not match level l");
    const Mat& W = *model->product_map(m, c);
    std::vector<Mat> Wc(nc, Mat(nl, nm_));
    for (int cc = 0; cc < nc; ++cc)
        for (int a = 0; a < nm_; ++a) Wc[cc].col(a) = W.col(a * nc + cc);
    Mat acc(nm_ * N, nm_ * N);
    for (int s = 0; s < N; ++s)
        for (int t = 0; t < N; ++t) {
            Mat blk = Mat::Zero(nm_, nm_);
            auto in = block_view(B, s, t, N, nl);
            for (int cc = 0; cc < nc; ++cc) blk.noalias() += Wc[cc].adjoint() * in * Wc[cc];
            block_view(acc, s, t, N, nm_) = blk;
        }
    const Mat& Pm = q.P(m);
    return (double(q.dim(m)) / double(q.dim(l))) * (Pm * acc * Pm);
}

// ------------------------------------------------------------ certificates

Report coinvariance_certificate(const GradedQuotient& q, int mMax) {
    Report r;
    r.check = "coinvariance";
    double worst = 0.0, idem = 0.0;
    for (int m = 0; m < mMax; ++m) {
        const Mat& Pm = q.P(m);
        const Mat& Pn = q.P(m + 1);
        double lo = min_eig_herm(iota(q.model(), Pm, m, m + 1, q.N()) - Pn);
        double res = std::max(0.0, -lo);
        auto& e = r.add_level(m, res);
        e["minEig"] = lo;
        e["dim"] = q.dim(m);
        worst = std::max(worst, -lo);
        idem = std::max(idem, opnorm(Pm * Pm - Pm) + opnorm(Pm - Pm.adjoint()));
    }
    r.fit["minEig"] = -worst;
    r.fit["idempotency"] = idem;
    r.pass = worst <= 1e-9 && idem < 1e-10;
    return r;
}

// First window start from which the sequence is exactly polynomial.
static std::pair<int, RatPoly> tail_poly(const std::vector<int64_t>& seq) {
    for (int m0 = 0; m0 + 1 < int(seq.size()); ++m0) {
        try {
            std::vector<int64_t> tail(seq.begin() + m0, seq.end());
            RatPoly p = interpolate_sequence(tail, m0);
            if (p.degree() + 2 <= int(tail.size())) return {m0, p};
        } catch (const Error&) {
        }
    }
    throw Error("sequence is not polynomial on any tail of the window");
}

Report arveson_rank(const GradedQuotient& q, int mMax) {
    Report r;
    r.check = "arveson_rank";
    std::vector<int64_t> dims, nms;
    for (int m = 0; m <= mMax; ++m) {
        dims.push_back(q.dim(m));
        nms.push_back(q.model()->nm(m));
        auto& e = r.add_level(m, 0.0);
        e["dim"] = dims.back();
        e["ratio"] = double(dims.back()) / double(nms.back());
    }
    try {
        auto [onset, pd] = tail_poly(dims);
        auto [onsetN, pn] = tail_poly(nms);
        Rational lim(0);
        if (pd.degree() == pn.degree()) lim = pd.leading() / pn.leading();
        else if (pd.degree() > pn.degree()) throw Error("dimension grows faster than n_m");
        r.fit["limit"] = lim.value();
        r.fit["limitExact"] = lim.str();
        r.fit["hilbertPoly"] = pd.str();
        r.fit["onset"] = std::max(onset, onsetN);
        r.pass = true;
    } catch (const Error& ex) {
        r.fit["error"] = ex.what();
        r.pass = false;
    }
    return r;
}

CompressedShift compressed_shift(const GradedQuotient& q, int m) {
    CompressedShift cs;
    cs.m = m;
    const Mat& b0 = q.level(m).basis;
    const Mat& b1 = q.level(m + 1).basis;
    const Mat I = Mat::Identity(q.N(), q.N());
    for (int a = 0; a < q.model()->n(); ++a)
        cs.blocks.push_back(b1.adjoint() * kron(*q.model()->shift(a, m), I) * b0);
    return cs;
}

static Mat phi_star_E(const CompressedShift& cs, const Mat& X) {
    const int r = int(cs.blocks[0].cols());
    Mat acc = Mat::Zero(r, r);
    for (auto& b : cs.blocks) acc += b.adjoint() * X * b;
    return acc;
}

Mat defect_operator_E(const GradedQuotient& q, int p, int m) {
    std::vector<CompressedShift> cs;
    for (int j = 0; j < p; ++j) cs.push_back(compressed_shift(q, m + j));
    std::vector<Mat> cur;
    for (int j = 0; j <= p; ++j) cur.push_back(Mat::Identity(q.dim(m + j), q.dim(m + j)));
    for (int order = 1; order <= p; ++order) {
        std::vector<Mat> next;
        for (size_t j = 0; j + 1 < cur.size(); ++j) next.push_back(cur[j] - phi_star_E(cs[j], cur[j + 1]));
        cur.swap(next);
    }
    return cur[0];
}

Report compressed_shift_report(const GradedQuotient& q, int mMax, int p) {
    Report r;
    r.check = "compressed_shift";
    double rowWorst = 0.0, scalarWorst = 0.0, traceWorst = 0.0;
    for (int m = 0; m <= mMax; ++m) {
        CompressedShift cs = compressed_shift(q, m);
        const int d0 = q.dim(m), d1 = q.dim(m + 1);
        Mat row = Mat::Zero(d1, d1), sq = Mat::Zero(d0, d0);
        for (auto& b : cs.blocks) {
            row += b * b.adjoint();
            sq += b.adjoint() * b;
        }
        double rowRes = d1 > 0 ? opnorm(row - Mat::Identity(d1, d1)) : 0.0;
        double ratio = d0 > 0 ? double(d1) / double(d0) : 0.0;
        double scal = d0 > 0 ? opnorm(sq - ratio * Mat::Identity(d0, d0)) : 0.0;
        Mat Bp = defect_operator_E(q, p, m);
        double expected = 0.0;
        for (int j = 0; j <= p; ++j) expected += ((j % 2) ? -1.0 : 1.0) * binom(p, j) * q.dim(m + j);
        double tr = std::abs(Bp.trace() - cplx(expected));
        auto& e = r.add_level(m, rowRes);
        e["scalarResidual"] = scal;
        e["ratio"] = ratio;
        e["traceResidual"] = tr;
        e["defectNorm"] = opnorm(Bp);
        rowWorst = std::max(rowWorst, rowRes);
        scalarWorst = std::max(scalarWorst, scal);
        traceWorst = std::max(traceWorst, tr);
    }
    r.fit["p"] = p;
    r.fit["maxRowResidual"] = rowWorst;
    r.fit["maxScalarResidual"] = scalarWorst;
    r.fit["maxTraceResidual"] = traceWorst;
    r.fit["scalar"] = scalarWorst < 1e-9;
    r.pass = rowWorst < 1e-9 && traceWorst < 1e-8;
    return r;
}

Report essential_normality(const GradedQuotient& q, int mMin, int mMax) {
    Report r;
    r.check = "essential_normality";
    mMin = std::max(mMin, 1);
    std::vector<double> ms, ys;
    CompressedShift prev = compressed_shift(q, mMin - 1);
    for (int m = mMin; m <= mMax; ++m) {
        CompressedShift cur = compressed_shift(q, m);
        double worst = 0.0;
        const int na = int(cur.blocks.size());
        for (int a = 0; a < na; ++a)
            for (int b = 0; b < na; ++b) {
                Mat c = cur.blocks[a].adjoint() * cur.blocks[b] - prev.blocks[b] * prev.blocks[a].adjoint();
                worst = std::max(worst, opnorm(c));
            }
        r.add_level(m, worst);
        ms.push_back(m);
        ys.push_back(worst);
        prev = std::move(cur);
    }
    // Local exponents between consecutive levels drift like 1/m (a norm
    // C/(m + b) gives m/(m + b)), so extrapolate the last three to 1/m -> 0.
    std::vector<double> ex, xs;
    for (size_t i = 0; i + 1 < ms.size(); ++i) {
        if (ys[i] <= 0.0 || ys[i + 1] <= 0.0) continue;
        ex.push_back(std::log(ys[i + 1] / ys[i]) / std::log(ms[i + 1] / ms[i]));
        xs.push_back(1.0 / std::sqrt(ms[i] * ms[i + 1]));
    }
    double slope = std::numeric_limits<double>::quiet_NaN();
    const size_t k = std::min<size_t>(3, ex.size());
    if (k > 0) {
        slope = 0.0;
        for (size_t a = ex.size() - k; a < ex.size(); ++a) {
            double w = 1.0;
            for (size_t b = ex.size() - k; b < ex.size(); ++b)
                if (b != a) w *= -xs[b] / (xs[a] - xs[b]);
            slope += w * ex[a];
        }
    }
    double top = 0.0;
    for (double y : ys) top = std::max(top, y);
    r.fit["decayExponent"] = slope;
    r.fit["lastLocalExponent"] = ex.empty() ? std::numeric_limits<double>::quiet_NaN() : ex.back();
    r.fit["window"] = {mMin, mMax};
    // Commuting compressions (finite-rank quotients) are trivially essentially normal.
    r.fit["vanishing"] = top < 1e-12;
    r.pass = top < 1e-12 || (std::isfinite(slope) && std::abs(slope + 1.0) < 0.3);
    return r;
}

QuotientPtr submodule_realization(const GradedQuotient& q, int genDegree) {
    std::vector<Generator> gens;
    for (int j = 0; j <= genDegree; ++j) {
        const int D = q.model()->nm(j) * q.N();
        // Only the part of the complement not already generated below degree j.
        auto partial = GradedQuotient::from_submodule_generators(q.model(), q.N(), gens);
        Mat C = partial->P(j) - q.P(j);
        Eigen::SelfAdjointEigenSolver<Mat> es(herm_part(C));
        for (int i = 0; i < D; ++i)
            if (es.eigenvalues()(i) > 0.5) gens.push_back({j, es.eigenvectors().col(i)});
    }
    return GradedQuotient::from_submodule_generators(q.model(), q.N(), std::move(gens));
}

}  // namespace qm
