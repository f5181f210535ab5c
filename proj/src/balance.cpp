#include "qm/balance.hpp"

#include <cmath>
#include <limits>

namespace qm {

static int metric_rank(const Symbol& metric) {
    return int(std::lround(haar_state(metric).trace().real()));
}

BalanceResult balance_defect(const Symbol& metric, int m) {
    Mat T = herm_part(toeplitz(metric, m));
    QuotientLevel lv = range_projection(T, m);
    BalanceResult r;
    r.dim = lv.rank;
    r.rank = metric_rank(metric);
    if (r.dim == 0) throw Error("empty quotient level");
    r.c = double(metric.model->nm(m)) * r.rank / r.dim;
    r.defect = opnorm(T - r.c * lv.P);
    return r;
}

Report balance_report(const ModelPtr& model, const BundleSpec& spec, int mMin, int mMax) {
    Report rep;
    rep.check = "balance";
    Symbol metric = metric_symbol(model, spec);
    auto q = GradedQuotient::from_toeplitz_range(metric);
    double worst = 0.0;
    bool exact = true;
    for (int m = mMin; m <= mMax; ++m) {
        Mat T = herm_part(toeplitz(metric, m));
        const int dim = q->dim(m);
        const int rk = metric_rank(metric);
        Rational cx = c_constant(model, spec, m);
        double defect = opnorm(T - cx.value() * q->P(m));
        bool match = dim == chi(model, spec, m) && rk == rank(model, spec);
        exact = exact && match;
        auto& e = rep.add_level(m, defect);
        e["dim"] = dim;
        e["chi"] = chi(model, spec, m);
        e["c"] = cx.value();
        e["cExact"] = cx.str();
        worst = std::max(worst, defect);
    }
    Report co = coinvariance_certificate(*q, mMax);
    rep.fit["maxDefect"] = worst;
    rep.fit["dimsMatchChi"] = exact;
    rep.fit["coinvariance"] = co.verdict();
    rep.extra["bundle"] = spec.str();
    rep.pass = worst < 1e-9 && exact && co.pass;
    return rep;
}

Symbol reflected_metric(const Symbol& metric) {
    const ModelPtr& model = metric.model;
    const int n = model->n();
    if (metric.N != n) throw PreconditionFailed("reflection needs N == n");
    Symbol e = euler_complement(model);  // 1 - zeta zeta^*
    Symbol R = e.scaled(2.0) - identity_symbol(model, n);
    return mul(mul(R, metric), R);
}

// ------------------------------------------------------------------ T-map

SectionSamples sample_sections(const GradedQuotient& q, int m, const Quadrature& quad) {
    SectionSamples ss;
    ss.m = m;
    const int N = q.N();
    const QuotientLevel& lv = q.level(m);
    ss.dim = lv.rank;
    ss.chi = double(lv.rank);
    LevelPtr L = q.model()->level(m);
    auto pts = q.model()->sample_boundary(quad.samples, quad.seed);
    int rk = -1;
    for (size_t i = 0; i < pts.size(); ++i) {
        Vec u = L->values(pts[i]);
        Mat F = Mat::Zero(N, ss.dim);
        for (int a = 0; a < int(u.size()); ++a)
            for (int s = 0; s < N; ++s) F.row(s) += u(a) * lv.basis.row(a * N + s);
        Eigen::SelfAdjointEigenSolver<Mat> es(herm_part(q.fiber_projection(pts[i])));
        if (rk < 0) {
            rk = 0;
            for (int j = 0; j < N; ++j) rk += es.eigenvalues()(j) > 0.5 ? 1 : 0;
            ss.R.resize(Eigen::Index(pts.size()) * rk, ss.dim);
        }
        // P^E F seen in an orthonormal basis of the fiber
        Mat Ri = es.eigenvectors().rightCols(rk).adjoint() * F;
        Eigen::JacobiSVD<Mat> svd(Ri);
        int r = 0;
        for (int j = 0; j < svd.singularValues().size(); ++j)
            if (svd.singularValues()(j) > 1e-9 * std::max(1.0, svd.singularValues()(0))) ++r;
        if (r < rk) ss.rankDrops.push_back(int(i));
        ss.R.middleRows(Eigen::Index(i) * rk, rk) = Ri;
    }
    ss.rank = rk;
    ss.samples = int(pts.size());
    return ss;
}

// sum_x S^* (S G^{-1} S^*)^+ S, batched: each block is replaced by
// h^{1/2} R_x with h the pseudo-inverse of R_x G^{-1} R_x^*.
static Mat tmap_raw(const SectionSamples& ss, const Mat& G) {
    const int rk = ss.rank;
    Mat W = ss.R * G.inverse();
    Mat Y(ss.R.rows(), ss.dim);
    for (int i = 0; i < ss.samples; ++i) {
        auto Ri = ss.R.middleRows(Eigen::Index(i) * rk, rk);
        auto Yi = Y.middleRows(Eigen::Index(i) * rk, rk);
        if (rk == 1) {
            double v = W.row(i).dot(Ri.row(0)).real();  // conj(W) . R, real up to rounding
            Yi = v > 0.0 ? (Ri / std::sqrt(v)).eval() : Mat::Zero(1, ss.dim);
            continue;
        }
        Mat M = herm_part(W.middleRows(Eigen::Index(i) * rk, rk) * Ri.adjoint());
        Eigen::SelfAdjointEigenSolver<Mat> es(M);
        const RVec& ev = es.eigenvalues();
        const double top = ev(ev.size() - 1);
        Mat h = Mat::Zero(rk, rk);
        for (int j = 0; j < rk; ++j)
            if (ev(j) > 1e-10 * top) h += (1.0 / std::sqrt(ev(j))) * es.eigenvectors().col(j) * es.eigenvectors().col(j).adjoint();
        Yi = h * Ri;
    }
    Mat acc = Y.adjoint() * Y;
    return (ss.chi / ss.rank / double(ss.samples)) * acc;
}

static Mat normalize_trace(const Mat& G) {
    return G / (G.trace().real() / double(G.rows()));
}

Mat tmap_step(const SectionSamples& ss, const Mat& G) { return normalize_trace(herm_part(tmap_raw(ss, G))); }

TmapTrace tmap_iterate(const GradedQuotient& q, int m, const Mat& G0, const Quadrature& quad, int maxIter,
                       double tol, double floorFactor) {
    TmapTrace tr;
    SectionSamples ss = sample_sections(q, m, quad);
    tr.rankDrops = ss.rankDrops;
    if (G0.rows() != ss.dim) throw Error("starting metric has the wrong size");
    if (min_eig_herm(G0) <= 0.0) throw PreconditionFailed("starting metric is not positive definite");
    Mat G = normalize_trace(herm_part(G0));
    tr.iterates.push_back(G);
    for (int it = 0; it < maxIter; ++it) {
        Mat T = tmap_step(ss, G);
        double d = opnorm(T - G);
        if (!tr.defects.empty() && d > tr.defects.back() * (1.0 + 1e-9) + 1e-14) tr.monotone = false;
        tr.defects.push_back(d);
        G = T;
        tr.iterates.push_back(G);
        tr.iterations = it + 1;
        if (d < tol) break;
    }
    // Quadrature noise: the same map under two fresh seeds.
    Quadrature qa = quad, qb = quad;
    qa.seed = quad.seed + 1000003;
    qb.seed = quad.seed + 2000003;
    Mat TA = tmap_step(sample_sections(q, m, qa), G);
    Mat TB = tmap_step(sample_sections(q, m, qb), G);
    tr.noiseFloor = opnorm(TA - TB);
    tr.converged = !tr.defects.empty() && tr.defects.back() < floorFactor * tr.noiseFloor;
    return tr;
}

// ------------------------------------------------------------- YM probe

Report ym_limit_probe(const GradedQuotient& q, int mMin, int mMax, const std::vector<Vec>& points) {
    Report rep;
    rep.check = "ym_limit";
    const int np = int(points.size());
    std::vector<Mat> target(np);
    for (int i = 0; i < np; ++i) target[i] = q.fiber_projection(points[i]);
    std::vector<std::vector<Mat>> vals(mMax - mMin + 1, std::vector<Mat>(np));
    std::vector<double> devs;
    for (int m = mMin; m <= mMax; ++m) {
        double dev = 0.0, cauchy = 0.0;
        for (int i = 0; i < np; ++i) {
            vals[m - mMin][i] = herm_part(q.symbol_at(m, points[i]));
            dev = std::max(dev, opnorm(vals[m - mMin][i] - target[i]));
            if (m > mMin) cauchy = std::max(cauchy, opnorm(vals[m - mMin][i] - vals[m - mMin - 1][i]));
        }
        auto& e = rep.add_level(m, dev);
        if (m > mMin) e["cauchy"] = cauchy;
        devs.push_back(dev);
    }
    // Polynomial extrapolation in 1/m to 0 through the last `used` levels.
    auto extrapolate = [&](int i, int used) {
        Mat L = Mat::Zero(target[i].rows(), target[i].cols());
        for (int a = 0; a < used; ++a) {
            const double xa = 1.0 / double(mMax - a);
            double w = 1.0;
            for (int b = 0; b < used; ++b)
                if (b != a) {
                    const double xb = 1.0 / double(mMax - b);
                    w *= -xb / (xa - xb);
                }
            L += w * vals[mMax - a - mMin][i];
        }
        return L;
    };
    const int levels = mMax - mMin + 1;
    double extrap = 0.0, estimate = 0.0;
    for (int i = 0; i < np; ++i) {
        Mat hi = extrapolate(i, std::min(3, levels));
        Mat lo = extrapolate(i, std::min(2, levels));
        extrap = std::max(extrap, opnorm(hi - target[i]));
        estimate = std::max(estimate, opnorm(hi - lo));
    }
    bool decreasing = true;
    for (size_t i = 1; i < devs.size(); ++i) decreasing = decreasing && devs[i] <= devs[i - 1] + 1e-12;
    double slope = std::numeric_limits<double>::quiet_NaN();
    if (devs.size() >= 2 && devs.front() > 1e-14 && devs.back() > 1e-14)
        slope = std::log(devs.back() / devs.front()) / std::log(double(mMax) / double(std::max(mMin, 1)));
    rep.fit["extrapolationError"] = extrap;
    rep.fit["errorEstimate"] = estimate;
    rep.fit["decayExponent"] = slope;
    rep.fit["monotone"] = decreasing;
    rep.fit["points"] = np;
    // The limit must match the metric to within the extrapolation's own error,
    // estimated by the change from the two-level to the three-level extrapolant.
    rep.pass = decreasing && levels >= 3 && extrap <= estimate + 1e-9;
    return rep;
}

}  // namespace qm
