#include "qm/cowen_douglas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace qm {

Vec coherent_vector(const ModelPtr& model, int m, const Vec& v) {
    return model->level(m)->values(v).conjugate();
}

FiberSolve fiber(const GradedQuotient& q, int m, const Vec& v) {
    const double nv = v.norm();
    if (nv < 1e-14) throw PreconditionFailed("the origin is excluded from fiber computations");
    if (nv >= 1.0) throw PreconditionFailed("fiber point must lie in the open ball");
    if (q.model()->ideal_residual(v) > 1e-8 * std::max(1.0, std::pow(nv, 2)))
        throw OffVariety("fiber point is off the variety");
    const int N = q.N();
    Vec c = coherent_vector(q.model(), m, v);
    Mat K = kron(Mat(c), Mat::Identity(N, N));
    Mat R = K - q.P(m) * K;
    Eigen::JacobiSVD<Mat> svd(R, Eigen::ComputeFullV);
    const RVec& s = svd.singularValues();
    const double thr = 1e-9 * std::max(c.norm(), 1e-300);
    FiberSolve f;
    f.v = v;
    f.m = m;
    std::vector<int> keep;
    for (int i = 0; i < N; ++i)
        if (i >= s.size() || s(i) < thr) keep.push_back(i);
    f.basis = Mat(N, keep.size());
    for (size_t i = 0; i < keep.size(); ++i) f.basis.col(i) = svd.matrixV().col(keep[i]);
    fix_phases(f.basis);
    f.rank = int(keep.size());
    for (int i = 0; i < f.rank; ++i) {
        Mat x = kron(Mat(c), Mat(f.basis.col(i)));
        f.residual = std::max(f.residual, (x - q.P(m) * x).norm() / c.norm());
    }
    return f;
}

SpectralFiber spectral_fiber_projection(const GradedQuotient& q, int m, const Vec& x) {
    Mat V = herm_part(q.symbol_at(m, x));
    Eigen::SelfAdjointEigenSolver<Mat> es(V);
    const RVec& ev = es.eigenvalues();
    SpectralFiber out;
    out.P = Mat::Zero(V.rows(), V.cols());
    out.minRetained = std::numeric_limits<double>::infinity();
    double maxDiscarded = 0.0;
    for (int i = 0; i < ev.size(); ++i) {
        if (ev(i) >= 1.0 - 1e-9) {
            out.P += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
            ++out.rank;
            out.minRetained = std::min(out.minRetained, ev(i));
        } else if (ev(i) >= 1.0 - 1e-6) {
            throw NoSpectralGap("eigenvalue " + std::to_string(ev(i)) + " is within 1e-6 of 1 at level " +
                                std::to_string(m));
        } else {
            maxDiscarded = std::max(maxDiscarded, ev(i));
        }
    }
    if (out.rank == 0) out.minRetained = 0.0;
    out.gapRatio = maxDiscarded > 0.0 ? out.minRetained / maxDiscarded : std::numeric_limits<double>::infinity();
    return out;
}

int abel_truncation(double r, double tail) {
    if (!(r > 0.0 && r < 1.0)) throw Error("Abel radius must lie in (0,1)");
    // r^{2(M+1)} < tail
    return std::max(0, int(std::ceil(std::log(tail) / (2.0 * std::log(r)))) - 1);
}

AbelResult abel_symbol(const GradedQuotient& q, const Vec& zeta, const std::vector<double>& rList, int M,
                       double tail) {
    if (rList.empty()) throw Error("no Abel radii");
    double rmax = 0.0;
    for (double r : rList) {
        if (!(r > 0.0 && r < 1.0)) throw Error("Abel radius must lie in (0,1)");
        rmax = std::max(rmax, r);
    }
    const int need = abel_truncation(rmax, tail);
    if (M < 0) M = need;
    if (M < need)
        throw Error("truncation M=" + std::to_string(M) + " is insufficient for r=" + std::to_string(rmax) +
                    " (needs " + std::to_string(need) + ")");
    AbelResult out;
    out.r = rList;
    out.M = M;
    const int N = q.N();
    out.values.assign(rList.size(), Mat::Zero(N, N));
    std::vector<double> w(rList.size());
    for (size_t i = 0; i < rList.size(); ++i) w[i] = 1.0 - rList[i] * rList[i];
    for (int m = 0; m <= M; ++m) {
        Mat V = q.symbol_at(m, zeta);
        for (size_t i = 0; i < rList.size(); ++i) {
            out.values[i] += w[i] * V;
            w[i] *= rList[i] * rList[i];
        }
    }
    // Linear in (1 - r) through the two largest radii.
    std::vector<size_t> order(rList.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return rList[a] > rList[b]; });
    if (order.size() >= 2) {
        const double x1 = 1.0 - rList[order[0]], x2 = 1.0 - rList[order[1]];
        const Mat& v1 = out.values[order[0]];
        const Mat& v2 = out.values[order[1]];
        out.extrapolant = v1 - x1 * (v2 - v1) / (x2 - x1);
    } else {
        out.extrapolant = out.values[order[0]];
    }
    return out;
}

KernelValue kernel_eval(const ModelPtr& model, const Vec& z, const Vec& w, int M) {
    KernelValue k;
    k.value = 0.0;
    for (int m = 0; m <= M; ++m) {
        LevelPtr L = model->level(m);
        k.value += (L->values(z).transpose() * L->values(w).conjugate())(0, 0);
    }
    cplx ip = z.transpose() * w.conjugate();
    k.closedForm = 1.0 / (1.0 - ip);
    const double a = std::abs(ip);
    k.bound = std::pow(a, M + 1) / (1.0 - a);
    return k;
}

int kernel_truncation(const ModelPtr& model, int maxM, int maxAmbient) {
    int M = maxM;
    if (!model->idealFree())
        while (M > 1 && binom_int(M + model->n() - 1, model->n() - 1) > maxAmbient) --M;
    return M;
}

std::vector<Vec> interior_points(const ModelPtr& model, int count, uint64_t seed, double rMin, double rMax) {
    auto pts = model->sample_boundary(count, seed);
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> rad(rMin, rMax);
    for (auto& p : pts) p *= rad(rng);
    return pts;
}

std::vector<ScanRow> cd_scan(const GradedQuotient& q, int m, const std::vector<Vec>& points) {
    std::vector<ScanRow> rows;
    for (size_t i = 0; i < points.size(); ++i) {
        ScanRow row;
        row.point = int(i);
        row.m = m;
        try {
            SpectralFiber sf = spectral_fiber_projection(q, m, points[i]);
            row.rank = sf.rank;
            row.minRetained = sf.minRetained;
            row.gapRatio = sf.gapRatio;
        } catch (const NoSpectralGap&) {
            row.rank = -1;
            row.gapRatio = 1.0;
        }
        rows.push_back(row);
    }
    return rows;
}

Report cd_report(const GradedQuotient& q, int m, int count, uint64_t seed, int expectedRank) {
    Report rep;
    rep.check = "cowen_douglas";
    auto inner = interior_points(q.model(), count, seed);
    int badFiber = 0;
    double fiberRes = 0.0;
    for (auto& v : inner) {
        FiberSolve f = fiber(q, m, v);
        if (f.rank != expectedRank) ++badFiber;
        fiberRes = std::max(fiberRes, f.residual);
    }
    auto bd = q.model()->sample_boundary(count, seed + 1);
    auto rows = cd_scan(q, m, bd);
    int badSpectral = 0;
    double specErr = 0.0;
    bool haveMetric = q.provenance() != Provenance::Explicit;
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].rank != expectedRank) ++badSpectral;
        if (haveMetric && rows[i].rank >= 0) {
            SpectralFiber sf = spectral_fiber_projection(q, m, bd[i]);
            specErr = std::max(specErr, opnorm(sf.P - q.fiber_projection(bd[i])));
        }
    }
    auto& e = rep.add_level(m, specErr);
    e["fiberMismatches"] = badFiber;
    e["spectralMismatches"] = badSpectral;
    e["fiberResidual"] = fiberRes;
    rep.fit["expectedRank"] = expectedRank;
    rep.fit["points"] = count;
    rep.fit["maxSpectralError"] = specErr;
    rep.pass = badFiber == 0 && badSpectral == 0 && fiberRes < 1e-9 && specErr < 1e-8;
    return rep;
}

}  // namespace qm
