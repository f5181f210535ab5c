#include "qm/szego.hpp"

#include <cmath>

namespace qm {

Mat ae_operator(const GradedQuotient& q, int m) {
    if (!q.metric()) throw PreconditionFailed("A_E needs a quotient built from a metric symbol");
    const Mat& B = q.level(m).basis;
    return herm_part(B.adjoint() * toeplitz(*q.metric(), m) * B);
}

Report ve_isometry_check(const GradedQuotient& q, int mMax) {
    Report rep;
    rep.check = "ve_isometry";
    double worst = 0.0;
    Mat A0 = ae_operator(q, 0);
    for (int m = 0; m <= mMax; ++m) {
        Mat A1 = ae_operator(q, m + 1);
        double lo = min_eig_herm(A0);
        if (lo <= 1e-6) throw NearSingularA("A_E is near singular at level " + std::to_string(m));
        CompressedShift cs = compressed_shift(q, m);
        const double w = std::sqrt(double(q.model()->nm(m)) / double(q.model()->nm(m + 1)));
        Mat s1 = herm_sqrt(A1), s0inv = herm_inv_sqrt(A0);
        const int d = q.dim(m);
        Mat acc = Mat::Zero(d, d);
        for (auto& b : cs.blocks) {
            Mat V = s1 * (w * b) * s0inv;
            acc += V.adjoint() * V;
        }
        double res = opnorm(acc - Mat::Identity(d, d));
        auto& e = rep.add_level(m, res);
        e["minEigA"] = lo;
        e["maxEigA"] = max_eig_herm(A0);
        worst = std::max(worst, res);
        A0 = std::move(A1);
    }
    rep.fit["maxResidual"] = worst;
    rep.pass = worst < 1e-8;
    return rep;
}

std::pair<double, double> fit_first_order(const std::vector<int>& ms, const std::vector<double>& ys) {
    // columns [1, 1/m], target m*y
    Eigen::MatrixXd X(ms.size(), 2);
    Eigen::VectorXd t(ms.size());
    for (size_t i = 0; i < ms.size(); ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = 1.0 / ms[i];
        t(i) = ms[i] * ys[i];
    }
    Eigen::Vector2d c = X.colPivHouseholderQr().solve(t);
    return {c(0), c(1)};
}

Report hidden_szego(const GradedQuotient& q, int mMin, int mMax, const std::vector<Vec>& points) {
    Report rep;
    rep.check = "hidden_szego";
    Report ve = ve_isometry_check(q, mMax);
    const int N = q.N();
    const int np = int(points.size());
    std::vector<Mat> fibers;
    std::vector<int> ranks;
    for (auto& x : points) {
        fibers.push_back(q.fiber_projection(x));
        ranks.push_back(int(std::lround(fibers.back().trace().real())));
    }
    std::vector<int> ms;
    std::vector<std::vector<double>> D(np), Dadj(np);
    double hermWorst = 0.0, commWorst = 0.0;
    for (int m = mMin; m <= mMax; ++m) {
        ms.push_back(m);
        const QuotientLevel& lv = q.level(m);
        const int r = lv.rank;
        Mat A = ae_operator(q, m);
        Mat Ai = herm_inv_sqrt(A);
        Mat X = lv.basis * (Ai * (Mat::Identity(r, r) - A) * Ai) * lv.basis.adjoint();
        LevelPtr L = q.model()->level(m);
        const int rk = ranks.empty() ? 1 : ranks[0];
        const double c = double(q.model()->nm(m)) * rk / double(r);
        double lvlMax = 0.0;
        for (int i = 0; i < np; ++i) {
            Mat Dm = partial_symbol(X, L->values(points[i]), N);
            hermWorst = std::max(hermWorst, opnorm(Dm - Dm.adjoint()));
            double v = (fibers[i] * Dm).trace().real() / ranks[i];
            D[i].push_back(v);
            Dadj[i].push_back(c * v);
            lvlMax = std::max(lvlMax, std::abs(v));
        }
        auto& e = rep.add_level(m, lvlMax);
        e["c"] = c;
        if (m >= 1) {
            CompressedShift cur = compressed_shift(q, m), prev = compressed_shift(q, m - 1);
            Mat comm = Mat::Zero(r, r);
            for (size_t a = 0; a < cur.blocks.size(); ++a)
                comm += cur.blocks[a].adjoint() * cur.blocks[a] - prev.blocks[a] * prev.blocks[a].adjoint();
            double phi = comm.trace().real() / r;
            double want = double(q.dim(m + 1)) / double(r) - 1.0;
            e["phiCommutator"] = phi;
            commWorst = std::max(commWorst, std::abs(phi - want));
        }
    }
    ojson a1s = ojson::array(), a1adj = ojson::array();
    double lo = 1e300, hi = -1e300, sum = 0.0, sumAdj = 0.0;
    for (int i = 0; i < np; ++i) {
        auto [a1, a2] = fit_first_order(ms, D[i]);
        auto [b1, b2] = fit_first_order(ms, Dadj[i]);
        a1s.push_back(a1);
        a1adj.push_back(b1);
        lo = std::min(lo, a1);
        hi = std::max(hi, a1);
        sum += a1;
        sumAdj += b1;
        (void)a2;
        (void)b2;
    }
    rep.fit["a1"] = np ? sum / np : 0.0;
    rep.fit["a1_adjoint"] = np ? sumAdj / np : 0.0;
    rep.fit["a1Spread"] = np ? hi - lo : 0.0;
    rep.fit["a1PerPoint"] = a1s;
    rep.fit["a1AdjointPerPoint"] = a1adj;
    rep.fit["window"] = {mMin, mMax};
    rep.fit["hermitianResidual"] = hermWorst;
    rep.fit["commutatorResidual"] = commWorst;
    rep.fit["isometry"] = ve.verdict();
    rep.pass = ve.pass && hermWorst < 1e-10 && commWorst < 1e-9;
    return rep;
}

}  // namespace qm
