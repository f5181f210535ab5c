#include "qm/shifts.hpp"

#include <cmath>

namespace qm {

std::vector<ShiftBlock> shift_blocks(const ModelPtr& model, int m) {
    std::vector<ShiftBlock> out;
    for (int a = 0; a < model->n(); ++a) out.push_back({a, m, *model->shift(a, m)});
    return out;
}

double row_identity_residual(const ModelPtr& model, int m) {
    const int d1 = model->nm(m + 1);
    Mat acc = Mat::Zero(d1, d1);
    for (int a = 0; a < model->n(); ++a) {
        const Mat& s = *model->shift(a, m);
        acc += s * s.adjoint();
    }
    return opnorm(acc - Mat::Identity(d1, d1));
}

static Mat sum_sstar_s(const ModelPtr& model, int m) {
    const int d = model->nm(m);
    Mat acc = Mat::Zero(d, d);
    for (int a = 0; a < model->n(); ++a) {
        const Mat& s = *model->shift(a, m);
        acc += s.adjoint() * s;
    }
    return acc;
}

double orbit_residual(const ModelPtr& model, int m) {
    const int d = model->nm(m);
    double ratio = double(model->nm(m + 1)) / double(d);
    return opnorm(sum_sstar_s(model, m) - ratio * Mat::Identity(d, d));
}

Report orbit_certificate(const ModelPtr& model, int mMax, double tol) {
    Report r;
    r.check = "orbit_certificate";
    double worst = 0.0;
    for (int m = 0; m <= mMax; ++m) {
        double res = orbit_residual(model, m);
        auto& e = r.add_level(m, res);
        e["ratio"] = double(model->nm(m + 1)) / double(model->nm(m));
        worst = std::max(worst, res);
    }
    r.pass = worst < tol;
    r.fit["maxResidual"] = worst;
    r.fit["tolerance"] = tol;
    return r;
}

Mat phi_star(const ModelPtr& model, const Mat& xNext, int m) {
    const int d = model->nm(m);
    Mat acc = Mat::Zero(d, d);
    for (int a = 0; a < model->n(); ++a) {
        const Mat& s = *model->shift(a, m);
        acc += s.adjoint() * xNext * s;
    }
    return acc;
}

Mat phi_star_power(const ModelPtr& model, int r, int m) {
    Mat x = Mat::Identity(model->nm(m + r), model->nm(m + r));
    for (int j = r - 1; j >= 0; --j) x = phi_star(model, x, m + j);
    return x;
}

Mat psi_map(const ModelPtr& model, const Mat& xNext, int m, bool override) {
    if (!override) {
        Report cert = orbit_certificate(model, m);
        if (!cert.pass)
            throw PreconditionFailed("Psi requires a passing orbit certificate (or an override)");
    }
    return (double(model->nm(m)) / double(model->nm(m + 1))) * phi_star(model, xNext, m);
}

DefectOperator defect_operator(const ModelPtr& model, int p, int m) {
    DefectOperator d;
    d.p = p;
    d.m = m;
    const int dm = model->nm(m);
    d.matrix = Mat::Zero(dm, dm);
    for (int r = 0; r <= p; ++r) {
        double sgn = (r % 2 == 0) ? 1.0 : -1.0;
        double c = sgn * binom(p, r);
        d.matrix += c * phi_star_power(model, r, m);
        d.expectedTrace += c * model->nm(m + r);
    }
    d.trace = d.matrix.trace();
    return d;
}

Report q_isometry_scan(const ModelPtr& model, int mMax, double tol) {
    Report r;
    r.check = "q_isometry";
    const int qMaxSearch = model->n() + 3;
    // B_q(m) = B_{q-1}(m) - Phi_*(B_{q-1}(m+1)), kept for m = 0..mMax+qMax-q.
    std::vector<Mat> cur;
    for (int m = 0; m <= mMax + qMaxSearch; ++m)
        cur.push_back(Mat::Identity(model->nm(m), model->nm(m)));
    int found = -1;
    std::vector<double> norms, prevNorms, b1Norms;
    for (int q = 1; q <= qMaxSearch; ++q) {
        std::vector<Mat> next;
        for (size_t m = 0; m + 1 < cur.size(); ++m)
            next.push_back(cur[m] - phi_star(model, cur[m + 1], int(m)));
        cur.swap(next);
        norms.clear();
        double worst = 0.0;
        for (int m = 0; m <= mMax; ++m) {
            double nv = opnorm(cur[m]);
            norms.push_back(nv);
            worst = std::max(worst, nv);
        }
        if (q == 1) b1Norms = norms;
        if (worst < tol) {
            found = q;
            break;
        }
        prevNorms = norms;
    }
    for (int m = 0; m <= mMax; ++m) {
        auto& e = r.add_level(m, found > 0 ? norms[m] : 0.0);
        if (!prevNorms.empty()) e["prevOrderNorm"] = prevNorms[m];
        e["B1norm"] = b1Norms[m];
    }
    double prevMin = 1e300;
    for (double v : prevNorms) prevMin = std::min(prevMin, v);
    r.fit["q"] = found;
    r.fit["expectedQ"] = model->dim() + 1;
    r.fit["prevOrderMinNorm"] = prevNorms.empty() ? 0.0 : prevMin;
    r.pass = found == model->dim() + 1 && !prevNorms.empty() && prevMin > 1e-3;
    return r;
}

Report schatten_report(const ModelPtr& model, int mMax, const std::vector<int>& pGrid) {
    Report r;
    r.check = "schatten";
    std::vector<double> lam(mMax + 1);
    bool psd = true;
    for (int m = 0; m <= mMax; ++m) {
        const int d = model->nm(m);
        Mat comm = sum_sstar_s(model, m);
        if (m >= 1) {
            comm -= Mat::Identity(d, d);  // sum_a S_a S_a^* = 1 on GH_m for m >= 1
        }
        double lo = min_eig_herm(comm), hi = max_eig_herm(comm);
        lam[m] = 0.5 * (lo + hi);
        psd = psd && lo > -1e-9;
        double expected = m == 0 ? double(model->nm(1)) : double(model->nm(m + 1) - d) / d;
        auto& e = r.add_level(m, std::abs(lam[m] - expected) + (hi - lo));
        e["lambda"] = lam[m];
        e["phi"] = comm.trace().real() / d;
        e["minEig"] = lo;
    }
    ojson sums = ojson::array();
    bool consistent = true;
    const int d = model->dim();
    for (int p : pGrid) {
        double s = 0.0;
        ojson partial = ojson::array();
        for (int m = 0; m <= mMax; ++m) {
            s += model->nm(m) * std::pow(lam[m], p);
            partial.push_back(s);
        }
        // Decay exponent of the terms n_m lambda_m^p over the upper half of the window.
        int m0 = std::max(1, mMax / 2);
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int cnt = 0;
        for (int m = m0; m <= mMax; ++m) {
            double x = std::log(double(m + 1));
            double y = std::log(model->nm(m) * std::pow(lam[m], p));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++cnt;
        }
        double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
        bool plateau = slope < -1.5;
        consistent = consistent && (plateau == (p > d + 1));
        ojson e;
        e["p"] = p;
        e["partialSums"] = partial;
        e["termExponent"] = slope;
        e["plateau"] = plateau;
        sums.push_back(e);
    }
    r.fit["sums"] = sums;
    r.fit["commutatorPSD"] = psd;
    double worst = 0.0;
    for (auto& e : r.perLevel) worst = std::max(worst, e["residual"].get<double>());
    r.pass = consistent && psd && worst < 1e-9;
    return r;
}

}  // namespace qm
