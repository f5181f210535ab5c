#include "qm/stability.hpp"

#include <cmath>

namespace qm {

Report guo_check(const GradedQuotient& E, const GradedQuotient& F, int mMin, int mMax) {
    if (E.model() != F.model() || E.N() != F.N()) throw ContainmentViolation("E and F live on different spaces");
    for (int m = mMin; m <= mMax; ++m) {
        double leak = opnorm(F.P(m) - E.P(m) * F.P(m));
        if (leak > 1e-9)
            throw ContainmentViolation("range of P_F is not inside P_E at level " + std::to_string(m) +
                                       " (leak " + std::to_string(leak) + ")");
    }
    Report rep;
    rep.check = "guo";
    std::vector<Rational> ratio;
    for (int m = mMin; m <= mMax; ++m) {
        if (E.dim(m) == 0) throw PreconditionFailed("E has an empty level");
        ratio.push_back(Rational(F.dim(m), E.dim(m)));
    }
    bool monotone = true, strict = true, equal = true;
    for (size_t i = 0; i < ratio.size(); ++i)
        for (size_t j = i + 1; j < ratio.size(); ++j) {
            if (ratio[i] < ratio[j]) monotone = false;
            if (!(ratio[j] < ratio[i])) strict = false;
            if (!(ratio[i] == ratio[j])) equal = false;
        }
    double minPsd = 0.0, traceWorst = 0.0;
    bool consistent = true;
    for (int m = mMin; m <= mMax; ++m) {
        double lo = 1e300, tr = 0.0;
        for (int l = m; l <= mMax; ++l) {
            Mat J = jmath(E, F.P(l), l, m);
            lo = std::min(lo, min_eig_herm(F.P(m) - J));
            double phi = J.trace().real() / E.dim(m);
            double want = double(F.dim(l)) / double(E.dim(l));
            tr = std::max(tr, std::abs(phi - want));
            // a PSD certificate forces the ratio inequality
            if (lo >= -1e-9 && ratio[m - mMin] < ratio[l - mMin]) consistent = false;
        }
        auto& e = rep.add_level(m, std::max(0.0, -lo));
        e["ratio"] = ratio[m - mMin].value();
        e["ratioExact"] = ratio[m - mMin].str();
        e["minEig"] = lo;
        e["traceResidual"] = tr;
        minPsd = std::min(minPsd, lo);
        traceWorst = std::max(traceWorst, tr);
    }
    rep.fit["monotone"] = monotone;
    rep.fit["minEig"] = minPsd;
    rep.fit["maxTraceResidual"] = traceWorst;
    rep.fit["consistent"] = consistent;
    rep.extra["strict"] = strict;
    rep.extra["branch"] = strict ? "strict" : equal ? "equality" : "mixed";
    rep.pass = monotone && minPsd >= -1e-9 && traceWorst < 1e-10 && consistent;
    return rep;
}

static Report gieseker_from(const ModelPtr& model, const HilbertFit& fe, const HilbertFit& ff, int mMin,
                            int mMax) {
    std::vector<int64_t> nms;
    for (int m = 0; m <= 2 * model->dim() + 6; ++m) nms.push_back(model->nm(m));
    RatPoly pn = interpolate_sequence(nms, 0);
    auto rank_of = [&](const RatPoly& p) {
        if (p.degree() < pn.degree()) return Rational(0);
        return p.leading() / pn.leading();
    };
    Rational rE = rank_of(fe.poly), rF = rank_of(ff.poly);
    if (rF.num == 0) throw PreconditionFailed("quotient F has rank 0");
    if (rE.num == 0) throw PreconditionFailed("E has rank 0");
    RatPoly redE = scaled(fe.poly, Rational(1) / rE), redF = scaled(ff.poly, Rational(1) / rF);
    RatPoly diff = redF - redE;
    Report rep;
    rep.check = "gieseker";
    for (int m = mMin; m <= mMax; ++m) {
        auto& e = rep.add_level(m, 0.0);
        e["reducedE"] = redE.eval(m).value();
        e["reducedF"] = redF.eval(m).value();
    }
    int sign = diff.degree() < 0 ? 0 : (diff.leading().num > 0 ? 1 : -1);
    rep.fit["hilbertE"] = fe.poly.str();
    rep.fit["hilbertF"] = ff.poly.str();
    rep.fit["rankE"] = rE.str();
    rep.fit["rankF"] = rF.str();
    rep.fit["reducedDifference"] = diff.str();
    rep.fit["relation"] = sign > 0 ? "F>E" : sign < 0 ? "F<E" : "F=E";
    rep.extra["strict"] = sign > 0;
    rep.pass = sign >= 0;
    return rep;
}

Report gieseker_table(const GradedQuotient& E, const GradedQuotient& F, int mMin, int mMax) {
    return gieseker_from(E.model(), hilbert_poly(E, mMin, mMax), hilbert_poly(F, mMin, mMax), mMin, mMax);
}

Report gieseker_table(const ModelPtr& model, const BundleSpec& E, const BundleSpec& F, int mMin, int mMax) {
    return gieseker_from(model, hilbert_poly(model, E, mMin, mMax), hilbert_poly(model, F, mMin, mMax), mMin,
                         mMax);
}

}  // namespace qm
