#include "qm/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "qm/balance.hpp"
#include "qm/cowen_douglas.hpp"
#include "qm/shifts.hpp"
#include "qm/stability.hpp"
#include "qm/szego.hpp"

namespace qm {

const std::map<std::string, double>& default_tolerances() {
    static const std::map<std::string, double> t = {
        {"abel", 0.05},         {"balance", 1e-9},  {"isometry", 1e-8}, {"kernel", 1e-12},
        {"orbit", 1e-9},        {"psd", 1e-9},      {"qisometry", 1e-9}, {"row", 1e-10},
        {"spectral", 1e-8},     {"toeplitz", 1e-10}, {"trace", 1e-8},
    };
    return t;
}

double RunConfig::tolerance(const std::string& name) const {
    auto it = tol.find(name);
    if (it != tol.end()) return it->second;
    return default_tolerances().at(name);
}

ojson RunConfig::to_json() const {
    ojson j;
    j["preset"] = preset;
    j["model"] = model;
    j["m"] = {mMin, mMax};
    ojson t = ojson::object();
    for (auto& [k, v] : default_tolerances()) t[k] = tolerance(k);
    j["tol"] = t;
    j["samples"] = samples;
    j["seed"] = seed;
    j["format"] = format;
    j["check"] = check;
    j["bundle"] = bundle;
    j["quotient"] = quotient;
    j["e"] = e;
    j["f"] = f;
    j["symbol"] = symbol;
    j["grid"] = grid;
    j["points"] = points;
    return j;
}

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> s = {"space",     "shifts",   "toeplitz", "quotient", "balance",
                                               "cd-scan",   "stability", "szego",   "suite",    "validate"};
    return s;
}

nlohmann::json parse_json_text(const std::string& text, const std::string& what) {
    try {
        return nlohmann::json::parse(text, nullptr, true, true);
    } catch (const nlohmann::json::parse_error& e) {
        // e.byte is 1-based and points just past the offending character.
        size_t stop = std::min(text.size(), e.byte > 0 ? size_t(e.byte - 1) : size_t(0));
        int line = 1, col = 1;
        for (size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::string msg = e.what();
        auto p = msg.find("syntax error");
        if (p != std::string::npos) msg = msg.substr(p);
        throw ParseError(what + ": line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg);
    }
}

std::pair<int, int> parse_m_range(const std::string& text) {
    auto to_int = [&](const std::string& s) {
        size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(s, &used);
        } catch (...) {
            used = 0;
        }
        if (used != s.size() || s.empty()) throw ParseError("bad level range '" + text + "'");
        return v;
    };
    auto dots = text.find("..");
    int a, b;
    if (dots == std::string::npos) {
        a = b = to_int(text);
    } else {
        a = to_int(text.substr(0, dots));
        b = to_int(text.substr(dots + 2));
    }
    if (a < 0 || b < a) throw ParseError("empty or negative level range '" + text + "'");
    return {a, b};
}

static std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Inline JSON or a path to a JSON file.
static std::string json_source(const std::string& arg) {
    auto p = arg.find_first_not_of(" \t\r\n");
    if (p != std::string::npos && arg[p] == '{') return arg;
    return read_file(arg);
}

RunConfig config_from_json(const std::string& text, RunConfig c) {
    nlohmann::json j = parse_json_text(text, "config");
    if (!j.is_object()) throw ParseError("config: top level must be an object");
    try {
        for (auto& [k, v] : j.items()) {
            if (k == "preset") c.preset = v.get<std::string>();
            else if (k == "model") c.model = v.is_string() ? v.get<std::string>() : v.dump();
            else if (k == "m") {
                std::pair<int, int> r;
                if (v.is_string()) r = parse_m_range(v.get<std::string>());
                else if (v.is_number_integer()) r = {v.get<int>(), v.get<int>()};
                else r = {v.at(0).get<int>(), v.at(1).get<int>()};
                if (r.first < 0 || r.second < r.first) throw ParseError("config: empty level range");
                c.mMin = r.first;
                c.mMax = r.second;
            } else if (k == "tol") {
                for (auto& [name, val] : v.items()) c.tol[name] = val.get<double>();
            } else if (k == "samples") c.samples = v.get<int>();
            else if (k == "seed") c.seed = v.get<uint64_t>();
            else if (k == "out") c.out = v.get<std::string>();
            else if (k == "format") c.format = v.get<std::string>();
            else if (k == "check") c.check = v.get<std::string>();
            else if (k == "bundle") c.bundle = v.is_string() ? v.get<std::string>() : v.dump();
            else if (k == "quotient") c.quotient = v.is_string() ? v.get<std::string>() : v.dump();
            else if (k == "e") c.e = v.is_string() ? v.get<std::string>() : v.dump();
            else if (k == "f") c.f = v.is_string() ? v.get<std::string>() : v.dump();
            else if (k == "symbol") c.symbol = v.get<std::string>();
            else if (k == "grid") c.grid = v.get<int>();
            else if (k == "points") c.points = v.get<int>();
            else throw ParseError("config: unknown key \"" + k + "\"");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    return c;
}

namespace {

struct Context {
    const RunConfig& cfg;
    ModelPtr model;
    std::vector<Report> reports;
    ojson notes = ojson::array();
};

void check_config(const RunConfig& c) {
    for (auto& [k, v] : c.tol) {
        if (!default_tolerances().count(k)) throw ParseError("unknown tolerance '" + k + "'");
        if (!(v > 0.0)) throw ParseError("tolerance '" + k + "' must be positive");
    }
    if (c.mMin < 0 || c.mMax < c.mMin) throw ParseError("empty level range");
    if (c.samples < 1) throw ParseError("samples must be positive");
    if (c.grid < 1 || c.points < 1) throw ParseError("grid and points must be positive");
    if (c.format != "json" && c.format != "csv") throw ParseError("format must be json or csv");
}

ModelPtr load_model(const RunConfig& c) {
    if (c.model.empty()) return model_from_preset(c.preset);
    std::string text = json_source(c.model);
    parse_json_text(text, "model");  // for the line/column diagnostic
    try {
        return model_from_json(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model: ") + e.what());
    }
}

// A quotient definition: {"bundle": ...}, a bundle object, or
// {"N": .., "generators": [[..], ..]} for a custom submodule quotient.
BundleSpec load_spec(const std::string& arg) {
    std::string text = json_source(arg);
    nlohmann::json j = parse_json_text(text, "quotient");
    if (j.is_string()) return parse_bundle(j.get<std::string>());
    if (!j.is_object()) throw ParseError("quotient: expected an object");
    if (j.contains("bundle")) {
        auto& b = j["bundle"];
        return parse_bundle(b.is_string() ? b.get<std::string>() : b.dump());
    }
    if (j.contains("generators") && !j.contains("kind")) j["kind"] = "custom";
    return parse_bundle(j.dump());
}

BundleSpec chosen_spec(const RunConfig& c) {
    return c.quotient.empty() ? parse_bundle(c.bundle) : load_spec(c.quotient);
}

int first_level(const RunConfig& c, int floor) { return std::max(c.mMin, floor); }

// ------------------------------------------------------------ subcommands

void cmd_space(Context& ctx) {
    const ModelPtr& model = ctx.model;
    Report r;
    r.check = "space";
    std::vector<int> hf = model->hilbert_function(std::max(ctx.cfg.mMax, 2 * model->n() + 4));
    std::vector<Vec> pts;
    if (model->has_sampler()) pts = model->sample_boundary(64, ctx.cfg.seed);
    double worst = 0.0;
    for (int m = 0; m <= ctx.cfg.mMax; ++m) {
        LevelPtr L = model->level(m);
        Mat B = L->onbNormalized();
        double orth = opnorm(B.adjoint() * B - Mat::Identity(L->dim, L->dim));
        // Reproducing identity on the boundary: sum_a |psi_a|^2 = |z|^{2m} = 1.
        double kern = 0.0;
        for (auto& z : pts) kern = std::max(kern, std::abs(L->values(z).squaredNorm() - 1.0));
        double res = std::max(orth, kern);
        auto& e = r.add_level(m, res);
        e["dim"] = L->dim;
        e["ambient"] = L->ambient();
        e["orthonormality"] = orth;
        e["boundaryKernel"] = kern;
        worst = std::max(worst, res);
    }
    double bres = 0.0;
    for (auto& z : pts) bres = std::max(bres, model->boundary_residual(z));
    int deg = fitted_degree(hf);
    r.fit["hilbertFunction"] = hf;
    r.fit["fittedDegree"] = deg;
    r.fit["dim"] = model->dim();
    r.fit["boundaryResidual"] = bres;
    r.fit["sampler"] = model->has_sampler();
    r.pass = worst < 1e-10 && bres < 1e-10 && deg == model->dim();
    ctx.reports.push_back(std::move(r));
}

Report row_report(const ModelPtr& model, int mMax, double tol) {
    Report r;
    r.check = "row_identity";
    double worst = 0.0;
    for (int m = 0; m <= mMax; ++m) {
        double res = row_identity_residual(model, m);
        r.add_level(m, res);
        worst = std::max(worst, res);
    }
    r.fit["maxResidual"] = worst;
    r.fit["tolerance"] = tol;
    r.pass = worst < tol;
    return r;
}

Report defect_trace_report(const ModelPtr& model, int mMax, double tol) {
    Report r;
    r.check = "defect_trace";
    const int d = model->dim();
    double worst = 0.0;
    for (int m = 0; m <= mMax; ++m) {
        double res = 0.0;
        auto& e = r.add_level(m, 0.0);
        for (int p = std::max(1, d - 1); p <= d + 2; ++p) {
            DefectOperator B = defect_operator(model, p, m);
            double t = std::abs(B.trace - cplx(B.expectedTrace));
            e["p" + std::to_string(p) + "Norm"] = opnorm(B.matrix);
            res = std::max(res, t);
        }
        e["residual"] = res;
        worst = std::max(worst, res);
    }
    r.fit["maxTraceResidual"] = worst;
    r.pass = worst < tol;
    return r;
}

void cmd_shifts(Context& ctx) {
    const auto& c = ctx.cfg;
    const std::string& k = c.check;
    static const std::set<std::string> known = {"all", "row", "orbit", "q-isometry", "schatten", "defect"};
    if (!known.count(k)) throw ParseError("unknown shifts check '" + k + "'");
    const int d = ctx.model->dim();
    if (k == "all" || k == "row") ctx.reports.push_back(row_report(ctx.model, c.mMax, c.tolerance("row")));
    if (k == "all" || k == "orbit") ctx.reports.push_back(orbit_certificate(ctx.model, c.mMax, c.tolerance("orbit")));
    if (k == "all" || k == "q-isometry")
        ctx.reports.push_back(q_isometry_scan(ctx.model, c.mMax, c.tolerance("qisometry")));
    if (k == "all" || k == "schatten")
        ctx.reports.push_back(schatten_report(ctx.model, c.mMax, {1, d + 1, d + 2, d + 3}));
    if (k == "all" || k == "defect")
        ctx.reports.push_back(defect_trace_report(ctx.model, c.mMax, c.tolerance("trace")));
}

ojson matrix_json(const Mat& X) {
    ojson re = ojson::array(), im = ojson::array();
    for (int i = 0; i < X.rows(); ++i) {
        ojson a = ojson::array(), b = ojson::array();
        for (int j = 0; j < X.cols(); ++j) {
            a.push_back(X(i, j).real());
            b.push_back(X(i, j).imag());
        }
        re.push_back(a);
        im.push_back(b);
    }
    return ojson{{"re", re}, {"im", im}};
}

void cmd_toeplitz(Context& ctx) {
    const auto& c = ctx.cfg;
    ctx.reports.push_back(
        toeplitz_calculus_report(ctx.model, std::max(c.mMax, 1), 50, c.seed, c.tolerance("toeplitz")));
    if (c.symbol.empty()) return;
    Symbol f = symbol_from_string(ctx.model, c.symbol);
    Report r;
    r.check = "toeplitz";
    cplx w = haar_state(f)(0, 0);
    double worst = 0.0;
    for (int m = c.mMin; m <= c.mMax; ++m) {
        Mat T = toeplitz(f, m);
        // phi_m(toeplitz(f, m)) = omega(f) since the symbol of 1 is 1.
        double res = std::abs(phi(ctx.model, T, m) - w);
        auto& e = r.add_level(m, res);
        e["matrix"] = matrix_json(T);
        worst = std::max(worst, res);
    }
    r.fit["symbol"] = c.symbol;
    r.fit["haar"] = {w.real(), w.imag()};
    r.pass = worst < c.tolerance("toeplitz");
    ctx.reports.push_back(std::move(r));
}

void cmd_quotient(Context& ctx) {
    const auto& c = ctx.cfg;
    BundleSpec spec = chosen_spec(c);
    auto q = realize(ctx.model, spec);
    for (Report r : {coinvariance_certificate(*q, c.mMax), arveson_rank(*q, c.mMax),
                     compressed_shift_report(*q, c.mMax, ctx.model->dim() + 1),
                     essential_normality(*q, c.mMin, c.mMax)}) {
        r.extra["bundle"] = spec.str();
        ctx.reports.push_back(std::move(r));
    }
}

Report tmap_report(const GradedQuotient& q, int m, const Quadrature& quad, const std::string& label) {
    const int r = q.dim(m);
    Mat G0 = Mat::Zero(r, r);
    for (int i = 0; i < r; ++i) G0(i, i) = double(i + 1);
    TmapTrace tr = tmap_iterate(q, m, G0, quad);
    int reach = -1;
    for (size_t i = 0; i < tr.defects.size(); ++i)
        if (tr.defects[i] < 3.0 * tr.noiseFloor) {
            reach = int(i) + 1;
            break;
        }
    Report rep;
    rep.check = "tmap";
    auto& e = rep.add_level(m, tr.defects.empty() ? 0.0 : tr.defects.back());
    e["noiseFloor"] = tr.noiseFloor;
    e["iterations"] = tr.iterations;
    e["iterationsToFloor"] = reach;
    e["distanceToIdentity"] = opnorm(tr.iterates.back() - Mat::Identity(r, r));
    rep.fit["defects"] = tr.defects;
    rep.fit["monotone"] = tr.monotone;
    rep.fit["converged"] = tr.converged;
    rep.fit["rankDrops"] = int(tr.rankDrops.size());
    rep.fit["samples"] = quad.samples;
    rep.fit["seed"] = quad.seed;
    rep.extra["bundle"] = label;
    rep.pass = tr.monotone && tr.converged && reach > 0 && reach <= 50;
    return rep;
}

Report ym_report(const GradedQuotient& q, const RunConfig& c, const std::string& label) {
    auto pts = q.model()->sample_boundary(c.points, c.seed + 7);
    Report r = ym_limit_probe(q, first_level(c, 1), std::max(c.mMax, first_level(c, 1) + 2), pts);
    r.extra["bundle"] = label;
    return r;
}

Report balance_with_tol(const ModelPtr& model, const BundleSpec& spec, const RunConfig& c) {
    Report r = balance_report(model, spec, c.mMin, c.mMax);
    r.pass = r.fit["maxDefect"].get<double>() < c.tolerance("balance") && r.fit["dimsMatchChi"].get<bool>() &&
             r.fit["coinvariance"].get<std::string>() == "PASS";
    return r;
}

void cmd_balance(Context& ctx) {
    const auto& c = ctx.cfg;
    BundleSpec spec = parse_bundle(c.bundle);
    ctx.reports.push_back(balance_with_tol(ctx.model, spec, c));
    auto q = realize(ctx.model, spec);
    if (ctx.model->has_sampler()) {
        ctx.reports.push_back(tmap_report(*q, first_level(c, 1), {c.samples, c.seed}, spec.str()));
        ctx.reports.push_back(ym_report(*q, c, spec.str()));
    } else {
        ctx.notes.push_back("no boundary sampler: T-map and limit probe skipped");
    }
}

int expected_rank(const ModelPtr& model, const BundleSpec& spec) { return rank(model, spec); }

void cmd_cdscan(Context& ctx, std::vector<ScanRow>* rows) {
    const auto& c = ctx.cfg;
    BundleSpec spec = chosen_spec(c);
    auto q = realize(ctx.model, spec);
    const int m = c.mMax;
    const int rk = expected_rank(ctx.model, spec);
    Report r = cd_report(*q, m, c.grid, c.seed, rk);
    r.extra["bundle"] = spec.str();
    if (rows) *rows = cd_scan(*q, m, ctx.model->sample_boundary(c.grid, c.seed + 1));
    ctx.reports.push_back(std::move(r));
}

Report kernel_report(const ModelPtr& model, int pairs, int M, uint64_t seed, double slack) {
    Report r;
    r.check = "kernel";
    auto z = interior_points(model, pairs, seed);
    auto w = interior_points(model, pairs, seed + 1);
    double worst = 0.0;
    bool ok = true;
    for (int i = 0; i < pairs; ++i) {
        KernelValue k = kernel_eval(model, z[i], w[i], M);
        double err = std::abs(k.value - k.closedForm);
        ok = ok && err <= k.bound + slack;
        worst = std::max(worst, err - k.bound);
    }
    auto& e = r.add_level(M, std::max(worst, 0.0));
    e["pairs"] = pairs;
    r.fit["truncation"] = M;
    r.fit["maxExcessOverBound"] = worst;
    r.pass = ok;
    return r;
}

Report abel_report(const GradedQuotient& q, const Vec& zeta, double tol, const std::string& label) {
    AbelResult a = abel_symbol(q, zeta, {0.9, 0.99});
    Mat target = q.fiber_projection(zeta);
    Report r;
    r.check = "abel";
    double gap = opnorm(a.values[1] - a.extrapolant);
    auto& e = r.add_level(a.M, gap);
    e["deviation09"] = opnorm(a.values[0] - target);
    e["deviation099"] = opnorm(a.values[1] - target);
    e["extrapolantDeviation"] = opnorm(a.extrapolant - target);
    r.fit["truncation"] = a.M;
    r.fit["radii"] = a.r;
    r.fit["gapToExtrapolant"] = gap;
    r.extra["bundle"] = label;
    r.pass = gap < tol;
    return r;
}

// Submodule realization of q by generators in degree <= 1, checked level by level.
QuotientPtr koszul(const GradedQuotient& q, int mCheck, Report& agree) {
    auto s = submodule_realization(q, 1);
    agree.check = "submodule_realization";
    double worst = 0.0;
    for (int m = 0; m <= mCheck; ++m) {
        double d = opnorm(s->P(m) - q.P(m));
        agree.add_level(m, d);
        worst = std::max(worst, d);
    }
    agree.fit["maxDifference"] = worst;
    agree.pass = worst < 1e-9;
    return s;
}

Report szego_ve(const GradedQuotient& q, int mMax, double tol, const std::string& label) {
    Report r = ve_isometry_check(q, mMax);
    r.pass = r.fit["maxResidual"].get<double>() < tol;
    r.extra["bundle"] = label;
    return r;
}

void cmd_szego(Context& ctx) {
    const auto& c = ctx.cfg;
    BundleSpec spec = chosen_spec(c);
    auto q = realize(ctx.model, spec);
    ctx.reports.push_back(szego_ve(*q, c.mMax, c.tolerance("isometry"), spec.str()));
    if (!ctx.model->has_sampler()) {
        ctx.notes.push_back("no boundary sampler: hidden Szego fit skipped");
        return;
    }
    Report h = hidden_szego(*q, first_level(c, 1), c.mMax, ctx.model->sample_boundary(c.points, c.seed + 3));
    h.extra["bundle"] = spec.str();
    ctx.reports.push_back(std::move(h));
}

void cmd_stability(Context& ctx) {
    const auto& c = ctx.cfg;
    if (c.e.empty() || c.f.empty()) throw ParseError("stability needs --e and --f");
    BundleSpec se = load_spec(c.e), sf = load_spec(c.f);
    auto E = realize(ctx.model, se), F = realize(ctx.model, sf);
    Report g = guo_check(*E, *F, c.mMin, c.mMax);
    g.extra["e"] = se.str();
    g.extra["f"] = sf.str();
    ctx.reports.push_back(std::move(g));
    if (rank(ctx.model, sf) > 0) {
        Report t = gieseker_table(*E, *F, c.mMin, c.mMax);
        t.extra["e"] = se.str();
        t.extra["f"] = sf.str();
        ctx.reports.push_back(std::move(t));
    } else {
        ctx.notes.push_back("F has rank 0: reduced Hilbert polynomial comparison skipped");
    }
}

// Largest m in [mMin, mMax] with n_{m+extra} N <= 600, so that no dense
// eigensolve in the suite exceeds that size. Never below mMin + 2.
int level_cap(const ModelPtr& model, int N, int mMin, int mMax, int extra) {
    int m = mMax;
    while (m > mMin + 2 && model->nm(m + extra) * N > 600) --m;
    return m;
}

// The full battery on one model.
void cmd_suite(Context& ctx) {
    const auto& c = ctx.cfg;
    const ModelPtr& model = ctx.model;
    const bool projective = model->preset() == Preset::ProjectiveSpace;
    const int mMax = c.mMax;

    cmd_space(ctx);
    {
        RunConfig sc = c;
        sc.check = "all";
        Context sub{sc, model, {}, ojson::array()};
        cmd_shifts(sub);
        for (auto& r : sub.reports) ctx.reports.push_back(std::move(r));
    }
    ctx.reports.push_back(toeplitz_calculus_report(model, std::max(mMax, 1), 50, c.seed, c.tolerance("toeplitz")));

    std::vector<BundleSpec> bundles = {BundleSpec::line(1), BundleSpec::line(2), BundleSpec::line(3)};
    if (projective && model->n() >= 3) bundles.push_back(BundleSpec::tangent(1));
    for (auto& b : bundles) {
        auto q = realize(model, b);
        RunConfig cb = c;
        cb.mMax = level_cap(model, q->N(), c.mMin, mMax, 1);
        Report bal = balance_with_tol(model, b, cb);
        Report ve = szego_ve(*q, cb.mMax, c.tolerance("isometry"), b.str());
        if (cb.mMax < mMax) bal.extra["levelCap"] = ve.extra["levelCap"] = cb.mMax;
        ctx.reports.push_back(std::move(bal));
        ctx.reports.push_back(std::move(ve));
    }

    auto line1 = realize(model, BundleSpec::line(1));
    const int p = model->dim() + 1;
    const int capP = level_cap(model, line1->N(), c.mMin, mMax, p);
    for (Report r : {arveson_rank(*line1, mMax), compressed_shift_report(*line1, capP, p),
                     essential_normality(*line1, c.mMin, mMax)}) {
        r.extra["bundle"] = "line:1";
        ctx.reports.push_back(std::move(r));
    }

    const bool sampler = model->has_sampler();
    if (sampler) {
        for (int m = first_level(c, 2); m <= std::min(mMax, 4); ++m)
            ctx.reports.push_back(tmap_report(*line1, m, {c.samples, c.seed}, "line:1"));
        ctx.reports.push_back(ym_report(*line1, c, "line:1"));

        Report cd = cd_report(*line1, std::max(2, std::min(mMax, 6)), 100, c.seed, 1);
        cd.extra["bundle"] = "line:1";
        ctx.reports.push_back(std::move(cd));
        ctx.reports.push_back(kernel_report(model, 20, kernel_truncation(model), c.seed + 11, c.tolerance("kernel")));

        if (model->idealFree() && model->n() == 2) {
            Report agree;
            auto s = koszul(*line1, mMax, agree);
            agree.extra["bundle"] = "line:1";
            ctx.reports.push_back(std::move(agree));
            Vec zeta = model->sample_boundary(1, c.seed + 5)[0];
            ctx.reports.push_back(abel_report(*s, zeta, c.tolerance("abel"), "line:1"));
        } else {
            ctx.notes.push_back("Abel sums run only on CP1 (level sizes grow too fast elsewhere)");
        }

        Report h = hidden_szego(*line1, first_level(c, 1), mMax, model->sample_boundary(5, c.seed + 3));
        h.extra["bundle"] = "line:1";
        ctx.reports.push_back(std::move(h));
    } else {
        ctx.notes.push_back("no boundary sampler: sampled checks skipped");
    }

    // Trivial bundle against the structure sheaf of the point [1:0:..:0].
    std::vector<std::vector<std::string>> pointGens;
    for (int i = 1; i < model->n(); ++i) pointGens.push_back({"z" + std::to_string(i + 1)});
    auto trivial = realize(model, BundleSpec::line(0));
    auto point = realize(model, BundleSpec::custom(1, pointGens));
    Report g = guo_check(*trivial, *point, first_level(c, 2), std::max(mMax, first_level(c, 2) + 1));
    g.extra["e"] = "trivial";
    g.extra["f"] = "point";
    ctx.reports.push_back(std::move(g));
    Report gs = gieseker_table(model, BundleSpec::sum({BundleSpec::line(0), BundleSpec::line(1)}), BundleSpec::line(1),
                               c.mMin, std::max(mMax, c.mMin + 2 * model->dim() + 2));
    ctx.reports.push_back(std::move(gs));
}

bool all_pass(const std::vector<Report>& rs) {
    return std::all_of(rs.begin(), rs.end(), [](const Report& r) { return r.pass; });
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string o = "\"";
    for (char ch : s) o += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return o + "\"";
}

std::string csv_num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_cell(const ojson& v) {
    if (v.is_string()) return csv_escape(v.get<std::string>());
    if (v.is_null() || v.is_structured()) return "";
    if (v.is_number_float()) return csv_num(v.get<double>());
    return v.dump();
}

// Scalar perLevel fields of every report as one table.
std::string csv_levels(const std::vector<Report>& rs) {
    std::vector<std::string> cols = {"check", "m", "residual"};
    for (auto& r : rs)
        for (auto& e : r.perLevel)
            for (auto& [k, v] : e.items())
                if (!v.is_structured() && std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
    std::ostringstream o;
    for (size_t i = 0; i < cols.size(); ++i) o << (i ? "," : "") << cols[i];
    o << "\n";
    for (auto& r : rs)
        for (auto& e : r.perLevel) {
            o << csv_escape(r.check);
            for (size_t i = 1; i < cols.size(); ++i) o << "," << (e.contains(cols[i]) ? csv_cell(e[cols[i]]) : "");
            o << "\n";
        }
    return o.str();
}

std::string csv_scan(const std::vector<ScanRow>& rows) {
    std::ostringstream o;
    o << "point,m,rank,min_retained,gap_ratio\n";
    for (auto& r : rows)
        o << r.point << "," << r.m << "," << r.rank << "," << csv_num(r.minRetained) << "," << csv_num(r.gapRatio)
          << "\n";
    return o.str();
}

ojson document(const std::string& sub, Context& ctx) {
    ojson cfgj = ctx.cfg.to_json();
    if (ctx.reports.size() == 1 && sub != "suite") {
        ojson j = ctx.reports[0].to_json();
        j["config"] = cfgj;
        j["seed"] = ctx.cfg.seed;
        if (!ctx.notes.empty()) j["notes"] = ctx.notes;
        return j;
    }
    Report top;
    top.check = sub;
    top.pass = all_pass(ctx.reports);
    int passed = 0;
    for (auto& r : ctx.reports) passed += r.pass ? 1 : 0;
    top.fit["reports"] = int(ctx.reports.size());
    top.fit["passed"] = passed;
    ojson j = top.to_json();
    j["config"] = cfgj;
    j["seed"] = ctx.cfg.seed;
    if (!ctx.notes.empty()) j["notes"] = ctx.notes;
    ojson arr = ojson::array();
    for (auto& r : ctx.reports) arr.push_back(r.to_json());
    j["reports"] = arr;
    return j;
}

int cmd_validate(const RunConfig& c, std::ostream& out) {
    if (c.file.empty()) throw ParseError("validate needs a file");
    SchemaResult s = validate_report_text(read_file(c.file));
    if (s.ok) {
        out << "valid\n";
        return 0;
    }
    out << "invalid\n";
    for (auto& e : s.errors) out << "  " << e << "\n";
    return 1;
}

}  // namespace

int run(const std::string& sub, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        check_config(cfg);
        if (sub == "validate") return cmd_validate(cfg, out);
        if (std::find(subcommands().begin(), subcommands().end(), sub) == subcommands().end())
            throw ParseError("unknown subcommand '" + sub + "'");
        Context ctx{cfg, load_model(cfg), {}, ojson::array()};
        std::vector<ScanRow> rows;
        if (sub == "space") cmd_space(ctx);
        else if (sub == "shifts") cmd_shifts(ctx);
        else if (sub == "toeplitz") cmd_toeplitz(ctx);
        else if (sub == "quotient") cmd_quotient(ctx);
        else if (sub == "balance") cmd_balance(ctx);
        else if (sub == "cd-scan") cmd_cdscan(ctx, &rows);
        else if (sub == "stability") cmd_stability(ctx);
        else if (sub == "szego") cmd_szego(ctx);
        else if (sub == "suite") cmd_suite(ctx);

        std::string text;
        if (cfg.format == "csv") text = sub == "cd-scan" ? csv_scan(rows) : csv_levels(ctx.reports);
        else text = dump_json(document(sub, ctx));
        if (cfg.out.empty()) {
            out << text;
        } else {
            std::ofstream f(cfg.out, std::ios::binary);
            if (!f) throw Error("cannot write " + cfg.out);
            f << text;
        }
        for (auto& r : ctx.reports) err << r.verdict() << "  " << r.check << "\n";
        if (sub == "cd-scan")
            for (auto& r : rows)
                if (r.rank != ctx.reports[0].fit["expectedRank"].get<int>()) return 1;
        return all_pass(ctx.reports) ? 0 : 1;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        err << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace qm
