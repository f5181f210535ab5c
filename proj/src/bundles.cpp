#include "qm/bundles.hpp"

#include <json.hpp>

namespace qm {

BundleSpec BundleSpec::line(int k) {
    BundleSpec s;
    s.kind = Kind::Line;
    s.k = k;
    return s;
}

BundleSpec BundleSpec::sum(std::vector<BundleSpec> parts) {
    BundleSpec s;
    s.kind = Kind::DirectSum;
    s.parts = std::move(parts);
    return s;
}

BundleSpec BundleSpec::tangent(int t) {
    BundleSpec s;
    s.kind = Kind::TangentTwist;
    s.k = t;
    return s;
}

BundleSpec BundleSpec::custom(int N, std::vector<std::vector<std::string>> gens) {
    BundleSpec s;
    s.kind = Kind::CustomQuotient;
    s.N = N;
    s.gens = std::move(gens);
    return s;
}

std::string BundleSpec::str() const {
    switch (kind) {
        case Kind::Line:
            return "line:" + std::to_string(k);
        case Kind::TangentTwist:
            return "tangent:" + std::to_string(k);
        case Kind::DirectSum: {
            std::string s = "sum(";
            for (size_t i = 0; i < parts.size(); ++i) s += (i ? "," : "") + parts[i].str();
            return s + ")";
        }
        case Kind::CustomQuotient:
            return "custom:N=" + std::to_string(N);
    }
    return "?";
}

static BundleSpec from_json(const nlohmann::json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "line") return BundleSpec::line(j.value("k", 0));
    if (kind == "trivial") return BundleSpec::line(0);
    if (kind == "tangent") return BundleSpec::tangent(j.value("t", 1));
    if (kind == "sum") {
        std::vector<BundleSpec> parts;
        for (auto& p : j.at("parts")) parts.push_back(p.is_string() ? parse_bundle(p.get<std::string>()) : from_json(p));
        return BundleSpec::sum(std::move(parts));
    }
    if (kind == "custom") {
        std::vector<std::vector<std::string>> gens;
        for (auto& g : j.at("generators")) gens.push_back(g.get<std::vector<std::string>>());
        return BundleSpec::custom(j.at("N").get<int>(), std::move(gens));
    }
    throw ParseError("unknown bundle kind: " + kind);
}

static BundleSpec parse_text(const std::string& t, size_t& pos);

static std::vector<BundleSpec> parse_list(const std::string& t, size_t& pos) {
    std::vector<BundleSpec> out;
    out.push_back(parse_text(t, pos));
    while (pos < t.size() && t[pos] == ',') {
        ++pos;
        out.push_back(parse_text(t, pos));
    }
    return out;
}

static int parse_int_at(const std::string& t, size_t& pos) {
    size_t start = pos;
    if (pos < t.size() && t[pos] == '-') ++pos;
    while (pos < t.size() && std::isdigit(static_cast<unsigned char>(t[pos]))) ++pos;
    if (start == pos) throw ParseError("expected an integer at column " + std::to_string(pos + 1));
    return std::stoi(t.substr(start, pos - start));
}

static BundleSpec parse_text(const std::string& t, size_t& pos) {
    auto starts = [&](const std::string& w) { return t.compare(pos, w.size(), w) == 0; };
    if (starts("line:")) {
        pos += 5;
        return BundleSpec::line(parse_int_at(t, pos));
    }
    if (starts("trivial")) {
        pos += 7;
        return BundleSpec::line(0);
    }
    if (starts("tangent")) {
        pos += 7;
        int tw = 1;
        if (pos < t.size() && t[pos] == ':') {
            ++pos;
            tw = parse_int_at(t, pos);
        }
        return BundleSpec::tangent(tw);
    }
    if (starts("sum(")) {
        pos += 4;
        auto parts = parse_list(t, pos);
        if (pos >= t.size() || t[pos] != ')') throw ParseError("missing ')' at column " + std::to_string(pos + 1));
        ++pos;
        return BundleSpec::sum(std::move(parts));
    }
    throw ParseError("unknown bundle spec at column " + std::to_string(pos + 1) + ": " + t);
}

BundleSpec parse_bundle(const std::string& text) {
    std::string t;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    if (!t.empty() && t[0] == '{') {
        try {
            return from_json(nlohmann::json::parse(t));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("bundle JSON: ") + e.what());
        }
    }
    size_t pos = 0;
    BundleSpec s = parse_text(t, pos);
    if (pos != t.size()) throw ParseError("trailing text at column " + std::to_string(pos + 1));
    return s;
}

bool has_metric(const BundleSpec& spec) {
    switch (spec.kind) {
        case BundleSpec::Kind::Line:
        case BundleSpec::Kind::TangentTwist:
            return true;
        case BundleSpec::Kind::DirectSum:
            for (auto& p : spec.parts)
                if (!has_metric(p)) return false;
            return !spec.parts.empty();
        case BundleSpec::Kind::CustomQuotient:
            return false;
    }
    return false;
}

Symbol metric_symbol(const ModelPtr& model, const BundleSpec& spec) {
    switch (spec.kind) {
        case BundleSpec::Kind::Line:
            if (spec.k < 0) throw PreconditionFailed("negative line bundles have no sections here");
            return spec.k == 0 ? identity_symbol(model, 1) : fs_line_bundle(model, spec.k);
        case BundleSpec::Kind::TangentTwist: {
            if (!model->idealFree()) throw PreconditionFailed("tangent twist needs projective space");
            if (spec.k < 0) throw PreconditionFailed("tangent twist needs t >= 0");
            Symbol q = euler_complement(model);
            return spec.k == 0 ? q : tensor(fs_line_bundle(model, spec.k), q);
        }
        case BundleSpec::Kind::DirectSum: {
            if (spec.parts.empty()) throw PreconditionFailed("empty direct sum");
            Symbol acc = metric_symbol(model, spec.parts[0]);
            for (size_t i = 1; i < spec.parts.size(); ++i) acc = direct_sum(acc, metric_symbol(model, spec.parts[i]));
            return acc;
        }
        case BundleSpec::Kind::CustomQuotient:
            break;
    }
    throw PreconditionFailed("custom quotient has no canonical metric");
}

QuotientPtr realize(const ModelPtr& model, const BundleSpec& spec) {
    if (has_metric(spec)) return GradedQuotient::from_toeplitz_range(metric_symbol(model, spec));
    if (spec.kind != BundleSpec::Kind::CustomQuotient)
        throw PreconditionFailed("direct sums with custom parts are not realized");
    std::vector<Generator> gens;
    for (auto& g : spec.gens) {
        if (int(g.size()) != spec.N) throw ParseError("generator needs N components");
        gens.push_back(generator_from_strings(model, g));
    }
    return GradedQuotient::from_submodule_generators(model, spec.N, std::move(gens));
}

int64_t chi(const ModelPtr& model, const BundleSpec& spec, int m) {
    switch (spec.kind) {
        case BundleSpec::Kind::Line:
            return model->nm(m + spec.k);
        case BundleSpec::Kind::TangentTwist:
            return int64_t(model->n()) * model->nm(m + spec.k) - model->nm(m + spec.k - 1);
        case BundleSpec::Kind::DirectSum: {
            int64_t s = 0;
            for (auto& p : spec.parts) s += chi(model, p, m);
            return s;
        }
        case BundleSpec::Kind::CustomQuotient:
            return realize(model, spec)->dim(m);
    }
    return 0;
}

static HilbertFit fit_values(std::vector<int64_t> vals, int m0) {
    HilbertFit f;
    f.values = vals;
    f.m0 = m0;
    for (size_t s = 0; s + 1 < vals.size(); ++s) {
        std::vector<int64_t> tail(vals.begin() + s, vals.end());
        try {
            RatPoly p = interpolate_sequence(tail, m0 + int(s));
            if (p.degree() + 2 > int(tail.size())) continue;
            f.poly = p;
            f.onset = m0 + int(s);
            return f;
        } catch (const Error&) {
        }
    }
    throw Error("Hilbert sequence is not polynomial on the window");
}

HilbertFit hilbert_poly(const ModelPtr& model, const BundleSpec& spec, int m0, int m1) {
    if (m1 < m0) throw Error("empty window");
    std::vector<int64_t> vals;
    if (spec.kind == BundleSpec::Kind::CustomQuotient) {
        auto q = realize(model, spec);
        for (int m = m0; m <= m1; ++m) vals.push_back(q->dim(m));
    } else {
        for (int m = m0; m <= m1; ++m) vals.push_back(chi(model, spec, m));
    }
    return fit_values(std::move(vals), m0);
}

HilbertFit hilbert_poly(const GradedQuotient& q, int m0, int m1) {
    std::vector<int64_t> vals;
    for (int m = m0; m <= m1; ++m) vals.push_back(q.dim(m));
    return fit_values(std::move(vals), m0);
}

int rank(const ModelPtr& model, const BundleSpec& spec) {
    switch (spec.kind) {
        case BundleSpec::Kind::Line:
            return 1;
        case BundleSpec::Kind::TangentTwist:
            return model->n() - 1;
        case BundleSpec::Kind::DirectSum: {
            int r = 0;
            for (auto& p : spec.parts) r += rank(model, p);
            return r;
        }
        case BundleSpec::Kind::CustomQuotient: {
            const int w = 2 * model->dim() + 6;
            HilbertFit fe = hilbert_poly(model, spec, 0, w);
            std::vector<int64_t> nms;
            for (int m = 0; m <= w; ++m) nms.push_back(model->nm(m));
            RatPoly pn = fit_values(nms, 0).poly;
            if (fe.poly.degree() < pn.degree()) return 0;
            Rational r = fe.poly.leading() / pn.leading();
            if (r.den != 1) throw Error("non-integral rank " + r.str());
            return int(r.num);
        }
    }
    return 0;
}

Rational c_constant(const ModelPtr& model, const BundleSpec& spec, int m) {
    int64_t x = chi(model, spec, m);
    if (x == 0) throw Error("chi vanishes at this level");
    return Rational(int64_t(model->nm(m)) * rank(model, spec), x);
}

}  // namespace qm
