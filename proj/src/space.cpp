#include "qm/space.hpp"

#include <cctype>
#include <cmath>
#include <random>
#include <sstream>

#include <json.hpp>

namespace qm {

MultiIndex::MultiIndex(std::vector<int> e) : exps(std::move(e)) {
    for (int x : exps) {
        if (x < 0) throw Error("negative exponent");
        degree += x;
    }
}

static void gen_monomials(int n, int m, int pos, std::vector<int>& cur,
                          std::vector<std::vector<int>>& out) {
    if (pos == n - 1) {
        cur[pos] = m;
        out.push_back(cur);
        return;
    }
    for (int e = m; e >= 0; --e) {
        cur[pos] = e;
        gen_monomials(n, m - e, pos + 1, cur, out);
    }
}

std::vector<std::vector<int>> monomials(int n, int m) {
    std::vector<std::vector<int>> out;
    if (m < 0 || n <= 0) return out;
    std::vector<int> cur(n, 0);
    gen_monomials(n, m, 0, cur, out);
    return out;
}

// ---------------------------------------------------------------- Poly

void Poly::add(const std::vector<int>& key, cplx c) {
    if (c == cplx(0.0)) return;
    auto it = terms_.find(key);
    if (it == terms_.end()) {
        terms_.emplace(key, c);
    } else {
        it->second += c;
        if (it->second == cplx(0.0)) terms_.erase(it);
    }
}

Poly Poly::constant(int n, cplx c) {
    Poly p(n);
    p.add(std::vector<int>(2 * n, 0), c);
    return p;
}

Poly Poly::variable(int n, int i, bool conjugate) {
    Poly p(n);
    std::vector<int> k(2 * n, 0);
    k[(conjugate ? n : 0) + i] = 1;
    p.add(k, 1.0);
    return p;
}

Poly Poly::operator+(const Poly& o) const {
    Poly r = *this;
    for (auto& [k, c] : o.terms_) r.add(k, c);
    return r;
}

Poly Poly::operator-(const Poly& o) const { return *this + o.scaled(-1.0); }

Poly Poly::operator*(const Poly& o) const {
    Poly r(n_);
    for (auto& [k1, c1] : terms_)
        for (auto& [k2, c2] : o.terms_) {
            std::vector<int> k(k1.size());
            for (size_t i = 0; i < k.size(); ++i) k[i] = k1[i] + k2[i];
            r.add(k, c1 * c2);
        }
    return r;
}

Poly Poly::scaled(cplx c) const {
    Poly r(n_);
    for (auto& [k, v] : terms_) r.add(k, v * c);
    return r;
}

Poly Poly::pow(int e) const {
    Poly r = constant(n_, 1.0);
    for (int i = 0; i < e; ++i) r = r * *this;
    return r;
}

bool Poly::is_zero(double tol) const {
    for (auto& [k, c] : terms_)
        if (std::abs(c) > tol) return false;
    return true;
}

bool Poly::holomorphic() const {
    for (auto& [k, c] : terms_)
        for (int i = n_; i < 2 * n_; ++i)
            if (k[i] != 0) return false;
    return true;
}

static std::pair<int, int> bideg(const std::vector<int>& k, int n) {
    int a = 0, b = 0;
    for (int i = 0; i < n; ++i) a += k[i];
    for (int i = n; i < 2 * n; ++i) b += k[i];
    return {a, b};
}

bool Poly::homogeneous() const {
    if (terms_.empty()) return true;
    auto d0 = bideg(terms_.begin()->first, n_);
    for (auto& [k, c] : terms_)
        if (bideg(k, n_) != d0) return false;
    return true;
}

int Poly::hol_degree() const { return terms_.empty() ? 0 : bideg(terms_.begin()->first, n_).first; }
int Poly::anti_degree() const { return terms_.empty() ? 0 : bideg(terms_.begin()->first, n_).second; }

cplx Poly::eval(const Vec& z) const {
    cplx s = 0.0;
    for (auto& [k, c] : terms_) {
        cplx t = c;
        for (int i = 0; i < n_; ++i) {
            for (int e = 0; e < k[i]; ++e) t *= z(i);
            for (int e = 0; e < k[n_ + i]; ++e) t *= std::conj(z(i));
        }
        s += t;
    }
    return s;
}

std::string Poly::str() const {
    std::ostringstream os;
    bool first = true;
    for (auto& [k, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)";
        for (int i = 0; i < n_; ++i)
            if (k[i]) os << "*z" << i + 1 << (k[i] > 1 ? "^" + std::to_string(k[i]) : "");
        for (int i = 0; i < n_; ++i)
            if (k[n_ + i])
                os << "*conj(z" << i + 1 << ")"
                   << (k[n_ + i] > 1 ? "^" + std::to_string(k[n_ + i]) : "");
    }
    if (first) os << "0";
    return os.str();
}

// ---------------------------------------------------------------- parser

namespace {

class Parser {
public:
    Parser(const std::string& s, int n) : s_(s), n_(n) {}

    Poly parse() {
        Poly p = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
        return p;
    }

private:
    const std::string& s_;
    int n_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("polynomial parse error at column " + std::to_string(pos_ + 1) + ": " +
                         msg + " in \"" + s_ + "\"");
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace((unsigned char)s_[pos_])) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Poly expr() {
        skip();
        Poly acc(n_);
        bool neg = false;
        if (eat('-'))
            neg = true;
        else
            eat('+');
        Poly t = term();
        acc = neg ? t.scaled(-1.0) : t;
        for (;;) {
            if (eat('+'))
                acc = acc + term();
            else if (eat('-'))
                acc = acc - term();
            else
                break;
        }
        return acc;
    }

    Poly term() {
        Poly p = factor();
        for (;;) {
            skip();
            if (eat('*')) {
                p = p * factor();
            } else if (pos_ < s_.size() &&
                       (s_[pos_] == 'z' || s_[pos_] == '(' || s_.compare(pos_, 4, "conj") == 0)) {
                p = p * factor();  // implicit product such as 2z1 or 3(z1+z2)
            } else {
                break;
            }
        }
        return p;
    }

    Poly factor() {
        Poly base = primary();
        if (eat('^')) {
            skip();
            size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_])) ++pos_;
            if (start == pos_) fail("expected integer exponent");
            base = base.pow(std::stoi(s_.substr(start, pos_ - start)));
        }
        return base;
    }

    int var_index() {
        if (!eat('z')) fail("expected variable z<k>");
        size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_])) ++pos_;
        if (start == pos_) fail("expected variable index");
        int k = std::stoi(s_.substr(start, pos_ - start));
        if (k < 1 || k > n_) fail("variable z" + std::to_string(k) + " out of range 1.." + std::to_string(n_));
        return k - 1;
    }

    Poly primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            Poly p = expr();
            if (!eat(')')) fail("expected ')'");
            return p;
        }
        if (s_.compare(pos_, 4, "conj") == 0) {
            pos_ += 4;
            if (!eat('(')) fail("expected '(' after conj");
            int k = var_index();
            if (!eat(')')) fail("expected ')'");
            return Poly::variable(n_, k, true);
        }
        if (c == 'z') return Poly::variable(n_, var_index(), false);
        if (c == 'i') {
            ++pos_;
            return Poly::constant(n_, cplx(0.0, 1.0));
        }
        if (std::isdigit((unsigned char)c) || c == '.') {
            size_t start = pos_;
            while (pos_ < s_.size() && (std::isdigit((unsigned char)s_[pos_]) || s_[pos_] == '.')) ++pos_;
            if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
                size_t save = pos_;
                ++pos_;
                if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
                if (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_])) {
                    while (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_])) ++pos_;
                } else {
                    pos_ = save;
                }
            }
            double v;
            try {
                v = std::stod(s_.substr(start, pos_ - start));
            } catch (...) {
                fail("bad number");
            }
            if (pos_ < s_.size() && s_[pos_] == 'i') {
                ++pos_;
                return Poly::constant(n_, cplx(0.0, v));
            }
            return Poly::constant(n_, v);
        }
        fail("unexpected character '" + std::string(1, c) + "'");
    }
};

}  // namespace

Poly parse_poly(const std::string& src, int n) { return Parser(src, n).parse(); }

std::string preset_name(Preset p) {
    switch (p) {
        case Preset::ProjectiveSpace: return "projective";
        case Preset::Segre11: return "segre11";
        case Preset::VeroneseConic: return "veronese_conic";
        default: return "custom";
    }
}

// ---------------------------------------------------------------- levels

Mat FockLevel::onbNormalized() const {
    if (full) return Mat::Identity(ambient(), ambient());
    return onb;
}

Mat FockLevel::onbChange() const {
    Mat c = onbNormalized();
    for (int i = 0; i < ambient(); ++i) c.row(i) /= std::sqrt(fockGram(i));
    return c;
}

Vec FockLevel::monomial_values(const Vec& z) const {
    Vec v(ambient());
    double lm = log_factorial(m);
    for (int i = 0; i < ambient(); ++i) {
        const auto& a = basis[i];
        double logmag = 0.5 * lm;
        double phase = 0.0;
        bool zero = false;
        for (int j = 0; j < nvars; ++j) {
            if (a[j] == 0) continue;
            double r = std::abs(z(j));
            if (r == 0.0) {
                zero = true;
                break;
            }
            logmag += a[j] * std::log(r) - 0.5 * log_factorial(a[j]);
            phase += a[j] * std::arg(z(j));
        }
        v(i) = zero ? cplx(0.0) : std::polar(std::exp(logmag), phase);
    }
    return v;
}

Vec FockLevel::values(const Vec& z) const {
    Vec e = monomial_values(z);
    if (full) return e;
    return onb.transpose() * e;
}

Mat FockLevel::to_onb(const Mat& normalized) const {
    if (full) return normalized;
    return onb.adjoint() * normalized;
}

ModelPtr SpaceModel::from_polys(int n, std::vector<Poly> ideal, Preset preset, int dim,
                                Sampler sampler) {
    if (n < 1) throw Error("model needs n >= 1");
    for (auto& g : ideal) {
        if (g.nvars() != n) throw Error("generator has wrong variable count");
        if (!g.holomorphic()) throw ParseError("ideal generator must be holomorphic: " + g.str());
        if (!g.homogeneous()) throw ParseError("ideal generator is not homogeneous: " + g.str());
        if (g.is_zero()) throw ParseError("zero ideal generator");
    }
    auto mdl = std::shared_ptr<SpaceModel>(new SpaceModel());
    mdl->n_ = n;
    mdl->ideal_ = std::move(ideal);
    mdl->preset_ = preset;
    mdl->sampler_ = std::move(sampler);
    if (dim >= 0) {
        mdl->d_ = dim;
    } else {
        mdl->d_ = fitted_degree(mdl->hilbert_function(10));
    }
    return mdl;
}

ModelPtr SpaceModel::projective(int n) {
    return from_polys(n, {}, Preset::ProjectiveSpace, n - 1, nullptr);
}

ModelPtr SpaceModel::segre11() {
    return from_polys(4, {parse_poly("z1*z4 - z2*z3", 4)}, Preset::Segre11, 2, nullptr);
}

ModelPtr SpaceModel::veronese_conic() {
    return from_polys(3, {parse_poly("z2^2 - 2*z1*z3", 3)}, Preset::VeroneseConic, 1, nullptr);
}

ModelPtr SpaceModel::custom(int n, const std::vector<std::string>& ideal, int dim, Sampler sampler) {
    std::vector<Poly> gens;
    for (auto& s : ideal) gens.push_back(parse_poly(s, n));
    return from_polys(n, std::move(gens), Preset::Custom, dim, std::move(sampler));
}

LevelPtr SpaceModel::level(int m) const {
    if (m < 0) throw Error("negative level");
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = levels_.find(m);
        if (it != levels_.end()) return it->second;
    }
    LevelPtr lv = build_level(m);
    std::lock_guard<std::mutex> lk(mu_);
    return levels_.emplace(m, lv).first->second;
}

LevelPtr SpaceModel::build_level(int m) const {
    auto lv = std::make_shared<FockLevel>();
    lv->m = m;
    lv->nvars = n_;
    lv->basis = monomials(n_, m);
    const int D = int(lv->basis.size());
    lv->fockGram.resize(D);
    for (int i = 0; i < D; ++i) {
        lv->index.emplace(lv->basis[i], i);
        double l = -log_factorial(m);
        for (int e : lv->basis[i]) l += log_factorial(e);
        lv->fockGram(i) = std::exp(l);
    }
    // Ideal slice: generator times normalized monomial, in normalized coordinates.
    std::vector<Vec> cols;
    for (auto& g : ideal_) {
        int e = g.hol_degree();
        if (e > m) continue;
        for (auto& beta : monomials(n_, m - e)) {
            Vec col = Vec::Zero(D);
            double lb = log_factorial(m - e);
            for (int x : beta) lb -= log_factorial(x);
            for (auto& [key, c] : g.terms()) {
                std::vector<int> tgt(n_);
                double lt = -log_factorial(m);
                for (int j = 0; j < n_; ++j) {
                    tgt[j] = beta[j] + key[j];
                    lt += log_factorial(tgt[j]);
                }
                col(lv->index.at(tgt)) += c * std::exp(0.5 * (lb + lt));
            }
            cols.push_back(col);
        }
    }
    if (cols.empty()) {
        lv->full = true;
        lv->dim = D;
    } else {
        Mat b(D, int(cols.size()));
        for (size_t j = 0; j < cols.size(); ++j) b.col(j) = cols[j];
        SpanSplit sp = split_span(b, D, 1e-10);
        if (sp.rank == 0) {
            lv->full = true;
            lv->dim = D;
        } else {
            lv->full = false;
            lv->onb = sp.complement;
            lv->dim = int(sp.complement.cols());
        }
    }
    return lv;
}

std::vector<int> SpaceModel::hilbert_function(int mMax) const {
    std::vector<int> out;
    for (int m = 0; m <= mMax; ++m) out.push_back(level(m)->dim);
    return out;
}

std::shared_ptr<const Mat> SpaceModel::product_map(int k, int m) const {
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = products_.find({k, m});
        if (it != products_.end()) return it->second;
    }
    LevelPtr lk_ = level(k), lm = level(m), lkm = level(k + m);
    Mat ck = lk_->onbNormalized(), cm = lm->onbNormalized();
    const int nk = lk_->dim, nmm = lm->dim;
    Mat y = Mat::Zero(lkm->ambient(), nk * nmm);
    const double lfk = log_factorial(k), lfm = log_factorial(m), lfkm = log_factorial(k + m);
    std::vector<int> tgt(n_);
    for (int i = 0; i < lk_->ambient(); ++i) {
        const auto& a = lk_->basis[i];
        for (int j = 0; j < lm->ambient(); ++j) {
            const auto& b = lm->basis[j];
            double l = lfk + lfm - lfkm;
            for (int t = 0; t < n_; ++t) {
                tgt[t] = a[t] + b[t];
                l += log_factorial(tgt[t]) - log_factorial(a[t]) - log_factorial(b[t]);
            }
            double mu = std::exp(0.5 * l);
            int row = lkm->index.at(tgt);
            if (lk_->full && lm->full) {
                y(row, i * nmm + j) += mu;
            } else {
                for (int p = 0; p < nk; ++p) {
                    cplx cp = ck(i, p) * mu;
                    if (cp == cplx(0.0)) continue;
                    y.row(row).segment(p * nmm, nmm) += cp * cm.row(j);
                }
            }
        }
    }
    auto w = std::make_shared<Mat>(lkm->to_onb(y));
    std::lock_guard<std::mutex> lk(mu_);
    return products_.emplace(std::make_pair(k, m), w).first->second;
}

std::shared_ptr<const Mat> SpaceModel::shift(int alpha, int m) const {
    if (alpha < 0 || alpha >= n_) throw Error("shift index out of range");
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = shifts_.find({alpha, m});
        if (it != shifts_.end()) return it->second;
    }
    LevelPtr a = level(m), b = level(m + 1);
    Mat mult = Mat::Zero(b->ambient(), a->ambient());
    for (int i = 0; i < a->ambient(); ++i) {
        std::vector<int> t = a->basis[i];
        double c = std::sqrt(double(t[alpha] + 1) / double(m + 1));
        t[alpha] += 1;
        mult(b->index.at(t), i) = c;
    }
    Mat s = b->to_onb(mult * a->onbNormalized());
    auto sp = std::make_shared<Mat>(std::move(s));
    std::lock_guard<std::mutex> lk(mu_);
    return shifts_.emplace(std::make_pair(alpha, m), sp).first->second;
}

// ---------------------------------------------------------------- sampling

Vec segre_point(const Vec& a, const Vec& c) {
    Vec z(4);
    z << a(0) * c(0), a(0) * c(1), a(1) * c(0), a(1) * c(1);
    return z;
}

Vec veronese_point(cplx u, cplx v) {
    Vec z(3);
    z << u * u, std::sqrt(2.0) * u * v, v * v;
    return z;
}

static Vec unit_gaussian(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vec v(n);
    for (int i = 0; i < n; ++i) {
        double re = g(rng);
        double im = g(rng);
        v(i) = cplx(re, im);
    }
    return v / v.norm();
}

bool SpaceModel::has_sampler() const {
    return sampler_ != nullptr || preset_ != Preset::Custom || ideal_.empty();
}

std::vector<Vec> SpaceModel::sample_boundary(int count, uint64_t seed) const {
    if (sampler_) return sampler_(count, seed);
    std::mt19937_64 rng(seed);
    std::vector<Vec> out;
    out.reserve(count);
    Preset p = preset_;
    if (p == Preset::Custom && ideal_.empty()) p = Preset::ProjectiveSpace;
    for (int i = 0; i < count; ++i) {
        switch (p) {
            case Preset::ProjectiveSpace: out.push_back(unit_gaussian(rng, n_)); break;
            case Preset::Segre11: {
                Vec a = unit_gaussian(rng, 2);
                Vec c = unit_gaussian(rng, 2);
                out.push_back(segre_point(a, c));
                break;
            }
            case Preset::VeroneseConic: {
                Vec uv = unit_gaussian(rng, 2);
                out.push_back(veronese_point(uv(0), uv(1)));
                break;
            }
            default:
                throw NoSamplerAvailable("custom model has no boundary parametrization");
        }
    }
    return out;
}

double SpaceModel::ideal_residual(const Vec& z) const {
    double r = 0.0;
    for (auto& g : ideal_) r = std::max(r, std::abs(g.eval(z)));
    return r;
}

double SpaceModel::boundary_residual(const Vec& z) const {
    return std::max(std::abs(z.norm() - 1.0), ideal_residual(z));
}

// ---------------------------------------------------------------- config

int fitted_degree(const std::vector<int>& seq) {
    if (seq.size() < 3) return 0;
    std::vector<int64_t> d(seq.begin(), seq.end());
    // Skip the first two entries, which may precede regularity.
    for (int deg = 0; deg + 1 < int(seq.size()) - 2; ++deg) {
        std::vector<int64_t> nd;
        for (size_t i = 0; i + 1 < d.size(); ++i) nd.push_back(d[i + 1] - d[i]);
        d = nd;
        bool zero = true;
        for (size_t i = 2; i < d.size(); ++i)
            if (d[i] != 0) zero = false;
        if (zero) return deg;
    }
    return int(seq.size()) - 3;
}

ModelPtr model_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text, nullptr, true, true);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("model file: ") + e.what());
    }
    std::string preset = j.value("preset", std::string("custom"));
    if (preset == "segre11") return SpaceModel::segre11();
    if (preset == "veronese_conic" || preset == "veronese") return SpaceModel::veronese_conic();
    if (!j.contains("n")) throw ParseError("model file: missing \"n\"");
    int n = j.at("n").get<int>();
    std::vector<std::string> ideal;
    if (j.contains("ideal")) ideal = j.at("ideal").get<std::vector<std::string>>();
    if (preset == "projective" && ideal.empty()) return SpaceModel::projective(n);
    int dim = j.value("dim", -1);
    return SpaceModel::custom(n, ideal, dim);
}

ModelPtr model_from_preset(const std::string& tag) {
    if (tag == "segre11") return SpaceModel::segre11();
    if (tag == "veronese" || tag == "veronese_conic") return SpaceModel::veronese_conic();
    if (tag.size() > 2 && tag.compare(0, 2, "cp") == 0) {
        int d = 0;
        try {
            d = std::stoi(tag.substr(2));
        } catch (...) {
            throw ParseError("unknown preset '" + tag + "'");
        }
        if (d < 1) throw ParseError("unknown preset '" + tag + "'");
        return SpaceModel::projective(d + 1);
    }
    throw ParseError("unknown preset '" + tag + "'");
}

}  // namespace qm
