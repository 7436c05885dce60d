#include "qn/network.hpp"

#include "qn/activation.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qn {

namespace {

bool has_quad(FormClass k) { return k != FormClass::affine; }

double sign_at(FormClass kind, std::size_t i, std::size_t in_dim) {
    if (kind == FormClass::hyperbolic && i + 1 == in_dim) return -1.0;
    return 1.0;
}

void check_kind(FormClass k) {
    switch (k) {
        case FormClass::affine:
        case FormClass::elliptic:
        case FormClass::hyperbolic:
        case FormClass::parabolic:
            return;
        default:
            throw std::invalid_argument("LayerSpec: unsupported layer kind");
    }
}

void ensure_finite(const Mat& m, std::size_t layer, const char* what) {
    for (std::size_t i = 0; i < m.size(); ++i)
        if (!std::isfinite(m.data()[i])) {
            std::ostringstream os;
            os << "network: nonfinite " << what << " at layer " << layer;
            throw std::runtime_error(os.str());
        }
}

} // namespace

const char* to_string(Activation a) {
    return a == Activation::sigmoid ? "sigmoid" : "identity";
}

const char* to_string(LossKind k) {
    switch (k) {
        case LossKind::mse: return "mse";
        case LossKind::mae: return "mae";
        case LossKind::bce: return "bce";
    }
    return "unknown";
}

Network::Network(std::vector<LayerSpec> specs) : specs_(std::move(specs)) {
    if (specs_.empty()) throw std::invalid_argument("Network: needs at least one layer");
    for (std::size_t l = 0; l < specs_.size(); ++l) {
        const auto& sp = specs_[l];
        check_kind(sp.kind);
        if (sp.in_dim == 0 || sp.out_dim == 0)
            throw std::invalid_argument("Network: zero layer dimension");
        if (l > 0 && specs_[l - 1].out_dim != sp.in_dim)
            throw std::invalid_argument("Network: consecutive layer dimensions do not chain");
    }
    params_.resize(specs_.size());
    for (std::size_t l = 0; l < specs_.size(); ++l) {
        const auto& sp = specs_[l];
        params_[l].W = Mat(sp.in_dim, sp.out_dim, 0.0);
        params_[l].theta.assign(sp.out_dim, 0.0);
        if (has_quad(sp.kind)) {
            params_[l].s = Mat(sp.in_dim, sp.out_dim, 0.0);
            params_[l].w_q.assign(sp.out_dim, 0.0);
        }
    }
}

void Network::init(Rng& rng, const InitConfig& cfg) {
    auto draw = [&]() {
        if (cfg.scheme == InitScheme::constant_one) return 1.0;
        return rng.gaussian(cfg.mean, cfg.stddev);
    };
    for (std::size_t l = 0; l < specs_.size(); ++l) {
        const auto& sp = specs_[l];
        auto& p = params_[l];
        for (std::size_t i = 0; i < p.W.size(); ++i) p.W.data()[i] = draw();
        if (has_quad(sp.kind)) {
            for (std::size_t i = 0; i < p.s.size(); ++i) p.s.data()[i] = draw();
            for (auto& v : p.w_q) v = draw();
            if (sp.kind == FormClass::parabolic)
                for (std::size_t j = 0; j < sp.out_dim; ++j) p.s(sp.in_dim - 1, j) = 0.0;
        }
        p.theta.assign(sp.out_dim, 0.0);
    }
}

Mat Network::forward(const Mat& x, Workspace& ws) const {
    if (x.cols() != in_dim())
        throw std::invalid_argument("Network::forward: input width mismatch");
    const std::size_t L = specs_.size();
    ws.inputs.assign(L, Mat());
    ws.pre.assign(L, Mat());
    ws.post.assign(L, Mat());

    Mat cur = x;
    for (std::size_t l = 0; l < L; ++l) {
        const auto& sp = specs_[l];
        const auto& p = params_[l];
        const std::size_t B = cur.rows();
        Mat z(B, sp.out_dim, 0.0);
        for (std::size_t b = 0; b < B; ++b) {
            for (std::size_t j = 0; j < sp.out_dim; ++j) {
                double acc = p.theta[j];
                for (std::size_t i = 0; i < sp.in_dim; ++i) acc += p.W(i, j) * cur(b, i);
                if (has_quad(sp.kind)) {
                    double q = 0.0;
                    for (std::size_t i = 0; i < sp.in_dim; ++i) {
                        double si = p.s(i, j);
                        double xi = cur(b, i);
                        q += sign_at(sp.kind, i, sp.in_dim) * si * si * xi * xi;
                    }
                    acc += p.w_q[j] * q;
                }
                z(b, j) = acc;
            }
        }
        ensure_finite(z, l, "pre-activation");
        Mat a = z;
        if (sp.activation == Activation::sigmoid)
            for (std::size_t i = 0; i < a.size(); ++i) a.data()[i] = sigmoid(a.data()[i]);
        ws.inputs[l] = std::move(cur);
        ws.pre[l] = std::move(z);
        ws.post[l] = a;
        cur = std::move(a);
    }
    return cur;
}

Mat Network::forward(const Mat& x) const {
    Workspace ws;
    return forward(x, ws);
}

Vec Network::forward_one(const Vec& x) const {
    Mat m(1, x.size());
    for (std::size_t i = 0; i < x.size(); ++i) m(0, i) = x[i];
    Mat out = forward(m);
    Vec v(out.cols());
    for (std::size_t j = 0; j < out.cols(); ++j) v[j] = out(0, j);
    return v;
}

std::vector<LayerParams> Network::zero_grads() const {
    std::vector<LayerParams> g(specs_.size());
    for (std::size_t l = 0; l < specs_.size(); ++l) {
        const auto& sp = specs_[l];
        g[l].W = Mat(sp.in_dim, sp.out_dim, 0.0);
        g[l].theta.assign(sp.out_dim, 0.0);
        if (has_quad(sp.kind)) {
            g[l].s = Mat(sp.in_dim, sp.out_dim, 0.0);
            g[l].w_q.assign(sp.out_dim, 0.0);
        }
    }
    return g;
}

void Network::backward(const Workspace& ws, LossKind loss, const Mat& targets,
                       std::vector<LayerParams>& grads) const {
    const std::size_t L = specs_.size();
    if (ws.post.size() != L)
        throw std::invalid_argument("Network::backward: workspace does not match network");
    const Mat& out = ws.post.back();
    if (targets.rows() != out.rows() || targets.cols() != out.cols())
        throw std::invalid_argument("Network::backward: target shape mismatch");
    const double B = static_cast<double>(out.rows());

    // dL/d(post) of the output layer, or dL/d(pre) for the fused bce+sigmoid path.
    bool fused = (loss == LossKind::bce &&
                  specs_.back().activation == Activation::sigmoid);
    Mat delta(out.rows(), out.cols(), 0.0);
    for (std::size_t b = 0; b < out.rows(); ++b) {
        for (std::size_t j = 0; j < out.cols(); ++j) {
            double p = out(b, j), y = targets(b, j);
            double d;
            switch (loss) {
                case LossKind::mse: d = 2.0 * (p - y) / B; break;
                case LossKind::mae: d = (p > y ? 1.0 : (p < y ? -1.0 : 0.0)) / B; break;
                case LossKind::bce:
                    if (fused) { d = (p - y) / B; break; }
                    {
                        double pc = std::min(std::max(p, 1e-12), 1.0 - 1e-12);
                        d = (pc - y) / (pc * (1.0 - pc)) / B;
                    }
                    break;
                default: d = 0.0; break;
            }
            delta(b, j) = d;
        }
    }

    for (std::size_t l = L; l-- > 0;) {
        const auto& sp = specs_[l];
        const auto& p = params_[l];
        const Mat& xin = ws.inputs[l];
        const Mat& a = ws.post[l];
        const std::size_t rows = delta.rows();

        Mat dz(rows, sp.out_dim, 0.0);
        bool skip_act = (l + 1 == L) && fused;
        for (std::size_t b = 0; b < rows; ++b)
            for (std::size_t j = 0; j < sp.out_dim; ++j) {
                double d = delta(b, j);
                if (!skip_act && sp.activation == Activation::sigmoid) {
                    double av = a(b, j);
                    d *= av * (1.0 - av);
                }
                dz(b, j) = d;
            }
        ensure_finite(dz, l, "gradient");

        auto& g = grads[l];
        for (std::size_t j = 0; j < sp.out_dim; ++j) {
            double dth = 0.0;
            for (std::size_t b = 0; b < rows; ++b) dth += dz(b, j);
            g.theta[j] = dth;
        }
        for (std::size_t i = 0; i < sp.in_dim; ++i)
            for (std::size_t j = 0; j < sp.out_dim; ++j) {
                double acc = 0.0;
                for (std::size_t b = 0; b < rows; ++b) acc += xin(b, i) * dz(b, j);
                g.W(i, j) = acc;
            }
        if (has_quad(sp.kind)) {
            for (std::size_t j = 0; j < sp.out_dim; ++j) {
                double dwq = 0.0;
                for (std::size_t b = 0; b < rows; ++b) {
                    double q = 0.0;
                    for (std::size_t i = 0; i < sp.in_dim; ++i) {
                        double si = p.s(i, j), xi = xin(b, i);
                        q += sign_at(sp.kind, i, sp.in_dim) * si * si * xi * xi;
                    }
                    dwq += q * dz(b, j);
                }
                g.w_q[j] = dwq;
            }
            for (std::size_t i = 0; i < sp.in_dim; ++i)
                for (std::size_t j = 0; j < sp.out_dim; ++j) {
                    double acc = 0.0;
                    for (std::size_t b = 0; b < rows; ++b)
                        acc += xin(b, i) * xin(b, i) * dz(b, j);
                    g.s(i, j) = 2.0 * p.w_q[j] * sign_at(sp.kind, i, sp.in_dim) *
                                p.s(i, j) * acc;
                }
            if (sp.kind == FormClass::parabolic)
                for (std::size_t j = 0; j < sp.out_dim; ++j) g.s(sp.in_dim - 1, j) = 0.0;
        }

        if (l > 0) {
            Mat dx(rows, sp.in_dim, 0.0);
            for (std::size_t b = 0; b < rows; ++b)
                for (std::size_t i = 0; i < sp.in_dim; ++i) {
                    double acc = 0.0;
                    for (std::size_t j = 0; j < sp.out_dim; ++j) {
                        double term = p.W(i, j);
                        if (has_quad(sp.kind)) {
                            double si = p.s(i, j);
                            term += p.w_q[j] * sign_at(sp.kind, i, sp.in_dim) *
                                    2.0 * si * si * xin(b, i);
                        }
                        acc += term * dz(b, j);
                    }
                    dx(b, i) = acc;
                }
            delta = std::move(dx);
        }
    }
}

std::size_t Network::param_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < specs_.size(); ++l) {
        const auto& p = params_[l];
        n += p.W.size() + p.s.size() + p.w_q.size() + p.theta.size();
    }
    return n;
}

Vec Network::get_params() const {
    Vec flat;
    flat.reserve(param_count());
    for (const auto& p : params_) {
        flat.insert(flat.end(), p.W.data(), p.W.data() + p.W.size());
        flat.insert(flat.end(), p.s.data(), p.s.data() + p.s.size());
        flat.insert(flat.end(), p.w_q.begin(), p.w_q.end());
        flat.insert(flat.end(), p.theta.begin(), p.theta.end());
    }
    return flat;
}

void Network::set_params(const Vec& flat) {
    if (flat.size() != param_count())
        throw std::invalid_argument("Network::set_params: size mismatch");
    std::size_t k = 0;
    for (auto& p : params_) {
        for (std::size_t i = 0; i < p.W.size(); ++i) p.W.data()[i] = flat[k++];
        for (std::size_t i = 0; i < p.s.size(); ++i) p.s.data()[i] = flat[k++];
        for (auto& v : p.w_q) v = flat[k++];
        for (auto& v : p.theta) v = flat[k++];
    }
}

namespace {

FormClass kind_from_string(const std::string& s) {
    if (s == "affine") return FormClass::affine;
    if (s == "elliptic") return FormClass::elliptic;
    if (s == "hyperbolic") return FormClass::hyperbolic;
    if (s == "parabolic") return FormClass::parabolic;
    throw std::invalid_argument("network json: unknown layer kind '" + s + "'");
}

Activation act_from_string(const std::string& s) {
    if (s == "identity") return Activation::identity;
    if (s == "sigmoid") return Activation::sigmoid;
    throw std::invalid_argument("network json: unknown activation '" + s + "'");
}

} // namespace

std::string Network::to_json(int indent) const {
    nlohmann::json j;
    j["format_version"] = 1;
    j["layers"] = nlohmann::json::array();
    for (std::size_t l = 0; l < specs_.size(); ++l) {
        const auto& sp = specs_[l];
        const auto& p = params_[l];
        nlohmann::json jl;
        jl["in_dim"] = sp.in_dim;
        jl["out_dim"] = sp.out_dim;
        jl["kind"] = to_string(sp.kind);
        jl["activation"] = to_string(sp.activation);
        jl["W"] = std::vector<double>(p.W.data(), p.W.data() + p.W.size());
        if (has_quad(sp.kind)) {
            jl["s"] = std::vector<double>(p.s.data(), p.s.data() + p.s.size());
            jl["w_q"] = p.w_q;
        }
        jl["theta"] = p.theta;
        j["layers"].push_back(jl);
    }
    return indent >= 0 ? j.dump(indent) : j.dump();
}

Network Network::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (!j.contains("format_version") || !j["format_version"].is_number_integer())
        throw std::invalid_argument("network json: missing format_version");
    int v = j["format_version"].get<int>();
    if (v != 1)
        throw std::invalid_argument("network json: unsupported format_version " +
                                    std::to_string(v));
    std::vector<LayerSpec> specs;
    for (const auto& jl : j.at("layers")) {
        LayerSpec sp;
        sp.in_dim = jl.at("in_dim").get<std::size_t>();
        sp.out_dim = jl.at("out_dim").get<std::size_t>();
        sp.kind = kind_from_string(jl.at("kind").get<std::string>());
        sp.activation = act_from_string(jl.at("activation").get<std::string>());
        specs.push_back(sp);
    }
    Network net(std::move(specs));
    auto& ps = net.params();
    const auto& layers = j.at("layers");
    for (std::size_t l = 0; l < ps.size(); ++l) {
        const auto& jl = layers[l];
        auto read_into = [&](const char* key, double* dst, std::size_t want) {
            auto v2 = jl.at(key).get<std::vector<double>>();
            if (v2.size() != want)
                throw std::invalid_argument(std::string("network json: bad length for ") + key);
            std::copy(v2.begin(), v2.end(), dst);
        };
        read_into("W", ps[l].W.data(), ps[l].W.size());
        if (!ps[l].w_q.empty()) {
            read_into("s", ps[l].s.data(), ps[l].s.size());
            auto wq = jl.at("w_q").get<std::vector<double>>();
            if (wq.size() != ps[l].w_q.size())
                throw std::invalid_argument("network json: bad length for w_q");
            ps[l].w_q = wq;
        }
        auto th = jl.at("theta").get<std::vector<double>>();
        if (th.size() != ps[l].theta.size())
            throw std::invalid_argument("network json: bad length for theta");
        ps[l].theta = th;
    }
    return net;
}

Network Network::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open network file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

void Network::save_json(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write network file: " + path);
    out << to_json(2) << "\n";
}

namespace {

void check_same_shape(const Mat& a, const Mat& b, const char* who) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument(std::string(who) + ": shape mismatch");
    if (a.rows() == 0) throw std::invalid_argument(std::string(who) + ": empty input");
}

} // namespace

double mse(const Mat& pred, const Mat& target) {
    check_same_shape(pred, target, "mse");
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        double d = pred.data()[i] - target.data()[i];
        acc += d * d;
    }
    return acc / static_cast<double>(pred.size());
}

double mae(const Mat& pred, const Mat& target) {
    check_same_shape(pred, target, "mae");
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i)
        acc += std::abs(pred.data()[i] - target.data()[i]);
    return acc / static_cast<double>(pred.size());
}

double bce(const Mat& pred, const Mat& target) {
    check_same_shape(pred, target, "bce");
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        double p = std::min(std::max(pred.data()[i], 1e-12), 1.0 - 1e-12);
        double y = target.data()[i];
        acc -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
    }
    return acc / static_cast<double>(pred.size());
}

double loss_value(LossKind k, const Mat& pred, const Mat& target) {
    switch (k) {
        case LossKind::mse: return mse(pred, target);
        case LossKind::mae: return mae(pred, target);
        case LossKind::bce: return bce(pred, target);
    }
    throw std::invalid_argument("loss_value: unknown loss");
}

double accuracy(const Mat& pred, const Mat& target) {
    check_same_shape(pred, target, "accuracy");
    std::size_t hit = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        bool a = pred.data()[i] >= 0.5;
        bool b = target.data()[i] >= 0.5;
        if (a == b) ++hit;
    }
    return static_cast<double>(hit) / static_cast<double>(pred.size());
}

} // namespace qn
