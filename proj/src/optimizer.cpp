#include "qn/optimizer.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qn {

void adam_step(Vec& params, const Vec& grad, AdamState& state, const AdamConfig& cfg) {
    if (params.size() != grad.size() || params.size() != state.m.size())
        throw std::invalid_argument("adam_step: size mismatch");
    state.t += 1;
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        double g = grad[i];
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
        double mh = state.m[i] / c1;
        double vh = state.v[i] / c2;
        params[i] -= cfg.lr * mh / (std::sqrt(vh) + cfg.eps);
    }
}

namespace {

// Flatten layer gradients in the same order as Network::get_params.
void flatten_grads(const std::vector<LayerParams>& grads, Vec& out) {
    out.clear();
    for (const auto& g : grads) {
        out.insert(out.end(), g.W.data(), g.W.data() + g.W.size());
        out.insert(out.end(), g.s.data(), g.s.data() + g.s.size());
        out.insert(out.end(), g.w_q.begin(), g.w_q.end());
        out.insert(out.end(), g.theta.begin(), g.theta.end());
    }
}

double target_variance(const Mat& y) {
    double mean = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) mean += y.data()[i];
    mean /= static_cast<double>(y.size());
    double var = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        double d = y.data()[i] - mean;
        var += d * d;
    }
    return var / static_cast<double>(y.size());
}

Mat take_rows(const Mat& x, const std::vector<std::size_t>& idx,
              std::size_t from, std::size_t to) {
    Mat out(to - from, x.cols(), 0.0);
    for (std::size_t r = from; r < to; ++r)
        for (std::size_t c = 0; c < x.cols(); ++c) out(r - from, c) = x(idx[r], c);
    return out;
}

} // namespace

TrainReport train(Network& net, const Mat& x, const Mat& y, const TrainOptions& opt) {
    if (x.rows() != y.rows())
        throw std::invalid_argument("train: input/target row mismatch");
    if (x.rows() == 0) throw std::invalid_argument("train: empty training set");

    const double variance = target_variance(y);
    const std::size_t n = x.rows();
    const std::size_t bs = (opt.batch_size == 0 || opt.batch_size > n)
                               ? n : opt.batch_size;

    TrainReport report;
    for (int attempt = 0;; ++attempt) {
        Rng rng(Rng::mix(opt.seed, static_cast<std::uint64_t>(attempt)));
        net.init(rng, opt.init);

        AdamState state(net.param_count());
        Vec params = net.get_params();
        Vec flat_grad;
        auto grads = net.zero_grads();
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});

        Vec losses;
        losses.reserve(opt.epochs);
        bool stalled = false;

        for (std::size_t epoch = 0; epoch < opt.epochs; ++epoch) {
            if (bs < n) rng.shuffle(order);
            for (std::size_t start = 0; start < n; start += bs) {
                std::size_t stop = std::min(start + bs, n);
                Mat xb = take_rows(x, order, start, stop);
                Mat yb = take_rows(y, order, start, stop);
                Workspace ws;
                net.forward(xb, ws);
                net.backward(ws, opt.loss, yb, grads);
                flatten_grads(grads, flat_grad);
                adam_step(params, flat_grad, state, opt.adam);
                net.set_params(params);
            }
            double l = loss_value(opt.loss, net.forward(x), y);
            if (std::isnan(l))
                throw std::runtime_error("train: loss became NaN at epoch " +
                                         std::to_string(epoch + 1));
            losses.push_back(l);
            if (opt.allow_restarts && epoch + 1 == 5 && losses.size() >= 5 &&
                losses[4] > 0.95 * losses[0] && losses[0] > 10.0 * variance) {
                stalled = true;
                if (attempt < 5) break;
                report.restart_budget_exhausted = true;
                stalled = false; // budget spent: train this attempt to the end
            }
        }

        if (stalled) {
            report.restarts += 1;
            continue;
        }
        report.per_epoch_loss = std::move(losses);
        report.epochs_run = report.per_epoch_loss.size();
        report.final_train_loss =
            report.per_epoch_loss.empty() ? loss_value(opt.loss, net.forward(x), y)
                                          : report.per_epoch_loss.back();
        return report;
    }
}

} // namespace qn
