#pragma once

#include "qn/network.hpp"

#include <cstdint>
#include <optional>

namespace qn {

/// Adam moment buffers over the flattened parameter vector.
struct AdamState {
    Vec m;
    Vec v;
    long t = 0;

    explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/**
 * One bias-corrected Adam update, in place:
 *   m <- b1 m + (1-b1) g;  v <- b2 v + (1-b2) g^2;  t <- t+1
 *   p <- p - lr * m_hat / (sqrt(v_hat) + eps)
 */
void adam_step(Vec& params, const Vec& grad, AdamState& state, const AdamConfig& cfg);

struct TrainOptions {
    std::size_t epochs = 100;
    LossKind loss = LossKind::mse;
    std::uint64_t seed = 0;
    /// 0 means full batch; otherwise minibatches of this size with a
    /// fresh shuffle each epoch.
    std::size_t batch_size = 0;
    InitConfig init;
    AdamConfig adam;
    /**
     * When true, training is abandoned and re-seeded if the epoch-5 training
     * loss still exceeds 0.95x the epoch-1 loss while the epoch-1 loss sits
     * above 10x the target variance (a stalled bad draw).  At most 5 such
     * restarts; a sixth stall trains to completion and is flagged.
     */
    bool allow_restarts = true;
};

struct TrainReport {
    Vec per_epoch_loss;          // training-set loss after each epoch
    std::size_t epochs_run = 0;
    int restarts = 0;
    bool restart_budget_exhausted = false;
    double final_train_loss = 0.0;
};

/**
 * Initialise `net` from options (seeded) and run Adam.  The per-epoch loss
 * is the full training-set loss evaluated after the epoch's updates.
 * Deterministic: the same seed gives the same report and final weights.
 */
TrainReport train(Network& net, const Mat& x, const Mat& y, const TrainOptions& opt);

} // namespace qn
