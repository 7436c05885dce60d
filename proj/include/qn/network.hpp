#pragma once

#include "qn/decision.hpp"
#include "qn/linalg.hpp"
#include "qn/rng.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qn {

enum class Activation { identity, sigmoid };

const char* to_string(Activation a);

/**
 * One quadratic-neuron layer.  Neuron j computes
 *   z_j = sum_i W[i][j] x_i + w_q[j] * sum_i g_i s[i][j]^2 x_i^2 + theta[j]
 * where the sign pattern g depends on the kind:
 *   affine      - no quadratic term at all
 *   elliptic    - g_i = +1
 *   hyperbolic  - g_i = +1 except g_{in_dim} = -1
 *   parabolic   - g_i = +1 with the s coefficient at i = in_dim pinned to 0
 * so the per-neuron decision function has the matching eigenvalue signs.
 */
struct LayerSpec {
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
    FormClass kind = FormClass::affine;
    Activation activation = Activation::identity;
};

struct LayerParams {
    Mat W;      // in x out
    Mat s;      // in x out, empty for affine layers
    Vec w_q;    // out, empty for affine layers
    Vec theta;  // out
};

enum class InitScheme { constant_one, gaussian };

struct InitConfig {
    InitScheme scheme = InitScheme::gaussian;
    double mean = 1.0;
    double stddev = 0.1;
};

enum class LossKind { mse, mae, bce };

const char* to_string(LossKind k);

/// Cached per-layer activations from a forward pass, reused by backward.
struct Workspace {
    std::vector<Mat> inputs;  // layer inputs (batch x in_dim)
    std::vector<Mat> pre;     // pre-activations z
    std::vector<Mat> post;    // activations a
};

class Network {
public:
    explicit Network(std::vector<LayerSpec> specs);

    const std::vector<LayerSpec>& specs() const { return specs_; }
    std::vector<LayerParams>& params() { return params_; }
    const std::vector<LayerParams>& params() const { return params_; }

    std::size_t in_dim() const { return specs_.front().in_dim; }
    std::size_t out_dim() const { return specs_.back().out_dim; }

    /**
     * Fill weights from the scheme: for each layer, W row-major, then (for
     * quadratic kinds) s row-major and w_q, in that order; biases are zeroed.
     * constant_one sets every non-bias weight to exactly 1.0.
     */
    void init(Rng& rng, const InitConfig& cfg);

    /// Forward over a batch (rows are samples); ws is filled for backward.
    Mat forward(const Mat& x, Workspace& ws) const;
    Mat forward(const Mat& x) const;
    Vec forward_one(const Vec& x) const;

    /**
     * Mean-reduced loss gradient over the batch in ws (which must come from
     * forward on the same inputs).  For bce with a sigmoid output layer the
     * output delta is formed directly in pre-activation space, which is both
     * exact and stable.  Gradients land in `grads` (same shapes as params).
     */
    void backward(const Workspace& ws, LossKind loss, const Mat& targets,
                  std::vector<LayerParams>& grads) const;

    std::vector<LayerParams> zero_grads() const;

    /// Trainable parameter count (parabolic pinned entries included, held at 0).
    std::size_t param_count() const;
    Vec get_params() const;
    void set_params(const Vec& flat);

    std::string to_json(int indent = -1) const;
    static Network from_json(const std::string& text);
    static Network from_json_file(const std::string& path);
    void save_json(const std::string& path) const;

private:
    std::vector<LayerSpec> specs_;
    std::vector<LayerParams> params_;
};

double mse(const Mat& pred, const Mat& target);
double mae(const Mat& pred, const Mat& target);
/// Binary cross entropy; predictions clamped to [1e-12, 1 - 1e-12].
double bce(const Mat& pred, const Mat& target);
double loss_value(LossKind k, const Mat& pred, const Mat& target);
/// Fraction of rows where (pred >= 0.5) matches (target >= 0.5).
double accuracy(const Mat& pred, const Mat& target);

} // namespace qn
