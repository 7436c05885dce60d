#pragma once

#include <cmath>

namespace qn {

/// Logistic sigmoid, safe over the whole double range.
inline double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

/// First derivative, computed as sigma(z) * sigma(-z) to avoid cancellation.
inline double sigmoid_d1(double z) { return sigmoid(z) * sigmoid(-z); }

/// Second derivative: sigma'(z) * (sigma(-z) - sigma(z)).
inline double sigmoid_d2(double z) {
    return sigmoid_d1(z) * (sigmoid(-z) - sigmoid(z));
}

} // namespace qn
