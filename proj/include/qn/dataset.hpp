#pragma once

#include "qn/linalg.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qn {

enum class GroundTruthId { f1, f2 };

GroundTruthId ground_truth_from_string(const std::string& s);
std::string to_string(GroundTruthId id);

/**
 * Piecewise reference curves.  f1: 0, x, 3, -0.4x+5 and f2: 0, x^2, 9,
 * 9 e^{-(x-5)} on the branches x <= 0, 0 < x <= 3, 3 < x <= 5, 5 < x.
 */
double ground_truth(GroundTruthId id, double x);

struct Dataset {
    Mat inputs;   // all points, one row each
    Mat targets;  // matching rows
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> test_idx;
    std::uint64_t seed = 0;

    Mat train_inputs() const;
    Mat train_targets() const;
    Mat test_inputs() const;
    Mat test_targets() const;
};

/**
 * Sampled regression data: `count` draws uniform on [lo, hi] (an even grid
 * when even_grid is set), targets from the reference curve, then a random
 * train/test split of train_count against the rest.
 */
Dataset generate_regression_data(GroundTruthId id, std::uint64_t seed,
                                 std::size_t count = 1600, std::size_t train_count = 1072,
                                 double lo = -3.0, double hi = 13.0,
                                 bool even_grid = false);

struct BlobSpec {
    Vec center;
    double stddev = 1.0;
    std::size_t count = 0;
    double label = 0.0;
};

/**
 * Two-dimensional labeled point clouds: optional gaussian ring (radius
 * gaussian around ring_radius, uniform angle) plus any number of isotropic
 * gaussian blobs.
 */
struct ClusterSpec {
    std::vector<BlobSpec> blobs;
    bool ring = false;
    double ring_radius = 3.0;
    double ring_radius_stddev = 0.15;
    std::size_t ring_count = 0;
    double ring_label = 0.0;
    double train_fraction = 0.67;
};

/// Minority core of 200 inside a majority ring of 1800.
ClusterSpec subspecies_cluster_spec();

/// Two well-separated blobs (centers 10 standard deviations apart).
ClusterSpec separable_cluster_spec();

Dataset generate_cluster_data(const ClusterSpec& spec, std::uint64_t seed);

} // namespace qn
