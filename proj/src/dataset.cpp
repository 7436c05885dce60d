#include "qn/dataset.hpp"

#include "qn/rng.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qn {

GroundTruthId ground_truth_from_string(const std::string& s) {
    if (s == "f1") return GroundTruthId::f1;
    if (s == "f2") return GroundTruthId::f2;
    throw std::invalid_argument("unknown ground truth id: " + s);
}

std::string to_string(GroundTruthId id) {
    return id == GroundTruthId::f1 ? "f1" : "f2";
}

double ground_truth(GroundTruthId id, double x) {
    if (id == GroundTruthId::f1) {
        if (x <= 0.0) return 0.0;
        if (x <= 3.0) return x;
        if (x <= 5.0) return 3.0;
        return -0.4 * x + 5.0;
    }
    if (x <= 0.0) return 0.0;
    if (x <= 3.0) return x * x;
    if (x <= 5.0) return 9.0;
    return 9.0 * std::exp(-(x - 5.0));
}

namespace {

Mat gather_rows(const Mat& m, const std::vector<std::size_t>& idx) {
    Mat out(idx.size(), m.cols());
    for (std::size_t r = 0; r < idx.size(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = m(idx[r], c);
    return out;
}

void split_indices(Dataset& ds, std::size_t count, std::size_t train_count, Rng& rng) {
    if (train_count > count)
        throw std::invalid_argument("train split larger than dataset");
    std::vector<std::size_t> perm(count);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng.shuffle(perm);
    ds.train_idx.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(train_count));
    ds.test_idx.assign(perm.begin() + static_cast<std::ptrdiff_t>(train_count), perm.end());
}

} // namespace

Mat Dataset::train_inputs() const { return gather_rows(inputs, train_idx); }
Mat Dataset::train_targets() const { return gather_rows(targets, train_idx); }
Mat Dataset::test_inputs() const { return gather_rows(inputs, test_idx); }
Mat Dataset::test_targets() const { return gather_rows(targets, test_idx); }

Dataset generate_regression_data(GroundTruthId id, std::uint64_t seed, std::size_t count,
                                 std::size_t train_count, double lo, double hi,
                                 bool even_grid) {
    if (count < 2) throw std::invalid_argument("generate_regression_data: count too small");
    Rng rng(seed);
    Dataset ds;
    ds.seed = seed;
    ds.inputs = Mat(count, 1);
    ds.targets = Mat(count, 1);
    for (std::size_t i = 0; i < count; ++i) {
        double x;
        if (even_grid)
            x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
        else
            x = rng.uniform(lo, hi);
        ds.inputs(i, 0) = x;
        ds.targets(i, 0) = ground_truth(id, x);
    }
    split_indices(ds, count, train_count, rng);
    return ds;
}

ClusterSpec subspecies_cluster_spec() {
    ClusterSpec spec;
    spec.ring = true;
    spec.ring_radius = 3.0;
    spec.ring_radius_stddev = 0.15;
    spec.ring_count = 1800;
    spec.ring_label = 0.0;
    BlobSpec core;
    core.center = {0.0, 0.0};
    core.stddev = 0.3;
    core.count = 200;
    core.label = 1.0;
    spec.blobs.push_back(core);
    return spec;
}

ClusterSpec separable_cluster_spec() {
    ClusterSpec spec;
    BlobSpec a;
    a.center = {0.0, 0.0};
    a.stddev = 0.5;
    a.count = 500;
    a.label = 0.0;
    BlobSpec b;
    b.center = {5.0, 0.0};
    b.stddev = 0.5;
    b.count = 500;
    b.label = 1.0;
    spec.blobs = {a, b};
    return spec;
}

Dataset generate_cluster_data(const ClusterSpec& spec, std::uint64_t seed) {
    std::size_t count = spec.ring ? spec.ring_count : 0;
    for (const BlobSpec& b : spec.blobs) count += b.count;
    if (count == 0) throw std::invalid_argument("generate_cluster_data: empty spec");
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw std::invalid_argument("generate_cluster_data: train fraction out of range");

    Rng rng(seed);
    Dataset ds;
    ds.seed = seed;
    ds.inputs = Mat(count, 2);
    ds.targets = Mat(count, 1);

    std::size_t row = 0;
    if (spec.ring) {
        for (std::size_t i = 0; i < spec.ring_count; ++i, ++row) {
            const double radius = rng.gaussian(spec.ring_radius, spec.ring_radius_stddev);
            const double angle = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
            ds.inputs(row, 0) = radius * std::cos(angle);
            ds.inputs(row, 1) = radius * std::sin(angle);
            ds.targets(row, 0) = spec.ring_label;
        }
    }
    for (const BlobSpec& b : spec.blobs) {
        if (b.center.size() != 2)
            throw std::invalid_argument("generate_cluster_data: blobs are two-dimensional");
        for (std::size_t i = 0; i < b.count; ++i, ++row) {
            ds.inputs(row, 0) = rng.gaussian(b.center[0], b.stddev);
            ds.inputs(row, 1) = rng.gaussian(b.center[1], b.stddev);
            ds.targets(row, 0) = b.label;
        }
    }

    const auto train_count =
        static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(count)));
    split_indices(ds, count, train_count, rng);
    return ds;
}

} // namespace qn
