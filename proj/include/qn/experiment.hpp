#pragma once

#include "qn/dataset.hpp"
#include "qn/frame.hpp"
#include "qn/network.hpp"
#include "qn/optimizer.hpp"

#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

namespace qn {

/**
 * One training run: dataset choice, architecture, loss, budget, and the
 * seed that fixes data generation and initialization.
 */
struct ExperimentConfig {
    std::string name;                    // output folder name; derived when empty
    std::string dataset = "f2";          // f1 | f2 | clusters_subspecies | clusters_blobs
    FormClass kind = FormClass::elliptic;
    std::vector<std::size_t> widths = {5};
    Activation hidden_activation = Activation::sigmoid;
    Activation output_activation = Activation::identity;
    LossKind loss = LossKind::mse;
    std::size_t epochs = 140;
    std::uint64_t seed = 0;
    std::size_t batch_size = 16;
    InitConfig init;
    bool even_grid = false;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);
std::string default_run_name(const ExperimentConfig& c);
std::string widths_label(const std::vector<std::size_t>& widths);

Dataset dataset_for(const ExperimentConfig& c);

/// Hidden layers carry the configured kind; a final head layer maps to one
/// output, affine when hidden layers exist, the configured kind otherwise.
Network build_network(const ExperimentConfig& c);

struct ExperimentResult {
    ExperimentConfig config;
    TrainReport report;
    double test_mse = 0.0;
    double test_mae = 0.0;
    double test_bce = 0.0;      // classification runs only
    double test_accuracy = 0.0; // classification runs only
    bool classification = false;
    bool failed = false;
    std::string error;
};

/**
 * Trains per the config and evaluates on the held-out split.  With
 * write_artifacts, emits losses.csv, metrics.json, model.json, and (for
 * regression) prediction.csv on a 400-point grid into out_dir.
 */
ExperimentResult run_experiment(const ExperimentConfig& c,
                                const std::filesystem::path& out_dir,
                                bool write_artifacts = true);

struct SuiteRow {
    std::string dataset;
    std::string kind;
    std::string widths;
    std::size_t epochs = 0;
    std::size_t seeds = 0;
    std::size_t failures = 0;
    double median_test_mse = 0.0;
    double median_test_mae = 0.0;
    double median_test_accuracy = 0.0;
    double median_test_bce = 0.0;
    std::vector<ExperimentResult> runs;
};

struct SuiteResult {
    std::string id;
    std::vector<SuiteRow> rows;
    std::vector<RateRow> rate_rows; // rate sweep suites only
    bool all_ok = true;
};

/**
 * Runs a named experiment grid (shallow_table1, deep_table2,
 * clusters_table3, rate_fig3, or all), five seeds per row derived stably
 * from the master seed, writes per-run artifacts plus a summary.csv per
 * suite, and aggregates medians.
 */
SuiteResult run_suite(const std::string& suite_id, std::uint64_t master_seed,
                      const std::filesystem::path& out_dir);

double median(std::vector<double> v);

} // namespace qn
