#include "qn/ati.hpp"
#include "qn/dataset.hpp"
#include "qn/experiment.hpp"
#include "qn/frame.hpp"
#include "qn/io.hpp"
#include "qn/network.hpp"
#include "qn/rng.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

int cmd_generate_data(const std::string& dataset, std::uint64_t seed, const fs::path& out_dir,
                      bool even_grid) {
    qn::ExperimentConfig cfg;
    cfg.dataset = dataset;
    cfg.seed = seed;
    cfg.even_grid = even_grid;
    const qn::Dataset ds = qn::dataset_for(cfg);

    std::vector<char> is_train(ds.inputs.rows(), 0);
    for (std::size_t i : ds.train_idx) is_train[i] = 1;

    std::vector<std::string> header;
    for (std::size_t c = 0; c < ds.inputs.cols(); ++c)
        header.push_back("x" + std::to_string(c + 1));
    header.push_back("y");
    header.push_back("split");

    std::vector<std::vector<qn::CsvCell>> rows;
    for (std::size_t i = 0; i < ds.inputs.rows(); ++i) {
        std::vector<qn::CsvCell> row;
        for (std::size_t c = 0; c < ds.inputs.cols(); ++c) row.push_back(ds.inputs(i, c));
        row.push_back(ds.targets(i, 0));
        row.push_back(is_train[i] ? "train" : "test");
        rows.push_back(std::move(row));
    }
    qn::write_csv(out_dir / "data.csv", header, rows);

    nlohmann::json meta;
    meta["dataset"] = dataset;
    meta["seed"] = seed;
    meta["count"] = ds.inputs.rows();
    meta["train_count"] = ds.train_idx.size();
    meta["test_count"] = ds.test_idx.size();
    meta["even_grid"] = even_grid;
    qn::write_text_file(out_dir / "meta.json", meta.dump(2) + "\n");

    std::cout << "wrote " << (out_dir / "data.csv").string() << " (" << ds.inputs.rows()
              << " points, " << ds.train_idx.size() << " train)\n";
    return 0;
}

int cmd_train(const fs::path& config_path, const fs::path& out_dir, bool has_seed,
              std::uint64_t seed) {
    qn::ExperimentConfig cfg = qn::config_from_json(qn::parse_config_file(config_path));
    if (has_seed) cfg.seed = seed;
    const qn::ExperimentResult res = qn::run_experiment(cfg, out_dir, true);
    if (res.failed) {
        std::cerr << "training failed: " << res.error << "\n";
        return 1;
    }
    std::cout << (cfg.name.empty() ? qn::default_run_name(cfg) : cfg.name)
              << ": final_train_loss=" << qn::format_g6(res.report.final_train_loss)
              << " test_mse=" << qn::format_g6(res.test_mse);
    if (res.classification)
        std::cout << " test_accuracy=" << qn::format_g6(res.test_accuracy);
    std::cout << " restarts=" << res.report.restarts << "\n";
    return 0;
}

int cmd_eval(const fs::path& model_path, const std::string& dataset, std::uint64_t seed,
             const std::string& out_dir) {
    const qn::Network net = qn::Network::from_json_file(model_path.string());
    qn::ExperimentConfig cfg;
    cfg.dataset = dataset;
    cfg.seed = seed;
    const qn::Dataset ds = qn::dataset_for(cfg);
    if (net.in_dim() != ds.inputs.cols())
        throw std::runtime_error("model input width does not match dataset");

    const qn::Mat pred = net.forward(ds.test_inputs());
    const qn::Mat truth = ds.test_targets();
    nlohmann::json metrics;
    metrics["dataset"] = dataset;
    metrics["seed"] = seed;
    metrics["test_mse"] = qn::mse(pred, truth);
    metrics["test_mae"] = qn::mae(pred, truth);
    const bool classification = dataset.rfind("clusters", 0) == 0;
    if (classification) {
        metrics["test_bce"] = qn::bce(pred, truth);
        metrics["test_accuracy"] = qn::accuracy(pred, truth);
    }
    std::cout << metrics.dump(2) << "\n";
    if (!out_dir.empty())
        qn::write_text_file(fs::path(out_dir) / "metrics.json", metrics.dump(2) + "\n");
    return 0;
}

int cmd_frame_approx(int dim, std::size_t natoms, int k_min, int k_max, std::size_t keep,
                     std::uint64_t seed, const fs::path& out_dir) {
    const qn::MotherFunction m = qn::normalize_mother(dim, 4.0);
    qn::Rng rng(seed);
    const qn::Vec lo(dim, 0.0);
    const qn::Vec hi(dim, 8.0);
    const qn::FrameExpansion target =
        qn::make_random_expansion(m, lo, hi, k_min, k_max, natoms, rng);
    const qn::FrameExpansion kept = qn::greedy_n_term(target, keep);

    const std::size_t pts = dim == 1 ? 2049 : 257;
    const std::vector<qn::RateRow> rows = qn::rate_experiment(target, {keep}, pts);
    const qn::RateRow& r = rows.front();

    std::vector<std::string> header = {"k"};
    for (int d = 0; d < dim; ++d) header.push_back("idx" + std::to_string(d + 1));
    for (int d = 0; d < dim; ++d) header.push_back("b" + std::to_string(d + 1));
    header.push_back("coeff");
    std::vector<std::vector<qn::CsvCell>> atom_rows;
    for (std::size_t i = 0; i < kept.atoms.size(); ++i) {
        std::vector<qn::CsvCell> row;
        row.push_back(kept.atoms[i].k);
        for (int d = 0; d < dim; ++d) row.push_back(kept.atoms[i].idx[static_cast<std::size_t>(d)]);
        const qn::Vec b = kept.atoms[i].point(dim);
        for (int d = 0; d < dim; ++d) row.push_back(b[static_cast<std::size_t>(d)]);
        row.push_back(kept.coeffs[i]);
        atom_rows.push_back(std::move(row));
    }
    qn::write_csv(out_dir / "atoms.csv", header, atom_rows);
    qn::write_csv(out_dir / "approx.csv", {"N", "error", "bound", "log_ratio"},
                  {{r.n_kept, r.error, r.bound, r.log_ratio}});

    std::cout << "kept " << kept.atoms.size() << "/" << target.atoms.size()
              << " atoms: error=" << qn::format_g6(r.error)
              << " bound=" << qn::format_g6(r.bound) << "\n";
    return r.error <= r.bound * (1.0 + 1e-6) + 1e-5 ? 0 : 1;
}

int cmd_rate_plot(std::size_t targets, std::uint64_t seed, const fs::path& out_dir) {
    const qn::MotherFunction m = qn::normalize_mother(1, 4.0);
    const std::vector<std::size_t> ns = {1, 2, 4, 8, 16, 32, 64, 128, 256};

    std::vector<std::vector<qn::CsvCell>> rows;
    bool ok = true;
    double worst_log_ratio = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < targets; ++t) {
        qn::Rng rng(qn::Rng::mix(seed, t));
        const std::size_t natoms = 64 + static_cast<std::size_t>(rng.below(193));
        const qn::FrameExpansion target =
            qn::make_random_expansion(m, {0.0}, {8.0}, 0, 4, natoms, rng);
        for (const qn::RateRow& r : qn::rate_experiment(target, ns, 2049)) {
            rows.push_back({t, r.n_kept, r.error, r.bound, r.log_ratio});
            if (r.error > r.bound * (1.0 + 1e-6) + 1e-5) ok = false;
            if (r.error > 0.0) {
                if (r.log_ratio > -0.5 + 1e-6) ok = false;
                worst_log_ratio = std::max(worst_log_ratio, r.log_ratio);
            }
        }
    }
    qn::write_csv(out_dir / "rate.csv", {"target", "N", "error", "bound", "log_ratio"}, rows);
    std::cout << "rate sweep over " << targets
              << " targets: worst log_ratio=" << qn::format_g6(worst_log_ratio)
              << (ok ? " (all bounds hold)" : " (BOUND VIOLATED)") << "\n";
    return ok ? 0 : 1;
}

int cmd_ati_check(std::size_t samples, std::uint64_t seed, const fs::path& out_dir) {
    std::vector<qn::CheckReport> reports;

    const qn::MotherFunction m1 = qn::normalize_mother(1, 4.0);
    const qn::AtIConstants size_c = qn::derive_constants(m1, 1e6, 1.0);
    const qn::AtIConstants smooth_c = qn::derive_constants(m1, 1e6, std::pow(2.0, m1.n + 2));
    reports.push_back(qn::check_size_bound(m1, size_c, samples, qn::Rng::mix(seed, 1)));
    reports.push_back(qn::check_lipschitz_bound(m1, smooth_c, samples, qn::Rng::mix(seed, 2)));
    reports.push_back(
        qn::check_double_lipschitz_bound(m1, smooth_c, samples, qn::Rng::mix(seed, 3)));
    reports.push_back(qn::check_unit_mass(m1, {-2, 0, 3}));

    const qn::SigmaDecayResult decay = qn::check_sigma_decay(1e6, 5, 4.0);
    for (const qn::CheckReport& r : decay.reports) reports.push_back(r);
    for (int i = 0; i < 3; ++i) {
        std::vector<std::vector<qn::CsvCell>> curve;
        for (const qn::SigmaDecayRow& row : decay.curve)
            curve.push_back({row.t, std::log10(row.lhs[static_cast<std::size_t>(i)]),
                             std::log10(row.rhs[static_cast<std::size_t>(i)])});
        qn::write_csv(out_dir / ("sigma_decay_order" + std::to_string(i) + ".csv"),
                      {"t", "lhs_log10", "rhs_log10"}, curve);
    }

    const std::vector<int> dims = {2, 3, 5};
    reports.push_back(
        qn::check_hessian_eigenvalues(qn::profile_linear(), dims, 34, qn::Rng::mix(seed, 4)));
    reports.push_back(
        qn::check_hessian_eigenvalues(qn::profile_square(), dims, 34, qn::Rng::mix(seed, 5)));
    reports.push_back(
        qn::check_hessian_eigenvalues(qn::profile_mother(m1), dims, 34, qn::Rng::mix(seed, 6)));

    for (int n : {1, 2}) {
        reports.push_back(qn::check_segment_geometry(n, samples, qn::Rng::mix(seed, 7 + n)));
        reports.push_back(
            qn::check_double_segment_geometry(n, samples, qn::Rng::mix(seed, 9 + n)));
    }
    reports.push_back(qn::check_jensen_two_term(1, 6, samples, qn::Rng::mix(seed, 12)));
    reports.push_back(qn::check_jensen_three_term(1, 6, samples, qn::Rng::mix(seed, 13)));

    std::vector<std::vector<qn::CsvCell>> rows;
    std::size_t violations = 0;
    for (const qn::CheckReport& r : reports) {
        rows.push_back({r.id, r.samples, r.violations, r.worst_margin, r.accept_rate});
        violations += r.violations;
        std::cout << r.id << ": samples=" << r.samples << " violations=" << r.violations
                  << " worst_margin=" << qn::format_g6(r.worst_margin) << "\n";
    }
    qn::write_csv(out_dir / "ati_report.csv",
                  {"id", "samples", "violations", "worst_margin", "accept_rate"}, rows);
    std::cout << (violations == 0 ? "all checks passed" : "CHECK VIOLATIONS FOUND") << "\n";
    return violations == 0 ? 0 : 1;
}

int cmd_suite(const std::string& suite_id, std::uint64_t seed, const fs::path& out_dir) {
    const qn::SuiteResult res = qn::run_suite(suite_id, seed, out_dir);
    std::size_t failures = 0;
    for (const qn::SuiteRow& r : res.rows) failures += r.failures;
    std::cout << "suite " << suite_id << ": " << res.rows.size() << " rows, " << failures
              << " failed runs" << (res.all_ok ? "" : " (NOT OK)") << "\n";
    return res.all_ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quadratic decision-function networks and circular wavelet frames"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    std::string out_dir;
    std::string dataset = "f2";
    bool even_grid = false;
    std::string config_path;
    std::string model_path;
    std::string suite_id = "all";
    int dim = 1;
    std::size_t natoms = 128;
    int k_min = 0;
    int k_max = 4;
    std::size_t keep = 32;
    std::size_t targets = 20;
    std::size_t samples = 10000;

    auto* gen = app.add_subcommand("generate-data", "sample a dataset and write data.csv");
    gen->add_option("--dataset", dataset,
                    "f1 | f2 | clusters_subspecies | clusters_blobs");
    gen->add_option("--seed", seed, "rng seed");
    gen->add_option("--out-dir", out_dir, "output directory")->required();
    gen->add_flag("--even-grid", even_grid, "evenly spaced inputs instead of random draws");

    auto* train = app.add_subcommand("train", "train one network from a config file");
    train->add_option("--config", config_path, "json or toml experiment config")->required();
    train->add_option("--out-dir", out_dir, "output directory")->required();
    auto* train_seed = train->add_option("--seed", seed, "override config seed");

    auto* eval = app.add_subcommand("eval", "evaluate a saved model on a dataset");
    eval->add_option("--model", model_path, "model.json path")->required();
    eval->add_option("--dataset", dataset, "dataset id");
    eval->add_option("--seed", seed, "dataset seed");
    eval->add_option("--out-dir", out_dir, "optional directory for metrics.json");

    auto* fapp = app.add_subcommand("frame-approx",
                                    "greedy sparse approximation of a random frame target");
    fapp->add_option("--dim", dim, "ambient dimension (1 or 2)")->check(CLI::Range(1, 2));
    fapp->add_option("--natoms", natoms, "atoms in the synthetic target");
    fapp->add_option("--kmin", k_min, "smallest scale");
    fapp->add_option("--kmax", k_max, "largest scale");
    fapp->add_option("--keep", keep, "atoms kept by the greedy selection");
    fapp->add_option("--seed", seed, "rng seed");
    fapp->add_option("--out-dir", out_dir, "output directory")->required();

    auto* rate = app.add_subcommand("rate-plot", "sparse-approximation rate sweep");
    rate->add_option("--targets", targets, "number of random targets");
    rate->add_option("--seed", seed, "rng seed");
    rate->add_option("--out-dir", out_dir, "output directory")->required();

    auto* ati = app.add_subcommand("ati-check", "kernel decay/smoothness property checks");
    ati->add_option("--samples", samples, "samples per randomized check");
    ati->add_option("--seed", seed, "rng seed");
    ati->add_option("--out-dir", out_dir, "output directory")->required();

    auto* suite = app.add_subcommand("suite", "run an experiment grid and summarize");
    suite->add_option("--suite", suite_id,
                      "all | shallow_table1 | deep_table2 | clusters_table3 | rate_fig3");
    suite->add_option("--seed", seed, "master seed");
    suite->add_option("--out-dir", out_dir, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_generate_data(dataset, seed, out_dir, even_grid);
        if (train->parsed())
            return cmd_train(config_path, out_dir, train_seed->count() > 0, seed);
        if (eval->parsed()) return cmd_eval(model_path, dataset, seed, out_dir);
        if (fapp->parsed())
            return cmd_frame_approx(dim, natoms, k_min, k_max, keep, seed, out_dir);
        if (rate->parsed()) return cmd_rate_plot(targets, seed, out_dir);
        if (ati->parsed()) return cmd_ati_check(samples, seed, out_dir);
        if (suite->parsed()) return cmd_suite(suite_id, seed, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
