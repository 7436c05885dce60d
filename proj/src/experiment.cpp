#include "qn/experiment.hpp"

#include "qn/io.hpp"
#include "qn/rng.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qn {

namespace {

FormClass kind_from_string(const std::string& s) {
    if (s == "affine") return FormClass::affine;
    if (s == "elliptic") return FormClass::elliptic;
    if (s == "hyperbolic") return FormClass::hyperbolic;
    if (s == "parabolic") return FormClass::parabolic;
    throw std::invalid_argument("unknown layer kind: " + s);
}

Activation activation_from_string(const std::string& s) {
    if (s == "identity") return Activation::identity;
    if (s == "sigmoid") return Activation::sigmoid;
    throw std::invalid_argument("unknown activation: " + s);
}

LossKind loss_from_string(const std::string& s) {
    if (s == "mse") return LossKind::mse;
    if (s == "mae") return LossKind::mae;
    if (s == "bce") return LossKind::bce;
    throw std::invalid_argument("unknown loss: " + s);
}

bool is_cluster_dataset(const std::string& dataset) {
    return dataset.rfind("clusters", 0) == 0;
}

} // namespace

std::string widths_label(const std::vector<std::size_t>& widths) {
    if (widths.empty()) return "none";
    std::string out;
    for (std::size_t i = 0; i < widths.size(); ++i) {
        if (i) out += '-';
        out += std::to_string(widths[i]);
    }
    return out;
}

std::string default_run_name(const ExperimentConfig& c) {
    std::ostringstream name;
    name << c.dataset << "_" << to_string(c.kind) << "_w" << widths_label(c.widths) << "_e"
         << c.epochs;
    return name.str();
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("config must be an object");
    static const std::set<std::string> known = {
        "name",       "dataset",          "kind",       "widths",     "hidden_activation",
        "output_activation", "loss",      "epochs",     "seed",       "batch_size",
        "init_scheme", "init_mean",       "init_stddev", "even_grid"};
    for (const auto& item : j.items())
        if (!known.count(item.key()))
            throw std::invalid_argument("unknown config key: " + item.key());

    ExperimentConfig c;
    if (j.contains("name")) c.name = j.at("name").get<std::string>();
    if (j.contains("dataset")) c.dataset = j.at("dataset").get<std::string>();
    if (j.contains("kind")) c.kind = kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("widths")) {
        c.widths.clear();
        for (const auto& w : j.at("widths")) {
            const long long v = w.get<long long>();
            if (v < 1) throw std::invalid_argument("widths must be positive");
            c.widths.push_back(static_cast<std::size_t>(v));
        }
    }
    if (j.contains("hidden_activation"))
        c.hidden_activation = activation_from_string(j.at("hidden_activation").get<std::string>());
    if (j.contains("output_activation"))
        c.output_activation = activation_from_string(j.at("output_activation").get<std::string>());
    if (j.contains("loss")) c.loss = loss_from_string(j.at("loss").get<std::string>());
    if (j.contains("epochs")) c.epochs = j.at("epochs").get<std::size_t>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("batch_size")) c.batch_size = j.at("batch_size").get<std::size_t>();
    if (j.contains("init_scheme")) {
        const std::string s = j.at("init_scheme").get<std::string>();
        if (s == "gaussian") c.init.scheme = InitScheme::gaussian;
        else if (s == "constant_one") c.init.scheme = InitScheme::constant_one;
        else throw std::invalid_argument("unknown init_scheme: " + s);
    }
    if (j.contains("init_mean")) c.init.mean = j.at("init_mean").get<double>();
    if (j.contains("init_stddev")) c.init.stddev = j.at("init_stddev").get<double>();
    if (j.contains("even_grid")) c.even_grid = j.at("even_grid").get<bool>();
    return c;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["name"] = c.name.empty() ? default_run_name(c) : c.name;
    j["dataset"] = c.dataset;
    j["kind"] = to_string(c.kind);
    j["widths"] = c.widths;
    j["hidden_activation"] = to_string(c.hidden_activation);
    j["output_activation"] = to_string(c.output_activation);
    j["loss"] = to_string(c.loss);
    j["epochs"] = c.epochs;
    j["seed"] = c.seed;
    j["batch_size"] = c.batch_size;
    j["init_scheme"] = c.init.scheme == InitScheme::gaussian ? "gaussian" : "constant_one";
    j["init_mean"] = c.init.mean;
    j["init_stddev"] = c.init.stddev;
    j["even_grid"] = c.even_grid;
    return j;
}

Dataset dataset_for(const ExperimentConfig& c) {
    if (c.dataset == "f1" || c.dataset == "f2")
        return generate_regression_data(ground_truth_from_string(c.dataset), c.seed, 1600,
                                        1072, -3.0, 13.0, c.even_grid);
    if (c.dataset == "clusters_subspecies")
        return generate_cluster_data(subspecies_cluster_spec(), c.seed);
    if (c.dataset == "clusters_blobs")
        return generate_cluster_data(separable_cluster_spec(), c.seed);
    throw std::invalid_argument("unknown dataset: " + c.dataset);
}

Network build_network(const ExperimentConfig& c) {
    const std::size_t in_dim = is_cluster_dataset(c.dataset) ? 2 : 1;
    std::vector<LayerSpec> specs;
    std::size_t prev = in_dim;
    for (std::size_t w : c.widths) {
        specs.push_back({prev, w, c.kind, c.hidden_activation});
        prev = w;
    }
    LayerSpec head;
    head.in_dim = prev;
    head.out_dim = 1;
    head.kind = c.widths.empty() ? c.kind : FormClass::affine;
    head.activation = c.output_activation;
    specs.push_back(head);
    return Network(std::move(specs));
}

ExperimentResult run_experiment(const ExperimentConfig& c,
                                const std::filesystem::path& out_dir, bool write_artifacts) {
    ExperimentResult res;
    res.config = c;
    res.classification = (c.loss == LossKind::bce);

    const Dataset ds = dataset_for(c);
    Network net = build_network(c);

    TrainOptions opt;
    opt.epochs = c.epochs;
    opt.loss = c.loss;
    opt.seed = c.seed;
    opt.batch_size = c.batch_size;
    opt.init = c.init;

    try {
        res.report = train(net, ds.train_inputs(), ds.train_targets(), opt);
        const Mat pred = net.forward(ds.test_inputs());
        const Mat truth = ds.test_targets();
        res.test_mse = mse(pred, truth);
        res.test_mae = mae(pred, truth);
        if (res.classification) {
            res.test_bce = bce(pred, truth);
            res.test_accuracy = accuracy(pred, truth);
        }
    } catch (const std::exception& e) {
        res.failed = true;
        res.error = e.what();
    }

    if (!write_artifacts) return res;

    const std::string run_name = c.name.empty() ? default_run_name(c) : c.name;
    const std::filesystem::path dir = out_dir;
    ensure_dir(dir);

    std::vector<std::vector<CsvCell>> loss_rows;
    for (std::size_t e = 0; e < res.report.per_epoch_loss.size(); ++e)
        loss_rows.push_back({e + 1, res.report.per_epoch_loss[e]});
    write_csv(dir / "losses.csv", {"epoch", "loss"}, loss_rows);

    nlohmann::json metrics;
    metrics["config"] = config_to_json(c);
    metrics["failed"] = res.failed;
    if (res.failed) {
        metrics["error"] = res.error;
    } else {
        metrics["final_train_loss"] = res.report.final_train_loss;
        metrics["epochs_run"] = res.report.epochs_run;
        metrics["restarts"] = res.report.restarts;
        metrics["restart_budget_exhausted"] = res.report.restart_budget_exhausted;
        metrics["test_mse"] = res.test_mse;
        metrics["test_mae"] = res.test_mae;
        if (res.classification) {
            metrics["test_bce"] = res.test_bce;
            metrics["test_accuracy"] = res.test_accuracy;
        }
        metrics["param_count"] = net.param_count();
    }
    metrics["run_name"] = run_name;
    write_text_file(dir / "metrics.json", metrics.dump(2) + "\n");

    if (!res.failed) {
        net.save_json((dir / "model.json").string());
        if (!res.classification && !is_cluster_dataset(c.dataset)) {
            const GroundTruthId gt = ground_truth_from_string(c.dataset);
            std::vector<std::vector<CsvCell>> pred_rows;
            const std::size_t grid_n = 400;
            for (std::size_t i = 0; i < grid_n; ++i) {
                const double x =
                    -3.0 + 16.0 * static_cast<double>(i) / static_cast<double>(grid_n - 1);
                const double y_pred = net.forward_one({x})[0];
                pred_rows.push_back({x, ground_truth(gt, x), y_pred});
            }
            write_csv(dir / "prediction.csv", {"x", "y_true", "y_pred"}, pred_rows);
        }
    }
    return res;
}

double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median of empty set");
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    if (v.size() % 2 == 1) return v[mid];
    return 0.5 * (v[mid - 1] + v[mid]);
}

namespace {

constexpr std::size_t kSuiteSeeds = 5;

struct RowPlan {
    ExperimentConfig base;
    std::uint64_t dataset_salt = 0; // rows sharing a salt share per-seed datasets
};

// Seeds are derived stably: each suite gets its own master stream, each row
// seed index i maps to mix(suite_master, dataset_salt * 1000 + i) so that
// architectures compared on the same data share seeds.
SuiteRow run_row(const RowPlan& plan, std::uint64_t suite_master,
                 const std::filesystem::path& suite_dir) {
    SuiteRow row;
    row.dataset = plan.base.dataset;
    row.kind = to_string(plan.base.kind);
    row.widths = widths_label(plan.base.widths);
    row.epochs = plan.base.epochs;
    row.seeds = kSuiteSeeds;

    std::vector<double> mses, maes, accs, bces;
    for (std::size_t i = 0; i < kSuiteSeeds; ++i) {
        ExperimentConfig c = plan.base;
        c.seed = Rng::mix(suite_master, plan.dataset_salt * 1000 + i);
        c.name = default_run_name(c) + "_s" + std::to_string(i);
        const ExperimentResult res = run_experiment(c, suite_dir / c.name, true);
        if (res.failed) {
            ++row.failures;
        } else {
            mses.push_back(res.test_mse);
            maes.push_back(res.test_mae);
            if (res.classification) {
                accs.push_back(res.test_accuracy);
                bces.push_back(res.test_bce);
            }
        }
        row.runs.push_back(res);
    }
    if (!mses.empty()) {
        row.median_test_mse = median(mses);
        row.median_test_mae = median(maes);
    }
    if (!accs.empty()) {
        row.median_test_accuracy = median(accs);
        row.median_test_bce = median(bces);
    }
    return row;
}

ExperimentConfig regression_base() {
    ExperimentConfig c;
    c.loss = LossKind::mse;
    c.hidden_activation = Activation::sigmoid;
    c.output_activation = Activation::identity;
    c.batch_size = 16;
    c.init.scheme = InitScheme::gaussian;
    c.init.mean = 0.0;
    c.init.stddev = 0.5;
    return c;
}

SuiteResult run_shallow_table1(std::uint64_t master_seed, const std::filesystem::path& out_dir) {
    SuiteResult suite;
    suite.id = "shallow_table1";
    const std::uint64_t suite_master = Rng::mix(master_seed, 1);
    const std::filesystem::path dir = out_dir / suite.id;

    const FormClass kinds[] = {FormClass::elliptic, FormClass::affine, FormClass::hyperbolic};
    const std::size_t epoch_choices[] = {140, 250};
    std::uint64_t dataset_salt = 0;
    for (const char* dataset : {"f1", "f2"}) {
        for (FormClass kind : kinds) {
            for (std::size_t epochs : epoch_choices) {
                RowPlan plan;
                plan.base = regression_base();
                plan.base.dataset = dataset;
                plan.base.kind = kind;
                plan.base.widths = {5};
                plan.base.epochs = epochs;
                plan.dataset_salt = dataset_salt;
                suite.rows.push_back(run_row(plan, suite_master, dir));
            }
        }
        ++dataset_salt;
    }

    std::vector<std::vector<CsvCell>> rows;
    for (const SuiteRow& r : suite.rows) {
        if (r.failures) suite.all_ok = false;
        rows.push_back({r.dataset, r.kind, r.widths, r.epochs, r.seeds, r.failures,
                        r.median_test_mse, r.median_test_mae});
    }
    write_csv(dir / "summary.csv",
              {"dataset", "kind", "widths", "epochs", "seeds", "failures", "median_test_mse",
               "median_test_mae"},
              rows);
    return suite;
}

SuiteResult run_deep_table2(std::uint64_t master_seed, const std::filesystem::path& out_dir) {
    SuiteResult suite;
    suite.id = "deep_table2";
    const std::uint64_t suite_master = Rng::mix(master_seed, 2);
    const std::filesystem::path dir = out_dir / suite.id;

    struct DeepRow {
        FormClass kind;
        std::vector<std::size_t> widths;
    };
    const std::vector<DeepRow> grid = {
        {FormClass::elliptic, {5, 5, 5}},
        {FormClass::elliptic, {30, 30, 30}},
        {FormClass::elliptic, {5, 5, 5, 5}},
        {FormClass::affine, {5, 5, 5, 5}},
        {FormClass::affine, {30, 30, 30, 30}},
    };
    for (const DeepRow& g : grid) {
        RowPlan plan;
        plan.base = regression_base();
        plan.base.dataset = "f2";
        plan.base.kind = g.kind;
        plan.base.widths = g.widths;
        plan.base.epochs = 140;
        plan.dataset_salt = 0;
        suite.rows.push_back(run_row(plan, suite_master, dir));
    }

    std::vector<std::vector<CsvCell>> rows;
    for (const SuiteRow& r : suite.rows) {
        if (r.failures) suite.all_ok = false;
        rows.push_back({r.dataset, r.kind, r.widths, r.epochs, r.seeds, r.failures,
                        r.median_test_mse, r.median_test_mae});
    }
    write_csv(dir / "summary.csv",
              {"dataset", "kind", "widths", "epochs", "seeds", "failures", "median_test_mse",
               "median_test_mae"},
              rows);
    return suite;
}

SuiteResult run_clusters_table3(std::uint64_t master_seed, const std::filesystem::path& out_dir) {
    SuiteResult suite;
    suite.id = "clusters_table3";
    const std::uint64_t suite_master = Rng::mix(master_seed, 3);
    const std::filesystem::path dir = out_dir / suite.id;

    for (FormClass kind : {FormClass::elliptic, FormClass::affine}) {
        RowPlan plan;
        plan.base.dataset = "clusters_subspecies";
        plan.base.kind = kind;
        plan.base.widths = {};
        plan.base.hidden_activation = Activation::sigmoid;
        plan.base.output_activation = Activation::sigmoid;
        plan.base.loss = LossKind::bce;
        plan.base.epochs = 20;
        plan.base.batch_size = 4;
        plan.base.init.scheme = InitScheme::gaussian;
        plan.base.init.mean = -0.5;
        plan.base.init.stddev = 0.35;
        plan.dataset_salt = 0;
        suite.rows.push_back(run_row(plan, suite_master, dir));
    }

    std::vector<std::vector<CsvCell>> rows;
    for (const SuiteRow& r : suite.rows) {
        if (r.failures) suite.all_ok = false;
        rows.push_back({r.dataset, r.kind, r.widths, r.epochs, r.seeds, r.failures,
                        r.median_test_accuracy, r.median_test_bce});
    }
    write_csv(dir / "summary.csv",
              {"dataset", "kind", "widths", "epochs", "seeds", "failures",
               "median_test_accuracy", "median_test_bce"},
              rows);
    return suite;
}

SuiteResult run_rate_fig3(std::uint64_t master_seed, const std::filesystem::path& out_dir) {
    SuiteResult suite;
    suite.id = "rate_fig3";
    const std::uint64_t suite_master = Rng::mix(master_seed, 4);
    const std::filesystem::path dir = out_dir / suite.id;

    const MotherFunction m = normalize_mother(1, 4.0);
    Rng rng(suite_master);
    const FrameExpansion target =
        make_random_expansion(m, {0.0}, {8.0}, 0, 4, 128, rng);
    const std::vector<std::size_t> ns = {1, 2, 4, 8, 16, 32, 64, 128, 256};
    suite.rate_rows = rate_experiment(target, ns, 2049);

    const double l1 = l1_frame_norm(target);
    std::vector<std::vector<CsvCell>> rows;
    for (const RateRow& r : suite.rate_rows) {
        rows.push_back({r.n_kept, r.error, r.bound, r.log_ratio});
        if (r.error > r.bound * (1.0 + 1e-6) + 1e-5) suite.all_ok = false;
        if (r.error > 0.0 && r.log_ratio > -0.5 + 1e-6) suite.all_ok = false;
    }
    write_csv(dir / "rate.csv", {"N", "error", "bound", "log_ratio"}, rows);

    nlohmann::json meta;
    meta["atoms"] = target.atoms.size();
    meta["l1_norm"] = l1;
    meta["grid_points"] = 2049;
    meta["scales"] = {0, 4};
    write_text_file(dir / "target.json", meta.dump(2) + "\n");
    return suite;
}

} // namespace

SuiteResult run_suite(const std::string& suite_id, std::uint64_t master_seed,
                      const std::filesystem::path& out_dir) {
    if (suite_id == "shallow_table1") return run_shallow_table1(master_seed, out_dir);
    if (suite_id == "deep_table2") return run_deep_table2(master_seed, out_dir);
    if (suite_id == "clusters_table3") return run_clusters_table3(master_seed, out_dir);
    if (suite_id == "rate_fig3") return run_rate_fig3(master_seed, out_dir);
    if (suite_id == "all") {
        SuiteResult all;
        all.id = "all";
        for (const char* id :
             {"shallow_table1", "deep_table2", "clusters_table3", "rate_fig3"}) {
            SuiteResult part = run_suite(id, master_seed, out_dir);
            all.all_ok = all.all_ok && part.all_ok;
            for (SuiteRow& r : part.rows) all.rows.push_back(std::move(r));
            for (const RateRow& r : part.rate_rows) all.rate_rows.push_back(r);
        }
        return all;
    }
    throw std::invalid_argument("unknown suite: " + suite_id);
}

} // namespace qn
