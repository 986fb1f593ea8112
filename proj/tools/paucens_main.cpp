// Command-line front end: toy-data generation, feature extraction, training,
// evaluation, ROC export, and the oracle self-test suites.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "paucens/baseline.hpp"
#include "paucens/dataset.hpp"
#include "paucens/ensemble.hpp"
#include "paucens/errors.hpp"
#include "paucens/features.hpp"
#include "paucens/image.hpp"
#include "paucens/metrics.hpp"
#include "paucens/model_io.hpp"
#include "paucens/selftest.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

std::string fmt(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

double parse_strict_double(const std::string& token, const char* what) {
    double value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size())
        throw std::invalid_argument(std::string(what) + ": bad number '" + token + "'");
    return value;
}

struct GenToyArgs {
    std::uint64_t seed = 0;
    int n_train = 200, n_val = 0, n_test = 2000;
    double pos_radius_max = 1.5, neg_radius_mean = 2.0, neg_radius_std = 0.4;
    std::string out;
};

int run_gen_toy(const GenToyArgs& args) {
    paucens::ToyConfig cfg;
    cfg.seed = args.seed;
    cfg.n_train_per_class = args.n_train;
    cfg.n_val_per_class = args.n_val;
    cfg.n_test_per_class = args.n_test;
    cfg.pos_radius_max = args.pos_radius_max;
    cfg.neg_radius_mean = args.neg_radius_mean;
    cfg.neg_radius_std = args.neg_radius_std;

    const auto paths = split_list(args.out);
    const std::size_t expected = args.n_val > 0 ? 3 : 2;
    if (paths.size() != expected)
        throw std::invalid_argument("gen-toy: --out needs " + std::to_string(expected) +
                                    " comma-separated paths (train" +
                                    (expected == 3 ? ",val" : "") + ",test)");

    const paucens::ToyData data = paucens::generate_toy(cfg);
    paucens::save_csv(data.train, paths[0]);
    if (expected == 3) {
        paucens::save_csv(data.val, paths[1]);
        paucens::save_csv(data.test, paths[2]);
    } else {
        paucens::save_csv(data.test, paths[1]);
    }
    std::cout << "wrote " << args.out << " (train " << data.train.m() << "+"
              << data.train.n();
    if (expected == 3) std::cout << ", val " << data.val.m() << "+" << data.val.n();
    std::cout << ", test " << data.test.m() << "+" << data.test.n() << ")\n";
    return kExitOk;
}

struct ExtractArgs {
    std::string input;
    std::string features = "sp-cov,luv";
    std::string window;  // "WxH", empty = whole image
    int stride = 0;      // 0 = window size
    int label = 1;
    std::string out;
};

int run_extract(const ExtractArgs& args) {
    paucens::FeatureConfig cfg;
    cfg.sp_cov = cfg.sp_lbp = cfg.luv = cfg.mag = cfg.orient = false;
    for (const std::string& token : split_list(args.features)) {
        if (token == "sp-cov")
            cfg.sp_cov = true;
        else if (token == "sp-lbp")
            cfg.sp_lbp = true;
        else if (token == "luv")
            cfg.luv = true;
        else if (token == "mag")
            cfg.mag = true;
        else if (token == "orient")
            cfg.orient = true;
        else
            throw std::invalid_argument("extract: unknown feature group '" + token + "'");
    }

    const paucens::Image img = paucens::read_image(args.input);
    int win_w = img.width, win_h = img.height;
    if (!args.window.empty()) {
        const auto sep = args.window.find('x');
        if (sep == std::string::npos)
            throw std::invalid_argument("extract: --window expects WxH");
        win_w = std::stoi(args.window.substr(0, sep));
        win_h = std::stoi(args.window.substr(sep + 1));
    }
    const int stride = args.stride > 0 ? args.stride : std::max(win_w, win_h);

    std::vector<std::string> skipped;
    const paucens::FeatureMaps maps = paucens::extract_feature_maps(img, cfg, &skipped);
    for (const std::string& note : skipped) std::cerr << "warning: " << note << '\n';

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!args.out.empty()) {
        file.open(args.out);
        if (!file) throw paucens::DataError("cannot write '" + args.out + "'");
        out = &file;
    }

    bool wrote_header = false;
    for (int wy = 0; wy + win_h <= img.height; wy += stride)
        for (int wx = 0; wx + win_w <= img.width; wx += stride) {
            const Eigen::VectorXd row =
                paucens::window_features(maps, {wx, wy, win_w, win_h});
            if (!wrote_header) {
                for (Eigen::Index k = 0; k < row.size(); ++k) *out << 'f' << k << ',';
                *out << "label\n";
                wrote_header = true;
            }
            for (Eigen::Index k = 0; k < row.size(); ++k) *out << fmt(row[k]) << ',';
            *out << args.label << '\n';
        }
    if (!wrote_header)
        throw std::invalid_argument("extract: window larger than image, nothing to emit");
    return kExitOk;
}

struct TrainArgs {
    std::string data;
    std::string label_column = "label";
    std::string method = "pauc-ens";
    double alpha = 0.0, beta = 0.2;
    double nu = 0.25;
    int iters = 10;
    double epsilon = 1e-4;
    int tree_depth = 3;
    double shrinkage = 1.0;
    double cp_eps = 1e-4;
    int cp_max_iter = 1000;
    int bootstrap_rounds = 0;
    std::string out;
    std::string log_path;
    std::string validate;
    std::string nu_grid;
};

void write_ensemble_log(const paucens::TrainResult& result, const std::string& path) {
    std::ofstream log(path);
    if (!log) throw paucens::DataError("cannot write '" + path + "'");
    const paucens::ConvergenceReport checks = paucens::convergence_report(result.log);
    for (std::size_t i = 0; i < result.log.records.size(); ++i) {
        const paucens::IterationRecord& r = result.log.records[i];
        const paucens::ConvergenceCheck& check = checks.rows[i];
        nlohmann::json line{{"t", r.t},
                            {"edge", r.edge},
                            {"stationarity", r.stationarity},
                            {"cp_iterations", r.cp_iterations},
                            {"working_set", r.working_set},
                            {"xi", r.xi},
                            {"objective", r.objective},
                            {"objective_decrease", r.objective_decrease},
                            {"newest_phi_gap", r.newest_phi_gap},
                            {"decrease_bound", r.decrease_bound},
                            {"decrease_bound_damped", r.decrease_bound_damped},
                            {"monotone_ok", check.monotone_ok},
                            {"decrease_floor_ok", check.bound_ok},
                            {"decrease_floor_damped_ok", check.bound_damped_ok}};
        log << line.dump() << '\n';
    }
    nlohmann::json tail{{"stop", paucens::to_string(result.log.stop)},
                        {"initial_objective", result.log.initial_objective}};
    log << tail.dump() << '\n';
}

int run_train(const TrainArgs& args) {
    // Flag-level validation before any file work.
    if (args.method != "pauc-ens" && args.method != "adaboost")
        throw std::invalid_argument("train: unknown method '" + args.method + "'");
    if (args.method == "pauc-ens") paucens::PaucRange(args.alpha, args.beta);
    if (args.iters < 1) throw std::invalid_argument("train: --iters must be >= 1");
    if (!args.nu_grid.empty() && args.validate.empty())
        throw std::invalid_argument("train: --nu-grid needs --validate");

    const paucens::Dataset train_data = paucens::load_csv(args.data, args.label_column);
    if (args.bootstrap_rounds > 0)
        std::cerr << "note: --bootstrap-rounds is a no-op for in-memory datasets; "
                     "there is no negative corpus to mine\n";

    if (args.method == "adaboost") {
        paucens::AdaBoostConfig cfg;
        cfg.t_max = args.iters;
        cfg.tree_depth = args.tree_depth;
        cfg.shrinkage = args.shrinkage;
        const paucens::AdaBoostResult result = paucens::adaboost_train(train_data, cfg);
        paucens::save_model(paucens::to_model(result.model), args.out);
        if (!args.log_path.empty()) {
            std::ofstream log(args.log_path);
            if (!log) throw paucens::DataError("cannot write '" + args.log_path + "'");
            for (std::size_t t = 0; t < result.rounds.size(); ++t) {
                nlohmann::json line{{"t", t},
                                    {"weighted_error", result.rounds[t].weighted_error},
                                    {"coefficient", result.rounds[t].coefficient}};
                log << line.dump() << '\n';
            }
        }
        std::cout << "method adaboost\nlearners " << result.model.learners.size()
                  << "\nstopped_early " << (result.stopped_early ? 1 : 0) << '\n';
        return kExitOk;
    }
    paucens::TrainConfig cfg;
    cfg.range = paucens::PaucRange(args.alpha, args.beta);
    cfg.nu = args.nu;
    cfg.t_max = args.iters;
    cfg.epsilon = args.epsilon;
    cfg.tree_depth = args.tree_depth;
    cfg.cp.eps = args.cp_eps;
    cfg.cp.max_iterations = args.cp_max_iter;

    std::optional<paucens::Dataset> val_data;
    if (!args.validate.empty())
        val_data = paucens::load_csv(args.validate, args.label_column);

    paucens::TrainResult result;
    double chosen_nu = args.nu;
    if (val_data && !args.nu_grid.empty()) {
        double best_pauc = -1;
        bool first = true;
        for (const std::string& token : split_list(args.nu_grid)) {
            const double candidate = parse_strict_double(token, "--nu-grid");
            paucens::TrainConfig grid_cfg = cfg;
            grid_cfg.nu = candidate;
            paucens::TrainResult r = paucens::train(train_data, grid_cfg);
            const double score =
                paucens::pauc(r.model.scores(val_data->positives),
                              r.model.scores(val_data->negatives), cfg.range);
            if (first || score > best_pauc) {
                best_pauc = score;
                result = std::move(r);
                chosen_nu = candidate;
                first = false;
            }
        }
        std::cout << "validated_nu " << fmt(chosen_nu) << "\nvalidation_pauc "
                  << fmt(best_pauc) << '\n';
    } else {
        result = paucens::train(train_data, cfg);
    }

    paucens::save_model(paucens::to_model(result.model), args.out);
    if (!args.log_path.empty()) write_ensemble_log(result, args.log_path);
    std::cout << "method pauc-ens\nlearners " << result.model.learners.size()
              << "\nstop " << paucens::to_string(result.log.stop) << '\n';
    return kExitOk;
}

struct EvalArgs {
    std::string model;
    std::string data;
    std::string scores;
    std::string label_column = "label";
    double alpha = -1, beta = -1;  // negative = take from model / defaults
    std::string roc_out;
    std::string out;
};

void write_roc(const std::vector<std::pair<double, double>>& points, std::ostream& out) {
    out << "fpr,tpr\n";
    for (const auto& [fpr, tpr] : points) out << fmt(fpr) << ',' << fmt(tpr) << '\n';
}

int run_eval(const EvalArgs& args, bool roc_only) {
    Eigen::VectorXd pos_scores, neg_scores;
    double alpha = args.alpha, beta = args.beta;

    if (!args.scores.empty()) {
        // Two-column CSV: a score column and the label column.
        const paucens::Dataset scored = paucens::load_csv(args.scores, args.label_column);
        if (scored.dim() != 1)
            throw paucens::DataError(args.scores + ": expected exactly one score column");
        pos_scores = scored.positives.col(0);
        neg_scores = scored.negatives.col(0);
    } else {
        if (args.model.empty() || args.data.empty())
            throw std::invalid_argument("eval: need --scores or both --model and --data");
        const paucens::Model model = paucens::load_model(args.model);
        const paucens::Dataset data = paucens::load_csv(args.data, args.label_column);
        if (model.dim > 0 && data.dim() != model.dim)
            throw paucens::DataError("eval: model expects dimension " +
                                     std::to_string(model.dim) + ", data has " +
                                     std::to_string(data.dim()));
        pos_scores = model.scores(data.positives);
        neg_scores = model.scores(data.negatives);
        if (model.method == "pauc-ens") {
            if (alpha < 0) alpha = model.alpha;
            if (beta < 0) beta = model.beta;
        }
    }
    if (alpha < 0) alpha = 0.0;
    if (beta < 0) beta = 1.0;

    const auto points = paucens::roc_points(pos_scores, neg_scores);
    if (roc_only) {
        if (args.out.empty()) {
            write_roc(points, std::cout);
        } else {
            std::ofstream file(args.out);
            if (!file) throw paucens::DataError("cannot write '" + args.out + "'");
            write_roc(points, file);
        }
        return kExitOk;
    }

    const paucens::PaucRange range(alpha, beta);
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!args.out.empty()) {
        file.open(args.out);
        if (!file) throw paucens::DataError("cannot write '" + args.out + "'");
        out = &file;
    }
    *out << "auc " << fmt(paucens::auc(pos_scores, neg_scores)) << '\n';
    *out << "pauc " << fmt(paucens::pauc(pos_scores, neg_scores, range)) << '\n';
    *out << "alpha " << fmt(alpha) << "\nbeta " << fmt(beta) << '\n';
    if (!args.roc_out.empty()) {
        std::ofstream roc_file(args.roc_out);
        if (!roc_file) throw paucens::DataError("cannot write '" + args.roc_out + "'");
        write_roc(points, roc_file);
    }
    return kExitOk;
}

int run_selftest(std::uint64_t seed, bool inject_tie_fault) {
    if (inject_tie_fault) paucens::testhooks::set_pessimistic_tie_rule(false);
    const auto suites = paucens::selftest::run_all(seed);
    bool all_passed = true;
    for (const auto& suite : suites) {
        std::cout << (suite.passed() ? "[PASS] " : "[FAIL] ") << suite.name << " ("
                  << suite.cases << " cases";
        if (!suite.passed()) std::cout << ", " << suite.failures << " failures";
        std::cout << ")\n";
        for (const std::string& message : suite.messages)
            std::cout << "       " << message << '\n';
        all_passed &= suite.passed();
    }
    return all_passed ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"partial-AUC ensemble training and spatially pooled features"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read defaults from an INI file; flags win");

    GenToyArgs gen_args;
    CLI::App* gen = app.add_subcommand("gen-toy", "generate the radial toy dataset");
    gen->add_option("--seed", gen_args.seed);
    gen->add_option("--n-train", gen_args.n_train);
    gen->add_option("--n-val", gen_args.n_val);
    gen->add_option("--n-test", gen_args.n_test);
    gen->add_option("--pos-radius-max", gen_args.pos_radius_max);
    gen->add_option("--neg-radius-mean", gen_args.neg_radius_mean);
    gen->add_option("--neg-radius-std", gen_args.neg_radius_std);
    gen->add_option("--out", gen_args.out, "train.csv,test.csv or train,val,test")
        ->required();

    ExtractArgs extract_args;
    CLI::App* extract =
        app.add_subcommand("extract", "extract pooled features from an image");
    extract->add_option("input", extract_args.input, "PGM/PPM/rawfloat image")->required();
    extract->add_option("--features", extract_args.features,
                        "comma list: sp-cov,sp-lbp,luv,mag,orient");
    extract->add_option("--window", extract_args.window, "WxH, default whole image");
    extract->add_option("--stride", extract_args.stride);
    extract->add_option("--label", extract_args.label, "label column value");
    extract->add_option("--out", extract_args.out, "output CSV (default stdout)");

    TrainArgs train_args;
    CLI::App* train = app.add_subcommand("train", "train a ranking ensemble");
    train->add_option("--data", train_args.data)->required();
    train->add_option("--label-column", train_args.label_column);
    train->add_option("--method", train_args.method, "pauc-ens or adaboost");
    train->add_option("--alpha", train_args.alpha);
    train->add_option("--beta", train_args.beta);
    train->add_option("--nu", train_args.nu);
    train->add_option("--iters", train_args.iters);
    train->add_option("--epsilon", train_args.epsilon, "stationarity stop; 0 disables");
    train->add_option("--tree-depth", train_args.tree_depth, "0 = decision stumps");
    train->add_option("--shrinkage", train_args.shrinkage, "adaboost only");
    train->add_option("--cp-eps", train_args.cp_eps);
    train->add_option("--cp-max-iter", train_args.cp_max_iter);
    train->add_option("--bootstrap-rounds", train_args.bootstrap_rounds,
                      "hard-negative mining rounds; no-op for CSV datasets");
    train->add_option("--out", train_args.out)->required();
    train->add_option("--log", train_args.log_path, "line-delimited JSON records");
    train->add_option("--validate", train_args.validate, "validation CSV for --nu-grid");
    train->add_option("--nu-grid", train_args.nu_grid,
                      "comma list of nu values, best by validation pAUC");

    EvalArgs eval_args;
    CLI::App* eval = app.add_subcommand("eval", "report AUC/pAUC for a model or scores");
    eval->add_option("--model", eval_args.model);
    eval->add_option("--data", eval_args.data);
    eval->add_option("--scores", eval_args.scores, "CSV with one score column + labels");
    eval->add_option("--label-column", eval_args.label_column);
    eval->add_option("--alpha", eval_args.alpha);
    eval->add_option("--beta", eval_args.beta);
    eval->add_option("--roc", eval_args.roc_out, "also write the ROC curve CSV");
    eval->add_option("--out", eval_args.out, "write metrics here instead of stdout");

    EvalArgs roc_args;
    CLI::App* roc = app.add_subcommand("roc", "emit the ROC curve as CSV");
    roc->add_option("--model", roc_args.model);
    roc->add_option("--data", roc_args.data);
    roc->add_option("--scores", roc_args.scores);
    roc->add_option("--label-column", roc_args.label_column);
    roc->add_option("--out", roc_args.out, "output CSV (default stdout)");

    std::uint64_t selftest_seed = 20240915;
    bool inject_tie_fault = false;
    CLI::App* selftest = app.add_subcommand("selftest", "run the oracle suites");
    selftest->add_option("--seed", selftest_seed);
    selftest
        ->add_flag("--inject-tie-fault", inject_tie_fault,
                   "flip the metric tie rule; the metric-oracle suite must fail")
        ->group("");  // hidden: fault-injection check only

    try {
        app.parse(argc, argv);
        if (gen->parsed()) return run_gen_toy(gen_args);
        if (extract->parsed()) return run_extract(extract_args);
        if (train->parsed()) return run_train(train_args);
        if (eval->parsed()) return run_eval(eval_args, false);
        if (roc->parsed()) return run_eval(roc_args, true);
        if (selftest->parsed()) return run_selftest(selftest_seed, inject_tie_fault);
        return kExitConfig;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    } catch (const paucens::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const paucens::NumericError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}
