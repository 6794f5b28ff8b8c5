#include "stocklab/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "stocklab/csv.hpp"
#include "stocklab/errors.hpp"
#include "stocklab/rng.hpp"

namespace stocklab {

void TreeConfig::validate() const {
    if (min_samples_split < 2) throw std::invalid_argument("min_samples_split must be >= 2");
    if (min_samples_leaf < 1) throw std::invalid_argument("min_samples_leaf must be >= 1");
    if (min_samples_leaf > min_samples_split)
        throw std::invalid_argument("min_samples_leaf must be <= min_samples_split");
    if (!(max_features > 0.0 && max_features <= 1.0))
        throw std::invalid_argument("max_features must be in (0,1]");
}

double RegressionTree::predict_row(const double* row) const {
    std::size_t i = 0;
    while (!nodes[i].is_leaf)
        i = row[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left : nodes[i].right;
    return nodes[i].prediction;
}

std::size_t RegressionTree::depth() const {
    std::size_t best = 0;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
        auto [i, d] = stack.back();
        stack.pop_back();
        best = std::max(best, d);
        if (!nodes[i].is_leaf) {
            stack.push_back({nodes[i].left, d + 1});
            stack.push_back({nodes[i].right, d + 1});
        }
    }
    return best;
}

namespace {

struct TreeBuilder {
    const Matrix& X;
    const std::vector<double>& y;
    const TreeConfig& config;
    Rng rng;
    RegressionTree tree;

    TreeBuilder(const Matrix& x, const std::vector<double>& targets, const TreeConfig& cfg,
                std::uint64_t seed)
        : X(x), y(targets), config(cfg), rng(seed) {
        tree.n_features = X.cols;
    }

    static double sse(double sum, double sum_sq, double n) { return sum_sq - sum * sum / n; }

    std::vector<std::size_t> feature_subset() {
        const std::size_t d = X.cols;
        std::size_t m = static_cast<std::size_t>(config.max_features * static_cast<double>(d));
        if (m < 1) m = 1;
        if (m > d) m = d;
        if (m == d) {
            std::vector<std::size_t> all(d);
            std::iota(all.begin(), all.end(), 0);
            return all;
        }
        std::vector<std::size_t> pool(d);
        std::iota(pool.begin(), pool.end(), 0);
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t j = static_cast<std::size_t>(
                rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(d - 1)));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(m);
        std::sort(pool.begin(), pool.end());  // ascending order keeps tie-breaks deterministic
        return pool;
    }

    std::size_t build(std::vector<std::size_t>& idx, std::size_t depth) {
        const std::size_t n = idx.size();
        double sum = 0.0, sum_sq = 0.0;
        for (std::size_t i : idx) {
            sum += y[i];
            sum_sq += y[i] * y[i];
        }
        const double node_mean = sum / static_cast<double>(n);

        const bool can_split = n >= config.min_samples_split && n >= 2 * config.min_samples_leaf &&
                               (config.max_depth == kUnlimitedDepth || depth < config.max_depth);

        double best_gain = 0.0;
        std::size_t best_feature = 0;
        double best_threshold = 0.0;
        bool found = false;

        if (can_split) {
            const double parent_sse = sse(sum, sum_sq, static_cast<double>(n));
            const auto features = feature_subset();
            std::vector<std::size_t> sorted = idx;
            for (std::size_t f : features) {
                std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
                    return X.at(a, f) < X.at(b, f);
                });
                double left_sum = 0.0, left_sq = 0.0;
                for (std::size_t pos = 0; pos + 1 < n; ++pos) {
                    const std::size_t i = sorted[pos];
                    left_sum += y[i];
                    left_sq += y[i] * y[i];
                    const double v = X.at(i, f);
                    const double next = X.at(sorted[pos + 1], f);
                    if (v == next) continue;  // split only between distinct values
                    const std::size_t n_left = pos + 1;
                    const std::size_t n_right = n - n_left;
                    if (n_left < config.min_samples_leaf || n_right < config.min_samples_leaf)
                        continue;
                    const double gain =
                        parent_sse - sse(left_sum, left_sq, static_cast<double>(n_left)) -
                        sse(sum - left_sum, sum_sq - left_sq, static_cast<double>(n_right));
                    const double threshold = v + (next - v) / 2.0;
                    if (gain > best_gain ||
                        (found && gain == best_gain &&
                         (f < best_feature || (f == best_feature && threshold < best_threshold)))) {
                        if (gain > 0.0) {
                            best_gain = gain;
                            best_feature = f;
                            best_threshold = threshold;
                            found = true;
                        }
                    }
                }
            }
        }

        const std::size_t node_index = tree.nodes.size();
        tree.nodes.emplace_back();
        if (!found) {
            tree.nodes[node_index].is_leaf = true;
            tree.nodes[node_index].prediction = node_mean;
            tree.nodes[node_index].count = n;
            return node_index;
        }

        std::vector<std::size_t> left_idx, right_idx;
        left_idx.reserve(n);
        right_idx.reserve(n);
        for (std::size_t i : idx) {
            if (X.at(i, best_feature) <= best_threshold) left_idx.push_back(i);
            else right_idx.push_back(i);
        }
        tree.nodes[node_index].is_leaf = false;
        tree.nodes[node_index].feature = best_feature;
        tree.nodes[node_index].threshold = best_threshold;
        tree.nodes[node_index].gain = best_gain;
        tree.nodes[node_index].count = n;
        const std::size_t left = build(left_idx, depth + 1);
        const std::size_t right = build(right_idx, depth + 1);
        tree.nodes[node_index].left = left;
        tree.nodes[node_index].right = right;
        return node_index;
    }
};

}  // namespace

RegressionTree fit_tree(const Matrix& X, const std::vector<double>& y, const TreeConfig& config,
                        std::uint64_t seed) {
    config.validate();
    if (X.rows == 0 || X.rows != y.size())
        throw std::invalid_argument("fit_tree needs nonempty X with matching y");
    TreeBuilder builder(X, y, config, seed);
    std::vector<std::size_t> idx(X.rows);
    std::iota(idx.begin(), idx.end(), 0);
    builder.build(idx, 0);
    return std::move(builder.tree);
}

Forest fit_forest(const Matrix& X, const std::vector<double>& y, const ForestConfig& config) {
    config.tree.validate();
    if (config.n_estimators < 1) throw std::invalid_argument("n_estimators must be >= 1");
    if (X.rows == 0 || X.rows != y.size())
        throw std::invalid_argument("fit_forest needs nonempty X with matching y");

    Forest forest;
    forest.config = config;
    forest.trees.reserve(config.n_estimators);
    for (std::size_t t = 0; t < config.n_estimators; ++t) {
        const std::uint64_t tree_seed = Rng::derive_seed(config.seed, t);
        if (config.bootstrap) {
            Rng rng(tree_seed);
            Matrix Xb(X.rows, X.cols);
            std::vector<double> yb(X.rows);
            for (std::size_t i = 0; i < X.rows; ++i) {
                const std::size_t j = static_cast<std::size_t>(
                    rng.uniform_int(0, static_cast<std::int64_t>(X.rows - 1)));
                for (std::size_t c = 0; c < X.cols; ++c) Xb.at(i, c) = X.at(j, c);
                yb[i] = y[j];
            }
            forest.trees.push_back(fit_tree(Xb, yb, config.tree, Rng::derive_seed(tree_seed, 1)));
        } else {
            forest.trees.push_back(fit_tree(X, y, config.tree, Rng::derive_seed(tree_seed, 1)));
        }
    }
    return forest;
}

Gbm fit_gbm(const Matrix& X, const std::vector<double>& y, const GBMConfig& config) {
    config.tree.validate();
    if (config.n_estimators < 1) throw std::invalid_argument("n_estimators must be >= 1");
    if (config.learning_rate < 0.0 || config.learning_rate > 1.0)
        throw std::invalid_argument("learning_rate must be in [0,1]");
    if (X.rows == 0 || X.rows != y.size())
        throw std::invalid_argument("fit_gbm needs nonempty X with matching y");

    Gbm gbm;
    gbm.config = config;
    double sum = 0.0;
    for (double v : y) sum += v;
    gbm.initial_prediction = sum / static_cast<double>(y.size());

    std::vector<double> current(y.size(), gbm.initial_prediction);
    std::vector<double> residual(y.size());
    for (std::size_t stage = 0; stage < config.n_estimators; ++stage) {
        for (std::size_t i = 0; i < y.size(); ++i) residual[i] = y[i] - current[i];
        RegressionTree tree =
            fit_tree(X, residual, config.tree, Rng::derive_seed(config.seed, stage));
        for (std::size_t i = 0; i < y.size(); ++i)
            current[i] += config.learning_rate * tree.predict_row(X.row(i));
        gbm.trees.push_back(std::move(tree));

        double mse = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i)
            mse += (y[i] - current[i]) * (y[i] - current[i]);
        gbm.stage_train_mse.push_back(mse / static_cast<double>(y.size()));
    }
    return gbm;
}

namespace {

void check_width(std::size_t model_features, const Matrix& X) {
    if (X.cols != model_features)
        throw std::invalid_argument("feature count mismatch: model expects " +
                                    std::to_string(model_features) + ", got " +
                                    std::to_string(X.cols));
}

}  // namespace

std::vector<double> predict(const RegressionTree& tree, const Matrix& X) {
    check_width(tree.n_features, X);
    std::vector<double> out(X.rows);
    for (std::size_t r = 0; r < X.rows; ++r) out[r] = tree.predict_row(X.row(r));
    return out;
}

std::vector<double> predict(const Forest& forest, const Matrix& X) {
    check_width(forest.trees.front().n_features, X);
    std::vector<double> out(X.rows, 0.0);
    for (const auto& tree : forest.trees)
        for (std::size_t r = 0; r < X.rows; ++r) out[r] += tree.predict_row(X.row(r));
    const double scale = 1.0 / static_cast<double>(forest.trees.size());
    for (double& v : out) v *= scale;
    return out;
}

std::vector<double> predict(const Gbm& gbm, const Matrix& X) {
    if (!gbm.trees.empty()) check_width(gbm.trees.front().n_features, X);
    std::vector<double> out(X.rows, gbm.initial_prediction);
    for (const auto& tree : gbm.trees)
        for (std::size_t r = 0; r < X.rows; ++r)
            out[r] += gbm.config.learning_rate * tree.predict_row(X.row(r));
    return out;
}

std::vector<double> feature_importance(const Forest& forest) {
    if (forest.trees.empty()) return {};
    std::vector<double> totals(forest.trees.front().n_features, 0.0);
    for (const auto& tree : forest.trees)
        for (const auto& node : tree.nodes)
            if (!node.is_leaf) totals[node.feature] += node.gain;
    double sum = 0.0;
    for (double v : totals) sum += v;
    if (sum > 0.0)
        for (double& v : totals) v /= sum;
    return totals;
}

ForestConfig CandidateDraw::to_forest_config(std::uint64_t seed) const {
    ForestConfig config;
    config.n_estimators = n_estimators;
    config.tree.max_depth = max_depth;
    config.tree.min_samples_split = min_samples_split;
    config.tree.min_samples_leaf = min_samples_leaf;
    config.seed = seed;
    return config;
}

GBMConfig CandidateDraw::to_gbm_config(std::uint64_t seed) const {
    GBMConfig config;
    config.n_estimators = n_estimators;
    config.learning_rate = learning_rate;
    config.tree.max_depth = max_depth;
    config.tree.min_samples_split = min_samples_split;
    config.tree.min_samples_leaf = min_samples_leaf;
    config.seed = seed;
    return config;
}

std::vector<CandidateDraw> sample_candidates(const SearchSpace& space, std::size_t n_iter,
                                             std::uint64_t seed) {
    if (n_iter < 1) throw std::invalid_argument("n_iter must be >= 1");
    Rng rng(seed);
    std::vector<CandidateDraw> draws;
    draws.reserve(n_iter);
    for (std::size_t i = 0; i < n_iter; ++i) {
        CandidateDraw d;
        d.n_estimators =
            static_cast<std::size_t>(rng.uniform_int(space.n_estimators.lo, space.n_estimators.hi));
        d.max_depth =
            static_cast<std::size_t>(rng.uniform_int(space.max_depth.lo, space.max_depth.hi));
        d.learning_rate = rng.uniform(space.learning_rate.lo, space.learning_rate.hi);
        d.min_samples_split = static_cast<std::size_t>(
            rng.uniform_int(space.min_samples_split.lo, space.min_samples_split.hi));
        d.min_samples_leaf = static_cast<std::size_t>(
            rng.uniform_int(space.min_samples_leaf.lo, space.min_samples_leaf.hi));
        // keep the draw a valid TreeConfig
        d.min_samples_split = std::max(d.min_samples_split, d.min_samples_leaf);
        draws.push_back(d);
    }
    return draws;
}

std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> kfold_indices(
    std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("cv_folds must be >= 2");
    if (k > n) throw std::invalid_argument("fold count exceeds rows");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t j =
            static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i)));
        std::swap(order[i], order[j]);
    }
    std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> folds(k);
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t begin = f * n / k;
        const std::size_t end = (f + 1) * n / k;
        auto& [train, test] = folds[f];
        for (std::size_t i = 0; i < n; ++i) {
            if (i >= begin && i < end) test.push_back(order[i]);
            else train.push_back(order[i]);
        }
        std::sort(train.begin(), train.end());
        std::sort(test.begin(), test.end());
    }
    return folds;
}

namespace {

std::vector<double> select(const std::vector<double>& v, const std::vector<std::size_t>& idx) {
    std::vector<double> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(v[i]);
    return out;
}

double fold_mse(const std::vector<double>& actual, const std::vector<double>& predicted) {
    double s = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i)
        s += (actual[i] - predicted[i]) * (actual[i] - predicted[i]);
    return s / static_cast<double>(actual.size());
}

double r2_score(const std::vector<double>& actual, const std::vector<double>& predicted) {
    double sum = 0.0;
    for (double a : actual) sum += a;
    const double mean = sum / static_cast<double>(actual.size());
    double ss_tot = 0.0, ss_res = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        ss_tot += (actual[i] - mean) * (actual[i] - mean);
        ss_res += (actual[i] - predicted[i]) * (actual[i] - predicted[i]);
    }
    if (ss_tot == 0.0) return 0.0;
    return 1.0 - ss_res / ss_tot;
}

}  // namespace

SearchResult randomized_search(const Matrix& X, const std::vector<double>& y, EnsembleKind kind,
                               const SearchSpace& space, std::size_t n_iter, std::size_t cv_folds,
                               std::uint64_t seed, const SearchOptions& options) {
    const auto draws = sample_candidates(space, n_iter, seed);
    const auto folds = kfold_indices(X.rows, cv_folds, Rng::derive_seed(seed, 0x0F01D5));

    auto score_candidate = [&](const CandidateDraw& draw) {
        double total = 0.0;
        for (const auto& [train_idx, test_idx] : folds) {
            const Matrix Xtr = X.select_rows(train_idx);
            const Matrix Xte = X.select_rows(test_idx);
            const auto ytr = select(y, train_idx);
            const auto yte = select(y, test_idx);
            std::vector<double> pred;
            if (kind == EnsembleKind::forest) {
                pred = predict(fit_forest(Xtr, ytr, draw.to_forest_config(seed)), Xte);
            } else {
                pred = predict(fit_gbm(Xtr, ytr, draw.to_gbm_config(seed)), Xte);
            }
            total += -fold_mse(yte, pred);
        }
        return total / static_cast<double>(folds.size());
    };

    SearchResult result;
    result.candidates.reserve(draws.size());
    std::vector<double> scores(draws.size());
    if (options.parallel) {
        std::vector<std::future<double>> futures;
        futures.reserve(draws.size());
        for (const auto& draw : draws)
            futures.push_back(std::async(std::launch::async, score_candidate, draw));
        for (std::size_t i = 0; i < draws.size(); ++i) scores[i] = futures[i].get();
    } else {
        for (std::size_t i = 0; i < draws.size(); ++i) scores[i] = score_candidate(draws[i]);
    }

    std::size_t best_index = 0;
    for (std::size_t i = 0; i < draws.size(); ++i) {
        result.candidates.push_back({draws[i], scores[i]});
        if (scores[i] > scores[best_index]) best_index = i;  // ties keep the earliest draw
    }
    result.best = draws[best_index];
    result.best_score = scores[best_index];
    return result;
}

LearningCurve learning_curve(const TrainFn& builder, const Matrix& X, const std::vector<double>& y,
                             const std::vector<double>& fractions, std::size_t cv_folds,
                             std::uint64_t seed) {
    for (std::size_t i = 0; i < fractions.size(); ++i) {
        if (!(fractions[i] > 0.0 && fractions[i] <= 1.0))
            throw std::invalid_argument("fractions must be in (0,1]");
        if (i > 0 && fractions[i] <= fractions[i - 1])
            throw std::invalid_argument("fractions must be strictly increasing");
    }
    const auto folds = kfold_indices(X.rows, cv_folds, seed);

    // Per-fold shuffled training pools; a fraction trains on a prefix.
    std::vector<std::vector<std::size_t>> pools;
    pools.reserve(folds.size());
    for (std::size_t f = 0; f < folds.size(); ++f) {
        std::vector<std::size_t> pool = folds[f].first;
        Rng rng(Rng::derive_seed(seed, 100 + f));
        for (std::size_t i = pool.size() - 1; i > 0; --i) {
            const std::size_t j =
                static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i)));
            std::swap(pool[i], pool[j]);
        }
        pools.push_back(std::move(pool));
    }

    LearningCurve curve;
    for (double fraction : fractions) {
        double train_total = 0.0, val_total = 0.0;
        std::size_t size_total = 0;
        for (std::size_t f = 0; f < folds.size(); ++f) {
            const auto& pool = pools[f];
            const std::size_t m = static_cast<std::size_t>(
                std::llround(fraction * static_cast<double>(pool.size())));
            if (m < 2) throw std::invalid_argument("fraction produces fewer than 2 samples");
            std::vector<std::size_t> subset(pool.begin(), pool.begin() + m);
            std::sort(subset.begin(), subset.end());
            const Matrix Xtr = X.select_rows(subset);
            const auto ytr = select(y, subset);
            const auto predictor = builder(Xtr, ytr, Rng::derive_seed(seed, 200 + f));
            train_total += r2_score(ytr, predictor(Xtr));
            const Matrix Xte = X.select_rows(folds[f].second);
            val_total += r2_score(select(y, folds[f].second), predictor(Xte));
            size_total += m;
        }
        const std::size_t size =
            static_cast<std::size_t>(std::llround(static_cast<double>(size_total) /
                                                  static_cast<double>(folds.size())));
        if (!curve.sizes.empty() && size <= curve.sizes.back())
            throw std::invalid_argument("fractions too close together for this dataset size");
        curve.sizes.push_back(size);
        curve.train_scores.push_back(train_total / static_cast<double>(folds.size()));
        curve.validation_scores.push_back(val_total / static_cast<double>(folds.size()));
    }
    return curve;
}

double cv_r2_score(const TrainFn& builder, const Matrix& X, const std::vector<double>& y,
                   std::size_t cv_folds, std::uint64_t seed) {
    const auto folds = kfold_indices(X.rows, cv_folds, seed);
    double total = 0.0;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        const Matrix Xtr = X.select_rows(folds[f].first);
        const auto ytr = select(y, folds[f].first);
        const auto predictor = builder(Xtr, ytr, Rng::derive_seed(seed, 200 + f));
        const Matrix Xte = X.select_rows(folds[f].second);
        total += r2_score(select(y, folds[f].second), predictor(Xte));
    }
    return total / static_cast<double>(folds.size());
}

namespace {

nlohmann::json tree_to_json_value(const RegressionTree& tree) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& node : tree.nodes) {
        nodes.push_back({{"is_leaf", node.is_leaf},
                         {"feature", node.feature},
                         {"threshold", node.threshold},
                         {"gain", node.gain},
                         {"left", node.left},
                         {"right", node.right},
                         {"prediction", node.prediction},
                         {"count", node.count}});
    }
    return {{"n_features", tree.n_features}, {"nodes", nodes}};
}

RegressionTree tree_from_json_value(const nlohmann::json& j) {
    RegressionTree tree;
    tree.n_features = j.at("n_features").get<std::size_t>();
    for (const auto& jn : j.at("nodes")) {
        RegressionTree::Node node;
        node.is_leaf = jn.at("is_leaf").get<bool>();
        node.feature = jn.at("feature").get<std::size_t>();
        node.threshold = jn.at("threshold").get<double>();
        node.gain = jn.at("gain").get<double>();
        node.left = jn.at("left").get<std::size_t>();
        node.right = jn.at("right").get<std::size_t>();
        node.prediction = jn.at("prediction").get<double>();
        node.count = jn.at("count").get<std::size_t>();
        tree.nodes.push_back(node);
    }
    return tree;
}

void require_version(const nlohmann::json& j) {
    if (!j.contains("format_version") || j.at("format_version").get<int>() != 1)
        throw DataError("unsupported model document version");
}

}  // namespace

std::string to_json(const RegressionTree& tree) {
    nlohmann::json j = {{"format_version", 1}, {"model", "tree"}, {"tree", tree_to_json_value(tree)}};
    return j.dump(2);
}

std::string to_json(const Forest& forest) {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& tree : forest.trees) trees.push_back(tree_to_json_value(tree));
    nlohmann::json j = {{"format_version", 1},
                        {"model", "forest"},
                        {"n_estimators", forest.config.n_estimators},
                        {"bootstrap", forest.config.bootstrap},
                        {"seed", forest.config.seed},
                        {"trees", trees}};
    return j.dump(2);
}

std::string to_json(const Gbm& gbm) {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& tree : gbm.trees) trees.push_back(tree_to_json_value(tree));
    nlohmann::json j = {{"format_version", 1},
                        {"model", "gbm"},
                        {"n_estimators", gbm.config.n_estimators},
                        {"learning_rate", gbm.config.learning_rate},
                        {"seed", gbm.config.seed},
                        {"initial_prediction", gbm.initial_prediction},
                        {"trees", trees}};
    return j.dump(2);
}

RegressionTree tree_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    require_version(j);
    return tree_from_json_value(j.at("tree"));
}

Forest forest_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    require_version(j);
    Forest forest;
    forest.config.n_estimators = j.at("n_estimators").get<std::size_t>();
    forest.config.bootstrap = j.at("bootstrap").get<bool>();
    forest.config.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& jt : j.at("trees")) forest.trees.push_back(tree_from_json_value(jt));
    return forest;
}

Gbm gbm_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    require_version(j);
    Gbm gbm;
    gbm.config.n_estimators = j.at("n_estimators").get<std::size_t>();
    gbm.config.learning_rate = j.at("learning_rate").get<double>();
    gbm.config.seed = j.at("seed").get<std::uint64_t>();
    gbm.initial_prediction = j.at("initial_prediction").get<double>();
    for (const auto& jt : j.at("trees")) gbm.trees.push_back(tree_from_json_value(jt));
    return gbm;
}

void write_learning_curve_csv(const LearningCurve& curve, const std::string& path) {
    CsvTable table;
    table.header = {"train_size", "train_score", "validation_score"};
    for (std::size_t i = 0; i < curve.sizes.size(); ++i)
        table.rows.push_back({std::to_string(curve.sizes[i]), format_double(curve.train_scores[i]),
                              format_double(curve.validation_scores[i])});
    write_csv(path, table);
}

}  // namespace stocklab
