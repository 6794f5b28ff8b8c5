#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "stocklab/matrix.hpp"

namespace stocklab {

inline constexpr std::size_t kUnlimitedDepth = std::numeric_limits<std::size_t>::max();

struct TreeConfig {
    std::size_t max_depth = kUnlimitedDepth;
    std::size_t min_samples_split = 2;
    std::size_t min_samples_leaf = 1;
    double max_features = 1.0;  // fraction of features considered per split

    void validate() const;
};

/// Binary regression tree with greedy variance-reduction splits. Stored as
/// a flat node array; leaves carry the mean and sample count of their
/// training rows.
struct RegressionTree {
    struct Node {
        bool is_leaf = true;
        std::size_t feature = 0;
        double threshold = 0.0;
        double gain = 0.0;  // SSE reduction of the split
        std::size_t left = 0;
        std::size_t right = 0;
        double prediction = 0.0;
        std::size_t count = 0;
    };
    std::vector<Node> nodes;
    std::size_t n_features = 0;

    double predict_row(const double* row) const;
    std::size_t depth() const;
};

struct ForestConfig {
    std::size_t n_estimators = 100;
    TreeConfig tree;
    bool bootstrap = true;
    std::uint64_t seed = 0;
};

struct GBMConfig {
    std::size_t n_estimators = 100;
    double learning_rate = 0.1;
    TreeConfig tree;
    std::uint64_t seed = 0;
};

struct Forest {
    ForestConfig config;
    std::vector<RegressionTree> trees;
};

struct Gbm {
    GBMConfig config;
    double initial_prediction = 0.0;
    std::vector<RegressionTree> trees;
    std::vector<double> stage_train_mse;  // training MSE after each stage
};

RegressionTree fit_tree(const Matrix& X, const std::vector<double>& y, const TreeConfig& config,
                        std::uint64_t seed);
Forest fit_forest(const Matrix& X, const std::vector<double>& y, const ForestConfig& config);
Gbm fit_gbm(const Matrix& X, const std::vector<double>& y, const GBMConfig& config);

std::vector<double> predict(const RegressionTree& tree, const Matrix& X);
std::vector<double> predict(const Forest& forest, const Matrix& X);
std::vector<double> predict(const Gbm& gbm, const Matrix& X);

/// Total split SSE reduction per feature across all trees, normalized to
/// sum 1 (all zeros if the forest never split).
std::vector<double> feature_importance(const Forest& forest);

enum class EnsembleKind { forest, gbm };

struct IntRange {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
};
struct RealRange {
    double lo = 0.0;
    double hi = 0.0;
};

struct SearchSpace {
    IntRange n_estimators{50, 200};
    IntRange max_depth{2, 10};
    RealRange learning_rate{0.01, 0.1};
    IntRange min_samples_split{2, 20};
    IntRange min_samples_leaf{1, 20};
};

/// One sampled hyperparameter combination. min_samples_split is clamped up
/// to min_samples_leaf so every draw is a valid TreeConfig.
struct CandidateDraw {
    std::size_t n_estimators = 0;
    std::size_t max_depth = 0;
    double learning_rate = 0.0;
    std::size_t min_samples_split = 0;
    std::size_t min_samples_leaf = 0;

    ForestConfig to_forest_config(std::uint64_t seed) const;
    GBMConfig to_gbm_config(std::uint64_t seed) const;
};

struct ScoredCandidate {
    CandidateDraw draw;
    double mean_score = 0.0;  // mean negative MSE across folds
};

struct SearchResult {
    CandidateDraw best;
    double best_score = 0.0;
    std::vector<ScoredCandidate> candidates;  // in draw order
};

/// The candidates randomized_search would evaluate, in draw order. Each
/// candidate consumes a fixed number of draws in a fixed field order, so
/// the stream does not depend on how the space was declared.
std::vector<CandidateDraw> sample_candidates(const SearchSpace& space, std::size_t n_iter,
                                             std::uint64_t seed);

struct SearchOptions {
    bool parallel = false;
};

/// Uniform random search scored by k-fold mean negative MSE; ties keep the
/// earliest draw.
SearchResult randomized_search(const Matrix& X, const std::vector<double>& y, EnsembleKind kind,
                               const SearchSpace& space, std::size_t n_iter, std::size_t cv_folds,
                               std::uint64_t seed, const SearchOptions& options = {});

/// Seeded k-fold split of [0, n): shuffled, then cut into k contiguous
/// chunks. Returns (train, test) index pairs with both sides sorted.
std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> kfold_indices(
    std::size_t n, std::size_t k, std::uint64_t seed);

/// Trains on X/y and returns a predictor.
using PredictFn = std::function<std::vector<double>(const Matrix&)>;
using TrainFn = std::function<PredictFn(const Matrix&, const std::vector<double>&, std::uint64_t)>;

struct LearningCurve {
    std::vector<std::size_t> sizes;
    std::vector<double> train_scores;  // r2
    std::vector<double> validation_scores;
};

/// For each fraction, trains on that prefix of the shuffled training folds
/// and averages train/validation r2 over folds.
LearningCurve learning_curve(const TrainFn& builder, const Matrix& X, const std::vector<double>& y,
                             const std::vector<double>& fractions, std::size_t cv_folds,
                             std::uint64_t seed);

/// Mean validation r2 of the builder over a k-fold split; the fraction-1.0
/// point of learning_curve reproduces this exactly.
double cv_r2_score(const TrainFn& builder, const Matrix& X, const std::vector<double>& y,
                   std::size_t cv_folds, std::uint64_t seed);

/// Versioned JSON model documents (format_version 1).
std::string to_json(const RegressionTree& tree);
std::string to_json(const Forest& forest);
std::string to_json(const Gbm& gbm);
RegressionTree tree_from_json(const std::string& text);
Forest forest_from_json(const std::string& text);
Gbm gbm_from_json(const std::string& text);

void write_learning_curve_csv(const LearningCurve& curve, const std::string& path);

}  // namespace stocklab
