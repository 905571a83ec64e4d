#ifndef IACD_FEATSEL_HPP
#define IACD_FEATSEL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "iacd/errors.hpp"
#include "iacd/svm.hpp"

namespace iacd {

// Features that perfectly separate the classes (zero pooled variance,
// distinct means) rank first with this sentinel.
inline constexpr double kTScoreMax = std::numeric_limits<double>::max();

struct FeatureRanking {
    std::vector<std::pair<int, double>> entries;  // (feature index, |t|), descending

    std::vector<int> prefix(std::size_t q) const {
        std::vector<int> out;
        out.reserve(q);
        for (std::size_t i = 0; i < q && i < entries.size(); ++i)
            out.push_back(entries[i].first);
        return out;
    }
};

struct SelectionResult {
    std::size_t q = 0;
    std::vector<int> selected_indices;                   // prefix of the ranking
    std::map<std::size_t, double> cv_accuracy_by_size;   // candidate size -> mean CV accuracy
};

// Pooled-variance two-sample Student's t, |t| per feature.
inline std::vector<double> t_scores(const Matrix& vectors, const std::vector<int>& targets) {
    const std::size_t n = vectors.size();
    if (n == 0 || targets.size() != n) throw Error("t_scores: empty input");
    std::size_t n_pos = 0, n_neg = 0;
    for (int y : targets) (y == +1 ? n_pos : n_neg) += 1;
    if (n_pos < 2 || n_neg < 2)
        throw InsufficientSamples("each class needs >= 2 samples for a t statistic");
    const std::size_t dim = vectors.front().size();
    std::vector<double> scores(dim, 0.0);
    for (std::size_t f = 0; f < dim; ++f) {
        double sum_p = 0, sum_n = 0;
        for (std::size_t i = 0; i < n; ++i)
            (targets[i] == +1 ? sum_p : sum_n) += vectors[i][f];
        const double mean_p = sum_p / static_cast<double>(n_pos);
        const double mean_n = sum_n / static_cast<double>(n_neg);
        double ss_p = 0, ss_n = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = vectors[i][f] - (targets[i] == +1 ? mean_p : mean_n);
            (targets[i] == +1 ? ss_p : ss_n) += d * d;
        }
        const double pooled =
            (ss_p + ss_n) / static_cast<double>(n_pos + n_neg - 2);
        if (pooled == 0.0) {
            scores[f] = mean_p == mean_n ? 0.0 : kTScoreMax;
            continue;
        }
        const double se = std::sqrt(pooled) *
                          std::sqrt(1.0 / static_cast<double>(n_pos) +
                                    1.0 / static_cast<double>(n_neg));
        scores[f] = std::abs((mean_p - mean_n) / se);
    }
    return scores;
}

// Descending by score; ties broken by ascending feature index.
inline FeatureRanking rank_features(const std::vector<double>& scores) {
    FeatureRanking r;
    r.entries.reserve(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i)
        r.entries.push_back({static_cast<int>(i), scores[i]});
    std::stable_sort(r.entries.begin(), r.entries.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return r;
}

// Deterministic stratified k-fold assignment: per class, shuffle with the
// seed, deal round-robin. Returns fold id per sample.
inline std::vector<int> stratified_folds(const std::vector<int>& targets, int k,
                                         std::uint64_t seed) {
    if (k < 2) throw FoldError("k_folds must be >= 2");
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < targets.size(); ++i) by_class[targets[i]].push_back(i);
    std::vector<int> fold(targets.size(), 0);
    std::mt19937_64 rng(seed);
    for (auto& [label, idx] : by_class) {
        if (idx.size() < static_cast<std::size_t>(k))
            throw FoldError("class " + std::to_string(label) + " has " +
                            std::to_string(idx.size()) + " samples, fewer than " +
                            std::to_string(k) + " folds");
        std::shuffle(idx.begin(), idx.end(), rng);
        for (std::size_t i = 0; i < idx.size(); ++i)
            fold[idx[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
    }
    return fold;
}

namespace fsdetail {

inline Matrix take_columns(const Matrix& rows, const std::vector<int>& cols) {
    Matrix out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        std::vector<double> v;
        v.reserve(cols.size());
        for (int c : cols) v.push_back(r[static_cast<std::size_t>(c)]);
        out.push_back(std::move(v));
    }
    return out;
}

inline double cv_accuracy(const Matrix& x, const std::vector<int>& y,
                          const std::vector<int>& fold, int k, const KernelSpec& kernel,
                          double C, int max_iter, double tol) {
    double acc_sum = 0;
    for (int f = 0; f < k; ++f) {
        Matrix xt, xv;
        std::vector<int> yt, yv;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (fold[i] == f) {
                xv.push_back(x[i]);
                yv.push_back(y[i]);
            } else {
                xt.push_back(x[i]);
                yt.push_back(y[i]);
            }
        }
        const TrainedSVM m = train_l2svm(xt, yt, kernel, C, max_iter, tol);
        std::size_t correct = 0;
        for (std::size_t i = 0; i < xv.size(); ++i)
            if (predict(m, xv[i]) == yv[i]) ++correct;
        acc_sum += xv.empty() ? 0.0 : static_cast<double>(correct) / xv.size();
    }
    return acc_sum / k;
}

}  // namespace fsdetail

struct WrapperConfig {
    KernelSpec kernel = KernelSpec::poly(2);
    double C = 1.0;
    int max_iter = 1000;
    double tol = 1e-3;
};

// Within-tolerance rule: the smallest candidate whose mean CV accuracy is
// within 0.5 percentage points of the best.
inline constexpr double kWrapperTolerance = 0.005;

inline SelectionResult wrapper_select(const Matrix& vectors, const std::vector<int>& targets,
                                      const FeatureRanking& ranking,
                                      std::vector<std::size_t> candidate_sizes, int k_folds,
                                      const WrapperConfig& cfg, std::uint64_t seed = 1) {
    if (candidate_sizes.empty()) throw Error("no candidate sizes given");
    std::sort(candidate_sizes.begin(), candidate_sizes.end());
    for (std::size_t q : candidate_sizes)
        if (q == 0 || q > ranking.entries.size())
            throw Error("candidate size " + std::to_string(q) + " outside ranking length " +
                        std::to_string(ranking.entries.size()));
    const std::vector<int> fold = stratified_folds(targets, k_folds, seed);
    SelectionResult res;
    double best = -1;
    for (std::size_t q : candidate_sizes) {
        const Matrix x = fsdetail::take_columns(vectors, ranking.prefix(q));
        const double acc = fsdetail::cv_accuracy(x, targets, fold, k_folds, cfg.kernel, cfg.C,
                                                 cfg.max_iter, cfg.tol);
        res.cv_accuracy_by_size[q] = acc;
        best = std::max(best, acc);
    }
    for (std::size_t q : candidate_sizes) {
        if (res.cv_accuracy_by_size[q] >= best - kWrapperTolerance) {
            res.q = q;
            break;
        }
    }
    res.selected_indices = ranking.prefix(res.q);
    return res;
}

// Joint (q, C[, gamma]) wrapper grid used by the classifier pipeline; the
// smallest-q-within-tolerance rule decides ties, then smaller C, then gamma.
struct GridChoice {
    std::size_t q = 0;
    KernelSpec kernel;
    double C = 1.0;
    double cv_accuracy = 0.0;
    std::vector<int> selected_indices;
    std::map<std::size_t, double> best_acc_by_size;
};

inline GridChoice wrapper_grid_select(const Matrix& vectors, const std::vector<int>& targets,
                                      const FeatureRanking& ranking,
                                      std::vector<std::size_t> candidate_sizes,
                                      const KernelSpec& kernel_template,
                                      const std::vector<double>& c_grid,
                                      const std::vector<double>& gamma_grid, int k_folds,
                                      int max_iter, double tol, std::uint64_t seed = 1) {
    std::sort(candidate_sizes.begin(), candidate_sizes.end());
    const std::vector<int> fold = stratified_folds(targets, k_folds, seed);
    const bool use_gamma = kernel_template.kind == KernelSpec::Kind::Rbf;
    const std::vector<double> gammas = use_gamma ? gamma_grid : std::vector<double>{0.0};

    struct Cand {
        std::size_t q;
        double C, gamma, acc;
    };
    std::vector<Cand> cands;
    std::map<std::size_t, double> best_by_size;
    for (std::size_t q : candidate_sizes) {
        if (q == 0 || q > ranking.entries.size())
            throw Error("candidate size outside ranking length");
        const Matrix x = fsdetail::take_columns(vectors, ranking.prefix(q));
        for (double c : c_grid) {
            for (double g : gammas) {
                KernelSpec k = kernel_template;
                if (use_gamma) k.gamma = g;
                const double acc =
                    fsdetail::cv_accuracy(x, targets, fold, k_folds, k, c, max_iter, tol);
                cands.push_back({q, c, g, acc});
                auto it = best_by_size.find(q);
                if (it == best_by_size.end() || acc > it->second) best_by_size[q] = acc;
            }
        }
    }
    double best = -1;
    for (const auto& c : cands) best = std::max(best, c.acc);
    // smallest q within tolerance of the best; at that q the most accurate
    // combo wins, ties resolved toward the C = 1, gamma = 1 defaults
    std::size_t qstar = cands.front().q;
    for (std::size_t q : candidate_sizes) {
        if (best_by_size[q] >= best - kWrapperTolerance) {
            qstar = q;
            break;
        }
    }
    const Cand* chosen = nullptr;
    auto dist = [](double v) { return std::abs(std::log2(v)); };
    for (const auto& c : cands) {
        if (c.q != qstar) continue;
        if (!chosen || c.acc > chosen->acc ||
            (c.acc == chosen->acc &&
             (dist(c.C) < dist(chosen->C) ||
              (dist(c.C) == dist(chosen->C) && use_gamma &&
               dist(c.gamma) < dist(chosen->gamma)))))
            chosen = &c;
    }
    GridChoice out;
    out.q = chosen->q;
    out.C = chosen->C;
    out.kernel = kernel_template;
    if (use_gamma) out.kernel.gamma = chosen->gamma;
    out.cv_accuracy = chosen->acc;
    out.selected_indices = ranking.prefix(out.q);
    out.best_acc_by_size = best_by_size;
    return out;
}

}  // namespace iacd

#endif  // IACD_FEATSEL_HPP
