#ifndef IACD_PREPROCESS_HPP
#define IACD_PREPROCESS_HPP

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "iacd/errors.hpp"
#include "iacd/signature.hpp"

namespace iacd {

using Matrix = std::vector<std::vector<double>>;

// Per-feature (min, max) over training data; features with zero range (null
// features) are dropped from retained_indices before scaling.
struct ScalerParams {
    std::size_t dimension = 0;
    std::vector<int> retained_indices;  // strictly increasing, original space
    std::vector<double> min_vals;       // per retained feature
    std::vector<double> max_vals;

    std::size_t retained_count() const { return retained_indices.size(); }
};

inline std::pair<Matrix, std::vector<int>> encode_labels(const SignatureDatabase& db,
                                                         ClassLabel positive_class,
                                                         ClassLabel negative_class) {
    Matrix vectors;
    std::vector<int> targets;
    vectors.reserve(db.signatures.size());
    targets.reserve(db.signatures.size());
    for (const auto& s : db.signatures) {
        if (s.label == positive_class)
            targets.push_back(+1);
        else if (s.label == negative_class)
            targets.push_back(-1);
        else
            throw LabelLeak("label " + s.label.str() + " is neither " + positive_class.str() +
                            " nor " + negative_class.str());
        vectors.push_back(s.features);
    }
    return {std::move(vectors), std::move(targets)};
}

inline ScalerParams fit_scaler(const SignatureDatabase& db) {
    if (db.signatures.size() < 2)
        throw DegenerateDatabase("scaler requires at least 2 samples");
    const std::size_t dim = db.dimension();
    ScalerParams s;
    s.dimension = dim;
    for (std::size_t f = 0; f < dim; ++f) {
        double lo = db.signatures.front().features[f];
        double hi = lo;
        for (const auto& sig : db.signatures) {
            lo = std::min(lo, sig.features[f]);
            hi = std::max(hi, sig.features[f]);
        }
        if (hi > lo) {
            s.retained_indices.push_back(static_cast<int>(f));
            s.min_vals.push_back(lo);
            s.max_vals.push_back(hi);
        }
    }
    if (s.retained_indices.empty())
        throw DegenerateDatabase("all features are null (zero range)");
    return s;
}

// Out-of-range test-time values are clamped to [-0.5, 1.5] so unseen traces
// keep kernel arguments bounded.
inline std::vector<double> apply_scaler(const std::vector<double>& x, const ScalerParams& s) {
    if (x.size() != s.dimension)
        throw DimensionMismatch("scaler expects dimension " + std::to_string(s.dimension) +
                                ", got " + std::to_string(x.size()));
    std::vector<double> out(s.retained_count());
    for (std::size_t k = 0; k < s.retained_count(); ++k) {
        const double raw = x[static_cast<std::size_t>(s.retained_indices[k])];
        const double scaled = (raw - s.min_vals[k]) / (s.max_vals[k] - s.min_vals[k]);
        out[k] = std::clamp(scaled, -0.5, 1.5);
    }
    return out;
}

inline Matrix apply_scaler(const Matrix& rows, const ScalerParams& s) {
    Matrix out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(apply_scaler(r, s));
    return out;
}

// Matrix export restricted to retained features, scaled (Fig 3/4-style data).
inline std::string export_matrix_csv(const SignatureDatabase& db, const ScalerParams& s) {
    const auto& names = feature_names();
    std::string out = "label";
    for (int idx : s.retained_indices) out += "," + names[static_cast<std::size_t>(idx)];
    out += "\n";
    char buf[40];
    for (const auto& sig : db.signatures) {
        out += sig.label.str();
        for (double v : apply_scaler(sig.features, s)) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out += ",";
            out += buf;
        }
        out += "\n";
    }
    return out;
}

}  // namespace iacd

#endif  // IACD_PREPROCESS_HPP
