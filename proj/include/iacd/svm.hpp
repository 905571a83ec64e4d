#ifndef IACD_SVM_HPP
#define IACD_SVM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "iacd/errors.hpp"

namespace iacd {

using Matrix = std::vector<std::vector<double>>;

struct KernelSpec {
    enum class Kind { Linear, Poly, Rbf };
    Kind kind = Kind::Linear;
    int degree = 2;       // POLY only; 2 = quadratic
    double gamma = 1.0;   // RBF only
    double coef0 = 1.0;   // POLY offset

    static KernelSpec linear() { return {Kind::Linear, 1, 1.0, 0.0}; }
    static KernelSpec poly(int degree, double coef0 = 1.0) {
        return {Kind::Poly, degree, 1.0, coef0};
    }
    static KernelSpec rbf(double gamma) { return {Kind::Rbf, 1, gamma, 0.0}; }

    std::string str() const {
        switch (kind) {
            case Kind::Linear: return "linear";
            case Kind::Poly: return "poly" + std::to_string(degree);
            default: return "rbf";
        }
    }
};

inline double kernel_eval(const KernelSpec& spec, const std::vector<double>& x,
                          const std::vector<double>& z) {
    if (x.size() != z.size())
        throw DimensionMismatch("kernel arguments differ in dimension: " +
                                std::to_string(x.size()) + " vs " + std::to_string(z.size()));
    switch (spec.kind) {
        case KernelSpec::Kind::Linear: {
            double dot = 0;
            for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * z[i];
            return dot;
        }
        case KernelSpec::Kind::Poly: {
            double dot = 0;
            for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * z[i];
            return std::pow(dot + spec.coef0, spec.degree);
        }
        default: {
            double d2 = 0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double d = x[i] - z[i];
                d2 += d * d;
            }
            return std::exp(-spec.gamma * d2);
        }
    }
}

struct TrainedSVM {
    Matrix support_vectors;
    std::vector<double> dual_coefs;  // alpha_i * y_i per support vector
    double bias = 0.0;
    KernelSpec kernel;
    double C = 1.0;
    int iterations_used = 0;      // solver passes consumed
    double kkt_residual = 0.0;
    bool converged = false;
};

// Maximizes the L2 soft-margin dual
//   W(a) = sum a_i - 1/2 sum_ij a_i a_j y_i y_j (K_ij + d_ij/C),  a_i >= 0,
//   sum a_i y_i = 0,
// by pairwise coordinate ascent on the maximal KKT-violating pair. The L2
// slack leaves the duals unbounded above, so only the a_i >= 0 wall clips
// steps; the +1/C diagonal keeps every pair's curvature positive.
inline TrainedSVM train_l2svm(const Matrix& vectors, const std::vector<int>& targets,
                              const KernelSpec& kernel, double C, int max_iter = 1000,
                              double tol = 1e-3) {
    const std::size_t n = vectors.size();
    if (n < 2 || targets.size() != n)
        throw Error("training requires >= 2 samples with matching targets");
    if (C <= 0 || tol <= 0) throw Error("C and tol must be positive");
    bool has_pos = false, has_neg = false;
    for (int y : targets) {
        if (y == +1) has_pos = true;
        else if (y == -1) has_neg = true;
        else throw Error("targets must be +1 or -1");
    }
    if (!has_pos || !has_neg) throw SingleClass("training set contains a single class");

    Matrix gram(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = i; k < n; ++k)
            gram[i][k] = gram[k][i] = kernel_eval(kernel, vectors[i], vectors[k]);

    std::vector<double> alpha(n, 0.0);
    std::vector<double> f(n, 0.0);  // F_i = sum_j a_j y_j (K_ij + d_ij/C)
    const double diag = 1.0 / C;
    auto score = [&](std::size_t i) { return static_cast<double>(targets[i]) - f[i]; };

    double violation = std::numeric_limits<double>::infinity();
    int passes = 0;
    bool converged = false;
    for (; passes < max_iter && !converged; ++passes) {
        for (std::size_t step = 0; step < n; ++step) {
            // up-candidates: y=+1 or a>0; down-candidates: y=-1 or a>0
            std::size_t up = n, down = n;
            double up_s = -std::numeric_limits<double>::infinity();
            double down_s = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < n; ++i) {
                const double s = score(i);
                if ((targets[i] == +1 || alpha[i] > 0) && s > up_s) {
                    up_s = s;
                    up = i;
                }
                if ((targets[i] == -1 || alpha[i] > 0) && s < down_s) {
                    down_s = s;
                    down = i;
                }
            }
            violation = up_s - down_s;
            if (up == n || down == n || up == down || violation <= tol) {
                converged = violation <= tol;
                break;
            }
            const std::size_t i = up, j = down;
            const double eta = gram[i][i] + gram[j][j] - 2.0 * gram[i][j] + 2.0 * diag;
            double t = violation / eta;
            if (targets[i] == -1) t = std::min(t, alpha[i]);
            if (targets[j] == +1) t = std::min(t, alpha[j]);
            alpha[i] += targets[i] * t;
            alpha[j] -= targets[j] * t;
            alpha[i] = std::max(alpha[i], 0.0);  // guard fp drift
            alpha[j] = std::max(alpha[j], 0.0);
            for (std::size_t k = 0; k < n; ++k) {
                double dk = gram[i][k] - gram[j][k];
                if (k == i) dk += diag;
                if (k == j) dk -= diag;
                f[k] += t * dk;
            }
        }
        if (converged) break;
    }

    TrainedSVM model;
    model.kernel = kernel;
    model.C = C;
    model.iterations_used = passes;
    model.kkt_residual = violation;
    model.converged = converged;

    // bias from the KKT stationarity of the support vectors
    double bias_acc = 0;
    std::size_t sv_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (alpha[i] <= 0) continue;
        bias_acc += score(i);
        ++sv_count;
        model.support_vectors.push_back(vectors[i]);
        model.dual_coefs.push_back(alpha[i] * targets[i]);
    }
    if (sv_count == 0) {
        // cannot happen for a feasible two-class problem, but keep the model valid
        throw SingleClass("solver produced no support vectors");
    }
    model.bias = bias_acc / static_cast<double>(sv_count);
    return model;
}

inline double decision_value(const TrainedSVM& model, const std::vector<double>& x) {
    if (model.support_vectors.empty())
        throw InvalidModel("model has no support vectors");
    if (model.support_vectors.front().size() != x.size())
        throw DimensionMismatch("input dimension " + std::to_string(x.size()) +
                                " does not match support vectors");
    double f = model.bias;
    for (std::size_t i = 0; i < model.support_vectors.size(); ++i)
        f += model.dual_coefs[i] * kernel_eval(model.kernel, model.support_vectors[i], x);
    return f;
}

inline int predict(const TrainedSVM& model, const std::vector<double>& x) {
    return decision_value(model, x) >= 0 ? +1 : -1;
}

// Dual objective of an alpha vector on a training set; exposed for solver
// verification.
inline double dual_objective(const Matrix& vectors, const std::vector<int>& targets,
                             const KernelSpec& kernel, double C,
                             const std::vector<double>& alpha) {
    const std::size_t n = vectors.size();
    double sum = 0, quad = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (alpha[i] == 0) continue;
        sum += alpha[i];
        for (std::size_t j = 0; j < n; ++j) {
            if (alpha[j] == 0) continue;
            double k = kernel_eval(kernel, vectors[i], vectors[j]);
            if (i == j) k += 1.0 / C;
            quad += alpha[i] * alpha[j] * targets[i] * targets[j] * k;
        }
    }
    return sum - 0.5 * quad;
}

// Same objective evaluated from a trained model (non-support points carry
// alpha = 0 and drop out of both terms).
inline double dual_objective(const TrainedSVM& m) {
    double sum = 0, quad = 0;
    for (std::size_t i = 0; i < m.dual_coefs.size(); ++i) {
        sum += std::abs(m.dual_coefs[i]);
        for (std::size_t j = 0; j < m.dual_coefs.size(); ++j) {
            double k = kernel_eval(m.kernel, m.support_vectors[i], m.support_vectors[j]);
            if (i == j) k += 1.0 / m.C;
            quad += m.dual_coefs[i] * m.dual_coefs[j] * k;
        }
    }
    return sum - 0.5 * quad;
}

// ---- serialization ----

inline nlohmann::ordered_json kernel_to_json(const KernelSpec& k) {
    nlohmann::ordered_json j;
    switch (k.kind) {
        case KernelSpec::Kind::Linear: j["kind"] = "linear"; break;
        case KernelSpec::Kind::Poly: j["kind"] = "poly"; break;
        default: j["kind"] = "rbf"; break;
    }
    j["degree"] = k.degree;
    j["gamma"] = k.gamma;
    j["coef0"] = k.coef0;
    return j;
}

inline KernelSpec kernel_from_json(const nlohmann::ordered_json& j) {
    KernelSpec k;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "linear")
        k.kind = KernelSpec::Kind::Linear;
    else if (kind == "poly")
        k.kind = KernelSpec::Kind::Poly;
    else if (kind == "rbf")
        k.kind = KernelSpec::Kind::Rbf;
    else
        throw InvalidModel("unknown kernel kind: " + kind);
    k.degree = j.at("degree").get<int>();
    k.gamma = j.at("gamma").get<double>();
    k.coef0 = j.at("coef0").get<double>();
    return k;
}

inline nlohmann::ordered_json svm_to_json(const TrainedSVM& m) {
    nlohmann::ordered_json j;
    j["kernel"] = kernel_to_json(m.kernel);
    j["C"] = m.C;
    j["bias"] = m.bias;
    j["dual_coefs"] = m.dual_coefs;
    j["support_vectors"] = m.support_vectors;
    j["iterations_used"] = m.iterations_used;
    j["kkt_residual"] = m.kkt_residual;
    j["converged"] = m.converged;
    return j;
}

inline TrainedSVM svm_from_json(const nlohmann::ordered_json& j) {
    TrainedSVM m;
    m.kernel = kernel_from_json(j.at("kernel"));
    m.C = j.at("C").get<double>();
    m.bias = j.at("bias").get<double>();
    m.dual_coefs = j.at("dual_coefs").get<std::vector<double>>();
    m.support_vectors = j.at("support_vectors").get<Matrix>();
    m.iterations_used = j.at("iterations_used").get<int>();
    m.kkt_residual = j.at("kkt_residual").get<double>();
    m.converged = j.at("converged").get<bool>();
    if (m.support_vectors.size() != m.dual_coefs.size())
        throw InvalidModel("support vector and dual coefficient counts differ");
    return m;
}

}  // namespace iacd

#endif  // IACD_SVM_HPP
