#ifndef IACD_CLASSIFIERS_HPP
#define IACD_CLASSIFIERS_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "iacd/errors.hpp"
#include "iacd/featsel.hpp"
#include "iacd/packet.hpp"
#include "iacd/preprocess.hpp"
#include "iacd/signature.hpp"
#include "iacd/svm.hpp"

// Two-stage pipeline: a link-problem detector (LPD) separating faulty from
// healthy links, and a client-fault diagnostic (CFD) network of independent
// binary CF modules, each trained on its fault class against the healthy
// client.

namespace iacd {

struct ModuleConfig {
    KernelSpec kernel = KernelSpec::linear();
    std::size_t feature_count = 0;  // 0 = wrapper-select over candidate sizes
    std::vector<double> c_grid;
    std::vector<double> gamma_grid;
};

struct TrainConfig {
    // LPD defaults: quadratic kernel, candidate sizes spanning the 25/75 sweep
    KernelSpec lpd_kernel = KernelSpec::poly(2);
    std::vector<std::size_t> lpd_candidate_sizes = {10, 25, 50, 75, 100};
    std::vector<double> c_grid = default_c_grid();
    std::vector<double> gamma_grid = default_gamma_grid();
    int k_folds = 0;  // 0 = min(5, smallest class size)
    int max_iter = 1000;
    double tol = 1e-3;
    std::uint64_t cv_seed = 17;
    std::map<int, ModuleConfig> module_overrides;  // keyed by cf index

    static std::vector<double> default_c_grid() {
        std::vector<double> g;
        for (int e = -3; e <= 7; ++e) g.push_back(std::ldexp(1.0, e));
        return g;
    }
    static std::vector<double> default_gamma_grid() {
        std::vector<double> g;
        for (int e = -7; e <= 3; ++e) g.push_back(std::ldexp(1.0, e));
        return g;
    }
};

// Table-derived per-fault defaults: kernel and feature count per CF module.
inline ModuleConfig default_module_config(int cf_index) {
    ModuleConfig m;
    switch (cf_index) {
        case 1: m.kernel = KernelSpec::linear(); m.feature_count = 12; break;
        case 2: m.kernel = KernelSpec::rbf(1.0); m.feature_count = 32; break;
        case 3: m.kernel = KernelSpec::poly(3); m.feature_count = 24; break;
        case 4: m.kernel = KernelSpec::rbf(1.0); m.feature_count = 16; break;
        default: m.kernel = KernelSpec::rbf(1.0); m.feature_count = 16; break;
    }
    return m;
}

struct CFModuleModel {
    int fault_class = 0;  // j >= 1
    std::string name;
    TrainedSVM svm;
    std::vector<int> selected_indices;  // original catalogue feature space
};

struct LpdModel {
    TrainedSVM svm;
    std::vector<int> selected_indices;
    std::map<std::size_t, double> cv_accuracy_by_size;
};

struct ClassifierBundle {
    std::string catalogue = std::string(kCatalogueVersion);
    ScalerParams scaler;
    LpdModel lpd;
    std::vector<CFModuleModel> cf_modules;
    std::map<std::string, std::string> label_map;  // "CF1" -> display name
};

enum class LinkStatus { Faulty, Healthy };
enum class OverallStatus { LinkProblem, ClientFaults, ClientHealthy };

struct DiagnosisReport {
    LinkStatus link_status = LinkStatus::Healthy;
    double link_decision = 0.0;
    bool cf_evaluated = false;
    std::vector<std::pair<int, double>> module_decisions;  // (cf index, decision value)
    std::set<int> client_faults;
    OverallStatus overall = OverallStatus::ClientHealthy;
};

namespace clfdetail {

inline std::vector<double> take(const std::vector<double>& scaled,
                                const ScalerParams& scaler,
                                const std::vector<int>& original_indices) {
    // map original feature index -> position in the scaled vector
    std::vector<double> out;
    out.reserve(original_indices.size());
    for (int oi : original_indices) {
        const auto it = std::lower_bound(scaler.retained_indices.begin(),
                                         scaler.retained_indices.end(), oi);
        if (it == scaler.retained_indices.end() || *it != oi)
            throw InvalidModel("selected feature not in scaler retained set");
        out.push_back(scaled[static_cast<std::size_t>(
            std::distance(scaler.retained_indices.begin(), it))]);
    }
    return out;
}

inline std::vector<int> to_original(const std::vector<int>& retained_positions,
                                    const ScalerParams& scaler) {
    std::vector<int> out;
    out.reserve(retained_positions.size());
    for (int p : retained_positions)
        out.push_back(scaler.retained_indices[static_cast<std::size_t>(p)]);
    return out;
}

inline int pick_folds(const TrainConfig& cfg, std::size_t class_a, std::size_t class_b) {
    if (cfg.k_folds > 0) return cfg.k_folds;
    return static_cast<int>(std::min<std::size_t>(5, std::min(class_a, class_b)));
}

struct EncodedSubset {
    Matrix scaled;
    std::vector<int> targets;
    std::size_t n_pos = 0, n_neg = 0;
};

inline EncodedSubset encode_subset(const SignatureDatabase& db, const ScalerParams& scaler,
                                   ClassLabel positive, ClassLabel negative) {
    SignatureDatabase filtered;
    for (const auto& s : db.signatures)
        if (s.label == positive || s.label == negative) filtered.signatures.push_back(s);
    auto [raw, targets] = encode_labels(filtered, positive, negative);
    EncodedSubset out;
    out.scaled = apply_scaler(raw, scaler);
    out.targets = std::move(targets);
    for (int y : out.targets) (y > 0 ? out.n_pos : out.n_neg) += 1;
    return out;
}

}  // namespace clfdetail

// Trains one binary module on already-scaled data: t-test ranking, wrapper
// grid over (q, C[, gamma]), final fit on all rows.
inline std::pair<TrainedSVM, GridChoice> train_binary_module(
    const Matrix& scaled, const std::vector<int>& targets, const KernelSpec& kernel,
    std::vector<std::size_t> candidate_sizes, const TrainConfig& cfg, int k_folds) {
    const FeatureRanking ranking = rank_features(t_scores(scaled, targets));
    for (auto& q : candidate_sizes) q = std::min(q, ranking.entries.size());
    std::sort(candidate_sizes.begin(), candidate_sizes.end());
    candidate_sizes.erase(std::unique(candidate_sizes.begin(), candidate_sizes.end()),
                          candidate_sizes.end());
    GridChoice choice =
        wrapper_grid_select(scaled, targets, ranking, candidate_sizes, kernel, cfg.c_grid,
                            cfg.gamma_grid, k_folds, cfg.max_iter, cfg.tol, cfg.cv_seed);
    Matrix x = fsdetail::take_columns(scaled, choice.selected_indices);
    TrainedSVM svm = train_l2svm(x, targets, choice.kernel, choice.C, cfg.max_iter, cfg.tol);
    return {std::move(svm), std::move(choice)};
}

// LPD training on a link-labeled database. Fits its own scaler when none is
// supplied; bundle-level training passes the shared one.
inline std::pair<LpdModel, ScalerParams> train_lpd(
    const SignatureDatabase& db, const TrainConfig& cfg = {},
    std::optional<ScalerParams> shared_scaler = std::nullopt) {
    const auto counts = db.class_counts();
    const auto fit = counts.find("LINK_FAULTY");
    const auto hit = counts.find("LINK_HEALTHY");
    if (fit == counts.end() || hit == counts.end())
        throw Error("LPD training needs both LINK_FAULTY and LINK_HEALTHY samples");
    ScalerParams scaler = shared_scaler ? *shared_scaler : fit_scaler(db);
    auto sub = clfdetail::encode_subset(db, scaler, ClassLabel::link_faulty(),
                                        ClassLabel::link_healthy());
    const int k = clfdetail::pick_folds(cfg, sub.n_pos, sub.n_neg);
    auto [svm, choice] = train_binary_module(sub.scaled, sub.targets, cfg.lpd_kernel,
                                             cfg.lpd_candidate_sizes, cfg, k);
    LpdModel lpd;
    lpd.svm = std::move(svm);
    lpd.selected_indices = clfdetail::to_original(choice.selected_indices, scaler);
    lpd.cv_accuracy_by_size = choice.best_acc_by_size;
    return {std::move(lpd), std::move(scaler)};
}

// CFD training: one module per fault class j, each on the subset
// {cf_j as +1} u {cf_0 as -1} with per-module feature selection.
inline std::vector<CFModuleModel> train_cfd(const SignatureDatabase& db,
                                            const std::vector<int>& fault_classes,
                                            const TrainConfig& cfg,
                                            const ScalerParams& scaler) {
    const auto counts = db.class_counts();
    if (!counts.count("CF0"))
        throw NoHealthyBaseline("training database lacks healthy-client (CF0) samples");
    std::vector<CFModuleModel> modules;
    for (int j : fault_classes) {
        if (j < 1) throw Error("fault class indices start at 1");
        if (!counts.count("CF" + std::to_string(j)))
            throw Error("training database lacks class CF" + std::to_string(j));
        ModuleConfig mc = default_module_config(j);
        if (auto it = cfg.module_overrides.find(j); it != cfg.module_overrides.end())
            mc = it->second;
        auto sub = clfdetail::encode_subset(db, scaler, ClassLabel::cf(j), ClassLabel::cf(0));
        const int k = clfdetail::pick_folds(cfg, sub.n_pos, sub.n_neg);
        TrainConfig module_cfg = cfg;
        if (!mc.c_grid.empty()) module_cfg.c_grid = mc.c_grid;
        if (!mc.gamma_grid.empty()) module_cfg.gamma_grid = mc.gamma_grid;
        std::vector<std::size_t> sizes =
            mc.feature_count > 0 ? std::vector<std::size_t>{mc.feature_count}
                                 : cfg.lpd_candidate_sizes;
        auto [svm, choice] =
            train_binary_module(sub.scaled, sub.targets, mc.kernel, sizes, module_cfg, k);
        CFModuleModel m;
        m.fault_class = j;
        const auto nit = db.class_names.find("CF" + std::to_string(j));
        m.name = nit != db.class_names.end() ? nit->second : "CF" + std::to_string(j);
        m.svm = std::move(svm);
        m.selected_indices = clfdetail::to_original(choice.selected_indices, scaler);
        modules.push_back(std::move(m));
    }
    return modules;
}

// Declared single-fault classes of a database: every CFj (j >= 1) that is not
// a composite.
inline std::vector<int> single_fault_classes(const SignatureDatabase& db) {
    std::set<int> out;
    for (const auto& s : db.signatures) {
        if (s.label.kind != ClassLabel::Kind::ClientFault || s.label.cf_index == 0) continue;
        if (db.composition.count(s.label.str())) continue;
        out.insert(s.label.cf_index);
    }
    return {out.begin(), out.end()};
}

// Full two-stage bundle: one scaler fit on the union of both training
// databases so LPD and CF modules share a coherent scaled space.
inline ClassifierBundle train_bundle(const SignatureDatabase& lpd_db,
                                     const SignatureDatabase& cfd_db,
                                     const TrainConfig& cfg = {}) {
    SignatureDatabase merged;
    merged.signatures = lpd_db.signatures;
    merged.signatures.insert(merged.signatures.end(), cfd_db.signatures.begin(),
                             cfd_db.signatures.end());
    ClassifierBundle bundle;
    bundle.scaler = fit_scaler(merged);
    auto [lpd, scaler] = train_lpd(lpd_db, cfg, bundle.scaler);
    bundle.lpd = std::move(lpd);
    bundle.cf_modules = train_cfd(cfd_db, single_fault_classes(cfd_db), cfg, bundle.scaler);
    if (bundle.cf_modules.empty()) throw Error("bundle needs at least one CF module");
    bundle.label_map = cfd_db.class_names;
    for (const auto& [k, v] : lpd_db.class_names) bundle.label_map.emplace(k, v);
    return bundle;
}

// ---- inference ----

inline DiagnosisReport diagnose_signature(const ClassifierBundle& bundle,
                                          const std::vector<double>& raw_features,
                                          bool run_both = false) {
    DiagnosisReport rep;
    const std::vector<double> scaled = apply_scaler(raw_features, bundle.scaler);
    rep.link_decision =
        decision_value(bundle.lpd.svm,
                       clfdetail::take(scaled, bundle.scaler, bundle.lpd.selected_indices));
    rep.link_status = rep.link_decision >= 0 ? LinkStatus::Faulty : LinkStatus::Healthy;
    if (rep.link_status == LinkStatus::Faulty && !run_both) {
        rep.overall = OverallStatus::LinkProblem;
        return rep;
    }
    rep.cf_evaluated = true;
    for (const auto& m : bundle.cf_modules) {
        const double d = decision_value(
            m.svm, clfdetail::take(scaled, bundle.scaler, m.selected_indices));
        rep.module_decisions.push_back({m.fault_class, d});
        if (d >= 0) rep.client_faults.insert(m.fault_class);
    }
    if (!rep.client_faults.empty())
        rep.overall = OverallStatus::ClientFaults;
    else
        rep.overall = rep.link_status == LinkStatus::Faulty ? OverallStatus::LinkProblem
                                                            : OverallStatus::ClientHealthy;
    return rep;
}

inline DiagnosisReport diagnose(const ClassifierBundle& bundle, const TraceFile& client,
                                const TraceFile& server, bool run_both = false) {
    const Signature sig =
        build_signature(client, server, ClassLabel::cf(0), "diagnose-input");
    return diagnose_signature(bundle, sig.features, run_both);
}

// ---- evaluation ----

struct ClassMetrics {
    std::size_t total = 0;
    std::size_t correct = 0;
    double accuracy() const {
        return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
    }
};

struct EvalReport {
    std::map<std::string, ClassMetrics> per_class;       // label -> detection accuracy
    std::map<int, ClassMetrics> module_false_positives;  // cf index -> FP count/total
    // confusion[label][module index or 0 for "none"] = count of samples where
    // that module fired (0 counts samples with no module firing)
    std::map<std::string, std::map<int, std::size_t>> confusion;
};

// Expected module set for a label: composite classes expand per the database
// metadata, plain CFj expects module j, CF0 expects none.
inline std::set<int> expected_modules(const SignatureDatabase& db, const ClassLabel& label) {
    if (label.kind != ClassLabel::Kind::ClientFault) return {};
    if (const auto it = db.composition.find(label.str()); it != db.composition.end())
        return {it->second.begin(), it->second.end()};
    if (label.cf_index == 0) return {};
    return {label.cf_index};
}

inline EvalReport evaluate(const ClassifierBundle& bundle, const SignatureDatabase& db) {
    EvalReport rep;
    for (const auto& sig : db.signatures) {
        const std::string label = sig.label.str();
        auto& cls = rep.per_class[label];
        ++cls.total;
        if (sig.label.kind == ClassLabel::Kind::LinkFaulty ||
            sig.label.kind == ClassLabel::Kind::LinkHealthy) {
            const auto scaled = apply_scaler(sig.features, bundle.scaler);
            const double d = decision_value(
                bundle.lpd.svm,
                clfdetail::take(scaled, bundle.scaler, bundle.lpd.selected_indices));
            const bool predicted_faulty = d >= 0;
            const bool is_faulty = sig.label.kind == ClassLabel::Kind::LinkFaulty;
            if (predicted_faulty == is_faulty) ++cls.correct;
            continue;
        }
        // client-fault sample: run the CF network regardless of LPD
        const DiagnosisReport d = diagnose_signature(bundle, sig.features, true);
        const std::set<int> expected = expected_modules(db, sig.label);
        bool hit;
        if (expected.empty()) {
            hit = d.client_faults.empty();  // healthy: no module may fire
        } else {
            hit = std::includes(d.client_faults.begin(), d.client_faults.end(),
                                expected.begin(), expected.end());
        }
        if (hit) ++cls.correct;
        auto& conf = rep.confusion[label];
        if (d.client_faults.empty()) ++conf[0];
        for (int j : d.client_faults) ++conf[j];
        for (const auto& m : bundle.cf_modules) {
            if (expected.count(m.fault_class)) continue;
            auto& fp = rep.module_false_positives[m.fault_class];
            ++fp.total;
            if (d.client_faults.count(m.fault_class)) ++fp.correct;  // "correct" = fired = FP
        }
    }
    return rep;
}

// ---- bundle persistence ----

inline ordered_json scaler_to_json(const ScalerParams& s) {
    ordered_json j;
    j["dimension"] = s.dimension;
    j["retained_indices"] = s.retained_indices;
    j["min"] = s.min_vals;
    j["max"] = s.max_vals;
    return j;
}

inline ScalerParams scaler_from_json(const ordered_json& j) {
    ScalerParams s;
    s.dimension = j.at("dimension").get<std::size_t>();
    s.retained_indices = j.at("retained_indices").get<std::vector<int>>();
    s.min_vals = j.at("min").get<std::vector<double>>();
    s.max_vals = j.at("max").get<std::vector<double>>();
    if (s.retained_indices.size() != s.min_vals.size() ||
        s.min_vals.size() != s.max_vals.size())
        throw InvalidModel("scaler arrays disagree in length");
    return s;
}

inline std::string write_bundle(const ClassifierBundle& b) {
    ordered_json j;
    j["format"] = "iacd-bundle";
    j["version"] = 1;
    j["catalogue"] = b.catalogue;
    j["scaler"] = scaler_to_json(b.scaler);
    ordered_json lpd;
    lpd["selected_indices"] = b.lpd.selected_indices;
    lpd["cv_accuracy_by_size"] = [&] {
        ordered_json t = ordered_json::object();
        for (const auto& [q, a] : b.lpd.cv_accuracy_by_size) t[std::to_string(q)] = a;
        return t;
    }();
    lpd["svm"] = svm_to_json(b.lpd.svm);
    j["lpd"] = std::move(lpd);
    ordered_json mods = ordered_json::array();
    for (const auto& m : b.cf_modules) {
        ordered_json jm;
        jm["fault_class"] = m.fault_class;
        jm["name"] = m.name;
        jm["selected_indices"] = m.selected_indices;
        jm["svm"] = svm_to_json(m.svm);
        mods.push_back(std::move(jm));
    }
    j["cf_modules"] = std::move(mods);
    j["label_map"] = b.label_map;
    return j.dump(2) + "\n";
}

inline ClassifierBundle read_bundle(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidModel(std::string("bundle parse failure: ") + e.what());
    }
    if (j.value("format", "") != "iacd-bundle") throw InvalidModel("not an iacd-bundle file");
    ClassifierBundle b;
    b.catalogue = j.value("catalogue", "");
    if (b.catalogue != kCatalogueVersion)
        throw InvalidModel("bundle catalogue version mismatch");
    b.scaler = scaler_from_json(j.at("scaler"));
    b.lpd.selected_indices = j.at("lpd").at("selected_indices").get<std::vector<int>>();
    for (const auto& [k, v] : j.at("lpd").at("cv_accuracy_by_size").items())
        b.lpd.cv_accuracy_by_size[std::stoul(k)] = v.get<double>();
    b.lpd.svm = svm_from_json(j.at("lpd").at("svm"));
    for (const auto& jm : j.at("cf_modules")) {
        CFModuleModel m;
        m.fault_class = jm.at("fault_class").get<int>();
        m.name = jm.at("name").get<std::string>();
        m.selected_indices = jm.at("selected_indices").get<std::vector<int>>();
        m.svm = svm_from_json(jm.at("svm"));
        b.cf_modules.push_back(std::move(m));
    }
    if (j.contains("label_map"))
        b.label_map = j["label_map"].get<std::map<std::string, std::string>>();
    if (b.cf_modules.empty()) throw InvalidModel("bundle has no CF modules");
    return b;
}

}  // namespace iacd

#endif  // IACD_CLASSIFIERS_HPP
