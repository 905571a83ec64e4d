#ifndef IACD_SCENARIO_HPP
#define IACD_SCENARIO_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "iacd/errors.hpp"
#include "iacd/signature.hpp"
#include "iacd/sim.hpp"

namespace iacd {

struct Scenario {
    ClassLabel label;
    std::string name;  // display name, e.g. "RBuf"
    LinkConfig link;
    ClientConfig client;
    int samples = 1;
    std::uint64_t transfer_size = 1 << 20;
    std::uint64_t seed = 1;
    std::vector<int> components;  // cf indices for composite fault classes
};

struct ScenarioMatrix {
    std::vector<Scenario> scenarios;
};

struct CorpusEntry {
    TraceFile client_trace;
    TraceFile server_trace;
    EventLog log;
    ClassLabel label;
    std::string source_id;
};

struct Corpus {
    std::vector<CorpusEntry> entries;
    SignatureDatabase db;
};

// Runs every scenario sample with a per-sample seed (scenario seed XOR sample
// index) and assembles the labeled signature database.
inline Corpus generate_corpus(const ScenarioMatrix& matrix) {
    if (matrix.scenarios.empty()) throw Error("no scenarios");
    Corpus corpus;
    std::vector<Signature> sigs;
    std::map<std::string, std::string> names;
    std::map<std::string, std::vector<int>> composition;
    for (std::size_t si = 0; si < matrix.scenarios.size(); ++si) {
        const Scenario& sc = matrix.scenarios[si];
        if (sc.samples < 1) throw Error("scenario sample count must be >= 1");
        if (!sc.name.empty()) names[sc.label.str()] = sc.name;
        if (!sc.components.empty()) composition[sc.label.str()] = sc.components;
        for (int k = 0; k < sc.samples; ++k) {
            const std::uint64_t sample_seed = sc.seed ^ static_cast<std::uint64_t>(k);
            SimResult sim = simulate_connection(sc.link, sc.client, sc.transfer_size, sample_seed);
            CorpusEntry e;
            e.label = sc.label;
            e.source_id = sc.label.str() + "/" + std::to_string(si) + "/" + std::to_string(k);
            sigs.push_back(
                build_signature(sim.client_trace, sim.server_trace, sc.label, e.source_id));
            e.client_trace = std::move(sim.client_trace);
            e.server_trace = std::move(sim.server_trace);
            e.log = sim.log;
            corpus.entries.push_back(std::move(e));
        }
    }
    corpus.db = assemble_database(std::move(sigs));
    corpus.db.class_names = std::move(names);
    corpus.db.composition = std::move(composition);
    return corpus;
}

// ---- matrix (de)serialization ----

inline ordered_json matrix_to_json(const ScenarioMatrix& m) {
    ordered_json out;
    out["format"] = "iacd-scenarios";
    out["version"] = 1;
    ordered_json arr = ordered_json::array();
    for (const auto& sc : m.scenarios) {
        ordered_json j;
        j["label"] = sc.label.str();
        if (!sc.name.empty()) j["name"] = sc.name;
        j["samples"] = sc.samples;
        j["transfer_size"] = sc.transfer_size;
        j["seed"] = sc.seed;
        j["link"] = {{"bandwidth_bps", sc.link.bandwidth_bps},
                     {"one_way_delay_ms", sc.link.one_way_delay_ms},
                     {"loss_rate", sc.link.loss_rate},
                     {"reorder_rate", sc.link.reorder_rate}};
        j["client"] = {{"sack", sc.client.sack_enabled},
                       {"dsack", sc.client.dsack_enabled},
                       {"read_buffer", sc.client.read_buffer},
                       {"write_buffer", sc.client.write_buffer},
                       {"cc_profile", to_string(sc.client.cc_profile)}};
        if (!sc.components.empty()) j["components"] = sc.components;
        arr.push_back(std::move(j));
    }
    out["scenarios"] = std::move(arr);
    return out;
}

inline ScenarioMatrix matrix_from_json(const ordered_json& j) {
    if (j.value("format", "") != "iacd-scenarios")
        throw Error("not an iacd-scenarios document");
    ScenarioMatrix m;
    for (const auto& js : j.at("scenarios")) {
        Scenario sc;
        sc.label = ClassLabel::parse(js.at("label").get<std::string>());
        sc.name = js.value("name", "");
        sc.samples = js.at("samples").get<int>();
        sc.transfer_size = js.at("transfer_size").get<std::uint64_t>();
        sc.seed = js.at("seed").get<std::uint64_t>();
        const auto& jl = js.at("link");
        sc.link.bandwidth_bps = jl.at("bandwidth_bps").get<double>();
        sc.link.one_way_delay_ms = jl.at("one_way_delay_ms").get<double>();
        sc.link.loss_rate = jl.at("loss_rate").get<double>();
        sc.link.reorder_rate = jl.at("reorder_rate").get<double>();
        const auto& jc = js.at("client");
        sc.client.sack_enabled = jc.at("sack").get<bool>();
        sc.client.dsack_enabled = jc.at("dsack").get<bool>();
        sc.client.read_buffer = jc.at("read_buffer").get<std::uint64_t>();
        sc.client.write_buffer = jc.at("write_buffer").get<std::uint64_t>();
        sc.client.cc_profile = cc_profile_from_string(jc.at("cc_profile").get<std::string>());
        if (js.contains("components")) sc.components = js["components"].get<std::vector<int>>();
        m.scenarios.push_back(std::move(sc));
    }
    return m;
}

// ---- presets: the experiment matrices the CLI and acceptance suite use ----

namespace preset {

constexpr std::uint64_t kTransfer = 1 << 20;
constexpr std::uint64_t kHealthyBuf = 1 << 20;
constexpr double kAmbientReorder = 0.02;  // exercises SACK machinery on healthy links

inline LinkConfig healthy_link() { return {80e6, 10.0, 0.0, kAmbientReorder}; }

inline ClientConfig healthy_client(CcProfile profile) {
    return {true, true, kHealthyBuf, kHealthyBuf, profile};
}

// LPD training corpus: 100 healthy + 100 faulty link traces (§ mix of loss
// and delay faults), healthy client everywhere.
inline ScenarioMatrix lpd_train(CcProfile profile = CcProfile::AimdStd,
                                std::uint64_t seed = 7001) {
    ScenarioMatrix m;
    m.scenarios.push_back({ClassLabel::link_healthy(), "HealthyLink", healthy_link(),
                           healthy_client(profile), 100, kTransfer, seed});
    std::uint64_t s = seed + 1000;
    for (double loss : {0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.10}) {
        LinkConfig link = healthy_link();
        link.loss_rate = loss;
        m.scenarios.push_back({ClassLabel::link_faulty(), "FaultyLink", link,
                               healthy_client(profile), 5, kTransfer, s});
        s += 101;
    }
    for (double delay : {15.0, 30.0, 50.0, 75.0, 100.0}) {
        LinkConfig link = healthy_link();
        link.one_way_delay_ms = delay;
        m.scenarios.push_back({ClassLabel::link_faulty(), "FaultyLink", link,
                               healthy_client(profile), 10, kTransfer, s});
        s += 101;
    }
    return m;
}

// Held-out LPD test corpus: off-grid loss/delay values, 132 + 132 traces.
inline ScenarioMatrix lpd_test(CcProfile profile, std::uint64_t seed) {
    ScenarioMatrix m;
    m.scenarios.push_back({ClassLabel::link_healthy(), "HealthyLink", healthy_link(),
                           healthy_client(profile), 132, kTransfer, seed});
    std::uint64_t s = seed + 5000;
    for (double loss : {0.015, 0.03, 0.045, 0.06, 0.08, 0.095}) {
        LinkConfig link = healthy_link();
        link.loss_rate = loss;
        m.scenarios.push_back({ClassLabel::link_faulty(), "FaultyLink", link,
                               healthy_client(profile), 11, kTransfer, s});
        s += 103;
    }
    for (double delay : {18.0, 25.0, 40.0, 60.0, 80.0, 95.0}) {
        LinkConfig link = healthy_link();
        link.one_way_delay_ms = delay;
        m.scenarios.push_back({ClassLabel::link_faulty(), "FaultyLink", link,
                               healthy_client(profile), 11, kTransfer, s});
        s += 103;
    }
    return m;
}

constexpr std::uint32_t kMssBytes = 1460;

// Client-fault scenarios on the healthy link. Buffer faults use the three
// levels {4, 8, 16} x MSS; `per_level` spreads the per-class sample budget.
inline void add_cf_scenarios(ScenarioMatrix& m, CcProfile profile, std::uint64_t seed,
                             const std::vector<int>& per_level) {
    const auto lvl = [&](int i) { return static_cast<std::uint64_t>(kMssBytes) << (2 + i); };

    ClientConfig healthy = healthy_client(profile);
    int total = 0;
    for (int n : per_level) total += n;

    m.scenarios.push_back(
        {ClassLabel::cf(0), "Healthy", healthy_link(), healthy, total, kTransfer, seed});

    ClientConfig sack_off = healthy;
    sack_off.sack_enabled = false;
    m.scenarios.push_back({ClassLabel::cf(1), "SACK", healthy_link(), sack_off, total,
                           kTransfer, seed + 11});

    ClientConfig dsack_off = healthy;
    dsack_off.dsack_enabled = false;
    m.scenarios.push_back({ClassLabel::cf(2), "DSACK", healthy_link(), dsack_off, total,
                           kTransfer, seed + 23});

    for (std::size_t i = 0; i < per_level.size(); ++i) {
        ClientConfig rbuf = healthy;
        rbuf.read_buffer = lvl(static_cast<int>(i));
        m.scenarios.push_back({ClassLabel::cf(3), "RBuf", healthy_link(), rbuf,
                               per_level[i], kTransfer, seed + 37 + i * 7});
    }
    for (std::size_t i = 0; i < per_level.size(); ++i) {
        ClientConfig wbuf = healthy;
        wbuf.write_buffer = lvl(static_cast<int>(i));
        m.scenarios.push_back({ClassLabel::cf(4), "WBuf", healthy_link(), wbuf,
                               per_level[i], kTransfer, seed + 53 + i * 7});
    }
    for (std::size_t i = 0; i < per_level.size(); ++i) {
        ClientConfig both = healthy;
        both.read_buffer = lvl(static_cast<int>(i));
        both.write_buffer = lvl(static_cast<int>(i));
        Scenario sc{ClassLabel::cf(5), "R-WBuf", healthy_link(), both,
                    per_level[i], kTransfer, seed + 71 + i * 7};
        sc.components = {3, 4};
        m.scenarios.push_back(std::move(sc));
    }
}

// CFD training corpus: 11 traces per class (6 classes incl. healthy and the
// combined read+write class).
inline ScenarioMatrix cfd_train(CcProfile profile = CcProfile::AimdStd,
                                std::uint64_t seed = 9001) {
    ScenarioMatrix m;
    add_cf_scenarios(m, profile, seed, {4, 4, 3});
    return m;
}

// Held-out CFD test corpus: 22 traces per class.
inline ScenarioMatrix cfd_test(CcProfile profile, std::uint64_t seed) {
    ScenarioMatrix m;
    add_cf_scenarios(m, profile, seed, {8, 7, 7});
    return m;
}

}  // namespace preset

}  // namespace iacd

#endif  // IACD_SCENARIO_HPP
