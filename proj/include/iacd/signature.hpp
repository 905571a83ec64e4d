#ifndef IACD_SIGNATURE_HPP
#define IACD_SIGNATURE_HPP

#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "iacd/errors.hpp"
#include "iacd/packet.hpp"
#include "iacd/stats.hpp"

namespace iacd {

using ordered_json = nlohmann::ordered_json;

// LINK_FAULTY / LINK_HEALTHY for link classification, CF0..CFp for client
// classes (CF0 = healthy client).
struct ClassLabel {
    enum class Kind { LinkFaulty, LinkHealthy, ClientFault };
    Kind kind = Kind::ClientFault;
    int cf_index = 0;

    static ClassLabel link_faulty() { return {Kind::LinkFaulty, 0}; }
    static ClassLabel link_healthy() { return {Kind::LinkHealthy, 0}; }
    static ClassLabel cf(int j) { return {Kind::ClientFault, j}; }

    bool operator==(const ClassLabel&) const = default;
    auto operator<=>(const ClassLabel&) const = default;

    std::string str() const {
        switch (kind) {
            case Kind::LinkFaulty: return "LINK_FAULTY";
            case Kind::LinkHealthy: return "LINK_HEALTHY";
            default: return "CF" + std::to_string(cf_index);
        }
    }

    static ClassLabel parse(const std::string& s) {
        if (s == "LINK_FAULTY") return link_faulty();
        if (s == "LINK_HEALTHY") return link_healthy();
        if (s.size() > 2 && s.rfind("CF", 0) == 0) {
            int j = 0;
            for (std::size_t i = 2; i < s.size(); ++i) {
                if (s[i] < '0' || s[i] > '9') throw Error("bad class label: " + s);
                j = j * 10 + (s[i] - '0');
            }
            return cf(j);
        }
        throw Error("bad class label: " + s);
    }
};

struct Signature {
    std::vector<double> features;  // dimension kSignatureDimension
    ClassLabel label;
    std::string source_id;
};

struct SignatureDatabase {
    std::vector<Signature> signatures;
    std::map<std::string, std::string> class_names;        // label -> display name
    std::map<std::string, std::vector<int>> composition;   // composite label -> cf indices

    std::map<std::string, std::size_t> class_counts() const {
        std::map<std::string, std::size_t> out;
        for (const auto& s : signatures) ++out[s.label.str()];
        return out;
    }
    std::size_t dimension() const {
        return signatures.empty() ? 0 : signatures.front().features.size();
    }
};

// Stable feature-index <-> name mapping over the four direction blocks.
inline const std::vector<std::string>& feature_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        out.reserve(kSignatureDimension);
        for (const char* prefix : {"c_fwd.", "c_rev.", "s_fwd.", "s_rev."})
            for (auto n : stat::names()) out.push_back(prefix + std::string(n));
        return out;
    }();
    return names;
}

inline int feature_index(std::string_view name) {
    const auto& names = feature_names();
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<int>(i);
    throw Error("unknown feature name: " + std::string(name));
}

inline Signature build_signature(const TraceFile& client, const TraceFile& server,
                                 ClassLabel label, std::string source_id = {}) {
    if (client.capture_point != CapturePoint::Client ||
        server.capture_point != CapturePoint::Server)
        throw TracePairMismatch("capture points must be CLIENT and SERVER");
    if (!(client.connection_key == server.connection_key))
        throw TracePairMismatch("trace pair does not share a connection key");
    Signature sig;
    sig.label = label;
    sig.source_id = std::move(source_id);
    sig.features.reserve(kSignatureDimension);
    for (const TraceFile* t : {&client, &server}) {
        auto [fwd, rev] = split_directions(*t);
        const DirectionStats f = compute_direction_stats(fwd, rev);
        const DirectionStats r = compute_direction_stats(rev, fwd);
        sig.features.insert(sig.features.end(), f.v.begin(), f.v.end());
        sig.features.insert(sig.features.end(), r.v.begin(), r.v.end());
    }
    return sig;
}

inline SignatureDatabase assemble_database(std::vector<Signature> signatures) {
    if (signatures.empty()) throw EmptyDatabase("no signatures to assemble");
    const std::size_t dim = signatures.front().features.size();
    for (const auto& s : signatures)
        if (s.features.size() != dim)
            throw DimensionMismatch("signature dimension mismatch: expected " +
                                    std::to_string(dim) + ", got " +
                                    std::to_string(s.features.size()));
    SignatureDatabase db;
    db.signatures = std::move(signatures);
    return db;
}

// ---- persistence: JSON-lines with a self-describing header object ----

inline std::string write_database(const SignatureDatabase& db) {
    if (db.signatures.empty()) throw EmptyDatabase("refusing to write empty database");
    ordered_json header;
    header["format"] = "iacd-sigdb";
    header["version"] = 1;
    header["catalogue"] = std::string(kCatalogueVersion);
    header["dimension"] = db.dimension();
    header["feature_names"] = feature_names();
    if (!db.class_names.empty()) header["class_names"] = db.class_names;
    if (!db.composition.empty()) header["class_composition"] = db.composition;
    std::string out = header.dump() + "\n";
    for (const auto& s : db.signatures) {
        ordered_json row;
        row["source_id"] = s.source_id;
        row["label"] = s.label.str();
        row["features"] = s.features;
        out += row.dump() + "\n";
    }
    return out;
}

inline SignatureDatabase read_database(const std::string& text) {
    SignatureDatabase db;
    std::istringstream in(text);
    std::string line;
    bool have_header = false;
    std::size_t dim = 0;
    std::size_t line_no = 0;
    std::vector<Signature> sigs;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        ordered_json j;
        try {
            j = ordered_json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw SchemaError(std::string("bad database line: ") + e.what(), line_no);
        }
        if (!have_header) {
            if (j.value("format", "") != "iacd-sigdb")
                throw SchemaError("expected iacd-sigdb header", line_no);
            if (j.value("catalogue", "") != kCatalogueVersion)
                throw SchemaError("catalogue version mismatch", line_no);
            dim = j.value("dimension", std::size_t{0});
            if (j.contains("class_names"))
                db.class_names =
                    j["class_names"].get<std::map<std::string, std::string>>();
            if (j.contains("class_composition"))
                db.composition =
                    j["class_composition"].get<std::map<std::string, std::vector<int>>>();
            have_header = true;
            continue;
        }
        Signature s;
        if (!j.contains("label") || !j.contains("features"))
            throw SchemaError("missing label or features", line_no);
        s.source_id = j.value("source_id", "");
        s.label = ClassLabel::parse(j["label"].get<std::string>());
        s.features = j["features"].get<std::vector<double>>();
        if (s.features.size() != dim)
            throw SchemaError("feature vector length mismatch", line_no);
        sigs.push_back(std::move(s));
    }
    if (!have_header) throw SchemaError("missing database header", 0);
    if (sigs.empty()) throw EmptyDatabase("database has no signatures");
    db.signatures = std::move(sigs);
    return db;
}

// Raw matrix export: one row per signature, label first, catalogue order.
inline std::string export_matrix_csv(const SignatureDatabase& db) {
    std::string out = "label";
    for (const auto& n : feature_names()) out += "," + n;
    out += "\n";
    char buf[40];
    for (const auto& s : db.signatures) {
        out += s.label.str();
        for (double v : s.features) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out += ",";
            out += buf;
        }
        out += "\n";
    }
    return out;
}

}  // namespace iacd

#endif  // IACD_SIGNATURE_HPP
