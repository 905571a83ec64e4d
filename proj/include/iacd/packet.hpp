#ifndef IACD_PACKET_HPP
#define IACD_PACKET_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "iacd/errors.hpp"

namespace iacd {

constexpr std::uint8_t kFlagSyn = 0x01;
constexpr std::uint8_t kFlagFin = 0x02;
constexpr std::uint8_t kFlagRst = 0x04;
constexpr std::uint8_t kFlagAck = 0x08;
constexpr std::uint8_t kFlagPsh = 0x10;
constexpr std::uint8_t kFlagUrg = 0x20;

struct TcpOptions {
    std::optional<std::uint32_t> mss;
    std::optional<std::uint8_t> wscale;
    bool sack_permitted = false;
    bool dsack_flag = false;

    bool operator==(const TcpOptions&) const = default;
};

struct SackBlock {
    std::uint32_t left = 0;
    std::uint32_t right = 0;

    bool operator==(const SackBlock&) const = default;
};

struct PacketRecord {
    std::uint64_t ts_us = 0;  // microseconds since capture epoch
    std::uint32_t src_addr = 0;
    std::uint32_t dst_addr = 0;
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;
    std::uint32_t seq = 0;
    std::uint32_t ack = 0;
    std::uint8_t flags = 0;
    std::uint32_t payload_len = 0;
    std::uint64_t window = 0;  // advertised window in bytes, after scaling
    std::vector<SackBlock> sack_blocks;
    TcpOptions options;

    bool has(std::uint8_t f) const { return (flags & f) != 0; }
    bool is_data() const { return payload_len > 0; }
    bool is_pure_ack() const {
        return has(kFlagAck) && payload_len == 0 &&
               !has(kFlagSyn) && !has(kFlagFin) && !has(kFlagRst);
    }

    bool operator==(const PacketRecord&) const = default;
};

enum class CapturePoint { Client, Server };

inline std::string to_string(CapturePoint p) {
    return p == CapturePoint::Client ? "CLIENT" : "SERVER";
}

// Initiator side first.
struct ConnectionKey {
    std::uint32_t init_addr = 0;
    std::uint16_t init_port = 0;
    std::uint32_t resp_addr = 0;
    std::uint16_t resp_port = 0;

    bool operator==(const ConnectionKey&) const = default;
};

struct TraceFile {
    CapturePoint capture_point = CapturePoint::Client;
    std::vector<PacketRecord> packets;
    ConnectionKey connection_key;

    bool operator==(const TraceFile&) const = default;
};

inline bool is_forward(const PacketRecord& p, const ConnectionKey& key) {
    return p.src_addr == key.init_addr && p.src_port == key.init_port;
}

inline bool matches_key(const PacketRecord& p, const ConnectionKey& key) {
    const bool fwd = p.src_addr == key.init_addr && p.src_port == key.init_port &&
                     p.dst_addr == key.resp_addr && p.dst_port == key.resp_port;
    const bool rev = p.src_addr == key.resp_addr && p.src_port == key.resp_port &&
                     p.dst_addr == key.init_addr && p.dst_port == key.init_port;
    return fwd || rev;
}

inline void validate_trace(const TraceFile& t) {
    if (t.packets.empty()) throw EmptyTrace("trace contains no packets");
    std::uint64_t prev_ts = 0;
    for (const auto& p : t.packets) {
        if (!matches_key(p, t.connection_key))
            throw SchemaError("packet does not match connection key", 0);
        if (p.ts_us < prev_ts) throw SchemaError("timestamps not nondecreasing", 0);
        prev_ts = p.ts_us;
        for (const auto& b : p.sack_blocks)
            if (b.left >= b.right) throw SchemaError("sack block left >= right", 0);
    }
}

// Derive the initiator-first key from packet contents: the sender of the first
// pure SYN initiates; without a SYN, the first packet's source side is used.
inline ConnectionKey derive_key(const std::vector<PacketRecord>& packets) {
    if (packets.empty()) throw EmptyTrace("cannot derive key from empty packet list");
    const PacketRecord* first_syn = nullptr;
    for (const auto& p : packets) {
        if (p.has(kFlagSyn) && !p.has(kFlagAck)) {
            first_syn = &p;
            break;
        }
    }
    const PacketRecord& ref = first_syn ? *first_syn : packets.front();
    return ConnectionKey{ref.src_addr, ref.src_port, ref.dst_addr, ref.dst_port};
}

inline std::pair<std::vector<PacketRecord>, std::vector<PacketRecord>>
split_directions(const TraceFile& trace) {
    std::vector<PacketRecord> forward, reverse;
    for (const auto& p : trace.packets) {
        if (is_forward(p, trace.connection_key))
            forward.push_back(p);
        else
            reverse.push_back(p);
    }
    return {std::move(forward), std::move(reverse)};
}

inline std::string addr_to_string(std::uint32_t a) {
    return std::to_string((a >> 24) & 0xff) + "." + std::to_string((a >> 16) & 0xff) + "." +
           std::to_string((a >> 8) & 0xff) + "." + std::to_string(a & 0xff);
}

inline std::uint32_t addr_from_string(const std::string& s) {
    std::uint32_t out = 0;
    int octets = 0;
    std::size_t pos = 0;
    while (pos <= s.size() && octets < 4) {
        std::size_t dot = s.find('.', pos);
        if (dot == std::string::npos) dot = s.size();
        const std::string part = s.substr(pos, dot - pos);
        if (part.empty() || part.size() > 3) throw Error("bad IPv4 address: " + s);
        std::uint32_t v = 0;
        for (char c : part) {
            if (c < '0' || c > '9') throw Error("bad IPv4 address: " + s);
            v = v * 10 + static_cast<std::uint32_t>(c - '0');
        }
        if (v > 255) throw Error("bad IPv4 address: " + s);
        out = (out << 8) | v;
        ++octets;
        pos = dot + 1;
    }
    if (octets != 4 || pos <= s.size()) throw Error("bad IPv4 address: " + s);
    return out;
}

}  // namespace iacd

#endif  // IACD_PACKET_HPP
