#ifndef IACD_PCAP_HPP
#define IACD_PCAP_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

#include "iacd/errors.hpp"
#include "iacd/packet.hpp"

// Classic pcap only (no pcapng), linktype 1 (Ethernet), IPv4 + TCP.
// Nanosecond magic is accepted with timestamps truncated to microseconds.

namespace iacd {

namespace pcapdetail {

constexpr std::uint32_t kMagicUs = 0xa1b2c3d4u;
constexpr std::uint32_t kMagicUsSwapped = 0xd4c3b2a1u;
constexpr std::uint32_t kMagicNs = 0xa1b23c4du;
constexpr std::uint32_t kMagicNsSwapped = 0x4d3cb2a1u;

struct Reader {
    std::span<const std::uint8_t> data;
    std::size_t pos = 0;
    bool swap = false;

    std::size_t remaining() const { return data.size() - pos; }

    std::uint8_t u8() { return data[pos++]; }

    std::uint16_t u16le() {
        std::uint16_t v = static_cast<std::uint16_t>(data[pos] | (data[pos + 1] << 8));
        pos += 2;
        if (swap) v = static_cast<std::uint16_t>((v >> 8) | (v << 8));
        return v;
    }

    std::uint32_t u32le() {
        std::uint32_t v = static_cast<std::uint32_t>(data[pos]) |
                          (static_cast<std::uint32_t>(data[pos + 1]) << 8) |
                          (static_cast<std::uint32_t>(data[pos + 2]) << 16) |
                          (static_cast<std::uint32_t>(data[pos + 3]) << 24);
        pos += 4;
        if (swap) v = __builtin_bswap32(v);
        return v;
    }
};

inline std::uint16_t be16(std::span<const std::uint8_t> b, std::size_t off) {
    return static_cast<std::uint16_t>((b[off] << 8) | b[off + 1]);
}

inline std::uint32_t be32(std::span<const std::uint8_t> b, std::size_t off) {
    return (static_cast<std::uint32_t>(b[off]) << 24) |
           (static_cast<std::uint32_t>(b[off + 1]) << 16) |
           (static_cast<std::uint32_t>(b[off + 2]) << 8) |
           static_cast<std::uint32_t>(b[off + 3]);
}

struct RawPacket {
    PacketRecord rec;        // window still unscaled
    std::uint64_t raw_window = 0;
};

// Decodes one Ethernet frame into a raw TCP packet; nullopt = not IPv4/TCP.
inline std::optional<RawPacket> decode_frame(std::span<const std::uint8_t> frame,
                                             std::uint64_t ts_us) {
    if (frame.size() < 14) return std::nullopt;
    std::size_t off = 12;
    std::uint16_t ethertype = be16(frame, off);
    off += 2;
    while (ethertype == 0x8100 || ethertype == 0x88a8) {  // VLAN tags
        if (frame.size() < off + 4) return std::nullopt;
        ethertype = be16(frame, off + 2);
        off += 4;
    }
    if (ethertype == 0x86dd) throw UnsupportedNetwork("IPv6 frames are not supported");
    if (ethertype != 0x0800) return std::nullopt;
    if (frame.size() < off + 20) return std::nullopt;
    const std::uint8_t ver_ihl = frame[off];
    if ((ver_ihl >> 4) != 4) return std::nullopt;
    const std::size_t ihl = static_cast<std::size_t>(ver_ihl & 0x0f) * 4;
    if (ihl < 20 || frame.size() < off + ihl) return std::nullopt;
    const std::uint16_t total_len = be16(frame, off + 2);
    const std::uint8_t proto = frame[off + 9];
    if (proto != 6) return std::nullopt;
    RawPacket out;
    out.rec.ts_us = ts_us;
    out.rec.src_addr = be32(frame, off + 12);
    out.rec.dst_addr = be32(frame, off + 16);
    const std::size_t tcp = off + ihl;
    if (frame.size() < tcp + 20) return std::nullopt;
    out.rec.src_port = be16(frame, tcp);
    out.rec.dst_port = be16(frame, tcp + 2);
    out.rec.seq = be32(frame, tcp + 4);
    out.rec.ack = be32(frame, tcp + 8);
    const std::size_t doff = static_cast<std::size_t>(frame[tcp + 12] >> 4) * 4;
    if (doff < 20 || frame.size() < tcp + doff) return std::nullopt;
    const std::uint8_t wire_flags = frame[tcp + 13];
    std::uint8_t flags = 0;
    if (wire_flags & 0x01) flags |= kFlagFin;
    if (wire_flags & 0x02) flags |= kFlagSyn;
    if (wire_flags & 0x04) flags |= kFlagRst;
    if (wire_flags & 0x08) flags |= kFlagPsh;
    if (wire_flags & 0x10) flags |= kFlagAck;
    if (wire_flags & 0x20) flags |= kFlagUrg;
    out.rec.flags = flags;
    out.raw_window = be16(frame, tcp + 14);
    if (total_len >= ihl + doff)
        out.rec.payload_len = static_cast<std::uint32_t>(total_len - ihl - doff);

    std::size_t opt = tcp + 20;
    const std::size_t opt_end = tcp + doff;
    while (opt < opt_end) {
        const std::uint8_t kind = frame[opt];
        if (kind == 0) break;       // end of options
        if (kind == 1) {            // nop
            ++opt;
            continue;
        }
        if (opt + 1 >= opt_end) break;
        const std::uint8_t len = frame[opt + 1];
        if (len < 2 || opt + len > opt_end) break;
        switch (kind) {
            case 2:  // MSS
                if (len == 4) out.rec.options.mss = be16(frame, opt + 2);
                break;
            case 3:  // window scale
                if (len == 3) out.rec.options.wscale = frame[opt + 2];
                break;
            case 4:  // SACK permitted
                out.rec.options.sack_permitted = true;
                break;
            case 5: {  // SACK blocks
                for (std::size_t b = opt + 2; b + 8 <= opt + len; b += 8) {
                    SackBlock blk{be32(frame, b), be32(frame, b + 4)};
                    if (blk.left < blk.right) out.rec.sack_blocks.push_back(blk);
                }
                break;
            }
            default:
                break;
        }
        opt += len;
    }
    // RFC 2883 D-SACK detection: first block below the cumulative ACK, or
    // contained in the second block.
    if (!out.rec.sack_blocks.empty() && out.rec.has(kFlagAck)) {
        const auto& b0 = out.rec.sack_blocks.front();
        bool dsack = b0.right <= out.rec.ack;
        if (!dsack && out.rec.sack_blocks.size() >= 2) {
            const auto& b1 = out.rec.sack_blocks[1];
            dsack = b0.left >= b1.left && b0.right <= b1.right;
        }
        out.rec.options.dsack_flag = dsack;
    }
    return out;
}

}  // namespace pcapdetail

inline TraceFile parse_pcap(std::span<const std::uint8_t> bytes,
                            CapturePoint capture_point = CapturePoint::Client,
                            std::optional<ConnectionKey> select = std::nullopt) {
    using namespace pcapdetail;
    if (bytes.size() < 24) throw CorruptCapture("pcap global header missing");
    Reader r{bytes};
    const std::uint32_t magic = r.u32le();
    bool ns = false;
    if (magic == kMagicUs) {
    } else if (magic == kMagicNs) {
        ns = true;
    } else if (magic == kMagicUsSwapped) {
        r.swap = true;
    } else if (magic == kMagicNsSwapped) {
        r.swap = true;
        ns = true;
    } else {
        throw CorruptCapture("unrecognized pcap magic");
    }
    r.u16le();  // version major
    r.u16le();  // version minor
    r.u32le();  // thiszone
    r.u32le();  // sigfigs
    r.u32le();  // snaplen
    const std::uint32_t linktype = r.u32le();
    if (linktype != 1) throw CorruptCapture("linktype must be Ethernet (1)");

    std::vector<RawPacket> raw;
    while (r.remaining() > 0) {
        if (r.remaining() < 16)
            throw TruncatedRecord("truncated pcap record header", raw.size());
        const std::uint32_t ts_sec = r.u32le();
        const std::uint32_t ts_frac = r.u32le();
        const std::uint32_t incl_len = r.u32le();
        r.u32le();  // orig_len
        if (r.remaining() < incl_len)
            throw TruncatedRecord("truncated pcap packet record", raw.size());
        const std::uint64_t ts_us =
            static_cast<std::uint64_t>(ts_sec) * 1000000ull + (ns ? ts_frac / 1000 : ts_frac);
        auto frame = bytes.subspan(r.pos, incl_len);
        r.pos += incl_len;
        if (auto pkt = decode_frame(frame, ts_us)) raw.push_back(std::move(*pkt));
    }
    if (raw.empty()) throw EmptyTrace("capture contains no IPv4 TCP packets");

    // Group by normalized 4-tuple; keep the connection with the most packets
    // unless an explicit key was requested.
    using Norm = std::tuple<std::uint32_t, std::uint16_t, std::uint32_t, std::uint16_t>;
    auto normalize = [](const PacketRecord& p) -> Norm {
        auto a = std::make_pair(p.src_addr, p.src_port);
        auto b = std::make_pair(p.dst_addr, p.dst_port);
        if (b < a) std::swap(a, b);
        return {a.first, a.second, b.first, b.second};
    };
    std::map<Norm, std::size_t> counts;
    for (const auto& rp : raw) ++counts[normalize(rp.rec)];
    Norm chosen;
    if (select) {
        PacketRecord probe;
        probe.src_addr = select->init_addr;
        probe.src_port = select->init_port;
        probe.dst_addr = select->resp_addr;
        probe.dst_port = select->resp_port;
        chosen = normalize(probe);
        if (!counts.count(chosen)) throw EmptyTrace("requested 4-tuple not present in capture");
    } else {
        std::size_t best = 0;
        for (const auto& [key, n] : counts) {
            if (n > best) {
                best = n;
                chosen = key;
            }
        }
    }

    TraceFile trace;
    trace.capture_point = capture_point;
    std::optional<std::uint8_t> ws_fwd, ws_rev;  // from each side's SYN
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (normalize(raw[i].rec) != chosen) continue;
        members.push_back(i);
    }
    std::vector<PacketRecord> pkts;
    pkts.reserve(members.size());
    for (std::size_t i : members) pkts.push_back(raw[i].rec);
    trace.connection_key = derive_key(pkts);
    for (std::size_t k = 0; k < members.size(); ++k) {
        const auto& rp = raw[members[k]];
        if (rp.rec.has(kFlagSyn) && rp.rec.options.wscale) {
            if (is_forward(rp.rec, trace.connection_key))
                ws_fwd = rp.rec.options.wscale;
            else
                ws_rev = rp.rec.options.wscale;
        }
    }
    const bool scaling = ws_fwd.has_value() && ws_rev.has_value();
    for (std::size_t k = 0; k < members.size(); ++k) {
        PacketRecord p = raw[members[k]].rec;
        const std::uint64_t raw_win = raw[members[k]].raw_window;
        if (!p.has(kFlagSyn) && scaling) {
            const std::uint8_t shift = is_forward(p, trace.connection_key) ? *ws_fwd : *ws_rev;
            p.window = raw_win << shift;
        } else {
            p.window = raw_win;
        }
        trace.packets.push_back(std::move(p));
    }
    validate_trace(trace);
    return trace;
}

// Classic little-endian microsecond pcap writer; the parser's exact inverse
// for traces whose post-scaling windows are multiples of 2^wscale.
inline std::vector<std::uint8_t> write_pcap(const TraceFile& trace) {
    std::vector<std::uint8_t> out;
    auto u8 = [&](std::uint8_t v) { out.push_back(v); };
    auto u16le = [&](std::uint16_t v) {
        u8(static_cast<std::uint8_t>(v & 0xff));
        u8(static_cast<std::uint8_t>(v >> 8));
    };
    auto u32le = [&](std::uint32_t v) {
        u16le(static_cast<std::uint16_t>(v & 0xffff));
        u16le(static_cast<std::uint16_t>(v >> 16));
    };
    auto u16be = [&](std::uint16_t v) {
        u8(static_cast<std::uint8_t>(v >> 8));
        u8(static_cast<std::uint8_t>(v & 0xff));
    };
    auto u32be = [&](std::uint32_t v) {
        u16be(static_cast<std::uint16_t>(v >> 16));
        u16be(static_cast<std::uint16_t>(v & 0xffff));
    };

    u32le(pcapdetail::kMagicUs);
    u16le(2);
    u16le(4);
    u32le(0);
    u32le(0);
    u32le(262144);
    u32le(1);  // Ethernet

    std::optional<std::uint8_t> ws_fwd, ws_rev;
    for (const auto& p : trace.packets) {
        if (p.has(kFlagSyn) && p.options.wscale) {
            if (is_forward(p, trace.connection_key))
                ws_fwd = p.options.wscale;
            else
                ws_rev = p.options.wscale;
        }
    }
    const bool scaling = ws_fwd.has_value() && ws_rev.has_value();

    for (const auto& p : trace.packets) {
        std::vector<std::uint8_t> opts;
        if (p.options.mss) {
            opts.insert(opts.end(), {2, 4, static_cast<std::uint8_t>(*p.options.mss >> 8),
                                     static_cast<std::uint8_t>(*p.options.mss & 0xff)});
        }
        if (p.options.wscale) opts.insert(opts.end(), {3, 3, *p.options.wscale});
        if (p.options.sack_permitted) opts.insert(opts.end(), {4, 2});
        if (!p.sack_blocks.empty()) {
            opts.push_back(5);
            opts.push_back(static_cast<std::uint8_t>(2 + 8 * p.sack_blocks.size()));
            for (const auto& b : p.sack_blocks) {
                for (int s = 24; s >= 0; s -= 8) opts.push_back((b.left >> s) & 0xff);
                for (int s = 24; s >= 0; s -= 8) opts.push_back((b.right >> s) & 0xff);
            }
        }
        while (opts.size() % 4) opts.push_back(1);  // nop padding
        const std::size_t tcp_len = 20 + opts.size();
        const std::size_t ip_len = 20 + tcp_len + p.payload_len;
        const std::size_t frame_len = 14 + ip_len;

        u32le(static_cast<std::uint32_t>(p.ts_us / 1000000ull));
        u32le(static_cast<std::uint32_t>(p.ts_us % 1000000ull));
        u32le(static_cast<std::uint32_t>(frame_len));
        u32le(static_cast<std::uint32_t>(frame_len));

        for (int i = 0; i < 6; ++i) u8(0x02);  // dst mac
        for (int i = 0; i < 6; ++i) u8(0x04);  // src mac
        u16be(0x0800);

        u8(0x45);
        u8(0);
        u16be(static_cast<std::uint16_t>(ip_len));
        u16be(0);
        u16be(0x4000);  // DF
        u8(64);
        u8(6);
        u16be(0);  // checksum unset
        u32be(p.src_addr);
        u32be(p.dst_addr);

        u16be(p.src_port);
        u16be(p.dst_port);
        u32be(p.seq);
        u32be(p.ack);
        u8(static_cast<std::uint8_t>((tcp_len / 4) << 4));
        std::uint8_t wire_flags = 0;
        if (p.has(kFlagFin)) wire_flags |= 0x01;
        if (p.has(kFlagSyn)) wire_flags |= 0x02;
        if (p.has(kFlagRst)) wire_flags |= 0x04;
        if (p.has(kFlagPsh)) wire_flags |= 0x08;
        if (p.has(kFlagAck)) wire_flags |= 0x10;
        if (p.has(kFlagUrg)) wire_flags |= 0x20;
        u8(wire_flags);
        std::uint64_t raw_win = p.window;
        if (!p.has(kFlagSyn) && scaling) {
            const std::uint8_t shift = is_forward(p, trace.connection_key) ? *ws_fwd : *ws_rev;
            raw_win = p.window >> shift;
        }
        u16be(static_cast<std::uint16_t>(std::min<std::uint64_t>(raw_win, 0xffff)));
        u16be(0);  // checksum unset
        u16be(0);
        out.insert(out.end(), opts.begin(), opts.end());
        out.insert(out.end(), p.payload_len, 0);
    }
    return out;
}

}  // namespace iacd

#endif  // IACD_PCAP_HPP
