#ifndef IACD_CANONICAL_HPP
#define IACD_CANONICAL_HPP

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "iacd/errors.hpp"
#include "iacd/packet.hpp"

// Line-delimited trace format, one record per line:
//   #iacd-trace v1 capture_point=<CLIENT|SERVER>
//   ts_us \t src \t dst \t sport \t dport \t seq \t ack \t flags \t payload \t win \t sack \t opts
// flags: set letters joined by '.', order S F R A P U (e.g. "S.A" for SYN-ACK).
// sack:  "l1-r1;l2-r2" or "-".  opts: "mss=1460,ws=7,sackok=1,dsack=1" or "-".
// Integers base-10 only; the round trip is bit-exact.

namespace iacd {

namespace detail {

inline std::string flags_to_string(std::uint8_t flags) {
    static constexpr std::pair<std::uint8_t, char> order[] = {
        {kFlagSyn, 'S'}, {kFlagFin, 'F'}, {kFlagRst, 'R'},
        {kFlagAck, 'A'}, {kFlagPsh, 'P'}, {kFlagUrg, 'U'}};
    std::string out;
    for (auto [bit, ch] : order) {
        if (flags & bit) {
            if (!out.empty()) out += '.';
            out += ch;
        }
    }
    if (out.empty()) out = "-";
    return out;
}

inline std::uint8_t flags_from_string(std::string_view s, std::size_t line_no) {
    if (s == "-") return 0;
    std::uint8_t flags = 0;
    std::size_t pos = 0;
    while (pos < s.size()) {
        switch (s[pos]) {
            case 'S': flags |= kFlagSyn; break;
            case 'F': flags |= kFlagFin; break;
            case 'R': flags |= kFlagRst; break;
            case 'A': flags |= kFlagAck; break;
            case 'P': flags |= kFlagPsh; break;
            case 'U': flags |= kFlagUrg; break;
            default: throw SchemaError("bad flag character", line_no);
        }
        ++pos;
        if (pos < s.size()) {
            if (s[pos] != '.') throw SchemaError("bad flags separator", line_no);
            ++pos;
            if (pos == s.size()) throw SchemaError("trailing flags separator", line_no);
        }
    }
    return flags;
}

template <typename T>
T parse_uint(std::string_view s, std::size_t line_no, const char* what) {
    T value{};
    const auto* begin = s.data();
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, value, 10);
    if (ec != std::errc{} || ptr != end || s.empty())
        throw SchemaError(std::string("bad integer field: ") + what, line_no);
    return value;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        std::size_t next = line.find(sep, pos);
        if (next == std::string_view::npos) {
            out.push_back(line.substr(pos));
            break;
        }
        out.push_back(line.substr(pos, next - pos));
        pos = next + 1;
    }
    return out;
}

}  // namespace detail

inline std::string serialize_canonical(const TraceFile& trace) {
    std::string out = "#iacd-trace v1 capture_point=" + to_string(trace.capture_point) + "\n";
    for (const auto& p : trace.packets) {
        out += std::to_string(p.ts_us);
        out += '\t';
        out += addr_to_string(p.src_addr);
        out += '\t';
        out += addr_to_string(p.dst_addr);
        out += '\t';
        out += std::to_string(p.src_port);
        out += '\t';
        out += std::to_string(p.dst_port);
        out += '\t';
        out += std::to_string(p.seq);
        out += '\t';
        out += std::to_string(p.ack);
        out += '\t';
        out += detail::flags_to_string(p.flags);
        out += '\t';
        out += std::to_string(p.payload_len);
        out += '\t';
        out += std::to_string(p.window);
        out += '\t';
        if (p.sack_blocks.empty()) {
            out += '-';
        } else {
            for (std::size_t i = 0; i < p.sack_blocks.size(); ++i) {
                if (i) out += ';';
                out += std::to_string(p.sack_blocks[i].left);
                out += '-';
                out += std::to_string(p.sack_blocks[i].right);
            }
        }
        out += '\t';
        std::string opts;
        if (p.options.mss) opts += "mss=" + std::to_string(*p.options.mss);
        if (p.options.wscale) {
            if (!opts.empty()) opts += ',';
            opts += "ws=" + std::to_string(static_cast<unsigned>(*p.options.wscale));
        }
        if (p.options.sack_permitted) {
            if (!opts.empty()) opts += ',';
            opts += "sackok=1";
        }
        if (p.options.dsack_flag) {
            if (!opts.empty()) opts += ',';
            opts += "dsack=1";
        }
        out += opts.empty() ? "-" : opts;
        out += '\n';
    }
    return out;
}

inline TraceFile parse_canonical(std::string_view text) {
    TraceFile trace;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool have_header = false;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (line.empty()) continue;
        if (!have_header) {
            constexpr std::string_view prefix = "#iacd-trace v1 capture_point=";
            if (!line.starts_with(prefix))
                throw SchemaError("missing #iacd-trace v1 header", line_no);
            std::string_view cp = line.substr(prefix.size());
            if (cp == "CLIENT")
                trace.capture_point = CapturePoint::Client;
            else if (cp == "SERVER")
                trace.capture_point = CapturePoint::Server;
            else
                throw SchemaError("capture_point must be CLIENT or SERVER", line_no);
            have_header = true;
            continue;
        }
        auto fields = detail::split(line, '\t');
        if (fields.size() != 12)
            throw SchemaError("expected 12 tab-separated fields", line_no);
        PacketRecord p;
        p.ts_us = detail::parse_uint<std::uint64_t>(fields[0], line_no, "ts_us");
        try {
            p.src_addr = addr_from_string(std::string(fields[1]));
            p.dst_addr = addr_from_string(std::string(fields[2]));
        } catch (const Error& e) {
            throw SchemaError(e.what(), line_no);
        }
        p.src_port = detail::parse_uint<std::uint16_t>(fields[3], line_no, "sport");
        p.dst_port = detail::parse_uint<std::uint16_t>(fields[4], line_no, "dport");
        p.seq = detail::parse_uint<std::uint32_t>(fields[5], line_no, "seq");
        p.ack = detail::parse_uint<std::uint32_t>(fields[6], line_no, "ack");
        p.flags = detail::flags_from_string(fields[7], line_no);
        p.payload_len = detail::parse_uint<std::uint32_t>(fields[8], line_no, "payload");
        p.window = detail::parse_uint<std::uint64_t>(fields[9], line_no, "win");
        if (fields[10] != "-") {
            for (auto part : detail::split(fields[10], ';')) {
                auto edges = detail::split(part, '-');
                if (edges.size() != 2) throw SchemaError("bad sack block", line_no);
                SackBlock b;
                b.left = detail::parse_uint<std::uint32_t>(edges[0], line_no, "sack.left");
                b.right = detail::parse_uint<std::uint32_t>(edges[1], line_no, "sack.right");
                if (b.left >= b.right) throw SchemaError("sack block left >= right", line_no);
                p.sack_blocks.push_back(b);
            }
        }
        if (fields[11] != "-") {
            for (auto kv : detail::split(fields[11], ',')) {
                std::size_t eq = kv.find('=');
                if (eq == std::string_view::npos) throw SchemaError("bad option token", line_no);
                std::string_view key = kv.substr(0, eq);
                std::string_view val = kv.substr(eq + 1);
                if (key == "mss")
                    p.options.mss = detail::parse_uint<std::uint32_t>(val, line_no, "mss");
                else if (key == "ws")
                    p.options.wscale = detail::parse_uint<std::uint8_t>(val, line_no, "ws");
                else if (key == "sackok")
                    p.options.sack_permitted =
                        detail::parse_uint<std::uint32_t>(val, line_no, "sackok") != 0;
                else if (key == "dsack")
                    p.options.dsack_flag =
                        detail::parse_uint<std::uint32_t>(val, line_no, "dsack") != 0;
                else
                    throw SchemaError("unknown option key", line_no);
            }
        }
        trace.packets.push_back(std::move(p));
    }
    if (!have_header) throw SchemaError("missing header line", 0);
    if (trace.packets.empty()) throw EmptyTrace("canonical trace has no packet records");
    trace.connection_key = derive_key(trace.packets);
    validate_trace(trace);
    return trace;
}

}  // namespace iacd

#endif  // IACD_CANONICAL_HPP
