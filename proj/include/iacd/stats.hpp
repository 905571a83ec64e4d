#ifndef IACD_STATS_HPP
#define IACD_STATS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "iacd/packet.hpp"

// Per-direction statistical trace characterization. The catalogue below is
// versioned: feature indices are a stable contract shared by signature files,
// trained models, and exports. See docs/feature-catalogue-v1.md.

namespace iacd {

inline constexpr std::string_view kCatalogueVersion = "iacd-fc-v1";
inline constexpr int kStatsPerDirection = 70;
inline constexpr int kSignatureDimension = 4 * kStatsPerDirection;

namespace stat {

enum Index : int {
    // volume
    total_packets = 0,
    total_bytes,  // wire-byte estimate: payload + 40 per packet
    unique_bytes,
    data_packets,
    data_bytes,
    retransmitted_packets,
    retransmitted_bytes,
    pure_acks,
    pushed_packets,
    urgent_packets,
    // flags / handshake
    syn_count,
    fin_count,
    rst_count,
    sack_permitted,
    window_scale,
    mss_requested,
    ttl_proxy_min,  // capture metadata; zero for canonical v1 sources
    ttl_proxy_max,
    // segment size (payload + 40 over data packets)
    seg_size_max,
    seg_size_min,
    seg_size_mean,
    seg_size_stddev,
    payload_max,
    payload_min_nonzero,
    // window
    win_adv_max,
    win_adv_min,
    win_adv_mean,
    zero_window_count,
    owin_max,
    owin_min,
    owin_mean,
    owin_stddev,
    // RTT (seconds)
    rtt_min,
    rtt_max,
    rtt_mean,
    rtt_stddev,
    rtt_samples,
    handshake_rtt,
    rtt_fullsz_min,
    rtt_fullsz_max,
    rtt_fullsz_mean,
    rtt_fullsz_samples,
    // loss / reordering
    dup_acks,
    triple_dupack_events,
    sack_blocks_sent,
    dsack_blocks_sent,
    out_of_order_packets,
    inferred_timeouts,
    max_segment_rexmits,
    missed_bytes,
    truncated_packets,  // capture metadata; zero for canonical v1 sources
    duplicate_packets,
    // timing / throughput
    elapsed_s,
    max_idle_s,
    throughput_bps,  // data bytes per second
    goodput_bps,     // unique bytes per second
    initial_window_bytes,
    initial_window_packets,
    data_xmit_span_s,
    ack_latency_mean_s,
    interpkt_gap_mean_s,
    interpkt_gap_stddev_s,
    // stall / limit
    rwnd_limited_frac,
    inflight_max,
    sender_stalls,
    zero_window_stall_s,
    persist_events,
    keepalive_packets,
    time_to_first_byte_s,
    time_to_last_byte_s,
    count
};

static_assert(count == kStatsPerDirection);

inline const std::array<std::string_view, kStatsPerDirection>& names() {
    static const std::array<std::string_view, kStatsPerDirection> n = {
        "total_packets", "total_bytes", "unique_bytes", "data_packets", "data_bytes",
        "retransmitted_packets", "retransmitted_bytes", "pure_acks", "pushed_packets",
        "urgent_packets", "syn_count", "fin_count", "rst_count", "sack_permitted",
        "window_scale", "mss_requested", "ttl_proxy_min", "ttl_proxy_max", "seg_size_max",
        "seg_size_min", "seg_size_mean", "seg_size_stddev", "payload_max",
        "payload_min_nonzero", "win_adv_max", "win_adv_min", "win_adv_mean",
        "zero_window_count", "owin_max", "owin_min", "owin_mean", "owin_stddev", "rtt_min",
        "rtt_max", "rtt_mean", "rtt_stddev", "rtt_samples", "handshake_rtt", "rtt_fullsz_min",
        "rtt_fullsz_max", "rtt_fullsz_mean", "rtt_fullsz_samples", "dup_acks",
        "triple_dupack_events", "sack_blocks_sent", "dsack_blocks_sent", "out_of_order_packets",
        "inferred_timeouts", "max_segment_rexmits", "missed_bytes", "truncated_packets",
        "duplicate_packets", "elapsed_s", "max_idle_s", "throughput_bps", "goodput_bps",
        "initial_window_bytes", "initial_window_packets", "data_xmit_span_s",
        "ack_latency_mean_s", "interpkt_gap_mean_s", "interpkt_gap_stddev_s",
        "rwnd_limited_frac", "inflight_max", "sender_stalls", "zero_window_stall_s",
        "persist_events", "keepalive_packets", "time_to_first_byte_s", "time_to_last_byte_s"};
    return n;
}

}  // namespace stat

struct DirectionStats {
    std::array<double, kStatsPerDirection> v{};

    double operator[](int i) const { return v[static_cast<std::size_t>(i)]; }
    double& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
};

namespace statdetail {

inline double vec_mean(const std::vector<double>& s) {
    if (s.empty()) return 0.0;
    double acc = 0.0;
    for (double x : s) acc += x;
    return acc / static_cast<double>(s.size());
}

// Sample standard deviation; 0 for fewer than two samples.
inline double vec_stddev(const std::vector<double>& s) {
    if (s.size() < 2) return 0.0;
    const double m = vec_mean(s);
    double acc = 0.0;
    for (double x : s) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(s.size() - 1));
}

inline double vec_min(const std::vector<double>& s) {
    return s.empty() ? 0.0 : *std::min_element(s.begin(), s.end());
}

inline double vec_max(const std::vector<double>& s) {
    return s.empty() ? 0.0 : *std::max_element(s.begin(), s.end());
}

// Inserts [lo, hi) into a merged interval map, returning how many of its
// bytes were already covered.
inline std::uint64_t interval_insert(std::map<std::uint64_t, std::uint64_t>& cover,
                                     std::uint64_t lo, std::uint64_t hi) {
    if (lo >= hi) return 0;
    std::uint64_t overlap = 0;
    auto it = cover.lower_bound(lo);
    if (it != cover.begin()) {
        auto prev = std::prev(it);
        if (prev->second >= lo) it = prev;
    }
    std::uint64_t new_lo = lo, new_hi = hi;
    while (it != cover.end() && it->first <= hi) {
        const std::uint64_t a = std::max(lo, it->first);
        const std::uint64_t b = std::min(hi, it->second);
        if (a < b) overlap += b - a;
        new_lo = std::min(new_lo, it->first);
        new_hi = std::max(new_hi, it->second);
        it = cover.erase(it);
    }
    cover.emplace(new_lo, new_hi);
    return overlap;
}

struct SeqSpace {
    std::uint32_t base = 0;
    std::uint64_t unwrap(std::uint32_t s) const {
        return static_cast<std::uint64_t>(static_cast<std::uint32_t>(s - base));
    }
};

}  // namespace statdetail

inline DirectionStats compute_direction_stats(const std::vector<PacketRecord>& packets,
                                              const std::vector<PacketRecord>& opposite) {
    using namespace statdetail;
    namespace st = stat;
    DirectionStats out;
    if (packets.empty()) return out;  // degenerate input: all zeros

    const std::uint64_t epoch_us =
        opposite.empty() ? packets.front().ts_us
                         : std::min(packets.front().ts_us, opposite.front().ts_us);
    auto secs = [&](std::uint64_t ts) {
        return static_cast<double>(ts - epoch_us) / 1e6;
    };

    SeqSpace dir_space;
    dir_space.base = packets.front().seq;
    for (const auto& p : packets) {
        if (p.has(kFlagSyn)) {
            dir_space.base = p.seq;
            break;
        }
    }
    SeqSpace opp_space;
    if (!opposite.empty()) {
        opp_space.base = opposite.front().seq;
        for (const auto& p : opposite) {
            if (p.has(kFlagSyn)) {
                opp_space.base = p.seq;
                break;
            }
        }
    }

    double mss_est = 0;  // largest payload in this direction
    for (const auto& p : packets) mss_est = std::max(mss_est, static_cast<double>(p.payload_len));

    // ---- chronological sweep over both directions ----
    std::map<std::uint64_t, std::uint64_t> covered;
    std::map<std::pair<std::uint64_t, std::uint64_t>, int> tx_count;
    std::uint64_t highest_end = 0;      // frontier of sent data (relative)
    std::uint64_t highest_ack = 0;      // highest cumulative ack from opposite
    bool any_ack_seen = false;
    std::uint64_t min_data_start = 0;
    bool any_data = false;

    std::vector<double> owin_samples, win_samples, seg_samples;
    std::vector<double> owin_after_pkt(packets.size(), 0.0);  // per dir packet
    double inflight_max = 0;

    double dup_acks = 0, triple_events = 0;
    std::uint64_t prev_ack_dir = 0;
    bool prev_ack_dir_seen = false;
    int dup_run_dir = 0;

    // opposite-side dup-ack run, for fast-retransmit vs timeout inference
    std::uint64_t opp_prev_ack = 0;
    bool opp_prev_seen = false;
    int opp_dup_run = 0;
    bool in_recovery = false;
    std::uint64_t recovery_point = 0;
    double inferred_timeouts = 0;

    double retrans_pkts = 0, retrans_bytes = 0, unique_bytes = 0;
    double ooo_pkts = 0, dup_pkts = 0;
    double sack_blocks = 0, dsack_blocks = 0;
    double zero_win = 0, keepalives = 0;

    double last_opp_win = -1.0;  // post-scaling advertised window from opposite
    double rwnd_limited_time = 0.0;

    bool opp_zero_open = false;
    double opp_zero_start = 0, opp_zero_total = 0, persist_events = 0;
    double last_opp_ts = 0;

    double first_data_rel_start = 0;
    double t_first_data_ack = -1.0;
    double iw_bytes = 0, iw_packets = 0;

    std::vector<std::pair<double, std::pair<std::uint64_t, std::uint64_t>>> rexmit_events;

    std::size_t i = 0, j = 0;
    while (i < packets.size() || j < opposite.size()) {
        // opposite first on timestamp ties
        const bool take_opp =
            j < opposite.size() &&
            (i >= packets.size() || opposite[j].ts_us <= packets[i].ts_us);
        if (take_opp) {
            const PacketRecord& p = opposite[j];
            const double t = secs(p.ts_us);
            last_opp_ts = t;
            if (p.has(kFlagAck)) {
                const std::uint64_t rel = dir_space.unwrap(p.ack);
                if (rel < (1ull << 31)) {
                    if (!any_ack_seen || rel > highest_ack) {
                        opp_dup_run = 0;
                        highest_ack = rel;
                        any_ack_seen = true;
                        if (in_recovery && highest_ack >= recovery_point) in_recovery = false;
                    } else if (p.is_pure_ack() && opp_prev_seen && rel == opp_prev_ack) {
                        ++opp_dup_run;
                    }
                    opp_prev_ack = rel;
                    opp_prev_seen = true;
                    if (any_data && t_first_data_ack < 0 && rel > first_data_rel_start)
                        t_first_data_ack = t;
                }
            }
            if (!p.has(kFlagSyn) && !p.has(kFlagRst)) {
                const double w = static_cast<double>(p.window);
                last_opp_win = w;
                if (w == 0.0) {
                    if (!opp_zero_open) {
                        opp_zero_open = true;
                        opp_zero_start = t;
                        persist_events += 1;
                    }
                } else if (opp_zero_open) {
                    opp_zero_open = false;
                    opp_zero_total += t - opp_zero_start;
                }
            }
            if (highest_end > highest_ack)
                inflight_max = std::max(inflight_max,
                                        static_cast<double>(highest_end - highest_ack));
            ++j;
        } else {
            const PacketRecord& p = packets[i];
            const double t = secs(p.ts_us);
            win_samples.push_back(static_cast<double>(p.window));
            if (p.window == 0 && !p.has(kFlagSyn) && !p.has(kFlagRst)) zero_win += 1;

            if (p.is_data()) {
                const std::uint64_t lo = dir_space.unwrap(p.seq);
                const std::uint64_t hi = lo + p.payload_len;
                if (!any_data) {
                    any_data = true;
                    first_data_rel_start = static_cast<double>(lo);
                    min_data_start = lo;
                } else {
                    min_data_start = std::min(min_data_start, lo);
                }
                const auto key = std::make_pair(lo, hi);
                const int prior_tx = tx_count[key]++;
                const std::uint64_t overlap = interval_insert(covered, lo, hi);
                unique_bytes += static_cast<double>(p.payload_len - overlap);
                if (overlap > 0) {
                    retrans_pkts += 1;
                    retrans_bytes += static_cast<double>(overlap);
                    rexmit_events.push_back({t, {lo, hi}});
                    if (overlap == p.payload_len && prior_tx >= 1) dup_pkts += 1;
                    if (!in_recovery) {
                        in_recovery = true;
                        recovery_point = highest_end;
                        if (opp_dup_run < 3) inferred_timeouts += 1;
                    }
                } else if (lo < highest_end) {
                    ooo_pkts += 1;
                }
                if (t_first_data_ack < 0) {
                    iw_bytes += static_cast<double>(p.payload_len);
                    iw_packets += 1;
                }
                seg_samples.push_back(static_cast<double>(p.payload_len) + 40.0);
                highest_end = std::max(highest_end, hi);
                const double owin =
                    highest_end > highest_ack
                        ? static_cast<double>(highest_end - highest_ack)
                        : 0.0;
                owin_samples.push_back(owin);
                inflight_max = std::max(inflight_max, owin);
                if (last_opp_win >= 0.0 && owin + mss_est > last_opp_win) {
                    const double next_t =
                        i + 1 < packets.size() ? secs(packets[i + 1].ts_us) : t;
                    rwnd_limited_time += next_t - t;
                }
            } else if (p.payload_len <= 1 && p.has(kFlagAck) && !p.has(kFlagSyn) &&
                       !p.has(kFlagFin) && !p.has(kFlagRst) && highest_end > 0 &&
                       dir_space.unwrap(p.seq) + 1 == highest_end) {
                keepalives += 1;
            }

            if (p.has(kFlagAck)) {
                if (p.is_pure_ack() && prev_ack_dir_seen && p.ack == prev_ack_dir) {
                    dup_acks += 1;
                    ++dup_run_dir;
                    if (dup_run_dir == 3) triple_events += 1;
                } else {
                    dup_run_dir = 0;
                }
                prev_ack_dir = p.ack;
                prev_ack_dir_seen = true;
            }

            if (!p.sack_blocks.empty()) {
                double blocks = static_cast<double>(p.sack_blocks.size());
                if (p.options.dsack_flag) {
                    dsack_blocks += 1;
                    blocks -= 1;
                }
                sack_blocks += blocks;
            }
            owin_after_pkt[i] =
                highest_end > highest_ack ? static_cast<double>(highest_end - highest_ack) : 0.0;
            ++i;
        }
    }
    if (opp_zero_open) opp_zero_total += last_opp_ts - opp_zero_start;

    // ---- simple per-packet tallies ----
    double total_bytes = 0, data_pkts = 0, data_bytes = 0, pure_acks = 0, pushed = 0, urgent = 0;
    double syns = 0, fins = 0, rsts = 0;
    double payload_max = 0;
    double payload_min_nz = 0;
    bool any_nz = false;
    for (const auto& p : packets) {
        total_bytes += static_cast<double>(p.payload_len) + 40.0;
        if (p.is_data()) {
            data_pkts += 1;
            data_bytes += static_cast<double>(p.payload_len);
            if (!any_nz || p.payload_len < payload_min_nz) payload_min_nz = p.payload_len;
            any_nz = true;
        }
        payload_max = std::max(payload_max, static_cast<double>(p.payload_len));
        if (p.is_pure_ack()) pure_acks += 1;
        if (p.has(kFlagPsh)) pushed += 1;
        if (p.has(kFlagUrg)) urgent += 1;
        if (p.has(kFlagSyn)) syns += 1;
        if (p.has(kFlagFin)) fins += 1;
        if (p.has(kFlagRst)) rsts += 1;
    }

    const PacketRecord* dir_syn = nullptr;
    for (const auto& p : packets) {
        if (p.has(kFlagSyn)) {
            dir_syn = &p;
            break;
        }
    }
    bool sackok = false;
    for (const auto& p : packets)
        if (p.options.sack_permitted) sackok = true;

    // ---- RTT sampling (Karn's rule) and ACK latency ----
    struct TxSeg {
        double t;
        std::uint64_t lo, hi;
        bool fullsize;
    };
    std::vector<TxSeg> first_tx;  // first transmissions, end-monotone
    {
        std::map<std::uint64_t, std::uint64_t> seen;
        for (const auto& p : packets) {
            if (!p.is_data()) continue;
            const std::uint64_t lo = dir_space.unwrap(p.seq);
            const std::uint64_t hi = lo + p.payload_len;
            const std::uint64_t ov = interval_insert(seen, lo, hi);
            if (ov == 0)
                first_tx.push_back(
                    {secs(p.ts_us), lo, hi, static_cast<double>(p.payload_len) == mss_est});
        }
    }
    std::vector<std::pair<double, std::uint64_t>> opp_acks;  // (t, rel cumulative ack)
    for (const auto& p : opposite) {
        if (!p.has(kFlagAck)) continue;
        const std::uint64_t rel = dir_space.unwrap(p.ack);
        if (rel < (1ull << 31)) opp_acks.push_back({secs(p.ts_us), rel});
    }
    std::vector<double> rtts, rtts_full;
    {
        std::size_t a = 0;
        for (const auto& seg : first_tx) {
            while (a < opp_acks.size() &&
                   (opp_acks[a].second < seg.hi || opp_acks[a].first <= seg.t))
                ++a;
            if (a >= opp_acks.size()) break;
            // Karn: skip segments retransmitted before the covering ack
            bool ambiguous = false;
            for (const auto& [rt, range] : rexmit_events) {
                if (rt > seg.t && rt <= opp_acks[a].first && range.first < seg.hi &&
                    range.second > seg.lo) {
                    ambiguous = true;
                    break;
                }
            }
            if (ambiguous) continue;
            const double sample = opp_acks[a].first - seg.t;
            rtts.push_back(sample);
            if (seg.fullsize) rtts_full.push_back(sample);
        }
    }
    double handshake_rtt = 0;
    if (dir_syn) {
        const std::uint64_t syn_rel_end = dir_space.unwrap(dir_syn->seq) + 1;
        for (const auto& [t, rel] : opp_acks) {
            if (rel >= syn_rel_end && t > secs(dir_syn->ts_us)) {
                handshake_rtt = t - secs(dir_syn->ts_us);
                break;
            }
        }
    }

    // ACK latency: time from an opposite data segment to this direction's
    // first covering cumulative ack.
    std::vector<double> ack_lat;
    {
        std::vector<TxSeg> opp_first_tx;
        std::map<std::uint64_t, std::uint64_t> seen;
        for (const auto& p : opposite) {
            if (!p.is_data()) continue;
            const std::uint64_t lo = opp_space.unwrap(p.seq);
            const std::uint64_t hi = lo + p.payload_len;
            if (interval_insert(seen, lo, hi) == 0)
                opp_first_tx.push_back({secs(p.ts_us), lo, hi, false});
        }
        std::vector<std::pair<double, std::uint64_t>> dir_acks;
        for (const auto& p : packets) {
            if (!p.has(kFlagAck)) continue;
            const std::uint64_t rel = opp_space.unwrap(p.ack);
            if (rel < (1ull << 31)) dir_acks.push_back({secs(p.ts_us), rel});
        }
        std::size_t a = 0;
        for (const auto& seg : opp_first_tx) {
            while (a < dir_acks.size() &&
                   (dir_acks[a].second < seg.hi || dir_acks[a].first <= seg.t))
                ++a;
            if (a >= dir_acks.size()) break;
            ack_lat.push_back(dir_acks[a].first - seg.t);
        }
    }

    // ---- timing ----
    const double t_first = secs(packets.front().ts_us);
    const double t_last = secs(packets.back().ts_us);
    const double elapsed = t_last - t_first;
    double max_idle = 0;
    std::vector<double> gaps;
    for (std::size_t k = 1; k < packets.size(); ++k) {
        const double g = secs(packets[k].ts_us) - secs(packets[k - 1].ts_us);
        gaps.push_back(g);
        max_idle = std::max(max_idle, g);
    }
    double first_data_t = 0, last_data_t = 0;
    bool any_data_t = false;
    for (const auto& p : packets) {
        if (!p.is_data()) continue;
        if (!any_data_t) {
            first_data_t = secs(p.ts_us);
            any_data_t = true;
        }
        last_data_t = secs(p.ts_us);
    }

    const double stall_threshold = std::max(3.0 * handshake_rtt, 0.2);
    double stalls = 0;
    for (std::size_t k = 0; k + 1 < packets.size(); ++k) {
        const double g = secs(packets[k + 1].ts_us) - secs(packets[k].ts_us);
        if (owin_after_pkt[k] > 0 && g > stall_threshold) stalls += 1;
    }

    double missed = 0;
    if (!covered.empty()) {
        double span = static_cast<double>(highest_end - min_data_start);
        double cov = 0;
        for (const auto& [lo, hi] : covered) cov += static_cast<double>(hi - lo);
        missed = std::max(0.0, span - cov);
    }
    double max_rexmit = 0;
    for (const auto& [seg, n] : tx_count) max_rexmit = std::max(max_rexmit, double(n - 1));

    // ---- assemble ----
    out[st::total_packets] = static_cast<double>(packets.size());
    out[st::total_bytes] = total_bytes;
    out[st::unique_bytes] = unique_bytes;
    out[st::data_packets] = data_pkts;
    out[st::data_bytes] = data_bytes;
    out[st::retransmitted_packets] = retrans_pkts;
    out[st::retransmitted_bytes] = retrans_bytes;
    out[st::pure_acks] = pure_acks;
    out[st::pushed_packets] = pushed;
    out[st::urgent_packets] = urgent;
    out[st::syn_count] = syns;
    out[st::fin_count] = fins;
    out[st::rst_count] = rsts;
    out[st::sack_permitted] = sackok ? 1.0 : 0.0;
    out[st::window_scale] = dir_syn && dir_syn->options.wscale ? *dir_syn->options.wscale : 0.0;
    out[st::mss_requested] = dir_syn && dir_syn->options.mss ? *dir_syn->options.mss : 0.0;
    out[st::seg_size_max] = vec_max(seg_samples);
    out[st::seg_size_min] = vec_min(seg_samples);
    out[st::seg_size_mean] = vec_mean(seg_samples);
    out[st::seg_size_stddev] = vec_stddev(seg_samples);
    out[st::payload_max] = payload_max;
    out[st::payload_min_nonzero] = payload_min_nz;
    out[st::win_adv_max] = vec_max(win_samples);
    out[st::win_adv_min] = vec_min(win_samples);
    out[st::win_adv_mean] = vec_mean(win_samples);
    out[st::zero_window_count] = zero_win;
    out[st::owin_max] = vec_max(owin_samples);
    out[st::owin_min] = vec_min(owin_samples);
    out[st::owin_mean] = vec_mean(owin_samples);
    out[st::owin_stddev] = vec_stddev(owin_samples);
    out[st::rtt_min] = vec_min(rtts);
    out[st::rtt_max] = vec_max(rtts);
    out[st::rtt_mean] = vec_mean(rtts);
    out[st::rtt_stddev] = vec_stddev(rtts);
    out[st::rtt_samples] = static_cast<double>(rtts.size());
    out[st::handshake_rtt] = handshake_rtt;
    out[st::rtt_fullsz_min] = vec_min(rtts_full);
    out[st::rtt_fullsz_max] = vec_max(rtts_full);
    out[st::rtt_fullsz_mean] = vec_mean(rtts_full);
    out[st::rtt_fullsz_samples] = static_cast<double>(rtts_full.size());
    out[st::dup_acks] = dup_acks;
    out[st::triple_dupack_events] = triple_events;
    out[st::sack_blocks_sent] = sack_blocks;
    out[st::dsack_blocks_sent] = dsack_blocks;
    out[st::out_of_order_packets] = ooo_pkts;
    out[st::inferred_timeouts] = inferred_timeouts;
    out[st::max_segment_rexmits] = max_rexmit;
    out[st::missed_bytes] = missed;
    out[st::truncated_packets] = 0.0;
    out[st::duplicate_packets] = dup_pkts;
    out[st::elapsed_s] = elapsed;
    out[st::max_idle_s] = max_idle;
    out[st::throughput_bps] = elapsed > 0 ? data_bytes / elapsed : 0.0;
    out[st::goodput_bps] = elapsed > 0 ? unique_bytes / elapsed : 0.0;
    out[st::initial_window_bytes] = iw_bytes;
    out[st::initial_window_packets] = iw_packets;
    out[st::data_xmit_span_s] = any_data_t ? last_data_t - first_data_t : 0.0;
    out[st::ack_latency_mean_s] = vec_mean(ack_lat);
    out[st::interpkt_gap_mean_s] = vec_mean(gaps);
    out[st::interpkt_gap_stddev_s] = vec_stddev(gaps);
    out[st::rwnd_limited_frac] = elapsed > 0 ? std::min(1.0, rwnd_limited_time / elapsed) : 0.0;
    out[st::inflight_max] = inflight_max;
    out[st::sender_stalls] = stalls;
    out[st::zero_window_stall_s] = opp_zero_total;
    out[st::persist_events] = persist_events;
    out[st::keepalive_packets] = keepalives;
    out[st::time_to_first_byte_s] = any_data_t ? first_data_t : 0.0;
    out[st::time_to_last_byte_s] = any_data_t ? last_data_t : 0.0;
    return out;
}

}  // namespace iacd

#endif  // IACD_STATS_HPP
