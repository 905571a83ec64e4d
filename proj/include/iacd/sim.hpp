#ifndef IACD_SIM_HPP
#define IACD_SIM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "iacd/errors.hpp"
#include "iacd/packet.hpp"

// Deterministic discrete-event emulation of one server->client bulk transfer
// over a single bottleneck link, observed at both endpoints. Congestion
// control is a parameterized AIMD family, not a faithful production stack;
// the point is generating fault artifacts at desk scale.

namespace iacd {

struct LinkConfig {
    double bandwidth_bps = 80e6;
    double one_way_delay_ms = 10.0;
    double loss_rate = 0.0;     // per data packet
    double reorder_rate = 0.0;  // per data packet
};

enum class CcProfile { AimdStd, AimdAggressive, AimdConservative };

inline std::string to_string(CcProfile p) {
    switch (p) {
        case CcProfile::AimdStd: return "AIMD_STD";
        case CcProfile::AimdAggressive: return "AIMD_AGGRESSIVE";
        default: return "AIMD_CONSERVATIVE";
    }
}

inline CcProfile cc_profile_from_string(const std::string& s) {
    if (s == "AIMD_STD") return CcProfile::AimdStd;
    if (s == "AIMD_AGGRESSIVE") return CcProfile::AimdAggressive;
    if (s == "AIMD_CONSERVATIVE") return CcProfile::AimdConservative;
    throw Error("unknown cc profile: " + s);
}

struct ClientConfig {
    bool sack_enabled = true;
    bool dsack_enabled = true;
    std::uint64_t read_buffer = 1 << 20;
    std::uint64_t write_buffer = 1 << 20;  // applied at the sending side
    CcProfile cc_profile = CcProfile::AimdStd;
};

// Ground-truth counters; the oracle for signature tests, never fed to
// classifiers.
struct EventLog {
    std::uint64_t data_transmissions = 0;
    std::uint64_t retransmissions = 0;
    std::uint64_t losses_injected = 0;
    std::uint64_t reorders_injected = 0;
    std::uint64_t timeouts = 0;
    std::uint64_t fast_retransmits = 0;
    std::uint64_t dsacks_sent = 0;
    std::uint64_t zero_window_adverts = 0;
    std::uint64_t bytes_delivered = 0;
    std::uint64_t client_sent = 0;
    std::uint64_t client_received = 0;
    std::uint64_t server_sent = 0;
    std::uint64_t server_received = 0;
};

struct SimResult {
    TraceFile client_trace;
    TraceFile server_trace;
    EventLog log;
};

namespace simdetail {

constexpr std::uint32_t kMss = 1460;
constexpr double kHostBps = 1e9;  // endpoint NIC rate
constexpr double kAppReadQuantum = 1e-3;
constexpr double kReorderExtraDelay = 8e-3;
constexpr double kMinRto = 0.2;
constexpr double kMaxRto = 10.0;
constexpr double kMaxVirtualTime = 600.0;
constexpr std::uint64_t kMaxEvents = 20'000'000;

struct CcParams {
    double init_window_mss;
    double ca_increment;
    double md_factor;
};

inline CcParams cc_params(CcProfile p) {
    switch (p) {
        case CcProfile::AimdStd: return {10.0, 1.0, 0.5};
        case CcProfile::AimdAggressive: return {16.0, 2.0, 0.7};
        default: return {4.0, 0.5, 0.5};
    }
}

enum class EvKind { ArriveClient, ArriveServer, AppRead, Rto };

struct Event {
    double t = 0;
    std::uint64_t id = 0;
    EvKind kind = EvKind::AppRead;
    PacketRecord pkt;
    std::uint64_t gen = 0;
};

struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
        if (a.t != b.t) return a.t > b.t;
        return a.id > b.id;
    }
};

struct Segment {
    std::uint64_t lo = 0, hi = 0;
    int tx = 0;
    bool acked = false;
    bool sacked = false;
    bool lost_pending = false;  // excluded from pipe until retransmitted
    bool episode_rexmitted = false;
    double last_tx_time = 0;
};

}  // namespace simdetail

class Simulation {
public:
    Simulation(const LinkConfig& link, const ClientConfig& client, std::uint64_t transfer_size,
               std::uint64_t seed)
        : link_(link), client_(client), transfer_(transfer_size), rng_(seed) {
        if (link.bandwidth_bps <= 0) throw InfeasibleScenario("bandwidth must be positive");
        if (link.loss_rate < 0 || link.loss_rate >= 1)
            throw InfeasibleScenario("loss_rate must be in [0,1)");
        if (link.reorder_rate < 0 || link.reorder_rate >= 1)
            throw InfeasibleScenario("reorder_rate must be in [0,1)");
        if (link.one_way_delay_ms < 0) throw InfeasibleScenario("delay must be >= 0");
        if (transfer_size == 0) throw InfeasibleScenario("transfer_size must be >= 1 byte");
        if (client.read_buffer < simdetail::kMss)
            throw InfeasibleScenario("read buffer below one MSS cannot make progress");
        if (client.write_buffer < simdetail::kMss)
            throw InfeasibleScenario("write buffer below one MSS cannot make progress");
        client_port_ = static_cast<std::uint16_t>(49152 + (seed % 16384));
        isn_c_ = 1000 + static_cast<std::uint32_t>(seed % 8999);
        isn_s_ = 2'000'000 + static_cast<std::uint32_t>((seed / 7) % 8999);
        ws_client_ = client.read_buffer > 65535 ? 5 : 0;
        cwnd_ = simdetail::cc_params(client.cc_profile).init_window_mss * simdetail::kMss;
        ssthresh_ = 1e18;
    }

    SimResult run() {
        using namespace simdetail;
        PacketRecord syn = client_packet_shell();
        syn.seq = isn_c_;
        syn.flags = kFlagSyn;
        syn.window = std::min<std::uint64_t>(client_.read_buffer, 65535);
        syn.options.mss = kMss;
        if (ws_client_ > 0) syn.options.wscale = ws_client_;
        syn.options.sack_permitted = client_.sack_enabled;
        last_advertised_ = syn.window;
        send_from_client(0.0, syn);
        schedule(kAppReadQuantum, EvKind::AppRead);

        std::uint64_t processed = 0;
        while (!queue_.empty()) {
            const Event ev = queue_.top();
            queue_.pop();
            if (ev.t > kMaxVirtualTime || ++processed > kMaxEvents)
                throw SimOverrun("simulation exceeded its event or time budget");
            switch (ev.kind) {
                case EvKind::ArriveClient: on_client_arrival(ev.t, ev.pkt); break;
                case EvKind::ArriveServer: on_server_arrival(ev.t, ev.pkt); break;
                case EvKind::AppRead: on_app_read(ev.t); break;
                case EvKind::Rto: on_rto(ev.t, ev.gen); break;
            }
        }
        if (!(fin_done_ && log_.bytes_delivered == transfer_))
            throw SimOverrun("transfer did not complete");

        // sends are stamped at NIC-serialization completion, so they can be
        // recorded ahead of an arrival that happens in between
        auto by_ts = [](const PacketRecord& a, const PacketRecord& b) {
            return a.ts_us < b.ts_us;
        };
        std::stable_sort(client_pkts_.begin(), client_pkts_.end(), by_ts);
        std::stable_sort(server_pkts_.begin(), server_pkts_.end(), by_ts);

        SimResult res;
        res.log = log_;
        res.client_trace.capture_point = CapturePoint::Client;
        res.client_trace.packets = std::move(client_pkts_);
        res.client_trace.connection_key = key();
        res.server_trace.capture_point = CapturePoint::Server;
        res.server_trace.packets = std::move(server_pkts_);
        res.server_trace.connection_key = key();
        validate_trace(res.client_trace);
        validate_trace(res.server_trace);
        return res;
    }

private:
    static constexpr std::uint32_t kClientAddr = 0x0a000002;  // 10.0.0.2
    static constexpr std::uint32_t kServerAddr = 0x0a000001;  // 10.0.0.1
    static constexpr std::uint16_t kServerPort = 80;

    enum class Mode { Open, FastRec, GbnRec, RtoRec };

    ConnectionKey key() const { return {kClientAddr, client_port_, kServerAddr, kServerPort}; }

    PacketRecord client_packet_shell() const {
        PacketRecord p;
        p.src_addr = kClientAddr;
        p.src_port = client_port_;
        p.dst_addr = kServerAddr;
        p.dst_port = kServerPort;
        return p;
    }

    PacketRecord server_packet_shell() const {
        PacketRecord p;
        p.src_addr = kServerAddr;
        p.src_port = kServerPort;
        p.dst_addr = kClientAddr;
        p.dst_port = client_port_;
        return p;
    }

    static std::uint64_t to_us(double t) {
        return static_cast<std::uint64_t>(std::llround(t * 1e6));
    }

    void schedule(double t, simdetail::EvKind kind, PacketRecord pkt = {},
                  std::uint64_t gen = 0) {
        simdetail::Event ev;
        ev.t = t;
        ev.id = next_event_id_++;
        ev.kind = kind;
        ev.pkt = std::move(pkt);
        ev.gen = gen;
        queue_.push(std::move(ev));
    }

    // ---- wire model: host NIC serialization, then the bottleneck FIFO ----
    double wire_bits(const PacketRecord& p) const {
        return (static_cast<double>(p.payload_len) + 40.0) * 8.0;
    }

    void send_from_client(double now, PacketRecord p) {
        const double host_done =
            std::max(now, client_host_busy_) + wire_bits(p) / simdetail::kHostBps;
        client_host_busy_ = host_done;
        p.ts_us = to_us(host_done);
        client_pkts_.push_back(p);
        ++log_.client_sent;
        const double depart = std::max(host_done, c2s_busy_);
        c2s_busy_ = depart + wire_bits(p) / link_.bandwidth_bps;
        schedule(c2s_busy_ + link_.one_way_delay_ms * 1e-3, simdetail::EvKind::ArriveServer,
                 std::move(p));
    }

    void send_from_server(double now, PacketRecord p) {
        const double host_done =
            std::max(now, server_host_busy_) + wire_bits(p) / simdetail::kHostBps;
        server_host_busy_ = host_done;
        p.ts_us = to_us(host_done);
        server_pkts_.push_back(p);
        ++log_.server_sent;
        double extra = 0.0;
        if (p.is_data()) {
            ++log_.data_transmissions;
            if (std::uniform_real_distribution<double>(0, 1)(rng_) < link_.loss_rate) {
                ++log_.losses_injected;
                return;  // dropped on the link
            }
            if (link_.reorder_rate > 0 &&
                std::uniform_real_distribution<double>(0, 1)(rng_) < link_.reorder_rate) {
                ++log_.reorders_injected;
                extra = simdetail::kReorderExtraDelay;
            }
        }
        const double depart = std::max(host_done, s2c_busy_);
        s2c_busy_ = depart + wire_bits(p) / link_.bandwidth_bps;
        schedule(s2c_busy_ + link_.one_way_delay_ms * 1e-3 + extra,
                 simdetail::EvKind::ArriveClient, std::move(p));
    }

    // data byte k <-> seq isn_s + 1 + k
    std::uint32_t abs_server_seq(std::uint64_t rel) const {
        return static_cast<std::uint32_t>(isn_s_ + 1 + rel);
    }
    std::uint64_t rel_server_ack(std::uint32_t abs) const {
        return static_cast<std::uint64_t>(static_cast<std::uint32_t>(abs - (isn_s_ + 1)));
    }

    // ================= server (sender) =================

    void server_build_segments() {
        std::uint64_t off = 0;
        while (off < transfer_) {
            simdetail::Segment s;
            s.lo = off;
            s.hi = std::min<std::uint64_t>(off + simdetail::kMss, transfer_);
            segments_.push_back(s);
            off = s.hi;
        }
    }

    std::uint64_t una_bytes() const {
        return snd_una_seg_ < segments_.size() ? segments_[snd_una_seg_].lo : transfer_;
    }

    double pipe_bytes() const {
        double pipe = 0;
        for (std::size_t i = snd_una_seg_; i < snd_nxt_seg_; ++i) {
            const auto& s = segments_[i];
            if (s.tx > 0 && !s.acked && !s.sacked && !s.lost_pending)
                pipe += static_cast<double>(s.hi - s.lo);
        }
        return pipe;
    }

    std::uint64_t server_adv_window() const { return std::uint64_t{1} << 20; }

    void transmit_segment(double now, std::size_t idx) {
        auto& s = segments_[idx];
        PacketRecord p = server_packet_shell();
        p.seq = abs_server_seq(s.lo);
        p.ack = client_fin_seen_ ? isn_c_ + 2 : isn_c_ + 1;
        p.flags = kFlagAck;
        if (s.hi == transfer_) p.flags |= kFlagPsh;
        p.payload_len = static_cast<std::uint32_t>(s.hi - s.lo);
        p.window = server_adv_window();
        if (s.tx > 0) ++log_.retransmissions;
        ++s.tx;
        s.lost_pending = false;
        s.last_tx_time = now;
        send_from_server(now, p);
        if (!rto_armed_) arm_rto(now);
    }

    void try_send(double now) {
        if (!handshake_done_) return;
        while (true) {
            const std::uint64_t seq_limit =
                una_bytes() + std::min(peer_rwnd_, client_.write_buffer);
            std::size_t candidate = segments_.size();
            bool is_rexmit = false;
            if (mode_ != Mode::Open) {
                while (rexmit_cursor_ < snd_nxt_seg_ &&
                       segments_[rexmit_cursor_].lo < recovery_point_ &&
                       !(segments_[rexmit_cursor_].lost_pending &&
                         !segments_[rexmit_cursor_].acked && !segments_[rexmit_cursor_].sacked))
                    ++rexmit_cursor_;
                if (rexmit_cursor_ < snd_nxt_seg_ &&
                    segments_[rexmit_cursor_].lo < recovery_point_) {
                    candidate = rexmit_cursor_;
                    is_rexmit = true;
                }
            }
            if (!is_rexmit) {
                if (snd_nxt_seg_ >= segments_.size()) break;
                candidate = snd_nxt_seg_;
            }
            const auto& s = segments_[candidate];
            const double len = static_cast<double>(s.hi - s.lo);
            if (pipe_bytes() + len > cwnd_) break;
            if (s.hi > seq_limit) break;
            transmit_segment(now, candidate);
            segments_[candidate].episode_rexmitted = is_rexmit;
            if (is_rexmit)
                ++rexmit_cursor_;
            else
                ++snd_nxt_seg_;
        }
        maybe_send_fin(now);
    }

    void maybe_send_fin(double now) {
        if (fin_sent_ || !handshake_done_ || una_bytes() < transfer_) return;
        PacketRecord p = server_packet_shell();
        p.seq = abs_server_seq(transfer_);
        p.ack = client_fin_seen_ ? isn_c_ + 2 : isn_c_ + 1;
        p.flags = kFlagFin | kFlagAck;
        p.window = server_adv_window();
        fin_sent_ = true;
        send_from_server(now, p);
    }

    void arm_rto(double now) {
        rto_armed_ = true;
        ++rto_gen_;
        const double rto = std::min(60.0, rto_value_ * rto_backoff_);
        schedule(now + rto, simdetail::EvKind::Rto, {}, rto_gen_);
    }

    void disarm_rto() { rto_armed_ = false; }

    void update_rtt(double sample) {
        if (!srtt_valid_) {
            srtt_ = sample;
            rttvar_ = sample / 2;
            srtt_valid_ = true;
        } else {
            rttvar_ = 0.75 * rttvar_ + 0.25 * std::abs(srtt_ - sample);
            srtt_ = 0.875 * srtt_ + 0.125 * sample;
        }
        rto_value_ = std::clamp(srtt_ + std::max(0.01, 4 * rttvar_), simdetail::kMinRto,
                                simdetail::kMaxRto);
    }

    void enter_loss_recovery(bool via_timeout) {
        const auto cc = simdetail::cc_params(client_.cc_profile);
        if (via_timeout) {
            ssthresh_ = std::max(2.0 * simdetail::kMss, cwnd_ * 0.5);
            cwnd_ = 1.0 * simdetail::kMss;
            mode_ = Mode::RtoRec;
            undo_armed_ = false;
        } else {
            undo_cwnd_ = cwnd_;
            undo_ssthresh_ = ssthresh_;
            undo_armed_ = true;
            ssthresh_ = std::max(2.0 * simdetail::kMss, cwnd_ * cc.md_factor);
            cwnd_ = ssthresh_;
            mode_ = sack_negotiated_ ? Mode::FastRec : Mode::GbnRec;
        }
        recovery_point_ =
            snd_nxt_seg_ < segments_.size() ? segments_[snd_nxt_seg_].lo : transfer_;
        rexmit_cursor_ = snd_una_seg_;
        highest_sacked_ = 0;
        for (std::size_t i = snd_una_seg_; i < snd_nxt_seg_; ++i)
            if (segments_[i].sacked && !segments_[i].acked)
                highest_sacked_ = std::max(highest_sacked_, segments_[i].hi);
        for (std::size_t i = snd_una_seg_; i < snd_nxt_seg_; ++i) {
            auto& s = segments_[i];
            s.episode_rexmitted = false;
            if (s.tx > 0 && !s.acked && !s.sacked) {
                if (via_timeout || !sack_negotiated_ || s.hi <= highest_sacked_)
                    s.lost_pending = true;
            }
        }
    }

    void on_server_arrival(double t, const PacketRecord& p) {
        ++log_.server_received;
        server_pkts_.push_back(with_ts(p, t));
        if (p.has(kFlagSyn)) {
            sack_negotiated_ = p.options.sack_permitted;
            server_build_segments();
            PacketRecord sa = server_packet_shell();
            sa.seq = isn_s_;
            sa.ack = isn_c_ + 1;
            sa.flags = kFlagSyn | kFlagAck;
            sa.window = 65535;
            sa.options.mss = simdetail::kMss;
            sa.options.wscale = 5;
            sa.options.sack_permitted = true;
            synack_time_ = t;
            send_from_server(t, sa);
            return;
        }
        if (!p.has(kFlagAck)) return;
        if (!handshake_done_ && p.ack == isn_s_ + 1) {
            handshake_done_ = true;
            update_rtt(t - synack_time_);
        }
        const bool window_changed = p.window != peer_rwnd_;
        peer_rwnd_ = p.window;

        // a D-SACK proves the fast retransmit was spurious: undo the
        // window reduction (the receiver can only report it when the
        // duplicate-SACK option is enabled)
        if (p.options.dsack_flag && undo_armed_) {
            cwnd_ = std::max(cwnd_, undo_cwnd_);
            ssthresh_ = std::max(ssthresh_, undo_ssthresh_);
            undo_armed_ = false;
        }

        const std::uint64_t rel = rel_server_ack(p.ack);
        if (rel <= transfer_ + 1) {
            for (const auto& b : p.sack_blocks) {
                const std::uint64_t blo = rel_server_ack(b.left);
                const std::uint64_t bhi = rel_server_ack(b.right);
                if (blo >= bhi || bhi > transfer_) continue;
                for (std::size_t i = snd_una_seg_; i < snd_nxt_seg_; ++i) {
                    auto& s = segments_[i];
                    if (!s.acked && !s.sacked && s.lo >= blo && s.hi <= bhi) {
                        s.sacked = true;
                        s.lost_pending = false;
                        highest_sacked_ = std::max(highest_sacked_, s.hi);
                    }
                }
            }
            if (mode_ == Mode::FastRec) {
                bool marked = false;
                for (std::size_t i = snd_una_seg_; i < snd_nxt_seg_; ++i) {
                    auto& s = segments_[i];
                    if (s.tx > 0 && !s.acked && !s.sacked && !s.episode_rexmitted &&
                        !s.lost_pending && s.hi <= highest_sacked_) {
                        s.lost_pending = true;
                        marked = true;
                    }
                }
                if (marked) rexmit_cursor_ = snd_una_seg_;
            }

            const std::uint64_t una = una_bytes();
            if (rel > una) {
                double acked_bytes = 0;
                std::size_t last_acked = segments_.size();
                while (snd_una_seg_ < segments_.size() && segments_[snd_una_seg_].hi <= rel) {
                    auto& s = segments_[snd_una_seg_];
                    s.acked = true;
                    s.lost_pending = false;
                    acked_bytes += static_cast<double>(s.hi - s.lo);
                    last_acked = snd_una_seg_;
                    ++snd_una_seg_;
                }
                dupacks_ = 0;
                rto_backoff_ = 1.0;
                if (last_acked < segments_.size() && segments_[last_acked].tx == 1)
                    update_rtt(t - segments_[last_acked].last_tx_time);
                const auto cc = simdetail::cc_params(client_.cc_profile);
                if (mode_ == Mode::Open || mode_ == Mode::RtoRec) {
                    if (cwnd_ < ssthresh_)
                        cwnd_ += std::min(acked_bytes, double(simdetail::kMss));
                    else
                        cwnd_ += cc.ca_increment * simdetail::kMss * (simdetail::kMss / cwnd_) *
                                 std::max(1.0, acked_bytes / simdetail::kMss);
                }
                if (mode_ != Mode::Open && rel >= recovery_point_) {
                    if (mode_ == Mode::FastRec || mode_ == Mode::GbnRec) cwnd_ = ssthresh_;
                    mode_ = Mode::Open;
                }
                if (snd_una_seg_ >= segments_.size())
                    disarm_rto();
                else
                    arm_rto(t);
            } else if (rel == una && p.is_pure_ack() && !window_changed && una < transfer_ &&
                       snd_nxt_seg_ > snd_una_seg_) {
                ++dupacks_;
                if (dupacks_ == 3 && mode_ == Mode::Open) {
                    ++log_.fast_retransmits;
                    enter_loss_recovery(false);
                    // the first hole goes out immediately, bypassing the pipe gate
                    for (std::size_t i = snd_una_seg_; i < snd_nxt_seg_; ++i) {
                        auto& s = segments_[i];
                        if (s.lost_pending && !s.acked && !s.sacked) {
                            transmit_segment(t, i);
                            s.episode_rexmitted = true;
                            break;
                        }
                    }
                }
            }
        }
        if (p.has(kFlagFin)) {
            client_fin_seen_ = true;
            if (!client_fin_acked_) {
                client_fin_acked_ = true;
                PacketRecord ack = server_packet_shell();
                ack.seq = abs_server_seq(transfer_ + 1);
                ack.ack = isn_c_ + 2;
                ack.flags = kFlagAck;
                ack.window = server_adv_window();
                send_from_server(t, ack);
                fin_done_ = true;
            }
        }
        try_send(t);
    }

    void on_rto(double t, std::uint64_t gen) {
        if (!rto_armed_ || gen != rto_gen_) return;
        if (snd_una_seg_ >= segments_.size()) {
            disarm_rto();
            return;
        }
        ++log_.timeouts;
        rto_backoff_ = std::min(rto_backoff_ * 2.0, 64.0);
        enter_loss_recovery(true);
        arm_rto(t);
        try_send(t);
    }

    // ================= client (receiver) =================

    // Out-of-order bytes are held inside the sender-limited window, so only
    // unread in-order data is charged against the advertisement.
    std::uint64_t client_adv_window() const {
        const std::uint64_t free_bytes =
            client_.read_buffer > unread_bytes_ ? client_.read_buffer - unread_bytes_ : 0;
        return (free_bytes >> ws_client_) << ws_client_;
    }

    void send_client_ack(double now, bool dsack, SackBlock dsack_block = {}) {
        PacketRecord a = client_packet_shell();
        a.seq = client_fin_sent_ ? isn_c_ + 2 : isn_c_ + 1;
        a.ack = abs_server_seq(rcv_nxt_ +
                               (server_fin_rcvd_ && rcv_nxt_ == transfer_ ? 1 : 0));
        a.flags = kFlagAck;
        a.window = client_adv_window();
        if (a.window == 0) ++log_.zero_window_adverts;
        if (sack_negotiated_) {
            if (dsack && client_.dsack_enabled) {
                a.sack_blocks.push_back(dsack_block);
                a.options.dsack_flag = true;
                ++log_.dsacks_sent;
            }
            std::size_t listed = a.sack_blocks.size();
            if (recent_ooo_block_.left < recent_ooo_block_.right && listed < 3) {
                a.sack_blocks.push_back(recent_ooo_block_);
                ++listed;
            }
            for (const auto& [lo, hi] : ooo_) {
                if (listed >= 3) break;
                SackBlock b{abs_server_seq(lo), abs_server_seq(hi)};
                if (b == recent_ooo_block_) continue;
                a.sack_blocks.push_back(b);
                ++listed;
            }
        }
        last_advertised_ = a.window;
        send_from_client(now, a);
    }

    void on_client_arrival(double t, const PacketRecord& p) {
        ++log_.client_received;
        client_pkts_.push_back(with_ts(p, t));
        if (p.has(kFlagSyn) && p.has(kFlagAck)) {
            PacketRecord a = client_packet_shell();
            a.seq = isn_c_ + 1;
            a.ack = isn_s_ + 1;
            a.flags = kFlagAck;
            a.window = client_adv_window();
            last_advertised_ = a.window;
            send_from_client(t, a);
            return;
        }
        if (p.is_data()) {
            const std::uint64_t lo = rel_server_ack(p.seq);
            const std::uint64_t hi = lo + p.payload_len;
            std::uint64_t new_bytes = 0;
            if (hi > rcv_nxt_) {
                const std::uint64_t eff_lo = std::max(lo, rcv_nxt_);
                new_bytes = hi - eff_lo;
                for (const auto& [olo, ohi] : ooo_) {
                    const std::uint64_t a = std::max(eff_lo, olo);
                    const std::uint64_t b = std::min(hi, ohi);
                    if (a < b) new_bytes -= b - a;
                }
            }
            if (new_bytes == 0) {
                // full duplicate: report via D-SACK when the option is on
                SackBlock d{p.seq, static_cast<std::uint32_t>(p.seq + p.payload_len)};
                send_client_ack(t, true, d);
            } else if (lo <= rcv_nxt_) {
                rcv_nxt_ = std::max(rcv_nxt_, hi);
                auto it = ooo_.begin();
                while (it != ooo_.end() && it->first <= rcv_nxt_) {
                    rcv_nxt_ = std::max(rcv_nxt_, it->second);
                    ooo_bytes_ -= it->second - it->first;
                    it = ooo_.erase(it);
                }
                const std::uint64_t advanced = rcv_nxt_ - delivered_mark_;
                unread_bytes_ += advanced;
                log_.bytes_delivered += advanced;
                delivered_mark_ = rcv_nxt_;
                recent_ooo_block_ = {};
                send_client_ack(t, false);
            } else {
                const std::uint64_t eff_lo = std::max(lo, rcv_nxt_);
                ooo_insert(eff_lo, hi);
                auto it = ooo_.upper_bound(eff_lo);
                if (it != ooo_.begin()) --it;
                recent_ooo_block_ = {abs_server_seq(it->first), abs_server_seq(it->second)};
                send_client_ack(t, false);
            }
            return;
        }
        if (p.has(kFlagFin)) {
            server_fin_rcvd_ = true;
            send_client_ack(t, false);
            if (!client_fin_sent_) {
                client_fin_sent_ = true;
                PacketRecord f = client_packet_shell();
                f.seq = isn_c_ + 1;
                f.ack = abs_server_seq(transfer_ + 1);
                f.flags = kFlagFin | kFlagAck;
                f.window = client_adv_window();
                send_from_client(t, f);
            }
        }
    }

    void ooo_insert(std::uint64_t lo, std::uint64_t hi) {
        std::uint64_t add = hi - lo;
        auto it = ooo_.lower_bound(lo);
        if (it != ooo_.begin()) {
            auto prev = std::prev(it);
            if (prev->second >= lo) it = prev;
        }
        std::uint64_t nlo = lo, nhi = hi;
        while (it != ooo_.end() && it->first <= hi) {
            const std::uint64_t a = std::max(lo, it->first);
            const std::uint64_t b = std::min(hi, it->second);
            if (a < b) add -= b - a;
            nlo = std::min(nlo, it->first);
            nhi = std::max(nhi, it->second);
            it = ooo_.erase(it);
        }
        ooo_.emplace(nlo, nhi);
        ooo_bytes_ += add;
    }

    void on_app_read(double t) {
        const std::uint64_t before = last_advertised_;
        const std::uint64_t quantum_bytes = static_cast<std::uint64_t>(
            link_.bandwidth_bps / 8.0 * simdetail::kAppReadQuantum);
        const std::uint64_t take = std::min(
            unread_bytes_, std::max<std::uint64_t>(quantum_bytes, simdetail::kMss));
        unread_bytes_ -= take;
        // wake the sender when the window re-opens across one MSS
        if (take > 0 && before < simdetail::kMss && client_adv_window() >= simdetail::kMss)
            send_client_ack(t, false);
        const bool done = fin_done_ && unread_bytes_ == 0 && ooo_.empty();
        if (!done) schedule(t + simdetail::kAppReadQuantum, simdetail::EvKind::AppRead);
    }

    static PacketRecord with_ts(PacketRecord p, double t) {
        p.ts_us = to_us(t);
        return p;
    }

    // ---- configuration ----
    LinkConfig link_;
    ClientConfig client_;
    std::uint64_t transfer_;
    std::mt19937_64 rng_;
    std::uint16_t client_port_ = 0;
    std::uint32_t isn_c_ = 0, isn_s_ = 0;
    std::uint8_t ws_client_ = 0;

    // ---- event machinery ----
    std::priority_queue<simdetail::Event, std::vector<simdetail::Event>, simdetail::EventAfter>
        queue_;
    std::uint64_t next_event_id_ = 0;
    double client_host_busy_ = 0, server_host_busy_ = 0;
    double c2s_busy_ = 0, s2c_busy_ = 0;

    // ---- server state ----
    Mode mode_ = Mode::Open;
    std::vector<simdetail::Segment> segments_;
    std::size_t snd_una_seg_ = 0, snd_nxt_seg_ = 0, rexmit_cursor_ = 0;
    double cwnd_ = 0, ssthresh_ = 0;
    int dupacks_ = 0;
    std::uint64_t recovery_point_ = 0;
    std::uint64_t highest_sacked_ = 0;
    std::uint64_t peer_rwnd_ = 65535;
    bool sack_negotiated_ = false;
    bool handshake_done_ = false;
    double synack_time_ = 0;
    bool fin_sent_ = false, fin_done_ = false;
    bool client_fin_seen_ = false, client_fin_acked_ = false;
    bool srtt_valid_ = false;
    double srtt_ = 0, rttvar_ = 0, rto_value_ = 1.0, rto_backoff_ = 1.0;
    bool rto_armed_ = false;
    std::uint64_t rto_gen_ = 0;
    double undo_cwnd_ = 0, undo_ssthresh_ = 0;
    bool undo_armed_ = false;

    // ---- client state ----
    std::uint64_t rcv_nxt_ = 0, delivered_mark_ = 0;
    std::map<std::uint64_t, std::uint64_t> ooo_;
    std::uint64_t ooo_bytes_ = 0, unread_bytes_ = 0;
    std::uint64_t last_advertised_ = 65535;
    SackBlock recent_ooo_block_{};
    bool server_fin_rcvd_ = false, client_fin_sent_ = false;

    // ---- traces ----
    std::vector<PacketRecord> client_pkts_, server_pkts_;
    EventLog log_;
};

inline SimResult simulate_connection(const LinkConfig& link, const ClientConfig& client,
                                     std::uint64_t transfer_size, std::uint64_t seed) {
    return Simulation(link, client, transfer_size, seed).run();
}

}  // namespace iacd

#endif  // IACD_SIM_HPP
