// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The bfa-extract Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

#include "bfa/capture_io.hpp"
#include "bfa/givens.hpp"

namespace bfa {

struct StreamKey {
    MacAddress source;
    Standard standard = Standard::HE;
    int bandwidth_mhz = 0;

    friend auto operator<=>(const StreamKey&, const StreamKey&) = default;
};

// Everything besides the StreamKey that fixes the tensor shape.
struct ShapeKey {
    int n_rows = 0;
    int n_cols = 0;
    int grouping_ng = 0;
    Feedback feedback = Feedback::SU;
    int codebook = 0;

    friend auto operator<=>(const ShapeKey&, const ShapeKey&) = default;
};

inline StreamKey stream_key(const BfaFrame& f) { return {f.source(), f.standard, f.mimo.bandwidth_mhz}; }

inline ShapeKey shape_key(const BfaFrame& f)
{
    return {f.mimo.nr, f.mimo.nc, f.mimo.grouping_ng, f.config().feedback, f.mimo.codebook};
}

/// Counts of records that did not land in a stream, by reason.
struct SkipReport {
    std::map<std::string, std::size_t> counts;

    void add(std::string_view reason, std::size_t n = 1) { counts[std::string(reason)] += n; }
    std::size_t total() const
    {
        return std::accumulate(counts.begin(), counts.end(), std::size_t{0},
                               [](std::size_t acc, const auto& kv) { return acc + kv.second; });
    }
    std::size_t count(std::string_view reason) const
    {
        auto it = counts.find(std::string(reason));
        return it == counts.end() ? 0 : it->second;
    }

    // One "reason count" line per entry, sorted by reason.
    std::string to_text() const
    {
        std::ostringstream out;
        for (const auto& [reason, n] : counts) out << reason << ' ' << n << '\n';
        return out.str();
    }
};

struct Stream {
    StreamKey key;
    ShapeKey shape;
    int subcarriers = 0;
    int angles_per_subcarrier = 0;
    std::vector<BfaFrame> frames; // arrival order

    MimoConfig config() const
    {
        return {key.standard, key.bandwidth_mhz, shape.n_rows, shape.n_cols, shape.feedback, shape.grouping_ng};
    }
    QuantBits bits() const { return quant_bits(shape.feedback, shape.codebook); }
    Timestamp first_seen() const
    {
        Timestamp t = frames.front().timestamp;
        for (const auto& f : frames) t = std::min(t, f.timestamp);
        return t;
    }
};

using StreamFilter = std::function<bool(const StreamKey&)>;

/// Frames grouped by (source MAC, standard, bandwidth), split further when
/// a station changes its report shape.
class CaptureSession {
public:
    explicit CaptureSession(const SubcarrierTable& table, StreamFilter filter = {})
        : table_(table), filter_(std::move(filter))
    {
    }

    // Returns true when the record was assigned to a stream.
    bool add(const CaptureRecord& rec)
    {
        ++total_;
        BfaFrame frame;
        try {
            frame = parse_frame(rec.bytes, table_, rec.timestamp);
        } catch (const Error& e) {
            skipped_.add(to_string(e.kind()));
            return false;
        }
        return add(std::move(frame));
    }

    bool add(BfaFrame frame)
    {
        if (filter_ && !filter_(stream_key(frame))) {
            skipped_.add("Filtered");
            return false;
        }
        const auto full_key = std::make_pair(stream_key(frame), shape_key(frame));
        auto [it, inserted] = index_.try_emplace(full_key, streams_.size());
        if (inserted) {
            Stream s;
            s.key = full_key.first;
            s.shape = full_key.second;
            s.subcarriers = frame.subcarriers;
            s.angles_per_subcarrier = frame.angles_per_subcarrier;
            streams_.push_back(std::move(s));
        }
        streams_[it->second].frames.push_back(std::move(frame));
        ++assigned_;
        return true;
    }

    /// Streams ordered by first-seen timestamp, ties by arrival.
    std::vector<const Stream*> streams() const
    {
        std::vector<const Stream*> out;
        for (const auto& s : streams_) out.push_back(&s);
        std::stable_sort(out.begin(), out.end(),
                         [](const Stream* a, const Stream* b) { return a->first_seen() < b->first_seen(); });
        return out;
    }

    std::vector<Stream>& mutable_streams() noexcept { return streams_; }
    std::size_t stream_count() const noexcept { return streams_.size(); }
    const SkipReport& skipped() const noexcept { return skipped_; }
    std::size_t total_records() const noexcept { return total_; }
    std::size_t assigned_frames() const noexcept { return assigned_; }
    const SubcarrierTable& table() const noexcept { return table_; }

private:
    SubcarrierTable table_;
    StreamFilter filter_;
    std::vector<Stream> streams_;
    std::map<std::pair<StreamKey, ShapeKey>, std::size_t> index_;
    SkipReport skipped_;
    std::size_t total_ = 0;
    std::size_t assigned_ = 0;
};

inline CaptureSession group_frames(std::span<const CaptureRecord> records, const SubcarrierTable& table,
                                   StreamFilter filter = {})
{
    CaptureSession session(table, std::move(filter));
    for (const auto& rec : records) session.add(rec);
    return session;
}

/// Row-major P x K x A radians.
struct AngleTensor {
    int frames = 0, subcarriers = 0, angles = 0;
    std::vector<double> data;

    double at(int p, int k, int a) const
    {
        return data[(static_cast<std::size_t>(p) * subcarriers + static_cast<std::size_t>(k)) * angles +
                    static_cast<std::size_t>(a)];
    }
};

/// Row-major P x K x M x N_SS.
struct VTildeTensor {
    int frames = 0, subcarriers = 0, rows = 0, cols = 0;
    std::vector<cdouble> data;

    cdouble at(int p, int k, int m, int n) const
    {
        return data[((static_cast<std::size_t>(p) * subcarriers + static_cast<std::size_t>(k)) * rows +
                     static_cast<std::size_t>(m)) *
                        cols +
                    static_cast<std::size_t>(n)];
    }
};

struct StreamTensors {
    StreamKey key;
    ShapeKey shape;
    QuantBits bits;
    AngleTensor angles;
    VTildeTensor vtilde;
    std::vector<Timestamp> timestamps;
    std::vector<std::vector<std::int8_t>> snr; // per frame, raw
    SkipReport dropped;

    MimoConfig config() const
    {
        return {key.standard, key.bandwidth_mhz, shape.n_rows, shape.n_cols, shape.feedback, shape.grouping_ng};
    }
};

namespace detail {

// Runs fn(i) for i in [0, n) on up to hardware_concurrency threads.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn)
{
    const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 16);
    if (n < 2 || workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t begin = 0; begin < n; begin += chunk) {
        const std::size_t end = std::min(n, begin + chunk);
        pool.emplace_back([&fn, begin, end] {
            for (std::size_t i = begin; i < end; ++i) fn(i);
        });
    }
}

} // namespace detail

inline StreamTensors assemble_stream(const Stream& stream)
{
    StreamTensors out;
    out.key = stream.key;
    out.shape = stream.shape;
    out.bits = stream.bits();
    const int K = stream.subcarriers, A = stream.angles_per_subcarrier;
    const int M = stream.shape.n_rows, N = stream.shape.n_cols;
    const AngleOrder order = angle_order(M, N);

    std::vector<std::size_t> by_time(stream.frames.size());
    std::iota(by_time.begin(), by_time.end(), std::size_t{0});
    std::stable_sort(by_time.begin(), by_time.end(), [&](std::size_t a, std::size_t b) {
        return stream.frames[a].timestamp < stream.frames[b].timestamp;
    });

    const std::size_t per_angle_frame = static_cast<std::size_t>(K) * static_cast<std::size_t>(A);
    const std::size_t per_v_frame = static_cast<std::size_t>(K) * static_cast<std::size_t>(M * N);
    std::vector<std::vector<double>> angle_slots(by_time.size());
    std::vector<std::vector<cdouble>> v_slots(by_time.size());
    std::vector<std::string> failure(by_time.size());

    detail::parallel_for(by_time.size(), [&](std::size_t slot) {
        const BfaFrame& f = stream.frames[by_time[slot]];
        try {
            if (f.subcarriers != K || f.angles_per_subcarrier != A || f.q_angles.size() != per_angle_frame)
                throw Error(ErrorKind::ShapeMismatch, "frame shape differs from its stream");
            std::vector<double> angles(per_angle_frame);
            std::vector<cdouble> v(per_v_frame);
            for (int k = 0; k < K; ++k) {
                const AngleSet set = dequantize(f.subcarrier(k), order, out.bits);
                std::copy(set.begin(), set.end(), angles.begin() + static_cast<std::ptrdiff_t>(k) * A);
                const CMatrix vt = reconstruct_vtilde(set, M, N);
                for (int m = 0; m < M; ++m)
                    for (int n = 0; n < N; ++n)
                        v[(static_cast<std::size_t>(k) * M + static_cast<std::size_t>(m)) * N +
                          static_cast<std::size_t>(n)] = vt(m, n);
            }
            angle_slots[slot] = std::move(angles);
            v_slots[slot] = std::move(v);
        } catch (const Error& e) {
            failure[slot] = std::string(to_string(e.kind()));
        }
    });

    out.angles = {0, K, A, {}};
    out.vtilde = {0, K, M, N, {}};
    for (std::size_t slot = 0; slot < by_time.size(); ++slot) {
        if (!failure[slot].empty()) {
            out.dropped.add(failure[slot]);
            continue;
        }
        const BfaFrame& f = stream.frames[by_time[slot]];
        out.angles.data.insert(out.angles.data.end(), angle_slots[slot].begin(), angle_slots[slot].end());
        out.vtilde.data.insert(out.vtilde.data.end(), v_slots[slot].begin(), v_slots[slot].end());
        out.timestamps.push_back(f.timestamp);
        out.snr.push_back(f.snr);
    }
    out.angles.frames = out.vtilde.frames = static_cast<int>(out.timestamps.size());
    return out;
}

/// Dequantizes and reconstructs every stream, in stream order.
inline std::vector<StreamTensors> assemble_tensors(const CaptureSession& session)
{
    std::vector<StreamTensors> out;
    for (const Stream* s : session.streams()) out.push_back(assemble_stream(*s));
    return out;
}

// ---------------------------------------------------------------------------
// Synthetic captures

enum class ChannelModel {
    Gaussian,   // i.i.d. CN(0,1) entries per sub-channel and frame
    Correlated, // few-tap delay profile, smooth in k, AR(1) in time
};

struct SynthOptions {
    MimoConfig config;
    int n_rx = 0; // receive antennas N; 0 means N_SS
    ChannelModel channel = ChannelModel::Gaussian;
    int n_frames = 1;
    int codebook = 1;
    std::uint64_t seed = 0;
    std::optional<MacAddress> source; // default derived from seed
    MacAddress destination{{0x02, 0xbf, 0x00, 0x00, 0x00, 0x01}};
    Timestamp start{1696579200, 0};
    std::uint32_t interval_us = 10000;
};

struct SyntheticCapture {
    std::vector<CaptureRecord> records;
    std::vector<std::vector<double>> exact_angles; // per frame, K x A before quantization
    MacAddress source;
    QuantBits bits;
};

namespace detail {

// Bit-reproducible N(0,1) from mt19937_64 (std distributions are not
// portable across standard libraries).
class GaussianSource {
public:
    explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

    double uniform_open() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    double normal()
    {
        if (spare_) {
            const double v = *spare_;
            spare_.reset();
            return v;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_open()));
        const double t = 2.0 * std::numbers::pi * uniform_open();
        spare_ = r * std::sin(t);
        return r * std::cos(t);
    }

    cdouble complex_normal() { return {normal() * std::sqrt(0.5), normal() * std::sqrt(0.5)}; }

    std::uint64_t bits() { return engine_(); }

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

} // namespace detail

/// Forward path per frame and sub-channel: draw H -> SVD -> Givens angles ->
/// quantize -> pack into an Action No Ack report inside a pcap record.
inline SyntheticCapture synthesize_capture(const SynthOptions& opt, const SubcarrierTable& table)
{
    const MimoConfig& c = opt.config;
    validate(c);
    if (angle_count(c) == 0) throw Error(ErrorKind::InvalidConfig, "a 1x1 configuration has no angles to feed back");
    if (opt.n_frames < 0) throw Error(ErrorKind::InvalidConfig, "negative frame count");
    const int n_rx = opt.n_rx == 0 ? c.n_cols : opt.n_rx;
    if (n_rx < c.n_cols || n_rx > 8) throw Error(ErrorKind::InvalidConfig, "need N_SS <= N <= 8 receive antennas");

    const int K = subcarrier_count(table, c);
    const int A = angle_count(c);
    const AngleOrder order = angle_order(c);

    detail::GaussianSource rng(opt.seed);
    SyntheticCapture out;
    out.bits = quant_bits(c, opt.codebook);
    if (opt.source) {
        out.source = *opt.source;
    } else {
        const std::uint64_t r = rng.bits();
        out.source.octets = {0x02, static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(r >> 8),
                             static_cast<std::uint8_t>(r >> 16), static_cast<std::uint8_t>(r >> 24),
                             static_cast<std::uint8_t>(r >> 32)};
    }

    constexpr int kTaps = 4;
    constexpr double kTimeCorrelation = 0.95;
    std::vector<CMatrix> taps;
    auto draw_matrix = [&] {
        CMatrix h(c.n_rows, n_rx);
        for (int m = 0; m < c.n_rows; ++m)
            for (int n = 0; n < n_rx; ++n) h(m, n) = rng.complex_normal();
        return h;
    };
    if (opt.channel == ChannelModel::Correlated)
        for (int t = 0; t < kTaps; ++t) taps.push_back(draw_matrix());

    for (int p = 0; p < opt.n_frames; ++p) {
        if (opt.channel == ChannelModel::Correlated && p > 0)
            for (auto& tap : taps)
                tap = kTimeCorrelation * tap + std::sqrt(1.0 - kTimeCorrelation * kTimeCorrelation) * draw_matrix();

        BfaFrame f;
        f.standard = c.standard;
        f.mimo.nc = c.n_cols;
        f.mimo.nr = c.n_rows;
        f.mimo.bandwidth_mhz = c.bandwidth_mhz;
        f.mimo.grouping_ng = c.grouping_ng;
        f.mimo.codebook = opt.codebook;
        f.mimo.feedback = c.feedback == Feedback::MU ? FeedbackType::MU : FeedbackType::SU;
        f.mimo.sounding_token = p % 64;
        if (c.standard == Standard::HE) f.mimo.ru_end = full_band_ru_end(c.bandwidth_mhz);
        f.subcarriers = K;
        f.angles_per_subcarrier = A;
        f.q_angles.reserve(static_cast<std::size_t>(K) * static_cast<std::size_t>(A));

        std::vector<double> exact;
        exact.reserve(static_cast<std::size_t>(K) * static_cast<std::size_t>(A));
        std::vector<double> gain_db(static_cast<std::size_t>(c.n_cols), 0.0);
        for (int k = 0; k < K; ++k) {
            CMatrix h;
            if (opt.channel == ChannelModel::Gaussian) {
                h = draw_matrix();
            } else {
                h = CMatrix::Zero(c.n_rows, n_rx);
                for (int t = 0; t < kTaps; ++t)
                    h += taps[static_cast<std::size_t>(t)] *
                         std::polar(1.0 / std::sqrt(double(kTaps)), -2.0 * std::numbers::pi * k * t * 1.5 / K);
            }
            const CompressedChannel cc = compress_cfr(h, c.n_cols);
            const Decomposition d = decompose_v(cc.v, c);
            const QuantizedAngles q = quantize(d.angles, order, out.bits);
            exact.insert(exact.end(), d.angles.begin(), d.angles.end());
            f.q_angles.insert(f.q_angles.end(), q.begin(), q.end());
            for (int s = 0; s < c.n_cols; ++s)
                gain_db[static_cast<std::size_t>(s)] += 20.0 * std::log10(std::max(cc.singular_values(s), 1e-6)) / K;
        }
        for (int s = 0; s < c.n_cols; ++s) f.snr.push_back(snr_raw(25.0 + gain_db[static_cast<std::size_t>(s)]));

        const std::uint64_t usec = static_cast<std::uint64_t>(opt.start.microseconds) +
                                   static_cast<std::uint64_t>(p) * opt.interval_us;
        f.timestamp = {opt.start.seconds + static_cast<std::uint32_t>(usec / 1000000),
                       static_cast<std::uint32_t>(usec % 1000000)};
        f.radiotap = make_radiotap(static_cast<std::uint64_t>(f.timestamp.seconds) * 1000000 + f.timestamp.microseconds,
                                   5180, static_cast<std::int8_t>(-40));
        f.mgmt.destination = opt.destination;
        f.mgmt.source = out.source;
        f.mgmt.bssid = opt.destination;
        f.mgmt.sequence_control = static_cast<std::uint16_t>((p % 4096) << 4);

        out.records.push_back(make_record(f.timestamp, serialize_frame(f, table)));
        out.exact_angles.push_back(std::move(exact));
    }
    return out;
}

/// Stable merge of several record lists by timestamp.
inline std::vector<CaptureRecord> interleave(std::vector<std::vector<CaptureRecord>> lists)
{
    std::vector<CaptureRecord> out;
    for (auto& l : lists) out.insert(out.end(), std::make_move_iterator(l.begin()), std::make_move_iterator(l.end()));
    std::stable_sort(out.begin(), out.end(),
                     [](const CaptureRecord& a, const CaptureRecord& b) { return a.timestamp < b.timestamp; });
    return out;
}

} // namespace bfa
