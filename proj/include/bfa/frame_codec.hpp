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

#include <array>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bfa/angle_codec.hpp"
#include "bfa/bit_io.hpp"
#include "bfa/frame_constants.hpp"
#include "bfa/subcarrier_table.hpp"

namespace bfa {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

struct MacAddress {
    std::array<std::uint8_t, 6> octets{};

    friend auto operator<=>(const MacAddress&, const MacAddress&) = default;

    std::string to_string(char sep = ':') const
    {
        char buf[18];
        std::snprintf(buf, sizeof buf, "%02x%c%02x%c%02x%c%02x%c%02x%c%02x", octets[0], sep, octets[1], sep,
                      octets[2], sep, octets[3], sep, octets[4], sep, octets[5]);
        return buf;
    }

    // Accepts "aa:bb:cc:dd:ee:ff" or "aa-bb-cc-dd-ee-ff", any case.
    static MacAddress parse(std::string_view text)
    {
        MacAddress mac;
        auto hex = [](char c) -> int {
            if (c >= '0' && c <= '9') return c - '0';
            if (c >= 'a' && c <= 'f') return c - 'a' + 10;
            if (c >= 'A' && c <= 'F') return c - 'A' + 10;
            return -1;
        };
        if (text.size() != 17) throw Error(ErrorKind::InvalidConfig, "bad MAC address '" + std::string(text) + "'");
        for (std::size_t i = 0; i < 6; ++i) {
            const int hi = hex(text[3 * i]), lo = hex(text[3 * i + 1]);
            const bool sep_ok = i == 5 || text[3 * i + 2] == ':' || text[3 * i + 2] == '-';
            if (hi < 0 || lo < 0 || !sep_ok)
                throw Error(ErrorKind::InvalidConfig, "bad MAC address '" + std::string(text) + "'");
            mac.octets[i] = static_cast<std::uint8_t>(hi << 4 | lo);
        }
        return mac;
    }
};

struct Timestamp {
    std::uint32_t seconds = 0;
    std::uint32_t microseconds = 0;

    friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

namespace detail {

inline std::uint16_t load_le16(ByteView b, std::size_t at) { return static_cast<std::uint16_t>(b[at] | b[at + 1] << 8); }

inline std::uint32_t load_le32(ByteView b, std::size_t at)
{
    return static_cast<std::uint32_t>(b[at]) | static_cast<std::uint32_t>(b[at + 1]) << 8 |
           static_cast<std::uint32_t>(b[at + 2]) << 16 | static_cast<std::uint32_t>(b[at + 3]) << 24;
}

inline std::uint64_t load_le64(ByteView b, std::size_t at)
{
    return static_cast<std::uint64_t>(load_le32(b, at)) | static_cast<std::uint64_t>(load_le32(b, at + 4)) << 32;
}

inline void store_le(Bytes& out, std::uint64_t value, int nbytes)
{
    for (int i = 0; i < nbytes; ++i) out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
}

// IEEE 802.3 CRC-32, as used for the 802.11 FCS.
inline std::uint32_t crc32(ByteView data)
{
    std::uint32_t crc = 0xffffffffu;
    for (auto byte : data) {
        crc ^= byte;
        for (int k = 0; k < 8; ++k) crc = (crc >> 1) ^ (0xedb88320u & (0u - (crc & 1u)));
    }
    return ~crc;
}

inline std::uint32_t get_bits(std::uint64_t word, int offset, int nbits)
{
    return static_cast<std::uint32_t>((word >> offset) & ((std::uint64_t{1} << nbits) - 1));
}

inline void put_bits(std::uint64_t& word, int offset, int nbits, std::uint32_t value)
{
    word |= (static_cast<std::uint64_t>(value) & ((std::uint64_t{1} << nbits) - 1)) << offset;
}

} // namespace detail

/// Radiotap envelope. Only the length is needed to reach the 802.11 frame;
/// a handful of leading fields are decoded when the present bitmap allows.
struct RadiotapHeader {
    Bytes raw; // the complete header, length() bytes

    std::optional<std::uint64_t> tsft;
    std::optional<std::uint8_t> flags;
    std::optional<std::uint16_t> channel_mhz;
    std::optional<std::uint16_t> channel_flags;
    std::optional<std::int8_t> dbm_antsignal;

    std::size_t length() const noexcept { return raw.size(); }
    bool has_fcs() const noexcept { return flags && (*flags & wire::kRadiotapFlagFcs); }

    friend bool operator==(const RadiotapHeader& a, const RadiotapHeader& b) { return a.raw == b.raw; }
};

inline RadiotapHeader parse_radiotap(ByteView bytes)
{
    if (bytes.size() < wire::kRadiotapMinLength) throw Error(ErrorKind::TruncatedFrame, "shorter than a radiotap header");
    if (bytes[0] != 0) throw Error(ErrorKind::Malformed, "radiotap version " + std::to_string(bytes[0]));
    const std::size_t len = detail::load_le16(bytes, 2);
    if (len < wire::kRadiotapMinLength || len > bytes.size())
        throw Error(ErrorKind::TruncatedFrame, "radiotap length " + std::to_string(len) + " exceeds the frame");

    RadiotapHeader rt;
    rt.raw.assign(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(len));
    ByteView hdr(rt.raw);

    // Skip extended present words; fields start after the last one.
    std::size_t pos = 4;
    const std::uint32_t present = detail::load_le32(hdr, 4);
    for (std::uint32_t word = present; word >> wire::kRadiotapExtBit & 1u;) {
        pos += 4;
        if (pos + 4 > len) throw Error(ErrorKind::Malformed, "radiotap present bitmap overruns header");
        word = detail::load_le32(hdr, pos);
    }
    pos += 4;

    // (alignment, size) of the fields below bit 15; decoding stops at the
    // first field outside this list since its size is unknown here.
    constexpr std::array<std::array<std::size_t, 2>, 15> layout{{
        {8, 8}, {1, 1}, {1, 1}, {2, 4}, {2, 2}, {1, 1}, {1, 1}, {2, 2},
        {2, 2}, {2, 2}, {1, 1}, {1, 1}, {1, 1}, {1, 1}, {2, 2},
    }};
    for (int bit = 0; bit < 31; ++bit) {
        if (!(present >> bit & 1u)) continue;
        if (bit >= static_cast<int>(layout.size())) break;
        const auto [align, size] = layout[static_cast<std::size_t>(bit)];
        pos = (pos + align - 1) / align * align;
        if (pos + size > len) break;
        switch (bit) {
        case wire::kRadiotapTsft: rt.tsft = detail::load_le64(hdr, pos); break;
        case wire::kRadiotapFlags: rt.flags = hdr[pos]; break;
        case wire::kRadiotapChannel:
            rt.channel_mhz = detail::load_le16(hdr, pos);
            rt.channel_flags = detail::load_le16(hdr, pos + 2);
            break;
        case wire::kRadiotapDbmAntSignal: rt.dbm_antsignal = static_cast<std::int8_t>(hdr[pos]); break;
        default: break;
        }
        pos += size;
    }
    return rt;
}

/// Radiotap header carrying TSFT, Flags, Channel and antenna signal.
inline RadiotapHeader make_radiotap(std::uint64_t tsft, std::uint16_t channel_mhz, std::int8_t dbm_antsignal,
                                    std::uint8_t flags = 0)
{
    Bytes raw{0, 0, 0, 0};
    const std::uint32_t present = 1u << wire::kRadiotapTsft | 1u << wire::kRadiotapFlags |
                                  1u << wire::kRadiotapChannel | 1u << wire::kRadiotapDbmAntSignal;
    detail::store_le(raw, present, 4);
    detail::store_le(raw, tsft, 8);                 // offset 8
    raw.push_back(flags);                           // offset 16
    raw.push_back(0);                               // pad to 2
    detail::store_le(raw, channel_mhz, 2);          // offset 18
    detail::store_le(raw, 0x0140, 2);               // OFDM, 5 GHz
    raw.push_back(static_cast<std::uint8_t>(dbm_antsignal)); // offset 22
    raw.push_back(0);
    raw[2] = static_cast<std::uint8_t>(raw.size());
    return parse_radiotap(raw);
}

struct MgmtHeader {
    std::uint16_t frame_control = wire::kSubtypeActionNoAck << 4;
    std::uint16_t duration = 0;
    MacAddress destination;
    MacAddress source;
    MacAddress bssid;
    std::uint16_t sequence_control = 0;
    std::optional<std::uint32_t> ht_control;

    int type() const noexcept { return frame_control >> 2 & 0x3; }
    int subtype() const noexcept { return frame_control >> 4 & 0xf; }

    friend bool operator==(const MgmtHeader&, const MgmtHeader&) = default;
};

enum class FeedbackType { SU, MU, CQI };

struct MimoControl {
    int nc = 1;                 // N_SS, nc_index + 1
    int nr = 1;                 // M, nr_index + 1
    int bandwidth_mhz = 20;
    int grouping_ng = 1;
    int codebook = 0;
    FeedbackType feedback = FeedbackType::SU;
    int remaining_segments = 0;
    bool first_segment = true;
    int sounding_token = 0;
    // HE only
    int ru_start = 0;
    int ru_end = 0;
    bool disambiguation = false;
    int reserved = 0;

    friend bool operator==(const MimoControl&, const MimoControl&) = default;
};

constexpr std::size_t mimo_control_size(Standard s) noexcept { return s == Standard::VHT ? wire::vht::kSize : wire::he::kSize; }

// Last 26-tone RU index of a full-bandwidth HE report.
constexpr int full_band_ru_end(int bandwidth_mhz) noexcept
{
    switch (bandwidth_mhz) {
    case 20: return 8;
    case 40: return 17;
    case 80: return 36;
    default: return 73;
    }
}

inline MimoControl parse_mimo_control(ByteView bytes, Standard standard)
{
    const std::size_t size = mimo_control_size(standard);
    if (bytes.size() < size) throw Error(ErrorKind::TruncatedFrame, "MIMO control field is cut short");
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < size; ++i) word |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);

    using detail::get_bits;
    MimoControl mc;
    constexpr int widths[] = {20, 40, 80, 160};
    if (standard == Standard::VHT) {
        namespace f = wire::vht;
        mc.nc = static_cast<int>(get_bits(word, f::kNcIndex, f::kNcIndexBits)) + 1;
        mc.nr = static_cast<int>(get_bits(word, f::kNrIndex, f::kNrIndexBits)) + 1;
        mc.bandwidth_mhz = widths[get_bits(word, f::kChannelWidth, f::kChannelWidthBits)];
        const auto grouping = get_bits(word, f::kGrouping, f::kGroupingBits);
        if (grouping == 3) throw Error(ErrorKind::Malformed, "reserved VHT grouping value 3");
        mc.grouping_ng = 1 << grouping;
        mc.codebook = static_cast<int>(get_bits(word, f::kCodebook, 1));
        mc.feedback = get_bits(word, f::kFeedbackType, f::kFeedbackTypeBits) ? FeedbackType::MU : FeedbackType::SU;
        mc.remaining_segments = static_cast<int>(get_bits(word, f::kRemainingSegments, f::kRemainingSegmentsBits));
        mc.first_segment = get_bits(word, f::kFirstSegment, 1) != 0;
        mc.reserved = static_cast<int>(get_bits(word, f::kReserved, f::kReservedBits));
        mc.sounding_token = static_cast<int>(get_bits(word, f::kSoundingToken, f::kSoundingTokenBits));
    } else {
        namespace f = wire::he;
        mc.nc = static_cast<int>(get_bits(word, f::kNcIndex, f::kNcIndexBits)) + 1;
        mc.nr = static_cast<int>(get_bits(word, f::kNrIndex, f::kNrIndexBits)) + 1;
        mc.bandwidth_mhz = widths[get_bits(word, f::kChannelWidth, f::kChannelWidthBits)];
        mc.grouping_ng = get_bits(word, f::kGrouping, f::kGroupingBits) ? 16 : 4;
        mc.codebook = static_cast<int>(get_bits(word, f::kCodebook, 1));
        const auto type = get_bits(word, f::kFeedbackType, f::kFeedbackTypeBits);
        if (type == 3) throw Error(ErrorKind::Malformed, "reserved HE feedback type 3");
        mc.feedback = static_cast<FeedbackType>(type);
        mc.remaining_segments = static_cast<int>(get_bits(word, f::kRemainingSegments, f::kRemainingSegmentsBits));
        mc.first_segment = get_bits(word, f::kFirstSegment, 1) != 0;
        mc.ru_start = static_cast<int>(get_bits(word, f::kRuStart, f::kRuIndexBits));
        mc.ru_end = static_cast<int>(get_bits(word, f::kRuEnd, f::kRuIndexBits));
        mc.sounding_token = static_cast<int>(get_bits(word, f::kSoundingToken, f::kSoundingTokenBits));
        mc.disambiguation = get_bits(word, f::kDisambiguation, 1) != 0;
        mc.reserved = static_cast<int>(get_bits(word, f::kReserved, f::kReservedBits));
    }
    if (mc.nc > mc.nr)
        throw Error(ErrorKind::Malformed, "N_SS=" + std::to_string(mc.nc) + " exceeds M=" + std::to_string(mc.nr));
    return mc;
}

inline Bytes pack_mimo_control(const MimoControl& mc, Standard standard)
{
    auto width_index = [&] {
        switch (mc.bandwidth_mhz) {
        case 20: return 0u;
        case 40: return 1u;
        case 80: return 2u;
        case 160: return 3u;
        default: throw Error(ErrorKind::InconsistentShape, "bandwidth " + std::to_string(mc.bandwidth_mhz));
        }
    };
    if (mc.nc < 1 || mc.nr > 8 || mc.nc > mc.nr) throw Error(ErrorKind::InconsistentShape, "bad Nc/Nr");

    using detail::put_bits;
    std::uint64_t word = 0;
    const auto u = [](auto v) { return static_cast<std::uint32_t>(v); };
    if (standard == Standard::VHT) {
        namespace f = wire::vht;
        std::uint32_t grouping = 0;
        switch (mc.grouping_ng) {
        case 1: grouping = 0; break;
        case 2: grouping = 1; break;
        case 4: grouping = 2; break;
        default: throw Error(ErrorKind::InconsistentShape, "VHT grouping Ng=" + std::to_string(mc.grouping_ng));
        }
        if (mc.feedback == FeedbackType::CQI) throw Error(ErrorKind::InconsistentShape, "VHT has no CQI feedback");
        put_bits(word, f::kNcIndex, f::kNcIndexBits, u(mc.nc - 1));
        put_bits(word, f::kNrIndex, f::kNrIndexBits, u(mc.nr - 1));
        put_bits(word, f::kChannelWidth, f::kChannelWidthBits, width_index());
        put_bits(word, f::kGrouping, f::kGroupingBits, grouping);
        put_bits(word, f::kCodebook, 1, u(mc.codebook));
        put_bits(word, f::kFeedbackType, f::kFeedbackTypeBits, mc.feedback == FeedbackType::MU ? 1u : 0u);
        put_bits(word, f::kRemainingSegments, f::kRemainingSegmentsBits, u(mc.remaining_segments));
        put_bits(word, f::kFirstSegment, 1, mc.first_segment ? 1u : 0u);
        put_bits(word, f::kReserved, f::kReservedBits, u(mc.reserved));
        put_bits(word, f::kSoundingToken, f::kSoundingTokenBits, u(mc.sounding_token));
    } else {
        namespace f = wire::he;
        if (mc.grouping_ng != 4 && mc.grouping_ng != 16)
            throw Error(ErrorKind::InconsistentShape, "HE grouping Ng=" + std::to_string(mc.grouping_ng));
        put_bits(word, f::kNcIndex, f::kNcIndexBits, u(mc.nc - 1));
        put_bits(word, f::kNrIndex, f::kNrIndexBits, u(mc.nr - 1));
        put_bits(word, f::kChannelWidth, f::kChannelWidthBits, width_index());
        put_bits(word, f::kGrouping, f::kGroupingBits, mc.grouping_ng == 16 ? 1u : 0u);
        put_bits(word, f::kCodebook, 1, u(mc.codebook));
        put_bits(word, f::kFeedbackType, f::kFeedbackTypeBits, u(mc.feedback));
        put_bits(word, f::kRemainingSegments, f::kRemainingSegmentsBits, u(mc.remaining_segments));
        put_bits(word, f::kFirstSegment, 1, mc.first_segment ? 1u : 0u);
        put_bits(word, f::kRuStart, f::kRuIndexBits, u(mc.ru_start));
        put_bits(word, f::kRuEnd, f::kRuIndexBits, u(mc.ru_end));
        put_bits(word, f::kSoundingToken, f::kSoundingTokenBits, u(mc.sounding_token));
        put_bits(word, f::kDisambiguation, 1, mc.disambiguation ? 1u : 0u);
        put_bits(word, f::kReserved, f::kReservedBits, u(mc.reserved));
    }
    Bytes out;
    detail::store_le(out, word, static_cast<int>(mimo_control_size(standard)));
    return out;
}

/// One compressed beamforming report.
///
/// `q_angles` is row-major K x A: subcarriers ascending, angles in report
/// order within each subcarrier. `trailing` keeps whatever follows the angle
/// payload (the MU exclusive report, vendor padding) byte for byte.
struct BfaFrame {
    Timestamp timestamp; // from the capture record, not the frame bytes
    RadiotapHeader radiotap;
    MgmtHeader mgmt;
    Standard standard = Standard::HE;
    MimoControl mimo;
    std::vector<std::int8_t> snr; // one per stream, raw
    int subcarriers = 0;          // K
    int angles_per_subcarrier = 0; // A
    QuantizedAngles q_angles;
    Bytes trailing;

    MimoConfig config() const
    {
        return {standard, mimo.bandwidth_mhz, mimo.nr, mimo.nc,
                mimo.feedback == FeedbackType::MU ? Feedback::MU : Feedback::SU, mimo.grouping_ng};
    }
    QuantBits bits() const { return quant_bits(config().feedback, mimo.codebook); }
    const MacAddress& source() const noexcept { return mgmt.source; }

    std::span<const std::uint16_t> subcarrier(int k) const
    {
        return std::span<const std::uint16_t>(q_angles).subspan(
            static_cast<std::size_t>(k) * static_cast<std::size_t>(angles_per_subcarrier),
            static_cast<std::size_t>(angles_per_subcarrier));
    }

    friend bool operator==(const BfaFrame&, const BfaFrame&) = default;
};

inline double snr_db(std::int8_t raw) { return wire::kSnrOffsetDb + wire::kSnrStepDb * raw; }

inline std::int8_t snr_raw(double db)
{
    const double steps = std::round((db - wire::kSnrOffsetDb) / wire::kSnrStepDb);
    return static_cast<std::int8_t>(std::clamp(steps, -128.0, 127.0));
}

/// Bits of one subcarrier's angle set.
inline std::size_t angle_bits_per_subcarrier(int n_rows, int n_cols, const QuantBits& bits)
{
    const std::size_t half = static_cast<std::size_t>(angle_count(n_rows, n_cols) / 2);
    return half * static_cast<std::size_t>(bits.b_phi + bits.b_psi);
}

/// Report length in bits after the MIMO control field: SNR bytes plus the
/// packed angles, before byte padding.
inline std::size_t report_bit_length(int n_rows, int n_cols, int subcarriers, const QuantBits& bits)
{
    return static_cast<std::size_t>(n_cols) * 8 +
           static_cast<std::size_t>(subcarriers) * angle_bits_per_subcarrier(n_rows, n_cols, bits);
}

inline BfaFrame parse_frame(ByteView bytes, const SubcarrierTable& table, Timestamp timestamp = {})
{
    BfaFrame f;
    f.timestamp = timestamp;
    f.radiotap = parse_radiotap(bytes);

    ByteView frame = bytes.subspan(f.radiotap.length());
    if (f.radiotap.has_fcs()) {
        if (frame.size() < wire::kFcsSize) throw Error(ErrorKind::TruncatedFrame, "no room for FCS");
        frame = frame.first(frame.size() - wire::kFcsSize);
    }
    if (frame.size() < 2) throw Error(ErrorKind::NotABfaFrame, "no frame control field");
    f.mgmt.frame_control = detail::load_le16(frame, 0);
    if (f.mgmt.type() != wire::kTypeManagement || f.mgmt.subtype() != wire::kSubtypeActionNoAck)
        throw Error(ErrorKind::NotABfaFrame, "type " + std::to_string(f.mgmt.type()) + " subtype " +
                                                 std::to_string(f.mgmt.subtype()) + " is not Action No Ack");
    if (frame.size() < wire::kMgmtHeaderSize) throw Error(ErrorKind::TruncatedFrame, "short management header");
    f.mgmt.duration = detail::load_le16(frame, 2);
    std::copy_n(frame.begin() + 4, 6, f.mgmt.destination.octets.begin());
    std::copy_n(frame.begin() + 10, 6, f.mgmt.source.octets.begin());
    std::copy_n(frame.begin() + 16, 6, f.mgmt.bssid.octets.begin());
    f.mgmt.sequence_control = detail::load_le16(frame, 22);
    std::size_t pos = wire::kMgmtHeaderSize;
    if (f.mgmt.frame_control & wire::kFrameControlOrder) {
        if (frame.size() < pos + wire::kHtControlSize) throw Error(ErrorKind::TruncatedFrame, "short HT control");
        f.mgmt.ht_control = detail::load_le32(frame, pos);
        pos += wire::kHtControlSize;
    }

    if (frame.size() < pos + 2) throw Error(ErrorKind::NotABfaFrame, "no action field");
    const std::uint8_t category = frame[pos], action = frame[pos + 1];
    if (category == wire::kCategoryVht && action == wire::kActionVhtCompressedBeamforming)
        f.standard = Standard::VHT;
    else if (category == wire::kCategoryHe && action == wire::kActionHeCompressedBeamforming)
        f.standard = Standard::HE;
    else
        throw Error(ErrorKind::NotABfaFrame, "category " + std::to_string(category) + " action " +
                                                 std::to_string(action) + " is not compressed beamforming");
    pos += 2;

    f.mimo = parse_mimo_control(frame.subspan(pos), f.standard);
    pos += mimo_control_size(f.standard);
    if (f.mimo.feedback == FeedbackType::CQI) throw Error(ErrorKind::NotABfaFrame, "CQI-only HE report");
    if (f.mimo.remaining_segments != 0 || !f.mimo.first_segment)
        throw Error(ErrorKind::UnsupportedSegmentation, "segmented feedback is not reassembled");

    const MimoConfig config = f.config();
    f.angles_per_subcarrier = angle_count(config);
    if (f.angles_per_subcarrier == 0) throw Error(ErrorKind::Malformed, "1x1 report carries no angles");
    f.subcarriers = subcarrier_count(table, config);

    if (frame.size() < pos + static_cast<std::size_t>(f.mimo.nc))
        throw Error(ErrorKind::TruncatedFrame, "SNR field is cut short");
    for (int s = 0; s < f.mimo.nc; ++s) f.snr.push_back(static_cast<std::int8_t>(frame[pos++]));

    const QuantBits bits = f.bits();
    const AngleOrder order = angle_order(config);
    const std::size_t payload_bits =
        static_cast<std::size_t>(f.subcarriers) * angle_bits_per_subcarrier(config.n_rows, config.n_cols, bits);
    const std::size_t payload_bytes = (payload_bits + 7) / 8;
    if (frame.size() < pos + payload_bytes)
        throw Error(ErrorKind::TruncatedFrame, "angle payload needs " + std::to_string(payload_bytes) + " bytes, " +
                                                   std::to_string(frame.size() - pos) + " present");

    BitReader reader(frame.subspan(pos, payload_bytes));
    f.q_angles.resize(static_cast<std::size_t>(f.subcarriers) * order.size());
    std::size_t idx = 0;
    for (int k = 0; k < f.subcarriers; ++k)
        for (const auto& id : order) f.q_angles[idx++] = static_cast<std::uint16_t>(reader.read(bits_for(id.kind, bits)));
    pos += payload_bytes;
    f.trailing.assign(frame.begin() + static_cast<std::ptrdiff_t>(pos), frame.end());
    return f;
}

inline Bytes serialize_frame(const BfaFrame& f, const SubcarrierTable& table)
{
    const MimoConfig config = f.config();
    try {
        validate(config);
    } catch (const Error& e) {
        throw Error(ErrorKind::InconsistentShape, e.what());
    }
    const int a = angle_count(config);
    const int k = table.count(config.standard, config.bandwidth_mhz, config.grouping_ng);
    if (a == 0 || k == 0 || f.subcarriers != k || f.angles_per_subcarrier != a)
        throw Error(ErrorKind::InconsistentShape, "frame declares K=" + std::to_string(f.subcarriers) + " A=" +
                                                      std::to_string(f.angles_per_subcarrier) + ", config needs K=" +
                                                      std::to_string(k) + " A=" + std::to_string(a));
    if (f.q_angles.size() != static_cast<std::size_t>(k) * static_cast<std::size_t>(a))
        throw Error(ErrorKind::InconsistentShape, "angle payload size does not match K x A");
    if (f.snr.size() != static_cast<std::size_t>(f.mimo.nc))
        throw Error(ErrorKind::InconsistentShape, "need one SNR value per stream");
    if (f.mimo.feedback == FeedbackType::CQI || f.mimo.remaining_segments != 0 || !f.mimo.first_segment)
        throw Error(ErrorKind::InconsistentShape, "only unsegmented SU/MU reports can be serialized");
    if (f.radiotap.raw.size() < wire::kRadiotapMinLength || f.radiotap.raw[0] != 0 ||
        detail::load_le16(f.radiotap.raw, 2) != f.radiotap.raw.size())
        throw Error(ErrorKind::InconsistentShape, "radiotap header is not self-consistent");
    if (f.mgmt.type() != wire::kTypeManagement || f.mgmt.subtype() != wire::kSubtypeActionNoAck ||
        f.mgmt.ht_control.has_value() != ((f.mgmt.frame_control & wire::kFrameControlOrder) != 0))
        throw Error(ErrorKind::InconsistentShape, "management header is not Action No Ack");

    Bytes out = f.radiotap.raw;
    const std::size_t frame_start = out.size();
    detail::store_le(out, f.mgmt.frame_control, 2);
    detail::store_le(out, f.mgmt.duration, 2);
    out.insert(out.end(), f.mgmt.destination.octets.begin(), f.mgmt.destination.octets.end());
    out.insert(out.end(), f.mgmt.source.octets.begin(), f.mgmt.source.octets.end());
    out.insert(out.end(), f.mgmt.bssid.octets.begin(), f.mgmt.bssid.octets.end());
    detail::store_le(out, f.mgmt.sequence_control, 2);
    if (f.mgmt.ht_control) detail::store_le(out, *f.mgmt.ht_control, 4);

    if (f.standard == Standard::VHT) {
        out.push_back(wire::kCategoryVht);
        out.push_back(wire::kActionVhtCompressedBeamforming);
    } else {
        out.push_back(wire::kCategoryHe);
        out.push_back(wire::kActionHeCompressedBeamforming);
    }
    const Bytes mc = pack_mimo_control(f.mimo, f.standard);
    out.insert(out.end(), mc.begin(), mc.end());
    for (auto s : f.snr) out.push_back(static_cast<std::uint8_t>(s));

    const QuantBits bits = f.bits();
    const AngleOrder order = angle_order(config);
    BitWriter writer;
    std::size_t idx = 0;
    for (int sc = 0; sc < k; ++sc)
        for (const auto& id : order) {
            const int nbits = bits_for(id.kind, bits);
            const std::uint16_t q = f.q_angles[idx++];
            if (q >= grid_size(nbits))
                throw Error(ErrorKind::InconsistentShape, "angle index " + std::to_string(q) + " needs more than " +
                                                              std::to_string(nbits) + " bits");
            writer.write(q, nbits);
        }
    const Bytes payload = std::move(writer).take();
    out.insert(out.end(), payload.begin(), payload.end());
    out.insert(out.end(), f.trailing.begin(), f.trailing.end());

    if (f.radiotap.has_fcs())
        detail::store_le(out, detail::crc32(ByteView(out).subspan(frame_start)), 4);
    return out;
}

} // namespace bfa
