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

#include <chrono>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <thread>
#include <vector>

#include "bfa/frame_codec.hpp"

namespace bfa {

struct CaptureRecord {
    Timestamp timestamp; // sub-second part is micro- or nanoseconds per the file
    std::uint32_t original_length = 0;
    Bytes bytes;

    std::uint32_t captured_length() const noexcept { return static_cast<std::uint32_t>(bytes.size()); }

    friend bool operator==(const CaptureRecord&, const CaptureRecord&) = default;
};

struct CaptureHeader {
    bool swapped = false;     // file byte order differs from little-endian
    bool nanosecond = false;  // 0xa1b23c4d magic
    std::uint16_t version_major = 2;
    std::uint16_t version_minor = 4;
    std::int32_t thiszone = 0;
    std::uint32_t sigfigs = 0;
    std::uint32_t snaplen = 262144;
    std::uint32_t link_type = wire::kLinkTypeRadiotap;

    friend bool operator==(const CaptureHeader&, const CaptureHeader&) = default;
};

struct CaptureFile {
    CaptureHeader header;
    std::vector<CaptureRecord> records;

    friend bool operator==(const CaptureFile&, const CaptureFile&) = default;
};

// Thrown by read_capture on a cut-off record; carries what was read before it.
class TruncatedCapture : public Error {
public:
    TruncatedCapture(const std::string& what, CaptureFile partial)
        : Error(ErrorKind::TruncatedRecord, what), partial_(std::move(partial))
    {
    }
    const CaptureFile& partial() const noexcept { return partial_; }

private:
    CaptureFile partial_;
};

struct FollowOptions {
    bool enabled = false;
    std::chrono::milliseconds poll{100};
    std::chrono::milliseconds idle_timeout{0};
};

/// Incremental classic-pcap reader. next() hands out one record at a time,
/// so a producer piping into stdin is consumed as it writes.
///
/// In follow mode a short read is retried (polling every `poll`) until the
/// stream grows, which turns a file still being written into a live feed;
/// `idle_timeout` bounds how long to wait for new bytes (zero = forever).
class CaptureReader {
public:
    explicit CaptureReader(std::istream& in, FollowOptions follow = {}) : in_(in), follow_(follow)
    {
        std::uint8_t raw[wire::kPcapGlobalHeaderSize];
        if (!read_exact(raw, 4)) throw Error(ErrorKind::BadMagic, "stream is too short for a pcap header");
        const std::uint32_t magic = detail::load_le32(ByteView(raw, 4), 0);
        const std::uint32_t magic_be = byteswap(magic);
        if (magic == wire::kPcapngMagic)
            throw Error(ErrorKind::BadMagic, "pcapng files are not supported; convert to classic pcap "
                                             "(e.g. editcap -F pcap in.pcapng out.pcap)");
        if (magic == wire::kPcapMagicMicro || magic == wire::kPcapMagicNano) {
            header_.swapped = false;
        } else if (magic_be == wire::kPcapMagicMicro || magic_be == wire::kPcapMagicNano) {
            header_.swapped = true;
        } else {
            throw Error(ErrorKind::BadMagic, "not a pcap stream");
        }
        header_.nanosecond = (header_.swapped ? magic_be : magic) == wire::kPcapMagicNano;
        if (!read_exact(raw + 4, wire::kPcapGlobalHeaderSize - 4))
            throw Error(ErrorKind::TruncatedRecord, "pcap global header is cut short");
        ByteView h(raw, wire::kPcapGlobalHeaderSize);
        header_.version_major = static_cast<std::uint16_t>(u16(h, 4));
        header_.version_minor = static_cast<std::uint16_t>(u16(h, 6));
        header_.thiszone = static_cast<std::int32_t>(u32(h, 8));
        header_.sigfigs = u32(h, 12);
        header_.snaplen = u32(h, 16);
        header_.link_type = u32(h, 20);
        if (header_.link_type != wire::kLinkTypeRadiotap)
            throw Error(ErrorKind::WrongLinkType, "link type " + std::to_string(header_.link_type) +
                                                      ", expected 127 (802.11 + radiotap)");
    }

    const CaptureHeader& header() const noexcept { return header_; }

    /// Next record, or nullopt at a clean end of stream. Throws
    /// TruncatedRecord when the stream ends inside a record.
    std::optional<CaptureRecord> next()
    {
        std::uint8_t raw[wire::kPcapRecordHeaderSize];
        const std::size_t got = read_some(raw, sizeof raw);
        if (got == 0) return std::nullopt;
        if (got < sizeof raw) throw Error(ErrorKind::TruncatedRecord, "record header is cut short");
        ByteView h(raw, sizeof raw);
        CaptureRecord rec;
        rec.timestamp = {u32(h, 0), u32(h, 4)};
        const std::uint32_t incl = u32(h, 8);
        rec.original_length = u32(h, 12);
        if (incl > std::max<std::uint32_t>(header_.snaplen, 262144u) * 4u)
            throw Error(ErrorKind::TruncatedRecord, "implausible record length " + std::to_string(incl));
        rec.bytes.resize(incl);
        if (!read_exact(rec.bytes.data(), incl))
            throw Error(ErrorKind::TruncatedRecord, "record body is cut short");
        return rec;
    }

private:
    static std::uint32_t byteswap(std::uint32_t v)
    {
        return (v >> 24) | ((v >> 8) & 0xff00u) | ((v << 8) & 0xff0000u) | (v << 24);
    }
    std::uint32_t u32(ByteView b, std::size_t at) const
    {
        const std::uint32_t v = detail::load_le32(b, at);
        return header_.swapped ? byteswap(v) : v;
    }
    std::uint32_t u16(ByteView b, std::size_t at) const
    {
        const std::uint16_t v = detail::load_le16(b, at);
        return header_.swapped ? static_cast<std::uint16_t>(v >> 8 | v << 8) : v;
    }

    // Bytes actually read; short only at end of stream.
    std::size_t read_some(std::uint8_t* dst, std::size_t n)
    {
        std::size_t done = 0;
        auto idle_since = std::chrono::steady_clock::now();
        while (done < n) {
            in_.read(reinterpret_cast<char*>(dst + done), static_cast<std::streamsize>(n - done));
            const auto got = static_cast<std::size_t>(in_.gcount());
            done += got;
            if (done == n) break;
            if (!follow_.enabled) break;
            if (in_.bad()) break;
            in_.clear();
            if (got > 0) idle_since = std::chrono::steady_clock::now();
            if (follow_.idle_timeout.count() > 0 &&
                std::chrono::steady_clock::now() - idle_since >= follow_.idle_timeout)
                break;
            std::this_thread::sleep_for(follow_.poll);
        }
        return done;
    }
    bool read_exact(std::uint8_t* dst, std::size_t n) { return read_some(dst, n) == n; }

    std::istream& in_;
    FollowOptions follow_;
    CaptureHeader header_;
};

inline CaptureFile read_capture(std::istream& in)
{
    CaptureReader reader(in);
    CaptureFile file;
    file.header = reader.header();
    try {
        while (auto rec = reader.next()) file.records.push_back(std::move(*rec));
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::TruncatedRecord) throw;
        throw TruncatedCapture(e.what(), std::move(file));
    }
    return file;
}

/// Writes a little-endian classic pcap with link type 127. Returns the
/// number of bytes written.
inline std::size_t write_capture(std::span<const CaptureRecord> records, std::ostream& out,
                                 const CaptureHeader& header = {})
{
    Bytes buf;
    detail::store_le(buf, header.nanosecond ? wire::kPcapMagicNano : wire::kPcapMagicMicro, 4);
    detail::store_le(buf, header.version_major, 2);
    detail::store_le(buf, header.version_minor, 2);
    detail::store_le(buf, static_cast<std::uint32_t>(header.thiszone), 4);
    detail::store_le(buf, header.sigfigs, 4);
    detail::store_le(buf, header.snaplen, 4);
    detail::store_le(buf, wire::kLinkTypeRadiotap, 4);
    for (const auto& rec : records) {
        if (rec.original_length < rec.captured_length())
            throw Error(ErrorKind::IoFailure, "record original length is below its captured length");
        detail::store_le(buf, rec.timestamp.seconds, 4);
        detail::store_le(buf, rec.timestamp.microseconds, 4);
        detail::store_le(buf, rec.captured_length(), 4);
        detail::store_le(buf, rec.original_length, 4);
        buf.insert(buf.end(), rec.bytes.begin(), rec.bytes.end());
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    out.flush();
    if (!out) throw Error(ErrorKind::IoFailure, "write to capture sink failed");
    return buf.size();
}

inline CaptureRecord make_record(Timestamp ts, Bytes bytes)
{
    CaptureRecord rec;
    rec.timestamp = ts;
    rec.original_length = static_cast<std::uint32_t>(bytes.size());
    rec.bytes = std::move(bytes);
    return rec;
}

} // namespace bfa
