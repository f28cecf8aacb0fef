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

// Per-stream output bundles: metadata.json, angles (csv or flat binary),
// vtilde.bin, frames.csv and optional |V~| heatmaps.
//
// Flat binary tensor layout:
//   bytes 0..63  ASCII header "BFATENSOR 1 <dtype> <ndim> <d0> ... <dn-1>",
//                space padded, byte 63 is '\n'
//   bytes 64..   row-major little-endian payload
//   dtype f64    one IEEE-754 binary64 per element
//   dtype c64    two binary32 per element (real, imag)

#pragma once

#include <array>
#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "bfa/session.hpp"

namespace bfa {

inline constexpr std::size_t kTensorHeaderSize = 64;

/// Writes `data` to `path` through a sibling temp file and a rename, so a
/// reader never observes a partial file.
inline void write_atomic(const std::filesystem::path& path, std::string_view data)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::IoFailure, "cannot create " + tmp.string());
        out.write(data.data(), static_cast<std::streamsize>(data.size()));
        out.flush();
        if (!out) throw Error(ErrorKind::IoFailure, "short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorKind::IoFailure, "rename " + tmp.string() + ": " + ec.message());
}

struct TensorHeader {
    std::string dtype;
    std::vector<std::size_t> dims;

    std::size_t elements() const
    {
        std::size_t n = 1;
        for (auto d : dims) n *= d;
        return n;
    }
    std::size_t element_size() const { return 8; } // f64 and c64 are both 8 bytes
};

namespace detail {

inline std::string tensor_header(std::string_view dtype, std::span<const std::size_t> dims)
{
    std::string h = "BFATENSOR 1 " + std::string(dtype) + " " + std::to_string(dims.size());
    for (auto d : dims) h += " " + std::to_string(d);
    if (h.size() > kTensorHeaderSize - 1) throw Error(ErrorKind::InconsistentShape, "tensor header overflow");
    h.resize(kTensorHeaderSize - 1, ' ');
    h.push_back('\n');
    return h;
}

template <class T>
void append_le(std::string& out, T value)
{
    static_assert(std::endian::native == std::endian::little, "big-endian hosts need a byte swap here");
    char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out.append(buf, sizeof(T));
}

} // namespace detail

inline std::string encode_tensor_f64(std::span<const double> data, std::span<const std::size_t> dims)
{
    std::string out = detail::tensor_header("f64", dims);
    out.reserve(out.size() + data.size() * 8);
    for (double v : data) detail::append_le(out, v);
    return out;
}

inline std::string encode_tensor_c64(std::span<const cdouble> data, std::span<const std::size_t> dims)
{
    std::string out = detail::tensor_header("c64", dims);
    out.reserve(out.size() + data.size() * 8);
    for (const cdouble& v : data) {
        detail::append_le(out, static_cast<float>(v.real()));
        detail::append_le(out, static_cast<float>(v.imag()));
    }
    return out;
}

inline TensorHeader decode_tensor_header(std::string_view bytes)
{
    if (bytes.size() < kTensorHeaderSize || bytes[kTensorHeaderSize - 1] != '\n')
        throw Error(ErrorKind::Malformed, "not a tensor file");
    std::istringstream in{std::string(bytes.substr(0, kTensorHeaderSize))};
    std::string magic;
    int version = 0;
    std::size_t ndim = 0;
    TensorHeader h;
    if (!(in >> magic >> version >> h.dtype >> ndim) || magic != "BFATENSOR" || version != 1)
        throw Error(ErrorKind::Malformed, "bad tensor header");
    h.dims.resize(ndim);
    for (auto& d : h.dims)
        if (!(in >> d)) throw Error(ErrorKind::Malformed, "bad tensor dims");
    if (bytes.size() != kTensorHeaderSize + h.elements() * h.element_size())
        throw Error(ErrorKind::Malformed, "tensor payload size disagrees with header");
    return h;
}

inline std::vector<double> decode_tensor_f64(std::string_view bytes, TensorHeader* header = nullptr)
{
    const TensorHeader h = decode_tensor_header(bytes);
    if (h.dtype != "f64") throw Error(ErrorKind::Malformed, "expected f64 tensor");
    std::vector<double> out(h.elements());
    std::memcpy(out.data(), bytes.data() + kTensorHeaderSize, out.size() * 8);
    if (header) *header = h;
    return out;
}

inline std::vector<std::complex<float>> decode_tensor_c64(std::string_view bytes, TensorHeader* header = nullptr)
{
    const TensorHeader h = decode_tensor_header(bytes);
    if (h.dtype != "c64") throw Error(ErrorKind::Malformed, "expected c64 tensor");
    std::vector<std::complex<float>> out(h.elements());
    std::memcpy(out.data(), bytes.data() + kTensorHeaderSize, out.size() * 8);
    if (header) *header = h;
    return out;
}

// Angles as CSV: one row per (frame, subcarrier).
inline std::string encode_angles_csv(const StreamTensors& t)
{
    std::ostringstream out;
    out.precision(17);
    out << "frame,subcarrier";
    for (const auto& id : angle_order(t.shape.n_rows, t.shape.n_cols)) out << ',' << id.name();
    out << '\n';
    for (int p = 0; p < t.angles.frames; ++p)
        for (int k = 0; k < t.angles.subcarriers; ++k) {
            out << p << ',' << k;
            for (int a = 0; a < t.angles.angles; ++a) out << ',' << t.angles.at(p, k, a);
            out << '\n';
        }
    return out.str();
}

inline std::string encode_frames_csv(const StreamTensors& t)
{
    std::ostringstream out;
    out << "frame,seconds,microseconds";
    for (int s = 1; s <= t.shape.n_cols; ++s) out << ",snr_db_" << s;
    out << '\n';
    for (std::size_t p = 0; p < t.timestamps.size(); ++p) {
        out << p << ',' << t.timestamps[p].seconds << ',' << t.timestamps[p].microseconds;
        for (auto raw : t.snr[p]) out << ',' << snr_db(raw);
        out << '\n';
    }
    return out.str();
}

/// Binary PPM of |V~[p, k, m, n]| with subcarriers along x and frames along
/// y, mapped through a fixed five-stop colour ramp over [0, 1].
inline std::string encode_heatmap_ppm(const VTildeTensor& v, int m, int n)
{
    static constexpr std::array<std::array<double, 3>, 5> ramp{{
        {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37},
    }};
    std::string out = "P6\n" + std::to_string(v.subcarriers) + " " + std::to_string(v.frames) + "\n255\n";
    for (int p = 0; p < v.frames; ++p)
        for (int k = 0; k < v.subcarriers; ++k) {
            const double x = std::clamp(std::abs(v.at(p, k, m, n)), 0.0, 1.0) * (ramp.size() - 1);
            const auto lo = std::min(static_cast<std::size_t>(x), ramp.size() - 2);
            const double w = x - static_cast<double>(lo);
            for (int ch = 0; ch < 3; ++ch)
                out.push_back(static_cast<char>(
                    static_cast<std::uint8_t>(std::lround((1 - w) * ramp[lo][ch] + w * ramp[lo + 1][ch]))));
        }
    return out;
}

enum class AngleFormat { Csv, Binary };

struct BundleOptions {
    AngleFormat format = AngleFormat::Binary;
    bool images = false;
};

inline std::string stream_directory_name(std::size_t index, const StreamTensors& t)
{
    char prefix[8];
    std::snprintf(prefix, sizeof prefix, "%02zu", index);
    return std::string(prefix) + "_" + t.key.source.to_string('-') + "_" + std::string(to_string(t.key.standard)) +
           std::to_string(t.key.bandwidth_mhz) + "_" + std::to_string(t.shape.n_rows) + "x" +
           std::to_string(t.shape.n_cols);
}

inline nlohmann::json bundle_metadata(const StreamTensors& t, const BundleOptions& opt)
{
    nlohmann::json order = nlohmann::json::array();
    for (const auto& id : angle_order(t.shape.n_rows, t.shape.n_cols)) order.push_back(id.name());
    nlohmann::json files = {
        {"angles", opt.format == AngleFormat::Csv ? "angles.csv" : "angles.bin"},
        {"vtilde", "vtilde.bin"},
        {"frames", "frames.csv"},
    };
    if (opt.images && t.vtilde.frames > 0) {
        nlohmann::json images = nlohmann::json::array();
        for (int m = 0; m < t.shape.n_rows; ++m)
            for (int n = 0; n < t.shape.n_cols; ++n)
                images.push_back("vtilde_abs_m" + std::to_string(m) + "_s" + std::to_string(n) + ".ppm");
        files["images"] = images;
    }
    nlohmann::json dropped = nlohmann::json::object();
    for (const auto& [reason, n] : t.dropped.counts) dropped[reason] = n;
    return {
        {"source", t.key.source.to_string()},
        {"standard", to_string(t.key.standard)},
        {"bandwidth_mhz", t.key.bandwidth_mhz},
        {"feedback", to_string(t.shape.feedback)},
        {"codebook", t.shape.codebook},
        {"grouping_ng", t.shape.grouping_ng},
        {"bits", {{"phi", t.bits.b_phi}, {"psi", t.bits.b_psi}}},
        {"shape",
         {{"frames", t.angles.frames},
          {"subcarriers", t.angles.subcarriers},
          {"angles", t.angles.angles},
          {"rows", t.shape.n_rows},
          {"cols", t.shape.n_cols}}},
        {"angles_dims", {t.angles.frames, t.angles.subcarriers, t.angles.angles}},
        {"vtilde_dims", {t.vtilde.frames, t.vtilde.subcarriers, t.vtilde.rows, t.vtilde.cols}},
        {"angle_order", order},
        {"files", files},
        {"dropped", dropped},
    };
}

/// Writes one stream's bundle into `dir` (created if needed).
inline void write_bundle(const std::filesystem::path& dir, const StreamTensors& t, const BundleOptions& opt)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::IoFailure, "cannot create " + dir.string() + ": " + ec.message());

    const std::array<std::size_t, 3> adims{static_cast<std::size_t>(t.angles.frames),
                                           static_cast<std::size_t>(t.angles.subcarriers),
                                           static_cast<std::size_t>(t.angles.angles)};
    const std::array<std::size_t, 4> vdims{static_cast<std::size_t>(t.vtilde.frames),
                                           static_cast<std::size_t>(t.vtilde.subcarriers),
                                           static_cast<std::size_t>(t.vtilde.rows),
                                           static_cast<std::size_t>(t.vtilde.cols)};
    if (opt.format == AngleFormat::Csv)
        write_atomic(dir / "angles.csv", encode_angles_csv(t));
    else
        write_atomic(dir / "angles.bin", encode_tensor_f64(t.angles.data, adims));
    write_atomic(dir / "vtilde.bin", encode_tensor_c64(t.vtilde.data, vdims));
    write_atomic(dir / "frames.csv", encode_frames_csv(t));
    if (opt.images && t.vtilde.frames > 0)
        for (int m = 0; m < t.shape.n_rows; ++m)
            for (int n = 0; n < t.shape.n_cols; ++n)
                write_atomic(dir / ("vtilde_abs_m" + std::to_string(m) + "_s" + std::to_string(n) + ".ppm"),
                             encode_heatmap_ppm(t.vtilde, m, n));
    // Metadata last: its presence means the payload files are complete.
    write_atomic(dir / "metadata.json", bundle_metadata(t, opt).dump(2) + "\n");
}

} // namespace bfa
