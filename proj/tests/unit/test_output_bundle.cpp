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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bfa/output_bundle.hpp"
#include "support/test_support.hpp"

namespace {

using namespace bfa;
namespace fs = std::filesystem;

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

StreamTensors sample_tensors(int frames)
{
    SynthOptions o;
    o.config = MimoConfig{Standard::VHT, 20, 2, 1, Feedback::SU, 1};
    o.n_frames = frames;
    o.seed = 12;
    o.source = MacAddress::parse("02:aa:bb:cc:dd:ee");
    const SubcarrierTable table = SubcarrierTable::builtin();
    const auto cap = synthesize_capture(o, table);
    auto out = assemble_tensors(group_frames(cap.records, table));
    return out.at(0);
}

TEST(Tensor, HeaderLayout)
{
    const std::vector<double> data{1.5, -2.0, 3.25, 0.0, 1e-3, 7.0};
    const std::array<std::size_t, 2> dims{2, 3};
    const std::string bytes = encode_tensor_f64(data, dims);
    ASSERT_EQ(bytes.size(), 64u + 48);
    EXPECT_EQ(bytes.substr(0, 20), "BFATENSOR 1 f64 2 2 ");
    EXPECT_EQ(bytes[63], '\n');
    TensorHeader h;
    EXPECT_EQ(decode_tensor_f64(bytes, &h), data);
    EXPECT_EQ(h.dims, (std::vector<std::size_t>{2, 3}));
    EXPECT_THROW(decode_tensor_c64(bytes), Error);
    EXPECT_THROW(decode_tensor_f64(bytes.substr(0, 100)), Error);
}

TEST(Tensor, ComplexAsFloatPairs)
{
    const std::vector<cdouble> data{{1.0, -1.0}, {0.25, 0.5}};
    const std::array<std::size_t, 1> dims{2};
    const auto back = decode_tensor_c64(encode_tensor_c64(data, dims));
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[1], std::complex<float>(0.25f, 0.5f));
}

TEST(Bundle, FilesAndMetadata)
{
    const StreamTensors t = sample_tensors(3);
    const fs::path dir = fs::path(::testing::TempDir()) / "bundle_files";
    fs::remove_all(dir);
    write_bundle(dir, t, BundleOptions{AngleFormat::Binary, true});
    const auto meta = nlohmann::json::parse(slurp(dir / "metadata.json"));
    EXPECT_EQ(meta["source"], "02:aa:bb:cc:dd:ee");
    EXPECT_EQ(meta["angles_dims"], nlohmann::json({3, 52, 2}));
    EXPECT_EQ(meta["vtilde_dims"], nlohmann::json({3, 52, 2, 1}));
    EXPECT_EQ(meta["angle_order"], nlohmann::json({"phi11", "psi21"}));
    EXPECT_EQ(meta["bits"]["phi"], 6);
    EXPECT_EQ(meta["files"]["images"].size(), 2u);

    const auto angles = decode_tensor_f64(slurp(dir / "angles.bin"));
    EXPECT_EQ(angles, t.angles.data);
    const auto v = decode_tensor_c64(slurp(dir / "vtilde.bin"));
    ASSERT_EQ(v.size(), t.vtilde.data.size());
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(std::abs(cdouble(v[i]) - t.vtilde.data[i]), 0.0, 1e-6);

    const std::string ppm = slurp(dir / "vtilde_abs_m0_s0.ppm");
    EXPECT_EQ(ppm.substr(0, 3), "P6\n");
    EXPECT_EQ(stream_directory_name(0, t), "00_02-aa-bb-cc-dd-ee_vht20_2x1");
}

TEST(Bundle, CsvAngles)
{
    const StreamTensors t = sample_tensors(2);
    const std::string csv = encode_angles_csv(t);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "frame,subcarrier,phi11,psi21");
    std::size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 2u * 52);
    const std::string frames = encode_frames_csv(t);
    EXPECT_EQ(frames.substr(0, frames.find('\n')), "frame,seconds,microseconds,snr_db_1");
}

TEST(Bundle, EmptyStreamWritesNoImages)
{
    StreamTensors t = sample_tensors(1);
    t.angles.frames = t.vtilde.frames = 0;
    t.angles.data.clear();
    t.vtilde.data.clear();
    t.timestamps.clear();
    t.snr.clear();
    const fs::path dir = fs::path(::testing::TempDir()) / "bundle_empty";
    fs::remove_all(dir);
    write_bundle(dir, t, BundleOptions{AngleFormat::Binary, true});
    EXPECT_FALSE(fs::exists(dir / "vtilde_abs_m0_s0.ppm"));
    EXPECT_EQ(decode_tensor_header(slurp(dir / "angles.bin")).dims, (std::vector<std::size_t>{0, 52, 2}));
}

} // namespace
