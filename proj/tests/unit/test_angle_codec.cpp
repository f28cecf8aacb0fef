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

#include <numbers>
#include <random>

#include "bfa/angle_codec.hpp"
#include "support/test_support.hpp"

namespace {

using namespace bfa;
constexpr double kPi = std::numbers::pi;

TEST(AngleOrder, ReferenceRows)
{
    for (const auto& row : oracle::reference_table()) {
        const auto order = angle_order(row.m, row.n);
        ASSERT_EQ(order.size(), row.order.size());
        for (std::size_t a = 0; a < order.size(); ++a) EXPECT_EQ(order[a].name(), row.order[a]);
    }
}

TEST(AngleOrder, PhiBeforePsiPerStage)
{
    const auto order = angle_order(8, 3);
    EXPECT_EQ(order.size(), 36u);
    EXPECT_EQ(order.front().name(), "phi11");
    EXPECT_EQ(order[7].name(), "psi21");
    EXPECT_EQ(order.back().name(), "psi83");
}

TEST(Dequantize, FrozenValues)
{
    EXPECT_DOUBLE_EQ(dequantize_phi(0, 9), 0.006135923151542565);
    EXPECT_DOUBLE_EQ(dequantize_phi(255, 9), 3.1354567304382504);
    EXPECT_DOUBLE_EQ(dequantize_psi(127, 7), 1.564660403643354);
    EXPECT_DOUBLE_EQ(dequantize_psi(127, 7), kPi / 2 - kPi / 512);
}

TEST(Dequantize, OutOfRangeIndex)
{
    EXPECT_THROW(dequantize_phi(512, 9), Error);
    EXPECT_THROW(dequantize_psi(128, 7), Error);
}

TEST(Quantize, FrozenNearest)
{
    EXPECT_EQ(quantize_phi(2 * kPi - 1e-6, 9), 511u);
    EXPECT_EQ(quantize_psi(0.8, 7), 65u);
    EXPECT_EQ(quantize_psi(1.2, 7), 97u);
    EXPECT_EQ(quantize_phi(1.0, 6), 10u);
    EXPECT_EQ(quantize_psi(0.3, 4), 3u);
}

TEST(Quantize, WrapsPhi)
{
    EXPECT_EQ(quantize_phi(-1e-6, 9), 511u);
    EXPECT_EQ(quantize_phi(1e-6, 9), 0u);
    EXPECT_EQ(quantize_phi(4 * kPi + 1.0, 6), 10u);
}

TEST(Quantize, PsiDomain)
{
    EXPECT_EQ(quantize_psi(0.0, 7), 0u);
    EXPECT_EQ(quantize_psi(kPi / 2, 7), 127u);
    EXPECT_THROW(quantize_psi(-0.1, 7), Error);
    EXPECT_THROW(quantize_psi(kPi / 2 + 0.1, 7), Error);
    EXPECT_THROW(quantize_phi(std::nan(""), 7), Error);
}

class GridSweep : public ::testing::TestWithParam<QuantBits> {};

TEST_P(GridSweep, RoundTripEveryIndex)
{
    const QuantBits b = GetParam();
    for (std::uint32_t q = 0; q < grid_size(b.b_phi); ++q) {
        const double x = dequantize_phi(q, b.b_phi);
        EXPECT_GT(x, 0.0);
        EXPECT_LT(x, 2 * kPi);
        EXPECT_EQ(quantize_phi(x, b.b_phi), q);
    }
    for (std::uint32_t q = 0; q < grid_size(b.b_psi); ++q) {
        const double x = dequantize_psi(q, b.b_psi);
        EXPECT_GT(x, 0.0);
        EXPECT_LT(x, kPi / 2);
        EXPECT_EQ(quantize_psi(x, b.b_psi), q);
    }
}

TEST_P(GridSweep, NearestMatchesBruteForceAndBound)
{
    const QuantBits b = GetParam();
    std::mt19937_64 rng(b.b_phi * 100 + b.b_psi);
    std::uniform_real_distribution<double> phi(0, 2 * kPi), psi(0, kPi / 2);
    for (int t = 0; t < 2000; ++t) {
        const double x = phi(rng), y = psi(rng);
        const auto qx = quantize_phi(x, b.b_phi);
        const auto qy = quantize_psi(y, b.b_psi);
        EXPECT_EQ(static_cast<int>(qx), oracle::brute_nearest_phi(x, b.b_phi)) << x;
        EXPECT_EQ(static_cast<int>(qy), oracle::brute_nearest_psi(y, b.b_psi)) << y;
        EXPECT_LE(circular_distance(dequantize_phi(qx, b.b_phi), x), max_quantization_error(AngleKind::Phi, b) + 1e-12);
        EXPECT_LE(std::abs(dequantize_psi(qy, b.b_psi) - y), max_quantization_error(AngleKind::Psi, b) + 1e-12);
    }
}

INSTANTIATE_TEST_SUITE_P(AllWidths, GridSweep,
                         ::testing::Values(QuantBits{4, 2}, QuantBits{6, 4}, QuantBits{7, 5}, QuantBits{9, 7}));

TEST(Quantize, VectorForms)
{
    const auto order = angle_order(4, 2);
    const QuantBits b{9, 7};
    std::vector<std::uint16_t> q(order.size());
    for (std::size_t a = 0; a < q.size(); ++a) q[a] = static_cast<std::uint16_t>(3 * a + 1);
    const auto angles = dequantize(q, order, b);
    EXPECT_EQ(quantize(angles, order, b), q);
    EXPECT_THROW(dequantize(std::span(q).first(3), order, b), Error);
}

TEST(CircularDistance, Wraps)
{
    EXPECT_NEAR(circular_distance(0.1, 2 * kPi - 0.1), 0.2, 1e-12);
    EXPECT_NEAR(circular_distance(1.0, 1.0 + 4 * kPi), 0.0, 1e-12);
}

} // namespace
