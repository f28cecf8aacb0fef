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

#include <complex>
#include <numbers>
#include <random>

#include "bfa/givens.hpp"
#include "support/test_support.hpp"

namespace {

using namespace bfa;
using namespace std::complex_literals;
constexpr double kPi = std::numbers::pi;

TEST(Reconstruct, TwoByOneClosedForm)
{
    const std::vector<double> a{kPi / 2, kPi / 4};
    const CMatrix v = reconstruct_vtilde(a, 2, 1);
    EXPECT_NEAR(std::abs(v(0, 0) - 0.70710678118654752i), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(v(1, 0) - 0.70710678118654752), 0.0, 1e-12);
}

TEST(Reconstruct, FourByTwoFrozen)
{
    const std::vector<double> a{0.3, 1.1, 2.5, 0.2, 0.7, 1.3, 4.0, 5.5, 0.9, 0.4};
    const cdouble expect[4][2] = {{0.19156037 + 0.05925657i, -0.62650025 + 0.23273135i},
                                  {0.01843715 + 0.03622458i, 0.09848615 - 0.59908171i},
                                  {-0.13805906 + 0.10313319i, 0.11336795 + 0.40128752i},
                                  {0.96355819, 0.10416895}};
    const CMatrix v = reconstruct_vtilde(a, 4, 2);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 2; ++c) EXPECT_NEAR(std::abs(v(r, c) - expect[r][c]), 0.0, 5e-8) << r << c;
}

TEST(Reconstruct, MatchesExplicitProduct)
{
    std::mt19937_64 rng(11);
    for (int m = 2; m <= 8; ++m)
        for (int n = 1; n <= m; ++n)
            for (int t = 0; t < 5; ++t) {
                const auto a = oracle::random_angles(rng, m, n);
                const CMatrix v = reconstruct_vtilde(a, m, n);
                const oracle::Dense ref = oracle::brute_force_vtilde(a, m, n);
                EXPECT_LT((v - ref).norm(), 1e-12) << m << "x" << n;
            }
}

TEST(Reconstruct, MatrixHelpersAgreeWithProduct)
{
    const std::vector<double> a{0.3, 1.1, 2.5, 0.2, 0.7, 1.3, 4.0, 5.5, 0.9, 0.4};
    const std::vector<double> phi1{0.3, 1.1, 2.5}, phi2{4.0, 5.5};
    CMatrix p = d_matrix(4, 1, phi1) * g_matrix(4, 2, 1, 0.2).transpose() * g_matrix(4, 3, 1, 0.7).transpose() *
                g_matrix(4, 4, 1, 1.3).transpose() * d_matrix(4, 2, phi2) * g_matrix(4, 3, 2, 0.9).transpose() *
                g_matrix(4, 4, 2, 0.4).transpose();
    EXPECT_LT((CMatrix(p.leftCols(2)) - reconstruct_vtilde(a, 4, 2)).norm(), 1e-12);
}

TEST(Reconstruct, WrongLength)
{
    const std::vector<double> a(9, 0.1);
    EXPECT_THROW(reconstruct_vtilde(a, 4, 2), Error);
}

TEST(Decompose, Identity)
{
    const Decomposition d = decompose_v(CMatrix::Identity(4, 2), 4, 2);
    ASSERT_EQ(d.angles.size(), 10u);
    for (double x : d.angles) EXPECT_NEAR(x, 0.0, 1e-12);
    for (double p : d.dtilde_phases) EXPECT_NEAR(p, 0.0, 1e-12);
}

TEST(Decompose, TwoByOne)
{
    CMatrix v(2, 1);
    v << 0.70710678118654752i, 0.70710678118654752;
    const Decomposition d = decompose_v(v, 2, 1);
    EXPECT_NEAR(d.angles[0], kPi / 2, 1e-12);
    EXPECT_NEAR(d.angles[1], kPi / 4, 1e-12);
}

TEST(Decompose, RandomIsometriesUpToPhases)
{
    std::mt19937_64 rng(5);
    for (int m = 2; m <= 8; ++m)
        for (int n = 1; n <= m; ++n)
            for (int t = 0; t < 30; ++t) {
                const CMatrix v = oracle::to_cmatrix(oracle::random_isometry(rng, m, n));
                const Decomposition d = decompose_v(v, m, n);
                ASSERT_EQ(static_cast<int>(d.angles.size()), angle_count(m, n));
                const CMatrix vt = reconstruct_vtilde(d.angles, m, n);
                CMatrix dconj = CMatrix::Zero(n, n);
                for (int j = 0; j < n; ++j) dconj(j, j) = std::polar(1.0, -d.dtilde_phases[static_cast<std::size_t>(j)]);
                EXPECT_LT((vt - v * dconj).norm(), 1e-9) << m << "x" << n;
                for (int j = 0; j < n; ++j) {
                    EXPECT_GE(vt(m - 1, j).real(), -1e-12);
                    EXPECT_NEAR(vt(m - 1, j).imag(), 0.0, 1e-10);
                }
            }
}

TEST(Decompose, AngleRoundTripInterior)
{
    std::mt19937_64 rng(9);
    for (int m = 2; m <= 8; ++m)
        for (int n = 1; n <= m; ++n)
            for (int t = 0; t < 20; ++t) {
                const auto a = oracle::random_angles(rng, m, n, 1e-3);
                const Decomposition d = decompose_v(reconstruct_vtilde(a, m, n), m, n);
                for (std::size_t i = 0; i < a.size(); ++i)
                    EXPECT_LT(circular_distance(d.angles[i], a[i]), 1e-9) << m << "x" << n << " angle " << i;
            }
}

TEST(Decompose, RangesAndErrors)
{
    std::mt19937_64 rng(3);
    const CMatrix v = oracle::to_cmatrix(oracle::random_isometry(rng, 4, 3));
    const auto d = decompose_v(v, 4, 3);
    const auto order = angle_order(4, 3);
    for (std::size_t i = 0; i < order.size(); ++i) {
        EXPECT_GE(d.angles[i], 0.0);
        EXPECT_LE(d.angles[i], order[i].kind == AngleKind::Phi ? 2 * kPi : kPi / 2);
    }
    for (double p : d.dtilde_phases) {
        EXPECT_GT(p, -kPi);
        EXPECT_LE(p, kPi);
    }
    EXPECT_THROW(decompose_v(v, 4, 2), Error);
    CMatrix bad = v;
    bad(0, 0) *= 2.0;
    try {
        decompose_v(bad, 4, 3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotIsometric);
    }
}

TEST(CompressCfr, IdentityChannel)
{
    const auto cc = compress_cfr(CMatrix::Identity(2, 2), 2);
    EXPECT_LT(isometry_defect(cc.v), 1e-12);
    EXPECT_NEAR(cc.singular_values(0), 1.0, 1e-12);
    EXPECT_NEAR(cc.singular_values(1), 1.0, 1e-12);
    EXPECT_FALSE(cc.rank_deficient);
}

TEST(CompressCfr, DiagonalPicksDominantMode)
{
    CMatrix h = CMatrix::Zero(2, 2);
    h(0, 0) = 2.0;
    h(1, 1) = 1.0;
    const auto cc = compress_cfr(h, 1);
    EXPECT_NEAR(cc.singular_values(0), 2.0, 1e-12);
    EXPECT_NEAR(std::abs(cc.v(0, 0)), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(cc.v(1, 0)), 0.0, 1e-12);
}

TEST(CompressCfr, RandomChannelIsRightSingularBasis)
{
    std::mt19937_64 rng(21);
    std::normal_distribution<double> g;
    CMatrix h(4, 2);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 2; ++c) h(r, c) = {g(rng), g(rng)};
    const auto cc = compress_cfr(h, 2);
    EXPECT_LT(isometry_defect(cc.v), 1e-12);
    EXPECT_GE(cc.singular_values(0), cc.singular_values(1));
    // H^T v_j has norm sigma_j and the columns of H^T V are orthogonal.
    const CMatrix hv = h.transpose() * cc.v;
    for (int j = 0; j < 2; ++j) EXPECT_NEAR(hv.col(j).norm(), cc.singular_values(j), 1e-10);
    EXPECT_NEAR(std::abs(hv.col(0).dot(hv.col(1))), 0.0, 1e-10);
    // Largest singular value from the Gram matrix eigenvalues.
    const Eigen::Matrix2cd gram = (h.adjoint() * h).eval();
    const double tr = gram.trace().real(), det = std::real(gram.determinant());
    EXPECT_NEAR(cc.singular_values(0), std::sqrt(tr / 2 + std::sqrt(tr * tr / 4 - det)), 1e-10);
}

TEST(CompressCfr, Errors)
{
    EXPECT_THROW(compress_cfr(CMatrix::Identity(2, 2), 3), Error);
    CMatrix h = CMatrix::Identity(2, 2);
    h(0, 1) = std::nan("");
    EXPECT_THROW(compress_cfr(h, 1), Error);
    EXPECT_TRUE(compress_cfr(CMatrix::Zero(3, 2), 1).rank_deficient);
}

// Reconstruction error from quantized versus exact angles.
TEST(QuantizedError, AnalyticBoundAndFrozenSample)
{
    std::mt19937_64 rng(2024);
    const QuantBits b{9, 7};
    const int m = 4, n = 2;
    const auto order = angle_order(m, n);
    const double bound = std::sqrt(double(n)) * (rotation_columns(m, n) * kPi / 512 + 5 * kPi / 512);
    double worst = 0;
    for (int t = 0; t < 2000; ++t) {
        const auto a = oracle::random_angles(rng, m, n);
        const auto q = dequantize(quantize(a, order, b), order, b);
        worst = std::max(worst, (reconstruct_vtilde(a, m, n) - reconstruct_vtilde(q, m, n)).norm());
    }
    EXPECT_LE(worst, bound);
    EXPECT_LE(worst, 0.025); // sampled worst case over 20000 draws was 0.0173
}

} // namespace
