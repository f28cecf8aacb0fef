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

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "bfa/angle_codec.hpp"

namespace bfa {

using cdouble = std::complex<double>;

// Heap-free complex matrix, at most 8x8 (all beamforming shapes fit).
using CMatrix = Eigen::Matrix<cdouble, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 8, 8>;

struct Decomposition {
    AngleSet angles;                 // report order
    std::vector<double> dtilde_phases; // N_SS phases in (-pi, pi]
};

struct CompressedChannel {
    CMatrix v;                      // M x N_SS
    Eigen::VectorXd singular_values; // descending, min(M, N) entries
    bool rank_deficient = false;    // a kept singular value fell below 1e-12
};

inline constexpr double kIsometryTolerance = 1e-9;
inline constexpr double kRankTolerance = 1e-12;

namespace detail {

// Maps an arg() result into (-pi, pi].
inline double principal_phase(double a) { return a <= -std::numbers::pi ? a + 2.0 * std::numbers::pi : a; }

inline double wrap_two_pi(double a)
{
    a = std::fmod(a, 2.0 * std::numbers::pi);
    return a < 0.0 ? a + 2.0 * std::numbers::pi : a;
}

// Left-multiply rows r1, r2 of m by the real rotation [[c, s], [-s, c]].
inline void rotate_rows(CMatrix& m, int r1, int r2, double c, double s)
{
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        const cdouble a = m(r1, j), b = m(r2, j);
        m(r1, j) = c * a + s * b;
        m(r2, j) = -s * a + c * b;
    }
}

} // namespace detail

/// D_i: identity except entries (l, l) = exp(j phi_{l,i}) for l = i..M-1.
/// `phis` holds phi_{i,i} .. phi_{M-1,i}; indices here are 1-based like the
/// angle names.
inline CMatrix d_matrix(int n_rows, int col, std::span<const double> phis)
{
    CMatrix d = CMatrix::Identity(n_rows, n_rows);
    for (std::size_t t = 0; t < phis.size(); ++t) {
        const auto l = static_cast<Eigen::Index>(col - 1 + static_cast<int>(t));
        d(l, l) = std::polar(1.0, phis[t]);
    }
    return d;
}

/// G_{l,i}: identity except the (i, l) plane, [[cos, sin], [-sin, cos]].
inline CMatrix g_matrix(int n_rows, int row, int col, double psi)
{
    CMatrix g = CMatrix::Identity(n_rows, n_rows);
    const double c = std::cos(psi), s = std::sin(psi);
    g(col - 1, col - 1) = c;
    g(col - 1, row - 1) = s;
    g(row - 1, col - 1) = -s;
    g(row - 1, row - 1) = c;
    return g;
}

/// Rebuilds V~ = prod_i (D_i prod_l G_{l,i}^T) I_{M x N_SS} from report-ordered
/// angles. The result has orthonormal columns and a real non-negative last row.
inline CMatrix reconstruct_vtilde(std::span<const double> angles, int n_rows, int n_cols)
{
    if (static_cast<int>(angles.size()) != angle_count(n_rows, n_cols))
        throw Error(ErrorKind::ShapeMismatch, "expected " + std::to_string(angle_count(n_rows, n_cols)) +
                                                  " angles for " + std::to_string(n_rows) + "x" +
                                                  std::to_string(n_cols) + ", got " + std::to_string(angles.size()));
    // Apply the factors right-to-left to the generalized identity so the
    // product never needs a full M x M accumulator.
    CMatrix v = CMatrix::Identity(n_rows, n_cols);
    const int stages = rotation_columns(n_rows, n_cols);

    // Offsets of each stage's block of angles inside the report.
    std::vector<std::size_t> offset(static_cast<std::size_t>(stages) + 1, 0);
    for (int i = 1; i <= stages; ++i) offset[static_cast<std::size_t>(i)] = offset[i - 1] + 2 * (n_rows - i);

    for (int i = stages; i >= 1; --i) {
        const std::size_t base = offset[static_cast<std::size_t>(i - 1)];
        const std::size_t n_phi = static_cast<std::size_t>(n_rows - i);
        for (int l = n_rows; l >= i + 1; --l) {
            const double psi = angles[base + n_phi + static_cast<std::size_t>(l - i - 1)];
            // G^T acts as [[c, -s], [s, c]] on rows (i, l).
            detail::rotate_rows(v, i - 1, l - 1, std::cos(psi), -std::sin(psi));
        }
        for (std::size_t t = 0; t < n_phi; ++t) v.row(static_cast<Eigen::Index>(i - 1 + static_cast<int>(t))) *=
            std::polar(1.0, angles[base + t]);
    }
    return v;
}

inline CMatrix reconstruct_vtilde(std::span<const double> angles, const MimoConfig& c)
{
    return reconstruct_vtilde(angles, c.n_rows, c.n_cols);
}

inline double isometry_defect(const CMatrix& v)
{
    const auto n = v.cols();
    return (v.adjoint() * v - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
}

/// Givens decomposition of an M x N_SS isometry into report-ordered angles
/// plus the discarded per-column phases of its last row.
inline Decomposition decompose_v(const CMatrix& v, int n_rows, int n_cols)
{
    if (v.rows() != n_rows || v.cols() != n_cols)
        throw Error(ErrorKind::ShapeMismatch, "matrix is " + std::to_string(v.rows()) + "x" +
                                                  std::to_string(v.cols()) + ", config wants " +
                                                  std::to_string(n_rows) + "x" + std::to_string(n_cols));
    if (!v.allFinite() || isometry_defect(v) > kIsometryTolerance)
        throw Error(ErrorKind::NotIsometric, "columns are not orthonormal within 1e-9");

    Decomposition out;
    out.angles.reserve(static_cast<std::size_t>(angle_count(n_rows, n_cols)));
    out.dtilde_phases.resize(static_cast<std::size_t>(n_cols));

    CMatrix omega = v;
    for (int j = 0; j < n_cols; ++j) {
        const double phase = detail::principal_phase(std::arg(v(n_rows - 1, j)));
        out.dtilde_phases[static_cast<std::size_t>(j)] = phase;
        omega.col(j) *= std::polar(1.0, -phase);
    }

    for (int i = 1; i <= rotation_columns(n_rows, n_cols); ++i) {
        for (int l = i; l <= n_rows - 1; ++l) {
            const double phi = detail::wrap_two_pi(std::arg(omega(l - 1, i - 1)));
            out.angles.push_back(phi);
            omega.row(l - 1) *= std::polar(1.0, -phi);
        }
        for (int l = i + 1; l <= n_rows; ++l) {
            const double x = omega(i - 1, i - 1).real();
            const double y = omega(l - 1, i - 1).real();
            const double r = std::sqrt(x * x + y * y);
            const double psi = r == 0.0 ? 0.0 : std::acos(std::clamp(x / r, -1.0, 1.0));
            out.angles.push_back(psi);
            detail::rotate_rows(omega, i - 1, l - 1, std::cos(psi), std::sin(psi));
        }
    }
    return out;
}

inline Decomposition decompose_v(const CMatrix& v, const MimoConfig& c) { return decompose_v(v, c.n_rows, c.n_cols); }

/// Beamforming matrix for one sub-channel: the first N_SS right singular
/// vectors Z of H^T = U S Z^H, singular values descending.
inline CompressedChannel compress_cfr(const CMatrix& h, int n_ss)
{
    const auto m = h.rows(), n = h.cols();
    if (n_ss < 1 || n_ss > std::min(m, n))
        throw Error(ErrorKind::ShapeMismatch, "n_ss=" + std::to_string(n_ss) + " exceeds min(M, N) for a " +
                                                  std::to_string(m) + "x" + std::to_string(n) + " channel");
    if (!h.allFinite()) throw Error(ErrorKind::DomainError, "channel matrix has non-finite entries");

    const CMatrix ht = h.transpose();
    Eigen::JacobiSVD<CMatrix, Eigen::FullPivHouseholderQRPreconditioner> svd(ht, Eigen::ComputeFullV);
    CompressedChannel out;
    out.v = svd.matrixV().leftCols(n_ss);
    out.singular_values = svd.singularValues();
    out.rank_deficient = out.singular_values(n_ss - 1) < kRankTolerance;
    return out;
}

} // namespace bfa
