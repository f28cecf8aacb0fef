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
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "bfa/core_model.hpp"

namespace bfa {

using AngleOrder = std::vector<AngleId>;
using AngleSet = std::vector<double>;            // radians, aligned with AngleOrder
using QuantizedAngles = std::vector<std::uint16_t>; // grid indices, aligned with AngleOrder

/// Report order of the angles: for each column stage i, the phi_{l,i}
/// (l = i..M-1) followed by the psi_{l,i} (l = i+1..M).
inline AngleOrder angle_order(int n_rows, int n_cols)
{
    AngleOrder order;
    order.reserve(static_cast<std::size_t>(angle_count(n_rows, n_cols)));
    for (int i = 1; i <= rotation_columns(n_rows, n_cols); ++i) {
        for (int l = i; l <= n_rows - 1; ++l) order.push_back({AngleKind::Phi, l, i});
        for (int l = i + 1; l <= n_rows; ++l) order.push_back({AngleKind::Psi, l, i});
    }
    return order;
}

inline AngleOrder angle_order(const MimoConfig& c) { return angle_order(c.n_rows, c.n_cols); }

constexpr int bits_for(AngleKind kind, const QuantBits& bits) noexcept
{
    return kind == AngleKind::Phi ? bits.b_phi : bits.b_psi;
}

constexpr std::uint32_t grid_size(int nbits) noexcept { return std::uint32_t{1} << nbits; }

// phi = pi * (2^-b + q * 2^-(b-1)), spanning (0, 2pi).
inline double dequantize_phi(std::uint32_t q, int b_phi)
{
    if (q >= grid_size(b_phi))
        throw Error(ErrorKind::IndexOutOfRange, "phi index " + std::to_string(q) + " needs more than " +
                                                    std::to_string(b_phi) + " bits");
    return std::numbers::pi * (std::ldexp(1.0, -b_phi) + std::ldexp(static_cast<double>(q), -(b_phi - 1)));
}

// psi = pi * (2^-(b+2) + q * 2^-(b+1)), spanning (0, pi/2).
inline double dequantize_psi(std::uint32_t q, int b_psi)
{
    if (q >= grid_size(b_psi))
        throw Error(ErrorKind::IndexOutOfRange, "psi index " + std::to_string(q) + " needs more than " +
                                                    std::to_string(b_psi) + " bits");
    return std::numbers::pi * (std::ldexp(1.0, -(b_psi + 2)) + std::ldexp(static_cast<double>(q), -(b_psi + 1)));
}

/// Nearest phi grid index under the circular metric.
inline std::uint32_t quantize_phi(double phi, int b_phi)
{
    if (!std::isfinite(phi)) throw Error(ErrorKind::DomainError, "phi is not finite");
    const double wrapped = phi - 2.0 * std::numbers::pi * std::floor(phi / (2.0 * std::numbers::pi));
    const double pos = std::ldexp(wrapped / std::numbers::pi - std::ldexp(1.0, -b_phi), b_phi - 1);
    const auto n = static_cast<std::int64_t>(grid_size(b_phi));
    auto q = static_cast<std::int64_t>(std::llround(pos)) % n;
    if (q < 0) q += n;
    return static_cast<std::uint32_t>(q);
}

/// Nearest psi grid index, clamped to the grid ends.
inline std::uint32_t quantize_psi(double psi, int b_psi)
{
    const double step = std::ldexp(std::numbers::pi, -(b_psi + 1));
    if (!(psi > -step && psi < std::numbers::pi / 2 + step))
        throw Error(ErrorKind::DomainError, "psi " + std::to_string(psi) + " is outside (0, pi/2)");
    const double pos = std::ldexp(psi / std::numbers::pi - std::ldexp(1.0, -(b_psi + 2)), b_psi + 1);
    const auto top = static_cast<std::int64_t>(grid_size(b_psi)) - 1;
    return static_cast<std::uint32_t>(std::clamp<std::int64_t>(std::llround(pos), 0, top));
}

inline AngleSet dequantize(std::span<const std::uint16_t> q, std::span<const AngleId> order, const QuantBits& bits)
{
    if (q.size() != order.size())
        throw Error(ErrorKind::ShapeMismatch, "got " + std::to_string(q.size()) + " indices for " +
                                                  std::to_string(order.size()) + " angles");
    AngleSet out(q.size());
    for (std::size_t a = 0; a < q.size(); ++a)
        out[a] = order[a].kind == AngleKind::Phi ? dequantize_phi(q[a], bits.b_phi) : dequantize_psi(q[a], bits.b_psi);
    return out;
}

inline QuantizedAngles quantize(std::span<const double> angles, std::span<const AngleId> order, const QuantBits& bits)
{
    if (angles.size() != order.size())
        throw Error(ErrorKind::ShapeMismatch, "got " + std::to_string(angles.size()) + " angles for an order of " +
                                                  std::to_string(order.size()));
    QuantizedAngles out(angles.size());
    for (std::size_t a = 0; a < angles.size(); ++a)
        out[a] = static_cast<std::uint16_t>(order[a].kind == AngleKind::Phi ? quantize_phi(angles[a], bits.b_phi)
                                                                            : quantize_psi(angles[a], bits.b_psi));
    return out;
}

// Worst-case reconstruction error of a single angle after quantization.
inline double max_quantization_error(AngleKind kind, const QuantBits& bits)
{
    return kind == AngleKind::Phi ? std::ldexp(std::numbers::pi, -bits.b_phi)
                                  : std::ldexp(std::numbers::pi, -(bits.b_psi + 2));
}

// Distance on the circle, in [0, pi].
inline double circular_distance(double a, double b)
{
    double d = std::fmod(std::abs(a - b), 2.0 * std::numbers::pi);
    return d > std::numbers::pi ? 2.0 * std::numbers::pi - d : d;
}

} // namespace bfa
