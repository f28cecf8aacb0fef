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
#include <compare>
#include <string>
#include <string_view>

#include "bfa/error.hpp"

namespace bfa {

enum class Standard { VHT, HE };
enum class Feedback { SU, MU };

constexpr std::string_view to_string(Standard s) noexcept { return s == Standard::VHT ? "vht" : "he"; }
constexpr std::string_view to_string(Feedback f) noexcept { return f == Feedback::SU ? "su" : "mu"; }

inline Standard parse_standard(std::string_view text)
{
    if (text == "vht" || text == "VHT" || text == "11ac") return Standard::VHT;
    if (text == "he" || text == "HE" || text == "11ax") return Standard::HE;
    throw Error(ErrorKind::InvalidConfig, "unknown standard '" + std::string(text) + "'");
}

constexpr bool is_valid_bandwidth(int mhz) noexcept
{
    return mhz == 20 || mhz == 40 || mhz == 80 || mhz == 160;
}

// Grouping factor used when the MIMO control grouping subfield is zero.
constexpr int default_grouping(Standard s) noexcept { return s == Standard::VHT ? 1 : 4; }

/// Shape-defining parameters of one compressed beamforming report.
///
/// `n_rows` is M (beamformer transmit antennas), `n_cols` is N_SS (fed-back
/// spatial streams). `grouping_ng` is the subcarrier grouping factor Ng
/// itself (1/2/4 for VHT, 4/16 for HE), not the on-air subfield index.
struct MimoConfig {
    Standard standard = Standard::HE;
    int bandwidth_mhz = 160;
    int n_rows = 4;
    int n_cols = 2;
    Feedback feedback = Feedback::SU;
    int grouping_ng = 4;

    friend bool operator==(const MimoConfig&, const MimoConfig&) = default;
};

inline void validate(const MimoConfig& c)
{
    if (c.n_cols < 1 || c.n_rows > 8 || c.n_cols > c.n_rows)
        throw Error(ErrorKind::InvalidConfig, "require 1 <= N_SS <= M <= 8, got M=" + std::to_string(c.n_rows) +
                                                  " N_SS=" + std::to_string(c.n_cols));
    if (!is_valid_bandwidth(c.bandwidth_mhz))
        throw Error(ErrorKind::InvalidConfig, "bandwidth must be 20/40/80/160 MHz, got " +
                                                  std::to_string(c.bandwidth_mhz));
    const bool ng_ok = c.standard == Standard::VHT
                           ? (c.grouping_ng == 1 || c.grouping_ng == 2 || c.grouping_ng == 4)
                           : (c.grouping_ng == 4 || c.grouping_ng == 16);
    if (!ng_ok)
        throw Error(ErrorKind::InvalidConfig, "grouping Ng=" + std::to_string(c.grouping_ng) + " invalid for " +
                                                  std::string(to_string(c.standard)));
}

// Number of Givens column stages, min(N_SS, M-1).
constexpr int rotation_columns(int n_rows, int n_cols) noexcept { return std::min(n_cols, n_rows - 1); }

constexpr int angle_count(int n_rows, int n_cols) noexcept
{
    int total = 0;
    for (int i = 1; i <= rotation_columns(n_rows, n_cols); ++i) total += 2 * (n_rows - i);
    return total;
}

constexpr int angle_count(const MimoConfig& c) noexcept { return angle_count(c.n_rows, c.n_cols); }

struct QuantBits {
    int b_phi = 9;
    int b_psi = 7;

    friend bool operator==(const QuantBits&, const QuantBits&) = default;
};

/// Bit widths signalled by the codebook-information subfield.
/// SU: 0 -> (4,2), 1 -> (6,4). MU: 0 -> (7,5), 1 -> (9,7).
constexpr QuantBits quant_bits(Feedback feedback, int codebook_bit)
{
    if (codebook_bit != 0 && codebook_bit != 1)
        throw Error(ErrorKind::InvalidConfig, "codebook bit must be 0 or 1");
    const int b_phi = feedback == Feedback::SU ? (codebook_bit ? 6 : 4) : (codebook_bit ? 9 : 7);
    return {b_phi, b_phi - 2};
}

constexpr QuantBits quant_bits(const MimoConfig& c, int codebook_bit) { return quant_bits(c.feedback, codebook_bit); }

enum class AngleKind { Phi, Psi };

/// One rotation angle, 1-based (row, col) as in phi_{row,col} / psi_{row,col}.
struct AngleId {
    AngleKind kind = AngleKind::Phi;
    int row = 1;
    int col = 1;

    friend auto operator<=>(const AngleId&, const AngleId&) = default;

    std::string name() const
    {
        return std::string(kind == AngleKind::Phi ? "phi" : "psi") + std::to_string(row) + std::to_string(col);
    }
};

} // namespace bfa
