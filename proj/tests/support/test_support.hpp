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

// Test-only oracles. Nothing here calls into the reconstruction,
// decomposition or quantizer code paths it is used to check.

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bfa/bfa.hpp"

namespace bfa::oracle {

using Dense = Eigen::MatrixXcd;

// Expected angle count and order for the 2..4 antenna configurations.
struct TableRow {
    int m, n, count;
    std::vector<std::string> order;
};

inline const std::vector<TableRow>& reference_table()
{
    static const std::vector<TableRow> rows{
        {2, 1, 2, {"phi11", "psi21"}},
        {2, 2, 2, {"phi11", "psi21"}},
        {3, 1, 4, {"phi11", "phi21", "psi21", "psi31"}},
        {3, 2, 6, {"phi11", "phi21", "psi21", "psi31", "phi22", "psi32"}},
        {3, 3, 6, {"phi11", "phi21", "psi21", "psi31", "phi22", "psi32"}},
        {4, 1, 6, {"phi11", "phi21", "phi31", "psi21", "psi31", "psi41"}},
        {4, 2, 10, {"phi11", "phi21", "phi31", "psi21", "psi31", "psi41", "phi22", "phi32", "psi32", "psi42"}},
        {4, 3, 12, {"phi11", "phi21", "phi31", "psi21", "psi31", "psi41", "phi22", "phi32", "psi32", "psi42", "phi33",
                    "psi43"}},
        {4, 4, 12, {"phi11", "phi21", "phi31", "psi21", "psi31", "psi41", "phi22", "phi32", "psi32", "psi42", "phi33",
                    "psi43"}},
    };
    return rows;
}

// Product of explicit M x M factors, angles looked up by name.
inline Dense brute_force_vtilde(const std::vector<double>& angles, int m, int n)
{
    std::vector<std::string> names;
    for (int i = 1; i <= std::min(n, m - 1); ++i) {
        for (int l = i; l <= m - 1; ++l) names.push_back("phi" + std::to_string(l) + std::to_string(i));
        for (int l = i + 1; l <= m; ++l) names.push_back("psi" + std::to_string(l) + std::to_string(i));
    }
    auto get = [&](const std::string& name) {
        for (std::size_t a = 0; a < names.size(); ++a)
            if (names[a] == name) return angles.at(a);
        throw std::logic_error("missing angle " + name);
    };
    Dense prod = Dense::Identity(m, m);
    for (int i = 1; i <= std::min(n, m - 1); ++i) {
        Dense d = Dense::Identity(m, m);
        for (int l = i; l <= m - 1; ++l)
            d(l - 1, l - 1) = std::exp(std::complex<double>(0, get("phi" + std::to_string(l) + std::to_string(i))));
        prod = prod * d;
        for (int l = i + 1; l <= m; ++l) {
            const double psi = get("psi" + std::to_string(l) + std::to_string(i));
            Dense g = Dense::Identity(m, m);
            g(i - 1, i - 1) = std::cos(psi);
            g(i - 1, l - 1) = std::sin(psi);
            g(l - 1, i - 1) = -std::sin(psi);
            g(l - 1, l - 1) = std::cos(psi);
            prod = prod * g.transpose();
        }
    }
    return prod.leftCols(n);
}

// Random isometry by modified Gram-Schmidt on complex Gaussian columns.
inline Dense random_isometry(std::mt19937_64& rng, int m, int n)
{
    std::normal_distribution<double> g;
    Dense q(m, n);
    for (;;) {
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < n; ++c) q(r, c) = {g(rng), g(rng)};
        bool ok = true;
        for (int c = 0; c < n && ok; ++c) {
            for (int p = 0; p < c; ++p) q.col(c) -= q.col(p).dot(q.col(c)) * q.col(p);
            for (int p = 0; p < c; ++p) q.col(c) -= q.col(p).dot(q.col(c)) * q.col(p);
            const double norm = q.col(c).norm();
            if (norm < 1e-6) ok = false;
            else q.col(c) /= norm;
        }
        if (ok) return q;
    }
}

// Random angles in the open report ranges, psi kept `margin` from the ends.
inline std::vector<double> random_angles(std::mt19937_64& rng, int m, int n, double margin = 1e-6)
{
    std::uniform_real_distribution<double> phi(margin, 2 * std::numbers::pi - margin);
    std::uniform_real_distribution<double> psi(margin, std::numbers::pi / 2 - margin);
    std::vector<double> out;
    for (int i = 1; i <= std::min(n, m - 1); ++i) {
        for (int l = i; l <= m - 1; ++l) out.push_back(phi(rng));
        for (int l = i + 1; l <= m; ++l) out.push_back(psi(rng));
    }
    return out;
}

inline double phi_grid(int q, int b) { return std::numbers::pi * (1.0 / std::pow(2, b) + q / std::pow(2, b - 1)); }
inline double psi_grid(int q, int b) { return std::numbers::pi * (1.0 / std::pow(2, b + 2) + q / std::pow(2, b + 1)); }

inline int brute_nearest_phi(double x, int b)
{
    int best = 0;
    double best_d = 1e9;
    for (int q = 0; q < (1 << b); ++q) {
        const double d = std::abs(std::arg(std::polar(1.0, phi_grid(q, b) - x)));
        if (d < best_d) best_d = d, best = q;
    }
    return best;
}

inline int brute_nearest_psi(double x, int b)
{
    int best = 0;
    double best_d = 1e9;
    for (int q = 0; q < (1 << b); ++q) {
        const double d = std::abs(psi_grid(q, b) - x);
        if (d < best_d) best_d = d, best = q;
    }
    return best;
}

inline CMatrix to_cmatrix(const Dense& d) { return d; }

// A random but internally consistent report for `config`.
inline BfaFrame random_frame(std::mt19937_64& rng, const MimoConfig& c, int codebook, const SubcarrierTable& table)
{
    std::uniform_int_distribution<int> byte(0, 255);
    BfaFrame f;
    f.standard = c.standard;
    f.mimo.nc = c.n_cols;
    f.mimo.nr = c.n_rows;
    f.mimo.bandwidth_mhz = c.bandwidth_mhz;
    f.mimo.grouping_ng = c.grouping_ng;
    f.mimo.codebook = codebook;
    f.mimo.feedback = c.feedback == Feedback::MU ? FeedbackType::MU : FeedbackType::SU;
    f.mimo.sounding_token = byte(rng) % 64;
    if (c.standard == Standard::HE) {
        f.mimo.ru_start = byte(rng) % 128;
        f.mimo.ru_end = byte(rng) % 128;
        f.mimo.disambiguation = byte(rng) & 1;
    }
    f.subcarriers = table.count(c.standard, c.bandwidth_mhz, c.grouping_ng);
    f.angles_per_subcarrier = angle_count(c);
    const QuantBits bits = quant_bits(c, codebook);
    const auto order = angle_order(c);
    for (int k = 0; k < f.subcarriers; ++k)
        for (const auto& id : order)
            f.q_angles.push_back(static_cast<std::uint16_t>(
                std::uniform_int_distribution<int>(0, (1 << bits_for(id.kind, bits)) - 1)(rng)));
    for (int s = 0; s < c.n_cols; ++s) f.snr.push_back(static_cast<std::int8_t>(byte(rng) - 128));
    for (auto* mac : {&f.mgmt.destination, &f.mgmt.source, &f.mgmt.bssid})
        for (auto& o : mac->octets) o = static_cast<std::uint8_t>(byte(rng));
    f.mgmt.duration = static_cast<std::uint16_t>(byte(rng) << 8 | byte(rng));
    f.mgmt.sequence_control = static_cast<std::uint16_t>(byte(rng) << 8 | byte(rng));
    if (byte(rng) & 1) {
        f.mgmt.frame_control |= wire::kFrameControlOrder;
        f.mgmt.ht_control = static_cast<std::uint32_t>(byte(rng)) << 24 | static_cast<std::uint32_t>(byte(rng));
    }
    const int trailing = byte(rng) % 5;
    for (int t = 0; t < trailing; ++t) f.trailing.push_back(static_cast<std::uint8_t>(byte(rng)));
    f.radiotap = make_radiotap(static_cast<std::uint64_t>(byte(rng)) << 20, 5180, -50,
                               (byte(rng) & 1) ? wire::kRadiotapFlagFcs : 0);
    return f;
}

// Every valid (config, codebook) pair present in `table`.
inline std::vector<std::pair<MimoConfig, int>> all_configs(const SubcarrierTable& table, int max_rows = 8)
{
    std::vector<std::pair<MimoConfig, int>> out;
    for (const auto& [key, k] : table.entries()) {
        (void)k;
        for (int m = 2; m <= max_rows; ++m)
            for (int n = 1; n <= m; ++n)
                for (auto fb : {Feedback::SU, Feedback::MU})
                    for (int cb : {0, 1}) {
                        MimoConfig c{std::get<0>(key), std::get<1>(key), m, n, fb, std::get<2>(key)};
                        out.emplace_back(c, cb);
                    }
    }
    return out;
}

} // namespace bfa::oracle
