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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>

#include "bfa/core_model.hpp"

namespace bfa {

// Mirror of data/subcarriers.txt, used when no table file can be found.
inline constexpr std::string_view kBuiltinSubcarrierTable = R"(
vht  20  1   52
vht  20  2   30
vht  20  4   16
vht  40  1  108
vht  40  2   58
vht  40  4   30
vht  80  1  234
vht  80  2  122
vht  80  4   62
vht 160  1  468
vht 160  2  244
vht 160  4  124
he   20  4   64
he   20 16   20
he   40  4  122
he   40 16   32
he   80  4  250
he   80 16   64
he  160  4  500
he  160 16  128
)";

/// Maps (standard, bandwidth, grouping Ng) to the number K of fed-back
/// sub-channels.
///
/// Text grammar, one entry per line:
///
///     line    := ws* (entry ws*)? ('#' any*)?
///     entry   := standard ws+ bandwidth ws+ grouping ws+ count
///     standard:= "vht" | "he"
///
/// bandwidth, grouping and count are positive decimal integers. Duplicate
/// keys are legal; the last one wins.
class SubcarrierTable {
public:
    using Key = std::tuple<Standard, int, int>;

    SubcarrierTable() = default;

    static SubcarrierTable parse(std::istream& in, std::string_view origin = "<stream>")
    {
        SubcarrierTable table;
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            std::istringstream fields(line);
            std::string standard;
            if (!(fields >> standard)) continue;
            long bandwidth = 0, grouping = 0, count = 0;
            std::string extra;
            const auto where = std::string(origin) + ":" + std::to_string(line_no);
            if (!(fields >> bandwidth >> grouping >> count) || (fields >> extra))
                throw Error(ErrorKind::TableSyntax, where + ": expected '<standard> <bw> <ng> <K>'");
            if (bandwidth <= 0 || grouping <= 0 || count <= 0)
                throw Error(ErrorKind::TableSyntax, where + ": values must be positive");
            Standard s;
            try {
                s = parse_standard(standard);
            } catch (const Error&) {
                throw Error(ErrorKind::TableSyntax, where + ": unknown standard '" + standard + "'");
            }
            table.set(s, static_cast<int>(bandwidth), static_cast<int>(grouping), static_cast<int>(count));
        }
        return table;
    }

    static SubcarrierTable parse(std::string_view text, std::string_view origin = "<string>")
    {
        std::istringstream in{std::string(text)};
        return parse(in, origin);
    }

    static SubcarrierTable load_file(const std::filesystem::path& path)
    {
        std::ifstream in(path);
        if (!in) throw Error(ErrorKind::IoFailure, "cannot open subcarrier table " + path.string());
        return parse(in, path.string());
    }

    static SubcarrierTable builtin() { return parse(kBuiltinSubcarrierTable, "<builtin>"); }

    /// Resolution order: $WIBFI_TABLES, then the shipped data file (when the
    /// build recorded its location), then the built-in copy.
    static SubcarrierTable load_default()
    {
        if (const char* env = std::getenv("WIBFI_TABLES"); env && *env) return load_file(env);
#ifdef BFA_DEFAULT_TABLE_PATH
        if (std::error_code ec; std::filesystem::exists(BFA_DEFAULT_TABLE_PATH, ec))
            return load_file(BFA_DEFAULT_TABLE_PATH);
#endif
        return builtin();
    }

    void set(Standard s, int bandwidth_mhz, int grouping_ng, int count)
    {
        entries_[Key{s, bandwidth_mhz, grouping_ng}] = count;
    }

    bool contains(Standard s, int bandwidth_mhz, int grouping_ng) const
    {
        return entries_.count(Key{s, bandwidth_mhz, grouping_ng}) != 0;
    }

    int count(Standard s, int bandwidth_mhz, int grouping_ng) const
    {
        auto it = entries_.find(Key{s, bandwidth_mhz, grouping_ng});
        if (it == entries_.end())
            throw Error(ErrorKind::UnknownConfiguration,
                        "no subcarrier count for " + std::string(to_string(s)) + " " + std::to_string(bandwidth_mhz) +
                            " MHz Ng=" + std::to_string(grouping_ng) + "; extend the subcarrier table");
        return it->second;
    }

    const std::map<Key, int>& entries() const noexcept { return entries_; }

    std::string to_text() const
    {
        std::ostringstream out;
        out << "# standard bandwidth_mhz grouping_ng K\n";
        for (const auto& [key, k] : entries_)
            out << to_string(std::get<0>(key)) << ' ' << std::get<1>(key) << ' ' << std::get<2>(key) << ' ' << k
                << '\n';
        return out.str();
    }

    friend bool operator==(const SubcarrierTable&, const SubcarrierTable&) = default;

private:
    std::map<Key, int> entries_;
};

inline int subcarrier_count(const SubcarrierTable& table, Standard s, int bandwidth_mhz, int grouping_ng)
{
    return table.count(s, bandwidth_mhz, grouping_ng);
}

inline int subcarrier_count(const SubcarrierTable& table, const MimoConfig& c)
{
    return table.count(c.standard, c.bandwidth_mhz, c.grouping_ng);
}

} // namespace bfa
