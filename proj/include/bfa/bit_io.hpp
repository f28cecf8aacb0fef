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
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bfa/error.hpp"

namespace bfa {

// LSB-first bit cursor: bit n of the stream is bit (n % 8) of byte n / 8.
class BitReader {
public:
    explicit BitReader(std::span<const std::uint8_t> bytes) noexcept : bytes_(bytes) {}

    std::size_t bits_left() const noexcept { return bytes_.size() * 8 - pos_; }
    std::size_t position() const noexcept { return pos_; }

    std::uint32_t read(int nbits)
    {
        if (nbits < 0 || nbits > 32) throw Error(ErrorKind::Malformed, "bad field width");
        if (static_cast<std::size_t>(nbits) > bits_left())
            throw Error(ErrorKind::TruncatedFrame, "bit field runs past the end of the payload");
        std::uint32_t value = 0;
        for (int b = 0; b < nbits;) {
            const std::size_t byte = pos_ >> 3;
            const int shift = static_cast<int>(pos_ & 7);
            const int take = std::min(8 - shift, nbits - b);
            const std::uint32_t chunk = (bytes_[byte] >> shift) & ((1u << take) - 1u);
            value |= chunk << b;
            b += take;
            pos_ += static_cast<std::size_t>(take);
        }
        return value;
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

class BitWriter {
public:
    void write(std::uint32_t value, int nbits)
    {
        for (int b = 0; b < nbits; ++b, ++pos_) {
            if ((pos_ & 7) == 0) bytes_.push_back(0);
            if ((value >> b) & 1u) bytes_.back() |= static_cast<std::uint8_t>(1u << (pos_ & 7));
        }
    }

    std::size_t bit_length() const noexcept { return pos_; }

    // Remaining bits of the last byte are already zero.
    std::vector<std::uint8_t> take() && { return std::move(bytes_); }

private:
    std::vector<std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

} // namespace bfa
