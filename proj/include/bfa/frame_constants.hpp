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

// On-air constants for compressed beamforming report frames. Field offsets
// are bit positions within the little-endian MIMO Control field.

#pragma once

#include <cstddef>
#include <cstdint>

namespace bfa::wire {

// pcap (https://www.tcpdump.org/manpages/pcap-savefile.5.txt)
inline constexpr std::uint32_t kPcapMagicMicro = 0xa1b2c3d4;
inline constexpr std::uint32_t kPcapMagicNano = 0xa1b23c4d;
inline constexpr std::uint32_t kPcapngMagic = 0x0a0d0d0a;
inline constexpr std::uint32_t kLinkTypeRadiotap = 127; // LINKTYPE_IEEE802_11_RADIOTAP
inline constexpr std::uint32_t kLinkTypeEthernet = 1;
inline constexpr std::size_t kPcapGlobalHeaderSize = 24;
inline constexpr std::size_t kPcapRecordHeaderSize = 16;

// Radiotap (https://www.radiotap.org/fields/defined)
inline constexpr std::size_t kRadiotapMinLength = 8;
inline constexpr int kRadiotapTsft = 0;
inline constexpr int kRadiotapFlags = 1;
inline constexpr int kRadiotapChannel = 3;
inline constexpr int kRadiotapDbmAntSignal = 5;
inline constexpr int kRadiotapExtBit = 31;
inline constexpr std::uint8_t kRadiotapFlagFcs = 0x10; // frame includes FCS

// IEEE 802.11 frame control: type 0 (management), subtype 14 (Action No Ack)
inline constexpr int kTypeManagement = 0;
inline constexpr int kSubtypeActionNoAck = 14;
inline constexpr std::uint16_t kFrameControlOrder = 0x8000; // +HTC present on management frames
inline constexpr std::size_t kMgmtHeaderSize = 24;
inline constexpr std::size_t kHtControlSize = 4;
inline constexpr std::size_t kFcsSize = 4;

// IEEE 802.11 Action frame Category values: VHT = 21 (802.11ac),
// HE = 30 (802.11ax).
inline constexpr std::uint8_t kCategoryVht = 21;
inline constexpr std::uint8_t kCategoryHe = 30;
// VHT Action 0: VHT Compressed Beamforming. HE Action 0: HE Compressed
// Beamforming And CQI.
inline constexpr std::uint8_t kActionVhtCompressedBeamforming = 0;
inline constexpr std::uint8_t kActionHeCompressedBeamforming = 0;

// VHT MIMO Control, 24 bits.
namespace vht {
inline constexpr std::size_t kSize = 3;
inline constexpr int kNcIndex = 0, kNcIndexBits = 3;
inline constexpr int kNrIndex = 3, kNrIndexBits = 3;
inline constexpr int kChannelWidth = 6, kChannelWidthBits = 2;
inline constexpr int kGrouping = 8, kGroupingBits = 2;
inline constexpr int kCodebook = 10;
inline constexpr int kFeedbackType = 11, kFeedbackTypeBits = 1;
inline constexpr int kRemainingSegments = 12, kRemainingSegmentsBits = 3;
inline constexpr int kFirstSegment = 15;
inline constexpr int kReserved = 16, kReservedBits = 2;
inline constexpr int kSoundingToken = 18, kSoundingTokenBits = 6;
} // namespace vht

// HE MIMO Control, 40 bits.
namespace he {
inline constexpr std::size_t kSize = 5;
inline constexpr int kNcIndex = 0, kNcIndexBits = 3;
inline constexpr int kNrIndex = 3, kNrIndexBits = 3;
inline constexpr int kChannelWidth = 6, kChannelWidthBits = 2;
inline constexpr int kGrouping = 8, kGroupingBits = 1;
inline constexpr int kCodebook = 9;
inline constexpr int kFeedbackType = 10, kFeedbackTypeBits = 2;
inline constexpr int kRemainingSegments = 12, kRemainingSegmentsBits = 3;
inline constexpr int kFirstSegment = 15;
inline constexpr int kRuStart = 16, kRuIndexBits = 7;
inline constexpr int kRuEnd = 23;
inline constexpr int kSoundingToken = 30, kSoundingTokenBits = 6;
inline constexpr int kDisambiguation = 36;
inline constexpr int kReserved = 37, kReservedBits = 3;
} // namespace he

// Average SNR of a space-time stream: signed 8-bit, 0.25 dB steps, 0 = 22 dB.
inline constexpr double kSnrOffsetDb = 22.0;
inline constexpr double kSnrStepDb = 0.25;

} // namespace bfa::wire
