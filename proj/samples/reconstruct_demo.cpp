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

// Reads a capture, reconstructs V~ for every stream and prints phi_11 and
// |V~[0][0]| of the first few sub-channels of the first report.
//
//   reconstruct_demo capture.pcap

#include <cstdio>
#include <fstream>
#include <iostream>

#include "bfa/bfa.hpp"

int main(int argc, char** argv)
{
    if (argc != 2) {
        std::fprintf(stderr, "usage: %s capture.pcap\n", argv[0]);
        return 2;
    }
    std::ifstream in(argv[1], std::ios::binary);
    try {
        const auto table = bfa::SubcarrierTable::load_default();
        const auto capture = bfa::read_capture(in);
        const auto session = bfa::group_frames(capture.records, table);
        for (const auto& t : bfa::assemble_tensors(session)) {
            std::printf("%s %s %d MHz: %d reports, K=%d, A=%d\n", t.key.source.to_string().c_str(),
                        std::string(bfa::to_string(t.key.standard)).c_str(), t.key.bandwidth_mhz, t.angles.frames,
                        t.angles.subcarriers, t.angles.angles);
            if (t.angles.frames == 0) continue;
            for (int k = 0; k < std::min(8, t.angles.subcarriers); ++k)
                std::printf("  k=%3d  phi11=%.4f  |v00|=%.4f\n", k, t.angles.at(0, k, 0), std::abs(t.vtilde.at(0, k, 0, 0)));
        }
    } catch (const bfa::Error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 1;
    }
    return 0;
}
