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

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bfa/bfa.hpp"

namespace bfa::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitUsage = 2;

struct Io {
    std::istream& in = std::cin;
    std::ostream& out = std::cout;
    std::ostream& err = std::cerr;
};

inline void report_error(std::ostream& err, std::string_view kind, std::string_view message)
{
    err << "error: kind=" << kind << " message=" << nlohmann::json(std::string(message)).dump() << '\n';
}

/// "he160-4x2" -> HE, 160 MHz, M=4, N_SS=2.
inline MimoConfig parse_config_name(const std::string& name)
{
    static const std::regex pattern(R"(^(vht|he)(20|40|80|160)-([1-8])x([1-8])$)");
    std::smatch m;
    if (!std::regex_match(name, m, pattern))
        throw Error(ErrorKind::InvalidConfig, "config '" + name + "' is not of the form vht80-3x1 / he160-4x2");
    MimoConfig c;
    c.standard = parse_standard(m[1].str());
    c.bandwidth_mhz = std::stoi(m[2].str());
    c.n_rows = std::stoi(m[3].str());
    c.n_cols = std::stoi(m[4].str());
    c.grouping_ng = default_grouping(c.standard);
    validate(c);
    return c;
}

struct ExtractArgs {
    std::string input;
    std::string standard;
    int bandwidth = 0;
    std::string mac;
    std::string out_dir = "bfa_out";
    std::string format = "bin";
    bool images = false;
    bool follow = false;
    double idle_timeout = 0.0;
};

inline void flush_session(const CaptureSession& session, const ExtractArgs& args, std::ostream& out, bool announce)
{
    const std::filesystem::path root(args.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(root, ec);
    if (ec) throw Error(ErrorKind::IoFailure, "cannot create " + root.string() + ": " + ec.message());

    BundleOptions opt;
    opt.format = args.format == "csv" ? AngleFormat::Csv : AngleFormat::Binary;
    opt.images = args.images;

    SkipReport report = session.skipped();
    const auto tensors = assemble_tensors(session);
    std::string summary = "records " + std::to_string(session.total_records()) + "\n";
    std::size_t kept = 0;
    for (std::size_t i = 0; i < tensors.size(); ++i) {
        const auto& t = tensors[i];
        const std::string name = stream_directory_name(i, t);
        write_bundle(root / name, t, opt);
        for (const auto& [reason, n] : t.dropped.counts) report.add(reason, n);
        kept += static_cast<std::size_t>(t.angles.frames);
        if (announce)
            out << "stream " << name << " frames=" << t.angles.frames << " subcarriers=" << t.angles.subcarriers
                << " angles=" << t.angles.angles << " vtilde=" << t.vtilde.frames << "x" << t.vtilde.subcarriers
                << "x" << t.vtilde.rows << "x" << t.vtilde.cols << '\n';
    }
    summary += "streams " + std::to_string(tensors.size()) + "\n";
    summary += "frames " + std::to_string(kept) + "\n";
    for (const auto& [reason, n] : report.counts) summary += "skipped " + reason + " " + std::to_string(n) + "\n";
    write_atomic(root / "skipped.txt", summary);
}

inline int run_extract(const ExtractArgs& args, const SubcarrierTable& table, Io io)
{
    std::optional<MacAddress> mac;
    if (!args.mac.empty()) mac = MacAddress::parse(args.mac);
    std::optional<Standard> standard;
    if (!args.standard.empty()) standard = parse_standard(args.standard);
    const int bandwidth = args.bandwidth;
    StreamFilter filter;
    if (mac || standard || bandwidth)
        filter = [=](const StreamKey& k) {
            return (!mac || k.source == *mac) && (!standard || k.standard == *standard) &&
                   (!bandwidth || k.bandwidth_mhz == bandwidth);
        };

    std::ifstream file;
    std::istream* src = &io.in;
    if (args.input != "-") {
        file.open(args.input, std::ios::binary);
        if (!file) throw Error(ErrorKind::IoFailure, "cannot open " + args.input);
        src = &file;
    }

    FollowOptions follow;
    follow.enabled = args.follow;
    follow.idle_timeout = std::chrono::milliseconds(static_cast<long long>(args.idle_timeout * 1000));
    CaptureReader reader(*src, follow);
    CaptureSession session(table, filter);

    using clock = std::chrono::steady_clock;
    auto last_flush = clock::now();
    std::optional<Error> failure;
    try {
        while (auto rec = reader.next()) {
            session.add(*rec);
            if (args.follow && clock::now() - last_flush >= std::chrono::seconds(1)) {
                flush_session(session, args, io.out, false);
                last_flush = clock::now();
            }
        }
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::TruncatedRecord) throw;
        failure = e;
    }
    flush_session(session, args, io.out, true);
    if (failure) {
        report_error(io.err, to_string(failure->kind()), failure->message());
        return kExitData;
    }
    return kExitOk;
}

struct SynthArgs {
    std::vector<std::string> configs;
    int frames = 0;
    std::uint64_t seed = 0;
    std::string out;
    bool su = false;
    bool mu = false;
    int codebook = 1;
    int grouping = 0;
    int rx = 0;
    std::string channel = "gaussian";
};

inline int run_synth(const SynthArgs& args, const SubcarrierTable& table, Io io)
{
    if (args.su && args.mu) {
        report_error(io.err, "Usage", "--su and --mu are mutually exclusive");
        return kExitUsage;
    }
    std::vector<std::vector<CaptureRecord>> stations;
    for (std::size_t i = 0; i < args.configs.size(); ++i) {
        SynthOptions opt;
        opt.config = parse_config_name(args.configs[i]);
        opt.config.feedback = args.mu ? Feedback::MU : Feedback::SU;
        if (args.grouping) opt.config.grouping_ng = args.grouping;
        opt.n_rx = args.rx;
        opt.channel = args.channel == "correlated" ? ChannelModel::Correlated : ChannelModel::Gaussian;
        opt.n_frames = args.frames;
        opt.codebook = args.codebook;
        opt.seed = args.seed + 0x9e3779b97f4a7c15ull * i;
        // Stagger stations so their reports interleave rather than tie.
        opt.start.microseconds = static_cast<std::uint32_t>(1000 * i);
        stations.push_back(synthesize_capture(opt, table).records);
    }
    const auto records = interleave(std::move(stations));

    std::size_t written = 0;
    if (args.out == "-") {
        written = write_capture(records, io.out);
    } else {
        std::ostringstream buf;
        written = write_capture(records, buf);
        write_atomic(args.out, buf.str());
        io.out << "wrote " << records.size() << " records (" << written << " bytes) to " << args.out << '\n';
    }
    return kExitOk;
}

inline int run_info(const std::string& input, const SubcarrierTable& table, Io io)
{
    std::ifstream file;
    std::istream* src = &io.in;
    if (input != "-") {
        file.open(input, std::ios::binary);
        if (!file) throw Error(ErrorKind::IoFailure, "cannot open " + input);
        src = &file;
    }
    CaptureReader reader(*src);
    CaptureSession session(table);
    std::optional<Error> failure;
    try {
        while (auto rec = reader.next()) session.add(*rec);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::TruncatedRecord) throw;
        failure = e;
    }
    io.out << "records " << session.total_records() << '\n';
    io.out << "bfa_frames " << session.assigned_frames() << '\n';
    std::size_t i = 0;
    for (const Stream* s : session.streams()) {
        const QuantBits bits = s->bits();
        io.out << "stream " << i++ << " source=" << s->key.source.to_string()
               << " standard=" << to_string(s->key.standard) << " bandwidth=" << s->key.bandwidth_mhz
               << " shape=" << s->shape.n_rows << "x" << s->shape.n_cols << " feedback=" << to_string(s->shape.feedback)
               << " bits=" << bits.b_phi << "/" << bits.b_psi << " grouping=" << s->shape.grouping_ng
               << " subcarriers=" << s->subcarriers << " angles=" << s->angles_per_subcarrier
               << " frames=" << s->frames.size() << '\n';
    }
    for (const auto& [reason, n] : session.skipped().counts) io.out << "skipped " << reason << ' ' << n << '\n';
    if (failure) {
        report_error(io.err, to_string(failure->kind()), failure->message());
        return kExitData;
    }
    return kExitOk;
}

/// Entry point; args[0] is the program name.
inline int run(const std::vector<std::string>& args, Io io = {})
{
    CLI::App app{"Extract compressed beamforming feedback angles from 802.11ac/ax captures", "bfa"};
    app.require_subcommand(1);

    ExtractArgs ex;
    auto* extract = app.add_subcommand("extract", "Group, decode and reconstruct the reports in a capture");
    extract->add_option("input", ex.input, "pcap file, or - for stdin")->required();
    extract->add_option("--standard", ex.standard, "keep only this standard")->check(CLI::IsMember({"vht", "he"}));
    extract->add_option("--bw", ex.bandwidth, "keep only this bandwidth (MHz)")->check(CLI::IsMember({20, 40, 80, 160}));
    extract->add_option("--mac", ex.mac, "keep only this source MAC address");
    extract->add_option("--out", ex.out_dir, "output directory")->capture_default_str();
    extract->add_option("--format", ex.format, "angle tensor format")->check(CLI::IsMember({"csv", "bin"}))
        ->capture_default_str();
    extract->add_flag("--images", ex.images, "write |V~| heatmaps (PPM)");
    extract->add_flag("--follow", ex.follow, "keep reading a growing file or pipe, refreshing outputs");
    extract->add_option("--idle-timeout", ex.idle_timeout, "with --follow, stop after this many idle seconds (0 = never)")
        ->check(CLI::NonNegativeNumber);

    SynthArgs sy;
    auto* synth = app.add_subcommand("synth", "Write a synthetic capture through the forward compression path");
    synth->add_option("--config", sy.configs, "station config such as he160-4x2 (repeat for more stations)")
        ->required();
    synth->add_option("--frames", sy.frames, "reports per station")->required()->check(CLI::NonNegativeNumber);
    synth->add_option("--seed", sy.seed, "random seed")->capture_default_str();
    synth->add_option("--out", sy.out, "output pcap, or - for stdout")->required();
    synth->add_flag("--su", sy.su, "single-user feedback (default)");
    synth->add_flag("--mu", sy.mu, "multi-user feedback");
    synth->add_option("--codebook", sy.codebook, "codebook information bit")->check(CLI::IsMember({0, 1}))
        ->capture_default_str();
    synth->add_option("--grouping", sy.grouping, "subcarrier grouping Ng (default: 1 for vht, 4 for he)");
    synth->add_option("--rx", sy.rx, "receive antennas N (default N_SS)");
    synth->add_option("--channel", sy.channel, "channel model")->check(CLI::IsMember({"gaussian", "correlated"}))
        ->capture_default_str();

    std::string info_input;
    auto* info = app.add_subcommand("info", "Inventory of the report streams in a capture");
    info->add_option("input", info_input, "pcap file, or - for stdin")->required();

    auto* tables = app.add_subcommand("tables", "Print the subcarrier table in use");

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        io.out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        io.out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        report_error(io.err, "Usage", e.what());
        return kExitUsage;
    }

    try {
        const SubcarrierTable table = SubcarrierTable::load_default();
        if (extract->parsed()) return run_extract(ex, table, io);
        if (synth->parsed()) return run_synth(sy, table, io);
        if (info->parsed()) return run_info(info_input, table, io);
        if (tables->parsed()) {
            io.out << table.to_text();
            return kExitOk;
        }
    } catch (const Error& e) {
        report_error(io.err, to_string(e.kind()), e.message());
        return kExitData;
    } catch (const std::exception& e) {
        report_error(io.err, "Internal", e.what());
        return kExitData;
    }
    return kExitUsage;
}

} // namespace bfa::cli
