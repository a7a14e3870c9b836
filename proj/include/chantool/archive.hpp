// SPDX-License-Identifier: Apache-2.0
//
// chantool - millimeter-wave channel modeling toolkit
// Copyright (C) 2026 chantool contributors
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

#include <bit>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "chantool/core.hpp"

// CIR archive ("CIRB"), also used for raw I/Q captures.
//
//   offset  size  field
//   0       4     magic "CIRB"
//   4       2     version (u16) = 1
//   6       4     n_time (u32)
//   10      1     n_tx (u8)
//   11      1     n_rx (u8)
//   12      4     n_delay (u32)
//   16      8     sample_period_s (f64)
//   24      8     t0_s (f64)
//   32      8     dt_s (f64)
//   40      ...   payload, f32 (re, im) pairs, order (time, tx, rx, delay)
//
// All fields little-endian, no padding.

namespace chantool
{

inline constexpr char archive_magic[4] = {'C', 'I', 'R', 'B'};
inline constexpr std::uint16_t archive_version = 1;
inline constexpr std::size_t archive_header_size = 40;

class FormatError : public Error
{
public:
    using Error::Error;
};

struct ArchiveHeader
{
    std::uint32_t n_time = 0;
    std::uint8_t n_tx = 1;
    std::uint8_t n_rx = 1;
    std::uint32_t n_delay = 0;
    double sample_period_s = 1.0 / 1.28e9;
    double t0_s = 0.0;
    double dt_s = 0.0;

    std::uint64_t sample_count() const
    {
        return static_cast<std::uint64_t>(n_time) * n_tx * n_rx * n_delay;
    }
    std::uint64_t payload_bytes() const { return 8 * sample_count(); }
};

struct CirArchive
{
    ArchiveHeader header;
    std::vector<std::complex<float>> samples;

    std::size_t index(std::size_t time, std::size_t tx, std::size_t rx) const
    {
        return ((time * header.n_tx + tx) * header.n_rx + rx) * header.n_delay;
    }

    // One record widened to double
    CirSnapshot snapshot(std::size_t time, std::size_t tx = 0, std::size_t rx = 0) const
    {
        CirSnapshot s;
        const auto base = index(time, tx, rx);
        s.samples.resize(header.n_delay);
        for (std::size_t i = 0; i < header.n_delay; ++i)
            s.samples[i] = cplx(samples[base + i].real(), samples[base + i].imag());
        s.sample_period_s = header.sample_period_s;
        s.t = header.t0_s + static_cast<double>(time) * header.dt_s;
        s.tx_index = static_cast<int>(tx);
        s.rx_index = static_cast<int>(rx);
        return s;
    }
};

namespace detail
{
template <class T>
void put_le(std::string &out, T value)
{
    std::uint64_t bits = 0;
    if constexpr (std::is_floating_point_v<T>)
    {
        if constexpr (sizeof(T) == 8)
            bits = std::bit_cast<std::uint64_t>(value);
        else
            bits = std::bit_cast<std::uint32_t>(value);
    }
    else
        bits = static_cast<std::uint64_t>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i)
        out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

template <class T>
T get_le(const unsigned char *p)
{
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
        bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    if constexpr (std::is_floating_point_v<T>)
    {
        if constexpr (sizeof(T) == 8)
            return std::bit_cast<double>(bits);
        else
            return std::bit_cast<float>(static_cast<std::uint32_t>(bits));
    }
    else
        return static_cast<T>(bits);
}
} // namespace detail

inline std::string encode_header(const ArchiveHeader &h)
{
    std::string out(archive_magic, 4);
    detail::put_le(out, archive_version);
    detail::put_le(out, h.n_time);
    detail::put_le(out, h.n_tx);
    detail::put_le(out, h.n_rx);
    detail::put_le(out, h.n_delay);
    detail::put_le(out, h.sample_period_s);
    detail::put_le(out, h.t0_s);
    detail::put_le(out, h.dt_s);
    return out;
}

inline ArchiveHeader decode_header(const unsigned char *p, std::size_t size)
{
    if (size < archive_header_size)
        throw FormatError("archive: truncated header");
    if (std::memcmp(p, archive_magic, 4) != 0)
        throw FormatError("archive: bad magic");
    const auto version = detail::get_le<std::uint16_t>(p + 4);
    if (version != archive_version)
        throw FormatError("archive: unsupported version " + std::to_string(version));
    ArchiveHeader h;
    h.n_time = detail::get_le<std::uint32_t>(p + 6);
    h.n_tx = detail::get_le<std::uint8_t>(p + 10);
    h.n_rx = detail::get_le<std::uint8_t>(p + 11);
    h.n_delay = detail::get_le<std::uint32_t>(p + 12);
    h.sample_period_s = detail::get_le<double>(p + 16);
    h.t0_s = detail::get_le<double>(p + 24);
    h.dt_s = detail::get_le<double>(p + 32);
    if (h.n_tx == 0 || h.n_rx == 0)
        throw FormatError("archive: zero antenna count");
    if (!(h.sample_period_s > 0.0) || !std::isfinite(h.sample_period_s))
        throw FormatError("archive: invalid sample period");
    return h;
}

inline void append_samples(std::string &out, const std::vector<cplx> &samples)
{
    for (const auto &v : samples)
    {
        detail::put_le(out, static_cast<float>(v.real()));
        detail::put_le(out, static_cast<float>(v.imag()));
    }
}

// Writes to a temporary file in the target directory and renames it on commit
class AtomicFile
{
public:
    explicit AtomicFile(std::filesystem::path target)
        : target_(std::move(target)),
          temp_(target_.string() + ".tmp." + std::to_string(static_cast<long>(::getpid())))
    {
        out_.open(temp_, std::ios::binary | std::ios::trunc);
        if (!out_)
            throw InvalidArgument("cannot open '" + temp_.string() + "' for writing");
    }

    AtomicFile(const AtomicFile &) = delete;
    AtomicFile &operator=(const AtomicFile &) = delete;

    ~AtomicFile()
    {
        if (!committed_)
        {
            out_.close();
            std::error_code ec;
            std::filesystem::remove(temp_, ec);
        }
    }

    void write(const std::string &bytes)
    {
        out_.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out_)
            throw InvalidArgument("write failed for '" + temp_.string() + "'");
    }

    std::uint64_t commit()
    {
        out_.flush();
        out_.close();
        if (!out_)
            throw InvalidArgument("write failed for '" + temp_.string() + "'");
        std::filesystem::rename(temp_, target_);
        committed_ = true;
        return std::filesystem::file_size(target_);
    }

private:
    std::filesystem::path target_;
    std::filesystem::path temp_;
    std::ofstream out_;
    bool committed_ = false;
};

inline void write_text_file(const std::filesystem::path &path, const std::string &content)
{
    AtomicFile f(path);
    f.write(content);
    f.commit();
}

// Streaming archive writer. Records must arrive in (time, tx, rx) order.
class ArchiveWriter
{
public:
    ArchiveWriter(const std::filesystem::path &path, const ArchiveHeader &header) : file_(path), header_(header)
    {
        file_.write(encode_header(header));
    }

    void write_record(const std::vector<cplx> &samples)
    {
        if (samples.size() != header_.n_delay)
            throw InvalidArgument("archive: record length differs from n_delay");
        if (records_ >= static_cast<std::uint64_t>(header_.n_time) * header_.n_tx * header_.n_rx)
            throw InvalidArgument("archive: more records than declared");
        std::string buf;
        buf.reserve(samples.size() * 8);
        append_samples(buf, samples);
        file_.write(buf);
        ++records_;
    }

    std::uint64_t close()
    {
        if (records_ != static_cast<std::uint64_t>(header_.n_time) * header_.n_tx * header_.n_rx)
            throw InvalidArgument("archive: fewer records than declared");
        return file_.commit();
    }

private:
    AtomicFile file_;
    ArchiveHeader header_;
    std::uint64_t records_ = 0;
};

inline std::vector<unsigned char> read_binary_file(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InvalidArgument("cannot open '" + path.string() + "'");
    return std::vector<unsigned char>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline CirArchive decode_archive(const std::vector<unsigned char> &bytes)
{
    CirArchive a;
    a.header = decode_header(bytes.data(), bytes.size());
    const std::uint64_t expected = archive_header_size + a.header.payload_bytes();
    if (bytes.size() != expected)
        throw FormatError("archive: payload length " + std::to_string(bytes.size() - archive_header_size) +
                          " bytes, header declares " + std::to_string(a.header.payload_bytes()));
    a.samples.resize(a.header.sample_count());
    const unsigned char *p = bytes.data() + archive_header_size;
    for (std::size_t i = 0; i < a.samples.size(); ++i, p += 8)
        a.samples[i] = {detail::get_le<float>(p), detail::get_le<float>(p + 4)};
    return a;
}

inline CirArchive read_archive(const std::filesystem::path &path) { return decode_archive(read_binary_file(path)); }

inline void write_archive(const std::filesystem::path &path, const CirArchive &a)
{
    if (a.samples.size() != a.header.sample_count())
        throw InvalidArgument("archive: sample count differs from header");
    AtomicFile f(path);
    std::string buf = encode_header(a.header);
    for (const auto &v : a.samples)
    {
        detail::put_le(buf, v.real());
        detail::put_le(buf, v.imag());
    }
    f.write(buf);
    f.commit();
}

// Single-antenna archive from a list of equal-length frames
inline CirArchive make_iq_archive(const std::vector<std::vector<cplx>> &frames, double sample_period_s,
                                  double dt_s = 0.0)
{
    if (frames.empty())
        throw InvalidArgument("make_iq_archive: no frames");
    CirArchive a;
    a.header.n_time = static_cast<std::uint32_t>(frames.size());
    a.header.n_delay = static_cast<std::uint32_t>(frames.front().size());
    a.header.sample_period_s = sample_period_s;
    a.header.dt_s = dt_s;
    for (const auto &f : frames)
    {
        if (f.size() != a.header.n_delay)
            throw InvalidArgument("make_iq_archive: frame lengths differ");
        for (const auto &v : f)
            a.samples.emplace_back(static_cast<float>(v.real()), static_cast<float>(v.imag()));
    }
    return a;
}

} // namespace chantool
