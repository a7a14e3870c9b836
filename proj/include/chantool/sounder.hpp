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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "chantool/core.hpp"
#include "chantool/fft.hpp"
#include "chantool/random.hpp"

// Synthetic channel sounder: PN frame, RRC shaping, capture model, calibration
// deconvolution and multipath extraction.

namespace chantool
{

enum class PulseShape
{
    rrc,
    impulse
};

struct WaveformSpec
{
    int pn_order = 12;
    int pad_head = 104;   // zero chips before the PN sequence
    int pad_tail = 800;   // zero chips after it
    int interp_factor = 4;
    double rrc_rolloff = 0.5;
    int rrc_span_chips = 16;
    double sample_rate_hz = 1.28e9;
    PulseShape shape = PulseShape::rrc;

    int pn_length() const { return 1 << pn_order; }
    int frame_chips() const { return pad_head + pn_length() + pad_tail; }
    int frame_samples() const { return frame_chips() * interp_factor; }
    double chip_rate_hz() const { return sample_rate_hz / interp_factor; }
    double sample_period_s() const { return 1.0 / sample_rate_hz; }

    void validate() const
    {
        if (pn_order < 6 || pn_order > 16)
            throw InvalidArgument("WaveformSpec: pn_order must be in [6, 16]");
        if (pad_head < 0 || pad_tail < 0)
            throw InvalidArgument("WaveformSpec: padding must be non-negative");
        if (interp_factor < 1)
            throw InvalidArgument("WaveformSpec: interp_factor must be >= 1");
        if (!(rrc_rolloff > 0.0) || rrc_rolloff > 1.0)
            throw InvalidArgument("WaveformSpec: rrc_rolloff must be in (0, 1]");
        if (rrc_span_chips < 1)
            throw InvalidArgument("WaveformSpec: rrc_span_chips must be >= 1");
        if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz))
            throw InvalidArgument("WaveformSpec: sample_rate_hz must be positive");
    }
};

// Constants of the link budget, all in dB / dBi / dBm
struct LinkBudget
{
    double gt_dbi = 20.0;
    double gr_dbi = 25.0;
    double p_pa_dbm = 24.0;
    double p_cal_dbm = 5.0;
    double g_lna_db = 30.0;
    double l_cable_db = 4.0;

    void validate() const
    {
        for (double v : {gt_dbi, gr_dbi, p_pa_dbm, p_cal_dbm, g_lna_db, l_cable_db})
            if (!std::isfinite(v))
                throw InvalidArgument("LinkBudget: all values must be finite");
    }
};

struct MpcExtractionPolicy
{
    int max_paths = 30;
    double rel_threshold_db = 25.0;
    double noise_margin_db = 6.0;
    double noise_tail_fraction = 0.1; // trailing share of delay bins used for the noise floor

    void validate() const
    {
        if (max_paths < 1)
            throw InvalidArgument("MpcExtractionPolicy: max_paths must be >= 1");
        if (!(rel_threshold_db > 0.0) || !(noise_margin_db > 0.0))
            throw InvalidArgument("MpcExtractionPolicy: thresholds must be positive");
        if (!(noise_tail_fraction > 0.0) || noise_tail_fraction > 1.0)
            throw InvalidArgument("MpcExtractionPolicy: noise_tail_fraction must be in (0, 1]");
    }
};

// Feedback taps (1-based register stages) of a primitive polynomial per order
inline std::vector<int> default_pn_taps(int order)
{
    switch (order)
    {
    case 6: return {6, 5};
    case 7: return {7, 6};
    case 8: return {8, 6, 5, 4};
    case 9: return {9, 5};
    case 10: return {10, 7};
    case 11: return {11, 9};
    case 12: return {12, 6, 4, 1};
    case 13: return {13, 4, 3, 1};
    case 14: return {14, 5, 3, 1};
    case 15: return {15, 14};
    case 16: return {16, 15, 13, 4};
    default: throw InvalidArgument("default_pn_taps: order must be in [6, 16]");
    }
}

// Unextended m-sequence core, length 2^order - 1, chips in {+1, -1}
inline std::vector<int> generate_mseq(int order, std::vector<int> taps = {})
{
    if (order < 2 || order > 24)
        throw InvalidArgument("generate_mseq: order out of range");
    if (taps.empty())
        taps = default_pn_taps(order);
    std::uint32_t mask = 0;
    for (int t : taps)
    {
        if (t < 1 || t > order)
            throw InvalidArgument("generate_mseq: tap outside register");
        mask |= 1u << (order - t); // stage t sits at bit order - t, the output stage at bit 0
    }
    if (!(mask & 1u))
        throw InvalidArgument("generate_mseq: taps must include the last stage");

    const std::uint32_t period = (1u << order) - 1u;
    const std::uint32_t start = 1u;
    std::uint32_t state = start;
    std::vector<int> chips;
    chips.reserve(period);
    for (std::uint32_t i = 0; i < period; ++i)
    {
        chips.push_back((state & 1u) ? -1 : 1);
        const std::uint32_t fb = static_cast<std::uint32_t>(__builtin_popcount(state & mask) & 1);
        state = (state >> 1) | (fb << (order - 1));
        if (state == start && i + 1 < period)
            throw InvalidArgument("generate_mseq: taps do not form a primitive polynomial");
    }
    if (state != start)
        throw InvalidArgument("generate_mseq: taps do not form a primitive polynomial");
    return chips;
}

// PN sequence of length 2^order: the m-sequence plus one repeat of its first chip
inline std::vector<int> generate_pn(int order, std::vector<int> taps = {})
{
    auto chips = generate_mseq(order, std::move(taps));
    chips.push_back(chips.front());
    return chips;
}

// Unit-energy root raised cosine, span_chips * sps + 1 taps, centered
inline std::vector<double> rrc_taps(double rolloff, int sps, int span_chips)
{
    const int n = span_chips * sps + 1;
    const int half = n / 2;
    std::vector<double> h(n);
    const double b = rolloff;
    for (int i = 0; i < n; ++i)
    {
        const double t = static_cast<double>(i - half) / sps;
        if (std::fabs(t) < 1e-12)
            h[i] = 1.0 - b + 4.0 * b / pi;
        else if (std::fabs(std::fabs(4.0 * b * t) - 1.0) < 1e-12)
            h[i] = b / std::sqrt(2.0) *
                   ((1.0 + 2.0 / pi) * std::sin(pi / (4.0 * b)) + (1.0 - 2.0 / pi) * std::cos(pi / (4.0 * b)));
        else
            h[i] = (std::sin(pi * t * (1.0 - b)) + 4.0 * b * t * std::cos(pi * t * (1.0 + b))) /
                   (pi * t * (1.0 - 16.0 * b * b * t * t));
    }
    const double e = std::sqrt(std::inner_product(h.begin(), h.end(), h.begin(), 0.0));
    for (auto &v : h)
        v /= e;
    return h;
}

// Centered filter as a length-n circular kernel (tap 0 at index 0)
inline std::vector<cplx> circular_kernel(const std::vector<double> &taps, std::size_t n)
{
    if (taps.size() > n)
        throw InvalidArgument("circular_kernel: filter longer than frame");
    std::vector<cplx> k(n, cplx{0.0, 0.0});
    const long half = static_cast<long>(taps.size() / 2);
    for (std::size_t i = 0; i < taps.size(); ++i)
    {
        long idx = static_cast<long>(i) - half;
        if (idx < 0)
            idx += static_cast<long>(n);
        k[static_cast<std::size_t>(idx)] += taps[i];
    }
    return k;
}

inline std::vector<double> pulse_taps(const WaveformSpec &spec)
{
    if (spec.shape == PulseShape::impulse)
        return {1.0};
    return rrc_taps(spec.rrc_rolloff, spec.interp_factor, spec.rrc_span_chips);
}

// Frame chips, zero-stuffed by interp_factor, shaped by the pulse filter (circularly,
// the frame repeats periodically)
inline std::vector<cplx> build_tx_waveform(const WaveformSpec &spec)
{
    spec.validate();
    const auto pn = generate_pn(spec.pn_order);
    const std::size_t n = static_cast<std::size_t>(spec.frame_samples());
    std::vector<cplx> up(n, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < pn.size(); ++i)
        up[(static_cast<std::size_t>(spec.pad_head) + i) * spec.interp_factor] = static_cast<double>(pn[i]);
    if (spec.shape == PulseShape::impulse)
        return up;
    return circular_convolve(up, circular_kernel(pulse_taps(spec), n));
}

// Receive-side system response applied to a frame (matched pulse filter)
inline std::vector<cplx> apply_system_response(const std::vector<cplx> &x, const WaveformSpec &spec)
{
    if (spec.shape == PulseShape::impulse)
        return x;
    return circular_convolve(x, circular_kernel(pulse_taps(spec), x.size()));
}

// Circular application of a gridded channel to a frame
inline std::vector<cplx> apply_channel(const std::vector<cplx> &x, const std::vector<cplx> &h)
{
    if (h.size() > x.size())
        throw InvalidArgument("apply_channel: channel longer than frame");
    std::vector<cplx> k(x.size(), cplx{0.0, 0.0});
    std::copy(h.begin(), h.end(), k.begin());
    return circular_convolve(x, k);
}

// Gridded channel from a path list (nearest-bin placement)
inline std::vector<cplx> channel_from_mpcs(const std::vector<Mpc> &mpcs, double sample_period_s, std::size_t n)
{
    std::vector<cplx> h(n, cplx{0.0, 0.0});
    for (const auto &m : mpcs)
    {
        if (!(m.delay_s >= 0.0))
            throw InvalidArgument("channel_from_mpcs: negative delay");
        const auto bin = static_cast<std::size_t>(std::llround(m.delay_s / sample_period_s));
        if (bin >= n)
            throw InvalidArgument("channel_from_mpcs: delay beyond frame");
        h[bin] += m.amplitude;
    }
    return h;
}

// Shifts a frame by k samples (circular)
inline std::vector<cplx> delay_samples(const std::vector<cplx> &x, std::size_t k)
{
    std::vector<cplx> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        y[(i + k) % x.size()] = x[i];
    return y;
}

struct Capture
{
    std::vector<cplx> y_rx;
    std::vector<cplx> y_cal;
    double noise_variance = 0.0; // per sample, before the receive filter
};

// Forward capture model: y_cal = g * x, y_rx = g * (x * h + w).
// snr_db is the energy per PN chip of the received signal over the noise variance per
// sample; +inf disables noise.
inline Capture simulate_capture(const std::vector<cplx> &channel, const WaveformSpec &spec, double snr_db,
                                RandomStream &stream)
{
    spec.validate();
    if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity())
        throw InvalidArgument("simulate_capture: snr_db must be a number or +inf");
    const auto x = build_tx_waveform(spec);
    auto xs = apply_channel(x, channel);
    Capture cap;
    cap.y_cal = apply_system_response(x, spec);
    if (std::isfinite(snr_db))
    {
        double energy = 0.0;
        for (const auto &v : xs)
            energy += std::norm(v);
        const double e_chip = energy / spec.pn_length();
        cap.noise_variance = e_chip / db_to_power(snr_db);
        const double sd = std::sqrt(0.5 * cap.noise_variance);
        for (auto &v : xs)
        {
            const double re = stream.normal();
            const double im = stream.normal();
            v += cplx(sd * re, sd * im);
        }
    }
    cap.y_rx = apply_system_response(xs, spec);
    return cap;
}

inline Capture simulate_capture(const std::vector<Mpc> &mpcs, const WaveformSpec &spec, double snr_db,
                                RandomStream &stream)
{
    return simulate_capture(channel_from_mpcs(mpcs, spec.sample_period_s(), spec.frame_samples()), spec, snr_db,
                            stream);
}

enum class SpectralTaper
{
    none,
    hann
};

struct DeconvolutionOptions
{
    double band_fraction = 1.0;   // kept bins |f| <= band_fraction * fs / 2
    SpectralTaper taper = SpectralTaper::none;
    double regularization = 1e-15; // bins with |Y_cal| below this times the maximum are zeroed
    double sample_rate_hz = 1.28e9;

    void validate() const
    {
        if (!(band_fraction > 0.0) || band_fraction > 1.0)
            throw InvalidArgument("DeconvolutionOptions: band_fraction must be in (0, 1]");
        if (!(regularization >= 0.0) || regularization >= 1.0)
            throw InvalidArgument("DeconvolutionOptions: regularization must be in [0, 1)");
        if (!(sample_rate_hz > 0.0))
            throw InvalidArgument("DeconvolutionOptions: sample_rate_hz must be positive");
    }
};

// Options used by the measurement pipeline: occupied band of the RRC spectrum, Hann taper
inline DeconvolutionOptions pipeline_deconvolution(const WaveformSpec &spec)
{
    DeconvolutionOptions o;
    o.band_fraction = spec.shape == PulseShape::impulse ? 1.0
                                                         : std::min(1.0, (1.0 + spec.rrc_rolloff) / spec.interp_factor);
    o.taper = SpectralTaper::hann;
    o.regularization = 1e-6;
    o.sample_rate_hz = spec.sample_rate_hz;
    return o;
}

// h = IFFT(W Y_rx / Y_cal) / mean(W) over the kept bins
inline CirSnapshot deconvolve_cir(const std::vector<cplx> &y_rx, const std::vector<cplx> &y_cal,
                                  const DeconvolutionOptions &opt = {})
{
    opt.validate();
    if (y_rx.size() != y_cal.size())
        throw InvalidArgument("deconvolve_cir: y_rx and y_cal lengths differ");
    if (y_cal.empty())
        throw InvalidArgument("deconvolve_cir: empty capture");
    double cal_energy = 0.0;
    double rx_energy = 0.0;
    for (std::size_t i = 0; i < y_cal.size(); ++i)
    {
        cal_energy += std::norm(y_cal[i]);
        rx_energy += std::norm(y_rx[i]);
    }
    if (!std::isfinite(cal_energy) || !std::isfinite(rx_energy))
        throw InvalidArgument("deconvolve_cir: non-finite samples");
    if (!(cal_energy > 1e-20))
        throw InvalidArgument("invalid calibration");

    const std::size_t n = y_cal.size();
    const auto yc = fft(y_cal);
    auto yr = fft(y_rx);
    double peak = 0.0;
    for (const auto &v : yc)
        peak = std::max(peak, std::abs(v));
    const double floor = opt.regularization * peak;

    const double edge = opt.band_fraction * 0.5 * static_cast<double>(n); // in bins
    double wsum = 0.0;
    std::vector<cplx> h(n, cplx{0.0, 0.0});
    for (std::size_t k = 0; k < n; ++k)
    {
        const double f = static_cast<double>(k <= n / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n));
        double w = 0.0;
        if (std::fabs(f) <= edge)
            w = opt.taper == SpectralTaper::hann ? 0.5 + 0.5 * std::cos(pi * f / edge) : 1.0;
        wsum += w;
        if (w > 0.0 && std::abs(yc[k]) > floor)
            h[k] = w * yr[k] / yc[k];
    }
    h = ifft(std::move(h));
    const double norm = static_cast<double>(n) / wsum;
    for (auto &v : h)
        v *= norm;

    CirSnapshot cir;
    cir.samples = std::move(h);
    cir.sample_period_s = 1.0 / opt.sample_rate_hz;
    return cir;
}

// Noise floor as the mean linear power of the trailing delay bins
inline double noise_floor_linear(const std::vector<double> &power, double tail_fraction)
{
    if (power.empty())
        return 0.0;
    const auto n = power.size();
    const auto count = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(tail_fraction * n)));
    double acc = 0.0;
    for (std::size_t i = n - std::min(count, n); i < n; ++i)
        acc += power[i];
    return acc / static_cast<double>(std::min(count, n));
}

// Peak search over the PDP with threshold max(P_max - rel, noise + margin).
// A peak is a strict local maximum over its two circular neighbours; on a plateau the
// lowest index wins.
inline std::vector<Mpc> extract_mpcs(const CirSnapshot &cir, const MpcExtractionPolicy &policy = {})
{
    cir.validate();
    policy.validate();
    const std::size_t n = cir.samples.size();
    std::vector<double> p(n);
    double pmax = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        p[i] = std::norm(cir.samples[i]);
        pmax = std::max(pmax, p[i]);
    }
    if (!(pmax > 0.0))
        return {};

    const double noise = noise_floor_linear(p, policy.noise_tail_fraction);
    const double threshold_db = std::max(power_to_db(pmax) - policy.rel_threshold_db,
                                         power_to_db(noise) + policy.noise_margin_db);

    std::vector<std::size_t> peaks;
    if (n == 1)
        peaks.push_back(0);
    for (std::size_t i = 0; n > 1 && i < n; ++i)
    {
        const double prev = p[(i + n - 1) % n];
        if (!(p[i] > prev))
            continue;
        // walk across a plateau to the first differing bin
        std::size_t j = (i + 1) % n;
        std::size_t steps = 0;
        while (p[j] == p[i] && steps < n)
        {
            j = (j + 1) % n;
            ++steps;
        }
        if (p[j] < p[i])
            peaks.push_back(i);
    }

    std::vector<std::size_t> kept;
    for (auto i : peaks)
        if (power_to_db(p[i]) >= threshold_db)
            kept.push_back(i);
    std::stable_sort(kept.begin(), kept.end(), [&](std::size_t a, std::size_t b) { return p[a] > p[b]; });
    if (kept.size() > static_cast<std::size_t>(policy.max_paths))
        kept.resize(static_cast<std::size_t>(policy.max_paths));
    std::sort(kept.begin(), kept.end());

    std::vector<Mpc> out;
    out.reserve(kept.size());
    for (auto i : kept)
        out.push_back(Mpc::from_amplitude(static_cast<double>(i) * cir.sample_period_s, cir.samples[i]));
    return out;
}

// 10 log10 of the summed path powers; -300 dB for no paths
inline double received_power(const std::vector<Mpc> &mpcs)
{
    double acc = 0.0;
    for (const auto &m : mpcs)
        acc += m.power_linear();
    return power_to_db(acc);
}

inline double path_loss_from_power(double p_db, const LinkBudget &b = {})
{
    return -p_db + b.gt_dbi + b.gr_dbi + b.p_pa_dbm - b.p_cal_dbm + b.g_lna_db - b.l_cable_db;
}

// Power-weighted RMS delay spread in seconds
inline double rms_delay_spread(const std::vector<Mpc> &mpcs)
{
    if (mpcs.empty())
        throw InvalidArgument("rms_delay_spread: no paths");
    double ptot = 0.0, m1 = 0.0;
    for (const auto &m : mpcs)
    {
        const double w = m.power_linear();
        ptot += w;
        m1 += w * m.delay_s;
    }
    if (!(ptot > 0.0))
        throw InvalidArgument("rms_delay_spread: zero total power");
    m1 /= ptot;
    // central moment, avoids cancellation of E[tau^2] - E[tau]^2 for large common delays
    double m2 = 0.0;
    for (const auto &m : mpcs)
    {
        const double d = m.delay_s - m1;
        m2 += m.power_linear() * d * d;
    }
    return std::sqrt(m2 / ptot);
}

struct SnapshotReport
{
    std::vector<Mpc> mpcs;
    double received_power_db = power_floor_db;
    double path_loss_db = 0.0;
    double rms_ds_s = std::numeric_limits<double>::quiet_NaN();
};

struct SounderProcessing
{
    WaveformSpec spec;
    MpcExtractionPolicy policy;
    LinkBudget budget;
};

// Calibration deconvolution, peak search, received power, path loss and delay spread
inline SnapshotReport process_capture(const std::vector<cplx> &y_rx, const std::vector<cplx> &y_cal,
                                      const SounderProcessing &proc)
{
    const auto cir = deconvolve_cir(y_rx, y_cal, pipeline_deconvolution(proc.spec));
    SnapshotReport r;
    r.mpcs = extract_mpcs(cir, proc.policy);
    r.received_power_db = received_power(r.mpcs);
    r.path_loss_db = path_loss_from_power(r.received_power_db, proc.budget);
    if (!r.mpcs.empty())
        r.rms_ds_s = rms_delay_spread(r.mpcs);
    return r;
}

// Matched-filter output of a capture against the calibration waveform
inline std::vector<cplx> correlate_capture(const std::vector<cplx> &y_rx, const std::vector<cplx> &y_cal)
{
    return circular_correlate(y_rx, y_cal);
}

// Processing gain of the PN correlation in dB: SNR after correlating the received frame
// with the calibration waveform minus the per-chip input SNR. Signal and noise are
// measured separately so the estimate is not biased by the signal itself.
inline double measure_processing_gain(const WaveformSpec &spec, double snr_db, RandomStream &stream,
                                      int noise_trials = 8)
{
    spec.validate();
    const auto x = build_tx_waveform(spec);
    const auto y_cal = apply_system_response(x, spec);
    double energy = 0.0;
    for (const auto &v : x)
        energy += std::norm(v);
    const double variance = energy / spec.pn_length() / db_to_power(snr_db);

    const auto r_sig = correlate_capture(y_cal, y_cal);
    const double peak = std::norm(r_sig[0]);

    double noise_power = 0.0;
    std::size_t count = 0;
    const double sd = std::sqrt(0.5 * variance);
    for (int t = 0; t < noise_trials; ++t)
    {
        std::vector<cplx> w(x.size());
        for (auto &v : w)
        {
            const double re = stream.normal();
            const double im = stream.normal();
            v = cplx(sd * re, sd * im);
        }
        const auto r_noise = correlate_capture(apply_system_response(w, spec), y_cal);
        for (const auto &v : r_noise)
            noise_power += std::norm(v);
        count += r_noise.size();
    }
    const double snr_out = peak / (noise_power / static_cast<double>(count));
    return 10.0 * std::log10(snr_out) - snr_db;
}

} // namespace chantool
