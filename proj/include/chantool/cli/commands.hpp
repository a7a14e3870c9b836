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

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "chantool/analysis.hpp"
#include "chantool/archive.hpp"
#include "chantool/blockage.hpp"
#include "chantool/config.hpp"
#include "chantool/csv.hpp"
#include "chantool/gbsm.hpp"
#include "chantool/pathloss.hpp"
#include "chantool/sounder.hpp"

// Subcommand implementations. Each returns the process exit code:
// 0 success, 2 input or configuration error, 3 sizing error.

namespace chantool::cli
{

inline constexpr int exit_ok = 0;
inline constexpr int exit_input = 2;
inline constexpr int exit_sizing = 3;

// Runs a command body and maps library errors to exit codes
inline int guarded(std::ostream &err, const std::function<int()> &body)
{
    try
    {
        return body();
    }
    catch (const SizingError &e)
    {
        err << "error: " << e.what() << '\n';
        return exit_sizing;
    }
    catch (const Error &e)
    {
        err << "error: " << e.what() << '\n';
        return exit_input;
    }
    catch (const std::filesystem::filesystem_error &e)
    {
        err << "error: " << e.what() << '\n';
        return exit_input;
    }
}

// ---- blockage ------------------------------------------------------------

struct BlockageOptions
{
    std::string config_path;
    std::string model; // metis, kirchhoff, gtd or all; empty defers to the config
    std::string out_path;
};

struct BlockageSetup
{
    BlockageScenario scenario; // blockers left empty
    Screen screen;
    Cylinder cylinder;
    std::vector<Point3> trajectory;
    std::vector<double> positions; // lateral offset or distance from tx
    GtdOptions gtd;
};

inline BlockageSetup blockage_setup(const Config &cfg)
{
    cfg.require_section("blockage");
    constexpr std::string_view s = "blockage";
    BlockageSetup b;
    auto &scn = b.scenario;
    scn.tx = {cfg.get_double(s, "tx_x_m", 0.0), cfg.get_double(s, "tx_y_m", 0.0), cfg.get_double(s, "tx_z_m", 1.5)};
    scn.rx = {cfg.get_double(s, "rx_x_m", 10.0), cfg.get_double(s, "rx_y_m", 0.0), cfg.get_double(s, "rx_z_m", 1.5)};
    scn.band = FrequencyBand::ghz(cfg.get_double(s, "carrier_ghz", 28.0));
    scn.validate();

    const double width = cfg.get_double(s, "body_width_m", 0.4);
    const double height = cfg.get_double(s, "body_height_m", 1.75);
    const double center_z = cfg.get_double(s, "body_center_z_m", 0.5 * height);
    const double radius = cfg.get_double(s, "cylinder_radius_m", 0.5 * width);
    // the body is a screen for the knife-edge models and a cylinder for GTD
    b.screen = Screen{{0.0, 0.0, center_z}, width, height};
    b.screen.validate();
    b.cylinder = Cylinder{{0.0, 0.0, center_z}, radius, height};
    b.cylinder.validate();

    const auto n_terms = cfg.get_int(s, "gtd_terms", 5);
    if (n_terms < 1 || n_terms > 20)
        cfg.fail(cfg.line_of(s, "gtd_terms"), "gtd_terms must be in [1, 20]");
    b.gtd.n_terms = static_cast<int>(n_terms);
    const std::string combine = cfg.get_string(s, "gtd_combine", "power");
    if (combine == "power")
        b.gtd.combine = CreepingCombine::power;
    else if (combine == "coherent")
        b.gtd.combine = CreepingCombine::coherent;
    else
        cfg.fail(cfg.line_of(s, "gtd_combine"), "gtd_combine must be power or coherent");

    const std::string traj = cfg.get_string(s, "trajectory", "crossing");
    const double link = std::hypot(scn.rx.x - scn.tx.x, scn.rx.y - scn.tx.y);
    double start = 0, stop = 0, step = 0;
    if (traj == "crossing")
    {
        start = cfg.get_double(s, "start_m", -1.0);
        stop = cfg.get_double(s, "stop_m", 1.0);
        step = cfg.get_double(s, "step_m", 0.1);
    }
    else if (traj == "along")
    {
        start = cfg.get_double(s, "start_m", 1.0);
        stop = cfg.get_double(s, "stop_m", link - 1.0);
        step = cfg.get_double(s, "step_m", 0.2);
    }
    else
        cfg.fail(cfg.line_of(s, "trajectory"), "trajectory must be crossing or along");
    if (!(step > 0.0) || stop < start)
        cfg.fail(cfg.line_of(s, "step_m"), "need step_m > 0 and stop_m >= start_m");
    if ((stop - start) / step > 1e6)
        throw SizingError("blockage: trajectory longer than 1e6 points");

    if (traj == "crossing")
    {
        const double along = cfg.get_double(s, "crossing_distance_m", 0.5 * link);
        b.trajectory = crossing_trajectory(scn, along, start, stop, step, center_z);
    }
    else
        b.trajectory = along_trajectory(scn, start, stop, step, center_z);
    for (std::size_t i = 0; i < b.trajectory.size(); ++i)
        b.positions.push_back(start + static_cast<double>(i) * step);
    return b;
}

inline int cmd_blockage(const BlockageOptions &opt, std::ostream &out, std::ostream &err)
{
    return guarded(err, [&] {
        const Config cfg = Config::load(opt.config_path);
        BlockageSetup setup = blockage_setup(cfg);

        std::vector<BlockageModel> models;
        const std::string chosen = opt.model.empty() ? cfg.get_string("blockage", "model", "all") : opt.model;
        if (chosen == "all")
            models = {BlockageModel::metis, BlockageModel::kirchhoff, BlockageModel::gtd};
        else if (auto m = parse_blockage_model(chosen))
            models = {*m};
        else
            throw InvalidArgument("unknown model '" + chosen + "' (metis, kirchhoff, gtd, all)");

        std::vector<std::vector<double>> columns;
        std::size_t warnings = 0;
        for (auto m : models)
        {
            BlockageScenario scn = setup.scenario;
            // the knife-edge models see the screen, GTD the cylinder
            if (m == BlockageModel::gtd)
                scn.blockers = {setup.cylinder};
            else
                scn.blockers = {setup.screen};
            const auto res = sweep_blocker(scn, m, setup.trajectory, SweepOptions{setup.gtd});
            warnings += res.warnings;
            std::vector<double> col;
            for (const auto &p : res.points)
                col.push_back(p.attenuation_db);
            columns.push_back(std::move(col));
        }

        std::string header = "position_m";
        for (auto m : models)
            header += ",att_db_" + std::string(to_string(m));
        std::string text = header + "\n";
        for (std::size_t i = 0; i < setup.positions.size(); ++i)
        {
            text += format_fixed(setup.positions[i], 6);
            for (const auto &c : columns)
                text += "," + format_double(c[i]);
            text += '\n';
        }
        write_text_file(opt.out_path, text);
        if (warnings)
            err << "warning: " << warnings << " sweep points could not be evaluated (nan)\n";
        out << "blockage: " << setup.positions.size() << " points, " << models.size() << " models -> "
            << opt.out_path << '\n';
        return exit_ok;
    });
}

// ---- pathloss ------------------------------------------------------------

struct PathLossFitOptions
{
    std::string samples_path;
    std::string model = "ci"; // ci | fi | abg
    std::string out_path;
};

inline nlohmann::ordered_json path_loss_report(const std::vector<PathLossSample> &samples, const std::string &model)
{
    nlohmann::ordered_json j;
    j["model"] = model;
    j["sample_count"] = samples.size();
    if (model == "ci")
    {
        const auto m = ci_fit(samples);
        j["ple"] = m.n;
        j["sigma_db"] = m.sigma_db;
        j["residual_rms_db"] = m.sigma_db;
    }
    else if (model == "fi" || model == "abg")
    {
        AbgModel m;
        try
        {
            m = model == "fi" ? fi_fit(samples) : abg_fit(samples);
        }
        catch (const InvalidArgument &e)
        {
            std::string msg = e.what();
            if (msg.find("freq_ghz") != std::string::npos)
                msg += "; use --model fi for single-frequency data";
            throw InvalidArgument(msg);
        }
        j["alpha"] = m.alpha;
        j["beta_db"] = m.beta_db;
        j["gamma"] = m.gamma;
        j["sigma_db"] = m.sigma_db;
        j["residual_rms_db"] = m.sigma_db;
    }
    else
        throw InvalidArgument("unknown model '" + model + "' (ci, fi, abg)");
    return j;
}

inline int cmd_pathloss_fit(const PathLossFitOptions &opt, std::ostream &out, std::ostream &err)
{
    return guarded(err, [&] {
        const auto samples = parse_path_loss_csv(read_text_file(opt.samples_path), opt.samples_path);
        const auto j = path_loss_report(samples, opt.model);
        const std::string text = j.dump(2) + "\n";
        write_text_file(opt.out_path, text);
        out << text;
        return exit_ok;
    });
}

struct PathLossSynthOptions
{
    std::string config_path;
    std::string out_path;
    std::optional<std::int64_t> seed;
};

// Seeded synthetic measurement file; distances log-uniform between the configured bounds
inline std::vector<PathLossSample> synthesize_path_loss(const Config &cfg, std::optional<std::int64_t> seed_override)
{
    cfg.require_section("pathloss");
    constexpr std::string_view s = "pathloss";
    const std::string preset_name = cfg.get_string(s, "preset", "measured-28");
    const PathLossPreset &preset = path_loss_preset(preset_name);
    const std::string model = cfg.get_string(s, "model", "ci");
    CiModel ci = preset.ci;
    AbgModel abg = preset.fi;
    ci.n = cfg.get_double(s, "ple", ci.n);
    abg.alpha = cfg.get_double(s, "alpha", abg.alpha);
    abg.beta_db = cfg.get_double(s, "beta_db", abg.beta_db);
    abg.gamma = cfg.get_double(s, "gamma", abg.gamma);
    const double sigma = cfg.get_double(s, "sigma_db", model == "ci" ? ci.sigma_db : abg.sigma_db);
    if (!(sigma >= 0.0))
        cfg.fail(cfg.line_of(s, "sigma_db"), "sigma_db must be >= 0");
    ci.sigma_db = sigma;
    abg.sigma_db = sigma;
    if (model != "ci" && model != "fi" && model != "abg")
        cfg.fail(cfg.line_of(s, "model"), "model must be ci, fi or abg");

    const auto n = cfg.get_int(s, "n_samples", 10000);
    if (n < 1 || n > 10'000'000)
        cfg.fail(cfg.line_of(s, "n_samples"), "n_samples must be in [1, 1e7]");
    const double dmin = cfg.get_double(s, "distance_min_m", 10.0);
    const double dmax = cfg.get_double(s, "distance_max_m", 800.0);
    if (!(dmin >= 1.0) || !(dmax >= dmin))
        cfg.fail(cfg.line_of(s, "distance_min_m"), "need 1 <= distance_min_m <= distance_max_m");
    const auto freqs = cfg.get_list(s, "freq_ghz", {preset.freq_ghz});
    for (double f : freqs)
        if (!(f > 0.0))
            cfg.fail(cfg.line_of(s, "freq_ghz"), "freq_ghz must be positive");
    const std::int64_t seed = seed_override.value_or(cfg.get_int(s, "seed", 1));

    std::vector<PathLossSample> out(static_cast<std::size_t>(n));
    parallel_for(out.size(), [&](std::size_t i) {
        RandomStream rs = derive_substream(seed, "pathloss", static_cast<std::int64_t>(i));
        const double d = dmin * std::pow(dmax / dmin, rs.uniform());
        const double f = freqs[i % freqs.size()];
        const double pl = model == "ci" ? shadowed_sample(ci, d, f, rs) : shadowed_sample(abg, d, f, rs);
        out[i] = {d, f, pl};
    });
    return out;
}

inline std::string path_loss_csv(const std::vector<PathLossSample> &samples)
{
    std::string text = "distance_m,freq_ghz,pl_db\n";
    for (const auto &s : samples)
        text += format_double(s.distance_m) + "," + format_double(s.freq_ghz) + "," + format_double(s.pl_db) + "\n";
    return text;
}

inline int cmd_pathloss_synth(const PathLossSynthOptions &opt, std::ostream &out, std::ostream &err)
{
    return guarded(err, [&] {
        const Config cfg = Config::load(opt.config_path);
        const auto samples = synthesize_path_loss(cfg, opt.seed);
        write_text_file(opt.out_path, path_loss_csv(samples));
        out << "pathloss-synth: " << samples.size() << " samples -> " << opt.out_path << '\n';
        return exit_ok;
    });
}

// ---- gbsm ----------------------------------------------------------------

struct GbsmOptions
{
    std::string config_path;
    std::string out_path;
    std::optional<std::int64_t> seed;
};

inline GbsmConfig gbsm_config(const Config &cfg, std::optional<std::int64_t> seed_override)
{
    cfg.require_section("gbsm");
    constexpr std::string_view s = "gbsm";
    GbsmConfig g;
    g.band = FrequencyBand::ghz(cfg.get_double(s, "carrier_ghz", 28.0));
    g.n_tx = static_cast<int>(cfg.get_int(s, "n_tx", g.n_tx));
    g.n_rx = static_cast<int>(cfg.get_int(s, "n_rx", g.n_rx));
    g.antenna_spacing_m = cfg.get_double(s, "antenna_spacing_m", g.antenna_spacing_m);
    g.k_factor_db = cfg.get_double(s, "k_factor_db", g.k_factor_db);
    g.mean_clusters = cfg.get_double(s, "mean_clusters", g.mean_clusters);
    g.rays_per_cluster = static_cast<int>(cfg.get_int(s, "rays_per_cluster", g.rays_per_cluster));
    g.delay_scale_s = cfg.get_double(s, "delay_scale_s", g.delay_scale_s);
    g.ray_delay_scale_s = cfg.get_double(s, "ray_delay_scale_s", g.ray_delay_scale_s);
    g.per_cluster_shadow_db = cfg.get_double(s, "per_cluster_shadow_db", g.per_cluster_shadow_db);
    g.angle_spread_rad = cfg.get_double(s, "angle_spread_rad", g.angle_spread_rad);
    g.birth_rate_hz = cfg.get_double(s, "birth_rate_hz", g.birth_rate_hz);
    g.death_rate_hz = cfg.get_double(s, "death_rate_hz", g.death_rate_hz);
    g.snapshot_interval_s = cfg.get_double(s, "snapshot_interval_s", g.snapshot_interval_s);
    g.duration_s = cfg.get_double(s, "duration_s", g.duration_s);
    g.tx_position = {cfg.get_double(s, "tx_x_m", g.tx_position.x), cfg.get_double(s, "tx_y_m", g.tx_position.y),
                     cfg.get_double(s, "tx_z_m", g.tx_position.z)};
    g.rx_position = {cfg.get_double(s, "rx_x_m", g.rx_position.x), cfg.get_double(s, "rx_y_m", g.rx_position.y),
                     cfg.get_double(s, "rx_z_m", g.rx_position.z)};
    g.tx_velocity = {cfg.get_double(s, "tx_vx_mps", 0.0), cfg.get_double(s, "tx_vy_mps", 0.0),
                     cfg.get_double(s, "tx_vz_mps", 0.0)};
    g.rx_velocity = {cfg.get_double(s, "rx_vx_mps", 0.0), cfg.get_double(s, "rx_vy_mps", 0.0),
                     cfg.get_double(s, "rx_vz_mps", 0.0)};
    g.sample_period_s = cfg.get_double(s, "sample_period_s", g.sample_period_s);
    g.n_delay = static_cast<int>(cfg.get_int(s, "n_delay", g.n_delay));
    g.seed = seed_override.value_or(cfg.get_int(s, "seed", g.seed));
    g.validate();
    return g;
}

inline int cmd_gbsm(const GbsmOptions &opt, std::ostream &out, std::ostream &err)
{
    return guarded(err, [&] {
        const Config cfg = Config::load(opt.config_path);
        const GbsmConfig g = gbsm_config(cfg, opt.seed);
        detail::check_size(g);

        // first pass sizes the delay grid, so the header is known before streaming
        std::size_t n_delay = static_cast<std::size_t>(g.n_delay);
        detail::walk_states(g, [&](std::size_t, const ClusterState &s) {
            const std::size_t need = required_delay_bins(s, g);
            if (need > n_delay)
                n_delay = need + 10;
        });
        if (n_delay > std::numeric_limits<std::uint32_t>::max())
            throw SizingError("gbsm: delay grid too long");

        ArchiveHeader h;
        h.n_time = static_cast<std::uint32_t>(g.time_steps());
        h.n_tx = static_cast<std::uint8_t>(g.n_tx);
        h.n_rx = static_cast<std::uint8_t>(g.n_rx);
        h.n_delay = static_cast<std::uint32_t>(n_delay);
        h.sample_period_s = g.sample_period_s;
        h.t0_s = 0.0;
        h.dt_s = g.snapshot_interval_s;
        ArchiveWriter writer(opt.out_path, h);
        const auto summary = stream_scenario(g, [&](std::size_t, const std::vector<CirSnapshot> &snaps) {
            for (const auto &sn : snaps)
                writer.write_record(sn.samples);
        });
        const auto bytes = writer.close();
        out << "gbsm: snapshots=" << summary.n_time << " n_tx=" << g.n_tx << " n_rx=" << g.n_rx
            << " n_delay=" << summary.n_delay << " mean_clusters=" << format_fixed(summary.mean_clusters, 3)
            << " bytes=" << bytes << '\n';
        return exit_ok;
    });
}

// ---- sounder -------------------------------------------------------------

inline SounderProcessing sounder_processing(const Config &cfg)
{
    constexpr std::string_view s = "sounder";
    SounderProcessing p;
    auto &w = p.spec;
    w.pn_order = static_cast<int>(cfg.get_int(s, "pn_order", w.pn_order));
    w.pad_head = static_cast<int>(cfg.get_int(s, "pad_head", w.pad_head));
    w.pad_tail = static_cast<int>(cfg.get_int(s, "pad_tail", w.pad_tail));
    w.interp_factor = static_cast<int>(cfg.get_int(s, "interp_factor", w.interp_factor));
    w.rrc_rolloff = cfg.get_double(s, "rrc_rolloff", w.rrc_rolloff);
    w.rrc_span_chips = static_cast<int>(cfg.get_int(s, "rrc_span_chips", w.rrc_span_chips));
    w.sample_rate_hz = cfg.get_double(s, "sample_rate_hz", w.sample_rate_hz);
    w.validate();
    auto &b = p.budget;
    b.gt_dbi = cfg.get_double(s, "gt_dbi", b.gt_dbi);
    b.gr_dbi = cfg.get_double(s, "gr_dbi", b.gr_dbi);
    b.p_pa_dbm = cfg.get_double(s, "p_pa_dbm", b.p_pa_dbm);
    b.p_cal_dbm = cfg.get_double(s, "p_cal_dbm", b.p_cal_dbm);
    b.g_lna_db = cfg.get_double(s, "g_lna_db", b.g_lna_db);
    b.l_cable_db = cfg.get_double(s, "l_cable_db", b.l_cable_db);
    b.validate();
    auto &m = p.policy;
    m.max_paths = static_cast<int>(cfg.get_int(s, "max_paths", m.max_paths));
    m.rel_threshold_db = cfg.get_double(s, "rel_threshold_db", m.rel_threshold_db);
    m.noise_margin_db = cfg.get_double(s, "noise_margin_db", m.noise_margin_db);
    m.noise_tail_fraction = cfg.get_double(s, "noise_tail_fraction", m.noise_tail_fraction);
    m.validate();
    return p;
}

struct CaptureOptions
{
    std::string config_path;
    std::string rx_path;
    std::string cal_path;
    std::optional<std::int64_t> seed;
};

// Synthetic rx and calibration captures for the paths configured in [sounder]
inline int cmd_capture(const CaptureOptions &opt, std::ostream &out, std::ostream &err)
{
    return guarded(err, [&] {
        const Config cfg = Config::load(opt.config_path);
        cfg.require_section("sounder");
        constexpr std::string_view s = "sounder";
        const SounderProcessing proc = sounder_processing(cfg);
        const auto delays = cfg.get_list(s, "path_delays_ns", {7.8125, 39.0625, 93.75});
        const auto powers = cfg.get_list(s, "path_powers_db", {0.0, -6.0, -12.0});
        if (delays.size() != powers.size())
            cfg.fail(cfg.line_of(s, "path_powers_db"), "path_delays_ns and path_powers_db differ in length");
        std::vector<Mpc> paths;
        for (std::size_t i = 0; i < delays.size(); ++i)
        {
            if (!(delays[i] >= 0.0))
                cfg.fail(cfg.line_of(s, "path_delays_ns"), "delays must be >= 0");
            paths.push_back(Mpc::from_amplitude(delays[i] * 1e-9, cplx(std::sqrt(db_to_power(powers[i])), 0.0)));
        }
        double snr = 30.0;
        if (cfg.get_string(s, "snr_db", "") == "inf")
            snr = std::numeric_limits<double>::infinity();
        else
            snr = cfg.get_double(s, "snr_db", 30.0);
        const auto n = cfg.get_int(s, "n_snapshots", 1);
        if (n < 1 || n > 100000)
            cfg.fail(cfg.line_of(s, "n_snapshots"), "n_snapshots must be in [1, 100000]");
        const std::int64_t seed = opt.seed.value_or(cfg.get_int(s, "seed", 1));

        std::vector<std::vector<cplx>> frames(static_cast<std::size_t>(n));
        std::vector<cplx> cal;
        parallel_for(frames.size(), [&](std::size_t i) {
            RandomStream rs = derive_substream(seed, "capture", static_cast<std::int64_t>(i));
            auto cap = simulate_capture(paths, proc.spec, snr, rs);
            frames[i] = std::move(cap.y_rx);
            if (i == 0)
                cal = std::move(cap.y_cal);
        });
        const double ts = proc.spec.sample_period_s();
        const double frame_s = ts * proc.spec.frame_samples();
        write_archive(opt.rx_path, make_iq_archive(frames, ts, frame_s));
        write_archive(opt.cal_path, make_iq_archive({cal}, ts));
        out << "capture: " << n << " frames of " << proc.spec.frame_samples() << " samples -> " << opt.rx_path
            << ", calibration -> " << opt.cal_path << '\n';
        return exit_ok;
    });
}

struct SounderOptions
{
    std::string rx_path;
    std::string cal_path;
    std::string config_path; // optional
    std::string out_path;
};

inline int cmd_sounder(const SounderOptions &opt, std::ostream &out, std::ostream &err)
{
    return guarded(err, [&] {
        const Config cfg = opt.config_path.empty() ? Config::parse("") : Config::load(opt.config_path);
        const SounderProcessing proc = sounder_processing(cfg);
        const CirArchive rx = read_archive(opt.rx_path);
        const CirArchive cal = read_archive(opt.cal_path);
        if (rx.header.n_delay != cal.header.n_delay)
            throw InvalidArgument("invalid calibration: capture lengths differ");
        if (cal.header.n_time != 1 && cal.header.n_time != rx.header.n_time)
            throw InvalidArgument("invalid calibration: expected 1 frame or one per rx frame");

        const std::size_t frames = static_cast<std::size_t>(rx.header.n_time) * rx.header.n_tx * rx.header.n_rx;
        std::vector<SnapshotReport> reports(frames);
        parallel_for(frames, [&](std::size_t i) {
            const std::size_t time = i / (rx.header.n_tx * rx.header.n_rx);
            const std::size_t pair = i % (rx.header.n_tx * rx.header.n_rx);
            const auto y_rx = rx.snapshot(time, pair / rx.header.n_rx, pair % rx.header.n_rx).samples;
            const auto y_cal = cal.snapshot(cal.header.n_time == 1 ? 0 : time).samples;
            reports[i] = process_capture(y_rx, y_cal, proc);
        });

        std::string text = "snapshot,delay_ns,power_db\n";
        std::size_t rows = 0;
        for (std::size_t i = 0; i < frames; ++i)
            for (const auto &m : reports[i].mpcs)
            {
                text += std::to_string(i) + "," + format_fixed(m.delay_s * 1e9, 4) + "," + format_fixed(m.power_db, 4) +
                        "\n";
                ++rows;
            }
        text += "# stats\nsnapshot,received_power_db,path_loss_db,rms_ds_ns\n";
        for (std::size_t i = 0; i < frames; ++i)
            text += std::to_string(i) + "," + format_fixed(reports[i].received_power_db, 4) + "," +
                    format_fixed(reports[i].path_loss_db, 4) + "," + format_fixed(reports[i].rms_ds_s * 1e9, 4) + "\n";
        write_text_file(opt.out_path, text);
        out << "sounder: " << frames << " snapshots, " << rows << " paths -> " << opt.out_path << '\n';
        return exit_ok;
    });
}

// ---- analyze -------------------------------------------------------------

struct AnalyzeOptions
{
    std::string archive_path;
    std::string config_path; // optional
    std::optional<double> threshold;
    std::string out_path;       // correlation matrix CSV
    std::string intervals_path; // optional interval report CSV
    std::string los_track_path; // optional LOS track CSV
};

// Archive records of one antenna pair as a sequence
inline CirSequence sequence_from_archive(const CirArchive &a)
{
    CirSequence seq;
    seq.config.n_tx = a.header.n_tx;
    seq.config.n_rx = a.header.n_rx;
    seq.config.sample_period_s = a.header.sample_period_s;
    seq.config.snapshot_interval_s = a.header.dt_s > 0.0 ? a.header.dt_s : 1.0;
    seq.n_time = a.header.n_time;
    seq.n_delay = a.header.n_delay;
    seq.t0_s = a.header.t0_s;
    seq.dt_s = a.header.dt_s;
    for (std::size_t t = 0; t < a.header.n_time; ++t)
        for (std::size_t tx = 0; tx < a.header.n_tx; ++tx)
            for (std::size_t rx = 0; rx < a.header.n_rx; ++rx)
                seq.snapshots.push_back(a.snapshot(t, tx, rx));
    return seq;
}

inline int cmd_analyze(const AnalyzeOptions &opt, std::ostream &out, std::ostream &err)
{
    return guarded(err, [&] {
        const Config cfg = opt.config_path.empty() ? Config::parse("") : Config::load(opt.config_path);
        constexpr std::string_view s = "analysis";
        const double threshold = opt.threshold.value_or(cfg.get_double(s, "threshold", 0.8));
        if (!(threshold > 0.0) || !(threshold < 1.0))
            throw InvalidArgument("threshold must be in (0, 1)");
        const auto tx = cfg.get_int(s, "tx_index", 0);
        const auto rx = cfg.get_int(s, "rx_index", 0);

        const CirArchive a = read_archive(opt.archive_path);
        if (tx < 0 || tx >= a.header.n_tx || rx < 0 || rx >= a.header.n_rx)
            throw InvalidArgument("antenna index outside the archive");
        if (a.header.n_time < 2)
            throw InvalidArgument("archive needs at least 2 snapshots");
        if (a.header.n_time > 20000)
            throw SizingError("analyze: correlation matrix limited to 20000 snapshots");

        std::vector<PowerDelayProfile> pdps(a.header.n_time);
        parallel_for(pdps.size(), [&](std::size_t t) {
            pdps[t] = pdp_from_cir(a.snapshot(t, static_cast<std::size_t>(tx), static_cast<std::size_t>(rx)));
        });
        const auto corr = pdp_correlation_matrix(pdps);
        const auto report = stationary_intervals(corr, threshold);

        std::string text;
        const std::size_t n = corr.snapshot_count;
        text.reserve(n * n * 8);
        for (std::size_t i = 0; i < n; ++i)
        {
            for (std::size_t j = 0; j < n; ++j)
            {
                if (j)
                    text += ',';
                text += format_fixed(corr(i, j), 6);
            }
            text += '\n';
        }
        write_text_file(opt.out_path, text);

        std::string rep = "start,end,length\n";
        for (const auto &[b, e] : report.intervals)
            rep += std::to_string(b) + "," + std::to_string(e) + "," + std::to_string(e - b + 1) + "\n";
        if (!opt.intervals_path.empty())
            write_text_file(opt.intervals_path, rep);

        if (!opt.los_track_path.empty() || cfg.get_bool(s, "los_track", false))
        {
            if (opt.los_track_path.empty())
                throw InvalidArgument("los_track requested but no --los-track path given");
            const auto seq = sequence_from_archive(a);
            const auto track = los_power_track(seq, static_cast<int>(tx), static_cast<int>(rx));
            std::string t = "t_s,los_power_db\n";
            for (const auto &p : track)
                t += format_double(p.t) + "," + format_fixed(p.power_db, 6) + "\n";
            write_text_file(opt.los_track_path, t);
        }

        out << "analyze: " << n << " snapshots, threshold " << format_double(threshold) << ", "
            << report.intervals.size() << " stationary intervals\n";
        for (const auto &[b, e] : report.intervals)
            out << "  [" << b << ", " << e << "]\n";
        return exit_ok;
    });
}

} // namespace chantool::cli
