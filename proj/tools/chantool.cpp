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

#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "chantool/cli/commands.hpp"

using namespace chantool::cli;

int main(int argc, char **argv)
{
    CLI::App app{"chantool - millimeter-wave channel modeling toolkit"};
    app.require_subcommand(1);

    BlockageOptions blk;
    auto *c_blk = app.add_subcommand("blockage", "Blockage attenuation sweep (METIS, Kirchhoff, GTD)");
    c_blk->add_option("--config", blk.config_path, "Config file with a [blockage] section")->required();
    c_blk->add_option("--model", blk.model, "metis, kirchhoff, gtd or all");
    c_blk->add_option("--out", blk.out_path, "Output CSV")->required();

    PathLossFitOptions fit;
    auto *c_fit = app.add_subcommand("pathloss-fit", "Fit CI, FI or ABG path loss to a CSV file");
    c_fit->add_option("samples", fit.samples_path, "CSV with distance_m,freq_ghz,pl_db")->required();
    c_fit->add_option("--model", fit.model, "ci, fi or abg")->capture_default_str();
    c_fit->add_option("--out", fit.out_path, "Output report (JSON)")->required();

    PathLossSynthOptions syn;
    std::optional<std::int64_t> syn_seed;
    auto *c_syn = app.add_subcommand("pathloss-synth", "Seeded synthetic path loss samples");
    c_syn->add_option("--config", syn.config_path, "Config file with a [pathloss] section")->required();
    c_syn->add_option("--out", syn.out_path, "Output CSV")->required();
    c_syn->add_option("--seed", syn_seed, "Override the configured seed");

    GbsmOptions gb;
    std::optional<std::int64_t> gb_seed;
    auto *c_gb = app.add_subcommand("gbsm", "Generate a time-varying cluster channel archive");
    c_gb->add_option("--config", gb.config_path, "Config file with a [gbsm] section")->required();
    c_gb->add_option("--out", gb.out_path, "Output archive (.cirb)")->required();
    c_gb->add_option("--seed", gb_seed, "Override the configured seed");

    CaptureOptions cap;
    std::optional<std::int64_t> cap_seed;
    auto *c_cap = app.add_subcommand("capture", "Synthetic sounder captures for the paths in [sounder]");
    c_cap->add_option("--config", cap.config_path, "Config file with a [sounder] section")->required();
    c_cap->add_option("--rx", cap.rx_path, "Output rx capture archive")->required();
    c_cap->add_option("--cal", cap.cal_path, "Output calibration capture archive")->required();
    c_cap->add_option("--seed", cap_seed, "Override the configured seed");

    SounderOptions snd;
    auto *c_snd = app.add_subcommand("sounder", "Recover CIRs and multipath components from captures");
    c_snd->add_option("--rx", snd.rx_path, "Rx capture archive")->required();
    c_snd->add_option("--cal", snd.cal_path, "Calibration capture archive")->required();
    c_snd->add_option("--config", snd.config_path, "Config file with a [sounder] section");
    c_snd->add_option("--out", snd.out_path, "Output CSV")->required();

    AnalyzeOptions an;
    std::optional<double> an_threshold;
    bool stationarity = true;
    auto *c_an = app.add_subcommand("analyze", "PDP correlation matrix, stationary intervals, LOS power");
    c_an->add_option("archive", an.archive_path, "CIR archive (.cirb)")->required();
    c_an->add_option("--config", an.config_path, "Config file with an [analysis] section");
    c_an->add_flag("--stationarity", stationarity, "Report stationary intervals (default on)");
    c_an->add_option("--threshold", an_threshold, "Correlation threshold in (0, 1)");
    c_an->add_option("--out", an.out_path, "Correlation matrix CSV")->required();
    c_an->add_option("--intervals", an.intervals_path, "Stationary interval CSV");
    c_an->add_option("--los-track", an.los_track_path, "LOS power track CSV");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_input;
    }

    auto &out = std::cout;
    auto &err = std::cerr;
    if (*c_blk)
        return cmd_blockage(blk, out, err);
    if (*c_fit)
        return cmd_pathloss_fit(fit, out, err);
    if (*c_syn)
    {
        syn.seed = syn_seed;
        return cmd_pathloss_synth(syn, out, err);
    }
    if (*c_gb)
    {
        gb.seed = gb_seed;
        return cmd_gbsm(gb, out, err);
    }
    if (*c_cap)
    {
        cap.seed = cap_seed;
        return cmd_capture(cap, out, err);
    }
    if (*c_snd)
        return cmd_sounder(snd, out, err);
    if (*c_an)
    {
        an.threshold = an_threshold;
        return cmd_analyze(an, out, err);
    }
    return exit_input;
}
