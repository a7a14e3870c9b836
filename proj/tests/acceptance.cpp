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


// Acceptance run: one [PASS]/[FAIL] line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "chantool/analysis.hpp"
#include "chantool/archive.hpp"
#include "chantool/blockage.hpp"
#include "chantool/gbsm.hpp"
#include "chantool/pathloss.hpp"
#include "chantool/sounder.hpp"
#include "support.hpp"

using namespace chantool;
using testsupport::link_10m;

namespace
{
struct Outcome
{
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int digits = 3)
{
    std::ostringstream s;
    s.precision(digits);
    s << std::fixed << v;
    return s.str();
}

std::vector<double> sweep_values(BlockageModel m, double ghz)
{
    auto scn = link_10m(ghz);
    scn.blockers = {m == BlockageModel::gtd ? Blocker(testsupport::body_cylinder_at(5.0))
                                            : Blocker(testsupport::body_screen_at(5.0))};
    const auto r = sweep_blocker(scn, m, crossing_trajectory(scn, 5.0, -1.0, 1.0, 0.1, 0.875));
    std::vector<double> v;
    for (const auto &p : r.points)
        v.push_back(p.attenuation_db);
    return v;
}

double peak(const std::vector<double> &v) { return *std::max_element(v.begin(), v.end()); }

Outcome c1()
{
    const auto &p = path_loss_preset("measured-28");
    const double pl = ci_eval(p.ci, 1000.0, 28.0);
    return {pl >= 139.5 && pl <= 141.5, "PL(1 km, 28 GHz) = " + fmt(pl, 2) + " dB"};
}

Outcome c2()
{
    const Screen half{{5.0, 5000.0, 1.5}, 10000.0, 10000.0};
    const double a = kirchhoff_screen_attenuation(link_10m(), half);
    return {std::fabs(a - 6.02) <= 0.05, "half-plane edge on LOS = " + fmt(a, 4) + " dB"};
}

Outcome c3()
{
    const auto m = sweep_values(BlockageModel::metis, 28.0);
    const auto k = sweep_values(BlockageModel::kirchhoff, 28.0);
    const auto g = sweep_values(BlockageModel::gtd, 28.0);
    bool ordered = true;
    for (std::size_t i = 0; i < m.size(); ++i)
        ordered = ordered && m[i] <= k[i];
    const bool pass = peak(m) >= 7 && peak(m) <= 13 && peak(k) >= 12 && peak(k) <= 18 && peak(g) >= 12 &&
                      peak(g) <= 18 && ordered;
    return {pass, "peaks METIS " + fmt(peak(m)) + ", Kirchhoff " + fmt(peak(k)) + ", GTD " + fmt(peak(g)) +
                      " dB; METIS <= Kirchhoff at all points: " + (ordered ? "yes" : "no")};
}

Outcome c4()
{
    const auto s = testsupport::body_screen_at(5.0);
    const double dm = metis_screen_attenuation(link_10m(39.0), s) - metis_screen_attenuation(link_10m(28.0), s);
    const double dk =
        kirchhoff_screen_attenuation(link_10m(39.0), s) - kirchhoff_screen_attenuation(link_10m(28.0), s);
    return {std::fabs(dm) <= 1.5 && std::fabs(dk) <= 1.5,
            "39-28 GHz difference: METIS " + fmt(dm) + " dB, Kirchhoff " + fmt(dk) + " dB"};
}

Outcome c5()
{
    auto scn = link_10m();
    scn.blockers = {testsupport::body_cylinder_at(5.0)};
    const auto r = sweep_blocker(scn, BlockageModel::gtd, along_trajectory(scn, 1.0, 9.0, 0.2, 0.875));
    const double a_tx = r.points.front().attenuation_db;
    const double a_rx = r.points.back().attenuation_db;
    return {a_tx - a_rx >= 5.0, "GTD 1 m from tx " + fmt(a_tx) + " dB, 1 m from rx " + fmt(a_rx) + " dB"};
}

Outcome c6()
{
    RandomStream d(606);
    auto noise = derive_substream(606, "shadowing", 0);
    std::vector<PathLossSample> ci(10000), fi(10000);
    for (std::size_t i = 0; i < ci.size(); ++i)
    {
        const double dist = 10.0 * std::pow(80.0, d.uniform());
        ci[i] = {dist, 28.0, shadowed_sample(CiModel{2.637, 5.47}, dist, 28.0, noise)};
        fi[i] = {dist, 28.0, shadowed_sample(AbgModel{2.374, 67.31, 0.0, 6.57}, dist, 28.0, noise)};
    }
    const auto mc = ci_fit(ci);
    const auto mf = fi_fit(fi);
    const bool pass = std::fabs(mc.n - 2.637) <= 0.05 && std::fabs(mc.sigma_db - 5.47) <= 0.3 &&
                      std::fabs(mf.alpha - 2.374) <= 0.05 && std::fabs(mf.sigma_db - 6.57) <= 0.3;
    return {pass, "CI n " + fmt(mc.n, 4) + " sigma " + fmt(mc.sigma_db) + "; FI alpha " + fmt(mf.alpha, 4) + " beta " +
                      fmt(mf.beta_db, 2) + " sigma " + fmt(mf.sigma_db)};
}

Outcome c7()
{
    const SounderProcessing proc;
    const double ts = proc.spec.sample_period_s();
    const double delays[] = {10, 50, 120};
    const double powers[] = {0, -6, -12};
    std::vector<Mpc> ch;
    for (int i = 0; i < 3; ++i)
        ch.push_back(Mpc::from_amplitude(delays[i] * ts, std::polar(std::pow(10.0, powers[i] / 20.0), 1.1 * i)));
    auto noise = derive_substream(707, "capture", 0);
    const auto cap = simulate_capture(ch, proc.spec, 30.0, noise);
    const auto rep = process_capture(cap.y_rx, cap.y_cal, proc);
    bool pass = rep.mpcs.size() == 3;
    std::string detail = std::to_string(rep.mpcs.size()) + " paths";
    for (std::size_t i = 0; pass && i < 3; ++i)
    {
        const double dd = rep.mpcs[i].delay_s / ts - delays[i];
        const double dp = rep.mpcs[i].power_db - powers[i];
        pass = std::fabs(dd) <= 1.0 + 1e-9 && std::fabs(dp) <= 0.5;
        detail += ", (" + fmt(rep.mpcs[i].delay_s / ts, 1) + ", " + fmt(rep.mpcs[i].power_db, 3) + " dB)";
    }
    auto pg_stream = derive_substream(707, "gain", 0);
    const double gain = measure_processing_gain(proc.spec, 0.0, pg_stream);
    pass = pass && std::fabs(gain - 36.0) <= 1.0;
    return {pass, detail + "; processing gain " + fmt(gain, 2) + " dB"};
}

Outcome c8()
{
    const double d0 = rms_delay_spread({Mpc{30e-9, -7.0, {}}});
    const double d1 = rms_delay_spread({Mpc{0.0, 0.0, {}}, Mpc{100e-9, 0.0, {}}});
    const double d2 = rms_delay_spread({Mpc{0.0, 0.0, {}}, Mpc{100e-9, 10.0 * std::log10(0.25), {}}});
    const bool pass = d0 == 0.0 && std::fabs(d1 - 50e-9) <= 1e-12 * 50e-9 && std::fabs(d2 - 40e-9) <= 1e-12 * 40e-9;
    return {pass, "DS " + fmt(d0 * 1e9, 12) + ", " + fmt(d1 * 1e9, 12) + ", " + fmt(d2 * 1e9, 12) + " ns"};
}

Outcome c9()
{
    bool pass = true;
    std::string detail;
    for (double k : {1.0, 3.0, 10.0})
    {
        GbsmConfig cfg;
        cfg.k_factor_db = 10.0 * std::log10(k);
        double total = 0.0, los = 0.0, nlos = 0.0;
        const int n = 10000;
        for (int i = 0; i < n; ++i)
        {
            auto r = derive_substream(909, "realization", i);
            const auto p = synthesize_components(init_clusters(cfg, r), cfg, 0.0, 0, 0);
            for (std::size_t b = 0; b < p.los.size(); ++b)
            {
                los += std::norm(p.los[b]);
                nlos += std::norm(p.nlos[b]);
                total += std::norm(p.los[b] + p.nlos[b]);
            }
        }
        const double mean = total / n;
        const double ratio = los / nlos;
        pass = pass && std::fabs(mean - 1.0) <= 0.03 && std::fabs(ratio / k - 1.0) <= 0.05;
        detail += "K=" + fmt(k, 0) + ": E|h|^2 " + fmt(mean, 4) + ", LOS/NLOS " + fmt(ratio, 3) + "; ";
    }
    return {pass, detail};
}

Outcome c10()
{
    testsupport::TempDir d;
    write_archive(d / "two.cirb", testsupport::two_regime_archive(700, 1000, 1010));
    const int rc = testsupport::run_cli("analyze \"" + (d / "two.cirb").string() + "\" --stationarity --threshold 0.8 --out \"" +
                                        (d / "m.csv").string() + "\" --intervals \"" + (d / "i.csv").string() + "\"");
    if (rc != 0)
        return {false, "analyze exit code " + std::to_string(rc)};
    const auto rows = testsupport::csv_rows(d / "i.csv");
    if (rows.size() < 3)
        return {false, "no boundary detected"};
    const long b = std::stol(rows[2][0]);
    return {std::labs(b - 700) <= 5, "boundary at " + std::to_string(b) + ", " + std::to_string(rows.size() - 1) +
                                         " intervals"};
}

Outcome c11()
{
    testsupport::TempDir d;
    const std::string cfg = std::string(CHANTOOL_SOURCE_DIR) + "/configs/";
    write_archive(d / "two.cirb", testsupport::two_regime_archive(700, 1000, 1111));
    auto p = [&](const std::string &name) { return "\"" + (d / name).string() + "\""; };

    // each entry: arguments with a {} placeholder for the run tag, and the produced files
    struct Job
    {
        std::string name;
        std::function<std::string(const std::string &)> args;
        std::vector<std::string> outputs;
    };
    const std::vector<Job> jobs = {
        {"blockage", [&](const std::string &t) { return "blockage --config " + cfg + "blockage_crossing.ini --out " + p("b" + t + ".csv"); }, {"b"}},
        {"pathloss-synth", [&](const std::string &t) { return "pathloss-synth --config " + cfg + "pathloss_28ghz.ini --out " + p("s" + t + ".csv"); }, {"s"}},
        {"pathloss-fit", [&](const std::string &t) { return "pathloss-fit " + p("s" + t + ".csv") + " --model fi --out " + p("f" + t + ".json"); }, {"f"}},
        {"gbsm", [&](const std::string &t) { return "gbsm --config " + cfg + "gbsm_v2v.ini --out " + p("g" + t + ".cirb"); }, {"g"}},
        {"capture", [&](const std::string &t) { return "capture --config " + cfg + "sounder.ini --rx " + p("rx" + t + ".cirb") + " --cal " + p("cal" + t + ".cirb"); }, {"rx", "cal"}},
        {"sounder", [&](const std::string &t) { return "sounder --rx " + p("rx" + t + ".cirb") + " --cal " + p("cal" + t + ".cirb") + " --config " + cfg + "sounder.ini --out " + p("m" + t + ".csv"); }, {"m"}},
        {"analyze", [&](const std::string &t) { return "analyze " + p("two.cirb") + " --out " + p("c" + t + ".csv") + " --intervals " + p("i" + t + ".csv") + " --los-track " + p("l" + t + ".csv"); }, {"c", "i", "l"}},
    };
    const std::vector<std::pair<std::string, int>> runs = {{"a1", 1}, {"b1", 1}, {"a8", 8}, {"b8", 8}};
    std::string failed;
    for (const auto &[tag, threads] : runs)
        for (const auto &j : jobs)
            if (testsupport::run_cli(j.args(tag), threads) != 0)
                failed += " " + j.name + "(exit)";
    static const std::map<std::string, std::string> ext = {{"b", ".csv"}, {"s", ".csv"}, {"f", ".json"},
                                                           {"g", ".cirb"}, {"rx", ".cirb"}, {"cal", ".cirb"},
                                                           {"m", ".csv"}, {"c", ".csv"}, {"i", ".csv"},
                                                           {"l", ".csv"}};
    std::size_t compared = 0;
    for (const auto &j : jobs)
        for (const auto &o : j.outputs)
        {
            const auto ref = testsupport::slurp(d / (o + "a1" + ext.at(o)));
            for (const auto &[tag, threads] : runs)
            {
                (void)threads;
                if (ref.empty() || testsupport::slurp(d / (o + tag + ext.at(o))) != ref)
                    failed += " " + j.name + "(" + o + tag + ")";
                ++compared;
            }
        }
    return {failed.empty(), std::to_string(jobs.size()) + " subcommands, " + std::to_string(compared) +
                                " file comparisons at 1 and 8 threads" + (failed.empty() ? "" : "; mismatch:" + failed)};
}

Outcome c12()
{
    const auto t0 = std::chrono::steady_clock::now();
    const std::string cmd = std::string("\"") + CHANTOOL_PROPERTIES_PATH + "\" --gtest_brief=1 2>&1";
    FILE *pipe = popen(cmd.c_str(), "r");
    if (!pipe)
        return {false, "cannot start property suite"};
    std::string out;
    char buf[4096];
    while (std::fgets(buf, sizeof(buf), pipe))
        out += buf;
    const int rc = pclose(pipe);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string failed;
    std::istringstream lines(out);
    std::string line;
    while (std::getline(lines, line))
        if (line.rfind("[  FAILED  ] Property.", 0) == 0 && line.find(" ms)") != std::string::npos)
            failed += " " + line.substr(13, line.find(' ', 13) - 13);
    const bool pass = rc == 0 && secs < 120.0;
    return {pass, "runtime " + fmt(secs, 1) + " s" + (failed.empty() ? "" : "; failing:" + failed)};
}
} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"1 CI path loss at 1 km", c1},
        {"2 knife-edge oracle", c2},
        {"3 blockage bound ordering", c3},
        {"4 frequency trend of KED", c4},
        {"5 GTD tx/rx asymmetry", c5},
        {"6 path loss fit recovery", c6},
        {"7 sounder round trip and processing gain", c7},
        {"8 RMS delay spread hand cases", c8},
        {"9 GBSM normalization and Ricean split", c9},
        {"10 stationarity boundary", c10},
        {"11 CLI determinism", c11},
        {"12 property suites", c12},
    };
    int failures = 0;
    for (const auto &[name, fn] : criteria)
    {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try
        {
            o = fn();
        }
        catch (const std::exception &e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << name << ": " << o.detail << " (" << fmt(secs, 2) << " s)"
                  << std::endl;
        failures += o.pass ? 0 : 1;
    }
    std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failures == 0 ? 0 : 1;
}
