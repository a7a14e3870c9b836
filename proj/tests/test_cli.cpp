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


#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

#include "chantool/archive.hpp"
#include "chantool/config.hpp"
#include "chantool/csv.hpp"
#include "json.hpp"
#include "support.hpp"

using namespace chantool;
using testsupport::csv_rows;
using testsupport::run_cli;
using testsupport::slurp;
using testsupport::TempDir;
using testsupport::write_file;

namespace
{
const std::string configs = std::string(CHANTOOL_SOURCE_DIR) + "/configs/";

std::string q(const std::filesystem::path &p) { return "\"" + p.string() + "\""; }

std::size_t data_rows(const std::filesystem::path &p) { return csv_rows(p).size() - 1; }
} // namespace

TEST(CliBlockage, CrossingHas21Rows)
{
    TempDir d;
    ASSERT_EQ(run_cli("blockage --config " + configs + "blockage_crossing.ini --out " + q(d / "c.csv")), 0);
    const auto rows = csv_rows(d / "c.csv");
    ASSERT_EQ(rows.size(), 22u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"position_m", "att_db_metis", "att_db_kirchhoff", "att_db_gtd"}));
    EXPECT_EQ(rows[1][0], "-1.000000");
    EXPECT_EQ(rows[11][0], "0.000000");
    EXPECT_EQ(rows[21][0], "1.000000");
}

TEST(CliBlockage, AlongHas41Rows)
{
    TempDir d;
    ASSERT_EQ(run_cli("blockage --config " + configs + "blockage_along.ini --out " + q(d / "a.csv")), 0);
    EXPECT_EQ(data_rows(d / "a.csv"), 41u);
}

TEST(CliBlockage, SingleModelColumn)
{
    TempDir d;
    ASSERT_EQ(run_cli("blockage --model metis --config " + configs + "blockage_crossing.ini --out " + q(d / "m.csv")), 0);
    EXPECT_EQ(csv_rows(d / "m.csv")[0], (std::vector<std::string>{"position_m", "att_db_metis"}));
}

TEST(CliBlockage, MissingSection)
{
    TempDir d;
    write_file(d / "x.ini", "[gbsm]\nseed = 1\n");
    EXPECT_EQ(run_cli("blockage --config " + q(d / "x.ini") + " --out " + q(d / "o.csv")), 2);
    EXPECT_FALSE(std::filesystem::exists(d / "o.csv"));
}

TEST(CliBlockage, UnknownKeyNamesLine)
{
    TempDir d;
    write_file(d / "x.ini", "[blockage]\ncarrier_ghz = 28\nbody_widht_m = 0.4\n");
    EXPECT_EQ(run_cli("blockage --config " + q(d / "x.ini") + " --out " + q(d / "o.csv"), 0, (d / "log").string()), 2);
    const auto log = slurp(d / "log");
    EXPECT_NE(log.find(":3:"), std::string::npos) << log;
    EXPECT_NE(log.find("body_widht_m"), std::string::npos) << log;
}

TEST(CliPathLoss, SynthThenFitCi)
{
    TempDir d;
    ASSERT_EQ(run_cli("pathloss-synth --config " + configs + "pathloss_28ghz.ini --out " + q(d / "s.csv")), 0);
    EXPECT_EQ(data_rows(d / "s.csv"), 10000u);
    ASSERT_EQ(run_cli("pathloss-fit " + q(d / "s.csv") + " --model ci --out " + q(d / "r.json")), 0);
    const auto report = nlohmann::json::parse(slurp(d / "r.json"));
    EXPECT_EQ(report["model"], "ci");
    EXPECT_EQ(report["sample_count"], 10000);
    EXPECT_GE(report["ple"].get<double>(), 2.59);
    EXPECT_LE(report["ple"].get<double>(), 2.69);
}

TEST(CliPathLoss, SingleFrequencyAbgIsInputError)
{
    TempDir d;
    ASSERT_EQ(run_cli("pathloss-synth --config " + configs + "pathloss_28ghz.ini --out " + q(d / "s.csv")), 0);
    EXPECT_EQ(run_cli("pathloss-fit " + q(d / "s.csv") + " --model abg --out " + q(d / "r.json"), 0,
                      (d / "log").string()),
              2);
    EXPECT_NE(slurp(d / "log").find("use --model fi for single-frequency data"), std::string::npos);
}

TEST(CliPathLoss, NoiselessFileFitsExactly)
{
    TempDir d;
    std::string text = "distance_m,freq_ghz,pl_db\n";
    for (double dist : {10.0, 25.0, 60.0, 140.0, 400.0, 800.0})
        text += format_double(dist) + ",28," + format_double(ci_eval({2.4, 0.0}, dist, 28.0)) + "\n";
    write_file(d / "s.csv", text);
    for (const std::string model : {"ci", "fi"})
    {
        ASSERT_EQ(run_cli("pathloss-fit " + q(d / "s.csv") + " --model " + model + " --out " + q(d / "r.json")), 0);
        const auto report = nlohmann::json::parse(slurp(d / "r.json"));
        EXPECT_LT(report["sigma_db"].get<double>(), 1e-6) << model;
    }
}

TEST(CliPathLoss, BadHeader)
{
    TempDir d;
    write_file(d / "s.csv", "d,f,pl\n1,28,60\n");
    EXPECT_EQ(run_cli("pathloss-fit " + q(d / "s.csv") + " --out " + q(d / "r.json")), 2);
}

TEST(CliGbsm, DefaultRunHeader)
{
    TempDir d;
    write_file(d / "g.ini", "[gbsm]\nseed = 5\n");
    ASSERT_EQ(run_cli("gbsm --config " + q(d / "g.ini") + " --out " + q(d / "a.cirb")), 0);
    const auto a = read_archive(d / "a.cirb");
    EXPECT_EQ(a.header.n_time, 16000u);
    EXPECT_DOUBLE_EQ(a.header.dt_s, 62.5e-6);
}

TEST(CliGbsm, AntennaCountsAndDeterminism)
{
    TempDir d;
    write_file(d / "g.ini", "[gbsm]\nn_tx = 4\nn_rx = 4\nduration_s = 0.005\nbirth_rate_hz = 100\n"
                            "death_rate_hz = 10\nrx_vx_mps = 3\nseed = 9\n");
    ASSERT_EQ(run_cli("gbsm --config " + q(d / "g.ini") + " --out " + q(d / "a.cirb"), 1), 0);
    ASSERT_EQ(run_cli("gbsm --config " + q(d / "g.ini") + " --out " + q(d / "b.cirb"), 8), 0);
    const auto a = read_archive(d / "a.cirb");
    EXPECT_EQ(a.header.n_tx, 4);
    EXPECT_EQ(a.header.n_rx, 4);
    EXPECT_EQ(a.header.n_time, 80u);
    EXPECT_EQ(slurp(d / "a.cirb"), slurp(d / "b.cirb"));
}

TEST(CliGbsm, SizingErrorExit3)
{
    TempDir d;
    write_file(d / "g.ini", "[gbsm]\nduration_s = 1000\n");
    EXPECT_EQ(run_cli("gbsm --config " + q(d / "g.ini") + " --out " + q(d / "a.cirb")), 3);
    EXPECT_FALSE(std::filesystem::exists(d / "a.cirb"));
}

TEST(CliSounder, ThreeRowsPerSnapshot)
{
    TempDir d;
    const std::string cfg = configs + "sounder.ini";
    ASSERT_EQ(run_cli("capture --config " + cfg + " --rx " + q(d / "rx.cirb") + " --cal " + q(d / "cal.cirb")), 0);
    ASSERT_EQ(run_cli("sounder --rx " + q(d / "rx.cirb") + " --cal " + q(d / "cal.cirb") + " --config " + cfg +
                      " --out " + q(d / "m.csv")),
              0);
    const auto rows = csv_rows(d / "m.csv");
    std::vector<int> per_snapshot(4, 0);
    std::size_t i = 1;
    for (; i < rows.size() && rows[i][0] != "# stats"; ++i)
        ++per_snapshot.at(std::stoul(rows[i][0]));
    for (int c : per_snapshot)
        EXPECT_EQ(c, 3);
    ASSERT_LT(i + 1, rows.size());
    EXPECT_EQ(rows[i + 1], (std::vector<std::string>{"snapshot", "received_power_db", "path_loss_db", "rms_ds_ns"}));
    EXPECT_EQ(rows.size() - (i + 2), 4u);
}

TEST(CliSounder, SelfCaptureSingleRowAtZero)
{
    TempDir d;
    ASSERT_EQ(run_cli("capture --config " + configs + "sounder.ini --rx " + q(d / "rx.cirb") + " --cal " +
                      q(d / "cal.cirb")),
              0);
    ASSERT_EQ(run_cli("sounder --rx " + q(d / "cal.cirb") + " --cal " + q(d / "cal.cirb") + " --out " + q(d / "m.csv")),
              0);
    const auto rows = csv_rows(d / "m.csv");
    ASSERT_GE(rows.size(), 3u);
    EXPECT_EQ(rows[1], (std::vector<std::string>{"0", "0.0000", "0.0000"}));
    EXPECT_EQ(rows[2][0], "# stats");
}

TEST(CliSounder, LinkBudgetDelta)
{
    TempDir d;
    ASSERT_EQ(run_cli("capture --config " + configs + "sounder.ini --rx " + q(d / "rx.cirb") + " --cal " +
                      q(d / "cal.cirb")),
              0);
    write_file(d / "a.ini", "[sounder]\ngr_dbi = 25\n");
    write_file(d / "b.ini", "[sounder]\ngr_dbi = 20\nl_cable_db = 6.5\n");
    for (const char *name : {"a", "b"})
        ASSERT_EQ(run_cli("sounder --rx " + q(d / "rx.cirb") + " --cal " + q(d / "cal.cirb") + " --config " +
                          q(d / (std::string(name) + ".ini")) + " --out " + q(d / (std::string(name) + ".csv"))),
                  0);
    const auto a = csv_rows(d / "a.csv");
    const auto b = csv_rows(d / "b.csv");
    ASSERT_EQ(a.size(), b.size());
    const std::size_t last = a.size() - 1;
    EXPECT_NEAR(std::stod(a[last][2]) - std::stod(b[last][2]), 7.5, 1.5e-4);
}

TEST(CliSounder, InvalidCalibration)
{
    TempDir d;
    write_archive(d / "z.cirb", make_iq_archive({std::vector<cplx>(20000, cplx{0.0, 0.0})}, 1.0 / 1.28e9));
    ASSERT_EQ(run_cli("capture --config " + configs + "sounder.ini --rx " + q(d / "rx.cirb") + " --cal " +
                      q(d / "cal.cirb")),
              0);
    EXPECT_EQ(run_cli("sounder --rx " + q(d / "rx.cirb") + " --cal " + q(d / "z.cirb") + " --out " + q(d / "m.csv")), 2);
}

TEST(CliAnalyze, TwoRegimeBoundary)
{
    TempDir d;
    write_archive(d / "t.cirb", testsupport::two_regime_archive());
    ASSERT_EQ(run_cli("analyze " + q(d / "t.cirb") + " --stationarity --threshold 0.8 --out " + q(d / "m.csv") +
                      " --intervals " + q(d / "i.csv")),
              0);
    const auto iv = csv_rows(d / "i.csv");
    ASSERT_GE(iv.size(), 3u);
    const long boundary = std::stol(iv[2][0]);
    EXPECT_NEAR(boundary, 700, 5);
}

TEST(CliAnalyze, MatrixIsSymmetric)
{
    TempDir d;
    write_archive(d / "t.cirb", testsupport::two_regime_archive(20, 50));
    ASSERT_EQ(run_cli("analyze " + q(d / "t.cirb") + " --out " + q(d / "m.csv")), 0);
    const auto m = csv_rows(d / "m.csv");
    ASSERT_EQ(m.size(), 50u);
    for (std::size_t i = 0; i < 50; ++i)
    {
        ASSERT_EQ(m[i].size(), 50u);
        EXPECT_EQ(m[i][i], "1.000000");
        for (std::size_t j = 0; j < 50; ++j)
            EXPECT_EQ(m[i][j], m[j][i]);
    }
}

TEST(CliAnalyze, ThresholdOutOfRange)
{
    TempDir d;
    write_archive(d / "t.cirb", testsupport::two_regime_archive(20, 50));
    EXPECT_EQ(run_cli("analyze " + q(d / "t.cirb") + " --threshold 1.5 --out " + q(d / "m.csv")), 2);
    EXPECT_EQ(run_cli("analyze " + q(d / "t.cirb") + " --threshold 0 --out " + q(d / "m.csv")), 2);
}

TEST(CliAnalyze, MalformedArchives)
{
    TempDir d;
    write_archive(d / "t.cirb", testsupport::two_regime_archive(20, 50));
    const std::string good = slurp(d / "t.cirb");

    std::string bad_magic = good;
    bad_magic[0] = 'X';
    std::string bad_version = good;
    bad_version[4] = 2;
    std::string truncated = good.substr(0, good.size() - 1);
    std::string extended = good + "x";
    int k = 0;
    for (const auto &bytes : {bad_magic, bad_version, truncated, extended, good.substr(0, 10)})
    {
        const auto p = d / ("bad" + std::to_string(k++) + ".cirb");
        write_file(p, bytes);
        EXPECT_EQ(run_cli("analyze " + q(p) + " --out " + q(d / "m.csv")), 2) << k;
    }
}

TEST(CliAnalyze, LosTrack)
{
    TempDir d;
    write_file(d / "g.ini", "[gbsm]\nduration_s = 0.002\nseed = 2\n");
    ASSERT_EQ(run_cli("gbsm --config " + q(d / "g.ini") + " --out " + q(d / "a.cirb")), 0);
    ASSERT_EQ(run_cli("analyze " + q(d / "a.cirb") + " --out " + q(d / "m.csv") + " --los-track " + q(d / "l.csv")), 0);
    const auto rows = csv_rows(d / "l.csv");
    ASSERT_EQ(rows.size(), 33u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"t_s", "los_power_db"}));
}

TEST(CliGeneral, UnknownSubcommandAndMissingFile)
{
    TempDir d;
    EXPECT_EQ(run_cli("frobnicate"), 2);
    EXPECT_EQ(run_cli("blockage --config " + q(d / "nope.ini") + " --out " + q(d / "o.csv")), 2);
    EXPECT_EQ(run_cli("analyze " + q(d / "nope.cirb") + " --out " + q(d / "o.csv")), 2);
}

// Byte layout checked independently of the decoder
TEST(Archive, ByteLayout)
{
    TempDir d;
    CirArchive a;
    a.header.n_time = 2;
    a.header.n_tx = 1;
    a.header.n_rx = 3;
    a.header.n_delay = 5;
    a.header.sample_period_s = 0.5;
    a.header.t0_s = 1.25;
    a.header.dt_s = 2.0;
    for (int i = 0; i < 30; ++i)
        a.samples.emplace_back(static_cast<float>(i), static_cast<float>(-i));
    write_archive(d / "a.cirb", a);
    const auto bytes = slurp(d / "a.cirb");
    ASSERT_EQ(bytes.size(), 40u + 8u * 30u);
    EXPECT_EQ(bytes.substr(0, 4), "CIRB");
    auto u = [&](std::size_t off) { return static_cast<unsigned>(static_cast<unsigned char>(bytes[off])); };
    EXPECT_EQ(u(4) | (u(5) << 8), 1u);
    EXPECT_EQ(u(6) | (u(7) << 8) | (u(8) << 16) | (u(9) << 24), 2u);
    EXPECT_EQ(u(10), 1u);
    EXPECT_EQ(u(11), 3u);
    EXPECT_EQ(u(12) | (u(13) << 8) | (u(14) << 16) | (u(15) << 24), 5u);
    double f64 = 0.0;
    std::memcpy(&f64, bytes.data() + 16, 8); // little-endian host
    EXPECT_EQ(f64, 0.5);
    std::memcpy(&f64, bytes.data() + 24, 8);
    EXPECT_EQ(f64, 1.25);
    std::memcpy(&f64, bytes.data() + 32, 8);
    EXPECT_EQ(f64, 2.0);
    float f32 = 0.0f;
    std::memcpy(&f32, bytes.data() + 40 + 8 * 7 + 4, 4);
    EXPECT_EQ(f32, -7.0f);
    const auto back = read_archive(d / "a.cirb");
    EXPECT_EQ(back.samples, a.samples);
}

TEST(Config, ParsesAndRejects)
{
    const auto c = Config::parse("# c\n[blockage]\ncarrier_ghz = 39 ; inline\nmodel = gtd\n", "x.ini");
    EXPECT_EQ(c.get_double("blockage", "carrier_ghz", 0.0), 39.0);
    EXPECT_EQ(c.get_string("blockage", "model", ""), "gtd");
    EXPECT_THROW(Config::parse("[nope]\n"), ConfigError);
    EXPECT_THROW(Config::parse("carrier_ghz = 1\n"), ConfigError);
    EXPECT_THROW(Config::parse("[blockage]\ncarrier_ghz = 1\ncarrier_ghz = 2\n"), ConfigError);
    EXPECT_THROW(Config::parse("[blockage]\ncarrier_ghz =\n"), ConfigError);
    EXPECT_THROW(Config::parse("[blockage]\ncarrier_ghz = abc\n").get_double("blockage", "carrier_ghz", 0.0),
                 ConfigError);
    EXPECT_THROW(Config::parse("[gbsm]\nn_tx = 1.5\n").get_int("gbsm", "n_tx", 0), ConfigError);
}

TEST(Csv, NumberFormatting)
{
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(-0.0), "0");
    EXPECT_EQ(format_double(NAN), "nan");
    EXPECT_EQ(format_fixed(-0.00000001, 4), "0.0000");
    EXPECT_EQ(format_fixed(2.5, 2), "2.50");
}
