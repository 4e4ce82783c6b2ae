// End-to-end checks of the command-line driver. Each test launches the real
// binary (path in QCLSENSE_BIN), captures its combined output, and inspects
// exit codes plus the files it leaves behind.

#include "qclsense/analysis.hpp"
#include "qclsense/ansatz.hpp"
#include "qclsense/io.hpp"
#include "qclsense/sensing.hpp"
#include "qclsense/training.hpp"

#include "json.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace {

using namespace qclsense;

std::string cli_path() {
    const char* bin = std::getenv("QCLSENSE_BIN");
    if (bin == nullptr || *bin == '\0')
        throw std::runtime_error("QCLSENSE_BIN must point at the qclsense binary");
    return bin;
}

struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout and stderr interleaved
};

CliResult run_cli(const std::string& args) {
    const std::string cmd = cli_path() + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) throw std::runtime_error("popen failed for: " + cmd);
    CliResult result;
    char buffer[4096];
    std::size_t n = 0;
    while ((n = std::fread(buffer, 1, sizeof buffer, pipe)) > 0) result.output.append(buffer, n);
    const int status = pclose(pipe);
    if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
    return result;
}

std::string tmp_path(const std::string& name) {
    return ::testing::TempDir() + "qclsense_cli_" + name;
}

SensingModel single_qubit_model() {
    SensingModel model;
    model.L = 1;
    model.t_sense = 1.0;
    model.seed = 0;
    model.h = Eigen::VectorXd::Constant(1, 1.2);
    model.J = Eigen::MatrixXd::Zero(1, 1);
    return model;
}

TEST(CliBasicsTest, VersionFlagPrintsVersionAndExitsZero) {
    const CliResult r = run_cli("--version");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NE(r.output.find("0.1.0"), std::string::npos);
}

TEST(CliBasicsTest, HelpExitsZero) {
    EXPECT_EQ(run_cli("--help").exit_code, 0);
    EXPECT_EQ(run_cli("train --help").exit_code, 0);
}

TEST(CliBasicsTest, MissingSubcommandExitsTwo) {
    EXPECT_EQ(run_cli("").exit_code, 2);
}

TEST(CliBasicsTest, UnknownOptionExitsTwo) {
    const std::string out = tmp_path("unknown_opt.json");
    EXPECT_EQ(run_cli("gen-model -L 2 --bogus 3 -o " + out).exit_code, 2);
}

TEST(CliBasicsTest, MissingRequiredOptionExitsTwo) {
    EXPECT_EQ(run_cli("gen-model --seed 1 -o " + tmp_path("no_L.json")).exit_code, 2);
}

TEST(CliGenModelTest, WritesModelAndManifest) {
    const std::string out = tmp_path("gen.json");
    const CliResult r = run_cli("gen-model -L 3 --seed 5 --t-sense 1.5 -o " + out);
    ASSERT_EQ(r.exit_code, 0) << r.output;

    const SensingModel model = read_model(out);
    EXPECT_EQ(model.L, 3);
    EXPECT_EQ(model.seed, 5u);
    EXPECT_DOUBLE_EQ(model.t_sense, 1.5);

    const SensingModel direct = sample_model(3, 5, 1.5);
    EXPECT_EQ(model.h, direct.h);
    EXPECT_EQ(model.J, direct.J);

    const auto manifest = nlohmann::json::parse(read_text_file(out + ".manifest.json"));
    EXPECT_EQ(manifest.at("tool"), "qclsense");
    EXPECT_EQ(manifest.at("settings").at("seed"), 5);
    EXPECT_EQ(manifest.at("outputs").at(out), file_digest(out));
    // argv is recorded verbatim after the binary path
    const auto& cmd = manifest.at("command");
    ASSERT_GE(cmd.size(), 2u);
    EXPECT_EQ(cmd[1], "gen-model");
}

TEST(CliGenModelTest, RerunsAreByteIdentical) {
    const std::string a = tmp_path("gen_a.json");
    const std::string b = tmp_path("gen_b.json");
    ASSERT_EQ(run_cli("gen-model -L 2 --seed 9 -o " + a).exit_code, 0);
    ASSERT_EQ(run_cli("gen-model -L 2 --seed 9 -o " + b).exit_code, 0);
    EXPECT_EQ(read_text_file(a), read_text_file(b));
}

TEST(CliResponseTest, CsvMatchesLibrarySweep) {
    const std::string model_path = tmp_path("resp_model.json");
    const std::string out = tmp_path("resp.csv");
    ASSERT_EQ(run_cli("gen-model -L 2 --seed 3 -o " + model_path).exit_code, 0);
    const CliResult r =
        run_cli("response --model " + model_path + " --depth 4 --grid -0.75:0.75:0.25 -o " + out);
    ASSERT_EQ(r.exit_code, 0) << r.output;

    const CsvTable table = read_csv(out);
    ASSERT_EQ(table.header, (std::vector<std::string>{"I", "expectation"}));
    ASSERT_EQ(table.rows.size(), 7u);

    const SensingModel model = read_model(model_path);
    AnsatzConfig config;
    config.depth = 4;
    const ResponseCurve curve = response_curve(ParameterVector::zeros(config, model.L), model,
                                               config, make_grid(-0.75, 0.75, 0.25));
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
        EXPECT_EQ(parse_double(table.rows[k][0]), curve.grid(Eigen::Index(k)));
        EXPECT_EQ(parse_double(table.rows[k][1]), curve.values(Eigen::Index(k)));
    }
}

TEST(CliResponseTest, RangeOutReportsDynamicRange) {
    const std::string model_path = tmp_path("range_model.json");
    const std::string out = tmp_path("range_resp.csv");
    const std::string range_out = tmp_path("range.json");
    ASSERT_EQ(run_cli("gen-model -L 2 --seed 1 -o " + model_path).exit_code, 0);
    const CliResult r = run_cli("response --model " + model_path + " --grid -1:1:0.05 -o " + out +
                                " --range-out " + range_out);
    ASSERT_EQ(r.exit_code, 0) << r.output;

    const auto range_json = nlohmann::json::parse(read_text_file(range_out));
    const SensingModel model = read_model(model_path);
    AnsatzConfig config;
    const ResponseCurve curve = response_curve(ParameterVector::zeros(config, model.L), model,
                                               config, make_grid(-1.0, 1.0, 0.05));
    const DynamicRangeResult range = dynamic_range(curve, default_slope_tie_tol(model.L));
    EXPECT_EQ(range_json.at("I_lo").get<double>(), range.I_lo);
    EXPECT_EQ(range_json.at("I_hi").get<double>(), range.I_hi);
    EXPECT_EQ(range_json.at("violations").get<int>(),
              monotonicity_violations(curve, default_slope_tie_tol(model.L)));
}

TEST(CliResponseTest, BadGridSpecExitsTwo) {
    const std::string model_path = tmp_path("badgrid_model.json");
    ASSERT_EQ(run_cli("gen-model -L 2 --seed 1 -o " + model_path).exit_code, 0);
    const CliResult r =
        run_cli("response --model " + model_path + " --grid 0:1 -o " + tmp_path("badgrid.csv"));
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.output.find("from:to:step"), std::string::npos);
}

TEST(CliResponseTest, MissingModelFileExitsOne) {
    const CliResult r = run_cli("response --model " + tmp_path("no_such_model.json") + " -o " +
                                tmp_path("missing.csv"));
    EXPECT_EQ(r.exit_code, 1);
}

TEST(CliConfigTest, ConfigFillsOptionsAndExplicitFlagsWin) {
    const std::string cfg = tmp_path("cfg.json");
    const std::string out = tmp_path("cfg_model.json");
    // qubits and seed come from the file, but the command line overrides seed;
    // t_sense exercises the underscore-to-dash key fallback
    write_text_file(cfg, "{\"qubits\": 2, \"seed\": 7, \"t_sense\": 2.0}\n");
    const CliResult r = run_cli("gen-model --config " + cfg + " --seed 9 -o " + out);
    ASSERT_EQ(r.exit_code, 0) << r.output;

    const SensingModel model = read_model(out);
    EXPECT_EQ(model.L, 2);
    EXPECT_EQ(model.seed, 9u);
    EXPECT_DOUBLE_EQ(model.t_sense, 2.0);

    const auto manifest = nlohmann::json::parse(read_text_file(out + ".manifest.json"));
    EXPECT_EQ(manifest.at("settings").at("config"), cfg);
    EXPECT_TRUE(manifest.at("inputs").contains(cfg));
}

TEST(CliConfigTest, UnknownConfigKeyExitsTwo) {
    const std::string cfg = tmp_path("cfg_bad.json");
    write_text_file(cfg, "{\"bogus\": 1}\n");
    const CliResult r =
        run_cli("gen-model --config " + cfg + " -L 2 -o " + tmp_path("cfg_bad_model.json"));
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.output.find("unknown option"), std::string::npos);
}

TEST(CliConfigTest, MalformedConfigExitsTwo) {
    const std::string cfg = tmp_path("cfg_broken.json");
    write_text_file(cfg, "{not json\n");
    const CliResult r =
        run_cli("gen-model --config " + cfg + " -L 2 -o " + tmp_path("cfg_broken_model.json"));
    EXPECT_EQ(r.exit_code, 2);
}

// Trains one cheap single-qubit instance and shares the artifacts with the
// figure and plot smoke tests below.
class CliTrainedFixture : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        model_path_ = tmp_path("fix_model.json");
        params_path_ = tmp_path("fix_trained.json");
        write_model(model_path_, single_qubit_model());
        const CliResult r = run_cli("train --model " + model_path_ + " -o " + params_path_ +
                                    " --depth 2 -N 15 --data-seed 7 --init-seed 1 --restarts 6" +
                                    " --max-iterations 300 --cost-tolerance 1e-9");
        train_exit_ = r.exit_code;
        train_output_ = r.output;
    }

    static std::string model_path_;
    static std::string params_path_;
    static int train_exit_;
    static std::string train_output_;
};

std::string CliTrainedFixture::model_path_;
std::string CliTrainedFixture::params_path_;
int CliTrainedFixture::train_exit_ = -1;
std::string CliTrainedFixture::train_output_;

TEST_F(CliTrainedFixture, TrainConvergesAndWritesArtifacts) {
    ASSERT_EQ(train_exit_, 0) << train_output_;
    const std::string stem = tmp_path("fix_trained");

    const ParamsFile best = read_params(params_path_);
    EXPECT_EQ(best.depth, 2);
    EXPECT_EQ(best.sharing, Sharing::shared);
    EXPECT_EQ(best.theta.size(), 6u);

    const ParamsFile init = read_params(stem + "_init.json");
    EXPECT_EQ(init.theta.size(), 6u);

    const CsvTable log = read_csv(stem + "_log.csv");
    ASSERT_EQ(log.header, (std::vector<std::string>{"iteration", "cost"}));
    ASSERT_GE(log.rows.size(), 2u);
    EXPECT_EQ(log.rows[0][0], "0");
    EXPECT_LT(parse_double(log.rows.back()[1]), 1e-9);

    const TrainingSet dataset = read_dataset(stem + "_data.csv");
    EXPECT_EQ(dataset.currents.size(), 15);

    const auto manifest = nlohmann::json::parse(read_text_file(params_path_ + ".manifest.json"));
    EXPECT_TRUE(manifest.at("settings").at("converged").get<bool>());
    EXPECT_LT(manifest.at("settings").at("final_cost").get<double>(), 1e-9);
    EXPECT_EQ(manifest.at("settings").at("parameters").at("D"), 2);
}

TEST_F(CliTrainedFixture, TrainRerunIsByteIdentical) {
    ASSERT_EQ(train_exit_, 0) << train_output_;
    const std::string again = tmp_path("fix_again.json");
    const CliResult r = run_cli("train --model " + model_path_ + " -o " + again +
                                " --depth 2 -N 15 --data-seed 7 --init-seed 1 --restarts 6" +
                                " --max-iterations 300 --cost-tolerance 1e-9");
    ASSERT_EQ(r.exit_code, 0) << r.output;
    EXPECT_EQ(read_text_file(again), read_text_file(params_path_));
    EXPECT_EQ(read_text_file(tmp_path("fix_again") + "_log.csv"),
              read_text_file(tmp_path("fix_trained") + "_log.csv"));
}

TEST_F(CliTrainedFixture, Fig3OverlaysTargetAndResponses) {
    ASSERT_EQ(train_exit_, 0) << train_output_;
    const std::string out = tmp_path("fix_fig3.csv");
    const CliResult r = run_cli("fig3 --model " + model_path_ + " --params " + params_path_ +
                                " --dataset " + tmp_path("fix_trained") + "_data.csv" +
                                " --untrained zero --grid -1:1:0.25 -o " + out);
    ASSERT_EQ(r.exit_code, 0) << r.output;

    const CsvTable table = read_csv(out);
    ASSERT_EQ(table.header, (std::vector<std::string>{"I", "target", "untrained", "trained"}));
    ASSERT_EQ(table.rows.size(), 9u);
    // the trained column reproduces the target it was fit to
    for (const auto& row : table.rows)
        EXPECT_NEAR(parse_double(row[3]), parse_double(row[1]), 2e-4);
    const TrainingSet points = read_dataset(tmp_path("fix_fig3") + "_points.csv");
    EXPECT_EQ(points.currents.size(), 15);
}

TEST_F(CliTrainedFixture, Fig4SweepsUncertaintyAndAliasMatches) {
    ASSERT_EQ(train_exit_, 0) << train_output_;
    const std::string out = tmp_path("fix_fig4.csv");
    const CliResult r = run_cli("fig4 --model " + model_path_ + " --params " + params_path_ +
                                " --grid -0.5:0.5:0.25 -M 3 -o " + out);
    ASSERT_EQ(r.exit_code, 0) << r.output;

    const CsvTable table = read_csv(out);
    ASSERT_EQ(table.header,
              (std::vector<std::string>{"I", "delta_model", "delta_theory", "flag"}));
    ASSERT_EQ(table.rows.size(), 5u);
    for (const auto& row : table.rows)
        EXPECT_TRUE(row[3] == "ok" || row[3] == "divergent");

    const std::string alias_out = tmp_path("fix_fig4_alias.csv");
    ASSERT_EQ(run_cli("delta-i --model " + model_path_ + " --params " + params_path_ +
                      " --grid -0.5:0.5:0.25 -M 3 -o " + alias_out)
                  .exit_code,
              0);
    EXPECT_EQ(read_text_file(alias_out), read_text_file(out));
}

TEST_F(CliTrainedFixture, PlotRendersCsvAsSvg) {
    ASSERT_EQ(train_exit_, 0) << train_output_;
    const std::string svg = tmp_path("fix_log.svg");
    const CliResult r =
        run_cli("plot -i " + tmp_path("fix_trained") + "_log.csv --title cost -o " + svg);
    ASSERT_EQ(r.exit_code, 0) << r.output;
    const std::string body = read_text_file(svg);
    EXPECT_NE(body.find("<svg"), std::string::npos);
    EXPECT_NE(body.find("cost"), std::string::npos);
}

TEST(CliTrainTest, NonConvergedRunExitsOneButWritesParams) {
    const std::string model_path = tmp_path("stall_model.json");
    const std::string out = tmp_path("stall.json");
    write_model(model_path, single_qubit_model());
    const CliResult r = run_cli("train --model " + model_path + " -o " + out +
                                " --depth 1 -N 5 --restarts 1 --max-iterations 2" +
                                " --cost-tolerance 1e-30");
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.output.find("above tolerance"), std::string::npos);
    EXPECT_NO_THROW(read_params(out));
}

TEST(CliFig2Test, SweepsQubitCountsIntoDirectory) {
    const std::string dir = tmp_path("fig2_dir");
    const CliResult r = run_cli("fig2 --L-list 2,3 --seed 1 --grid -1:1:0.25 -o " + dir);
    ASSERT_EQ(r.exit_code, 0) << r.output;

    const CsvTable summary = read_csv(dir + "/fig2_summary.csv");
    ASSERT_EQ(summary.header,
              (std::vector<std::string>{"L", "I_lo", "I_hi", "width", "violations"}));
    ASSERT_EQ(summary.rows.size(), 2u);
    EXPECT_EQ(summary.rows[0][0], "2");
    EXPECT_EQ(summary.rows[1][0], "3");
    for (const auto& row : summary.rows) EXPECT_GT(parse_double(row[3]), 0.0);

    for (int L : {2, 3}) {
        const CsvTable curve = read_csv(dir + "/fig2_L" + std::to_string(L) + ".csv");
        EXPECT_EQ(curve.rows.size(), 9u);
        EXPECT_NO_THROW(
            nlohmann::json::parse(read_text_file(dir + "/fig2_L" + std::to_string(L) +
                                                 "_range.json")));
    }
    EXPECT_NO_THROW(nlohmann::json::parse(read_text_file(dir + "/fig2.manifest.json")));
}

}  // namespace
