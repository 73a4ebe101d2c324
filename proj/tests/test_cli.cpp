#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct CommandResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

CommandResult run_cli(const std::string& args) {
    const std::string out_path = ::testing::TempDir() + "cli_output.txt";
    const std::string cmd = std::string(DIMIMO_CLI_PATH) + " " + args + " > " + out_path + " 2>&1";
    const int status = std::system(cmd.c_str());
    CommandResult res;
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(out_path);
    std::ostringstream ss;
    ss << in.rdbuf();
    res.output = ss.str();
    return res;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Cli, MissingModulationIsConfigError) {
    const auto res = run_cli("ber --nt 2 --nr 2 --snr 10 --bits 1000");
    EXPECT_EQ(res.exit_code, 2);
    EXPECT_NE(res.output.find("modulation required"), std::string::npos);
}

TEST(Cli, UnknownDetectorIsConfigError) {
    const auto res = run_cli("ber --mod 4 --nt 2 --nr 2 --snr 10 --bits 1000 --detectors FOO");
    EXPECT_EQ(res.exit_code, 2);
}

TEST(Cli, BadModulationIsConfigError) {
    const auto res = run_cli("ber --mod 12 --nt 2 --nr 2 --snr 10 --bits 1000");
    EXPECT_EQ(res.exit_code, 2);
}

TEST(Cli, BerGridRowCount) {
    const std::string csv = ::testing::TempDir() + "ber.csv";
    const auto res = run_cli("ber --nt 2 --nr 2 --mod 4 --snr 0:4:32 --bits 2000 --na 4 --seed 7 "
                             "--detectors MMSE,DI --out " + csv);
    ASSERT_EQ(res.exit_code, 0) << res.output;
    std::ifstream in(csv);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "detector,modulation,snr_db,ber,bits,seed");
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    EXPECT_EQ(rows, 9 * 2);  // 9 SNR points x 2 detectors
}

TEST(Cli, RerunByteIdentical) {
    const std::string a = ::testing::TempDir() + "ber_a.csv";
    const std::string b = ::testing::TempDir() + "ber_b.csv";
    const std::string flags = "ber --nt 2 --nr 2 --mod 16 --snr 6:6:18 --bits 2000 --na 4 --seed 9 "
                              "--detectors MMSE,DI --out ";
    ASSERT_EQ(run_cli(flags + a).exit_code, 0);
    ASSERT_EQ(run_cli(flags + b).exit_code, 0);
    const std::string body = read_file(a);
    EXPECT_FALSE(body.empty());
    EXPECT_EQ(body, read_file(b));
}

TEST(Cli, ConfigFileWithFlagOverride) {
    const std::string conf = ::testing::TempDir() + "run.conf";
    {
        std::ofstream os(conf);
        os << "nt=2\nnr=2\nmod=4\nsnr=10\nbits=2000\nna=4\nseed=3\ndetectors=MMSE\n";
    }
    const std::string csv = ::testing::TempDir() + "conf.csv";
    const auto res = run_cli("ber --config " + conf + " --seed 5 --out " + csv);
    ASSERT_EQ(res.exit_code, 0) << res.output;
    const std::string body = read_file(csv);
    // flag wins over config-file key
    EXPECT_NE(body.find(",5\n"), std::string::npos);
    EXPECT_EQ(body.find(",3\n"), std::string::npos);
}

TEST(Cli, WritesRunManifest) {
    const std::string csv = ::testing::TempDir() + "man.csv";
    const auto res = run_cli("ber --nt 2 --nr 2 --mod 4 --snr 10 --bits 1000 --na 4 --seed 19 "
                             "--out " + csv);
    ASSERT_EQ(res.exit_code, 0) << res.output;
    const std::string manifest = read_file(csv + ".manifest.json");
    EXPECT_NE(manifest.find("\"command\": \"ber\""), std::string::npos);
    EXPECT_NE(manifest.find("\"seed\": 19"), std::string::npos);
    EXPECT_NE(manifest.find("\"outputs\": [\"" + csv + "\"]"), std::string::npos);
    EXPECT_NE(manifest.find("\"started\""), std::string::npos);
}

TEST(Cli, TrajectorySchema) {
    const std::string csv = ::testing::TempDir() + "traj.csv";
    const auto res = run_cli("trajectory --nt 4 --nr 4 --mod 16 --snr 10 --seed 11 --out " + csv);
    ASSERT_EQ(res.exit_code, 0) << res.output;
    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "formulation,step,t,user,i_value,q_value");
    int rows = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    EXPECT_EQ(rows, 2 * 257 * 4);  // two formulations, 257 steps, 4 users
}

TEST(Cli, OracleCompareSchemaAndDominance) {
    const std::string csv = ::testing::TempDir() + "oracle.csv";
    const auto res = run_cli("oracle-compare --nt 2 --nr 2 --mod 4 --snr 8 --na 8 --seed 13 "
                             "--instances 10 --out " + csv);
    ASSERT_EQ(res.exit_code, 0) << res.output;
    EXPECT_NE(res.output.find("match rate:"), std::string::npos);
    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "instance,obj_mmse,obj_di,obj_oracle,match");
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++rows;
        double mmse = 0, di = 0, oracle = 0;
        long inst = 0;
        int match = 0;
        ASSERT_EQ(std::sscanf(line.c_str(), "%ld,%lf,%lf,%lf,%d", &inst, &mmse, &di, &oracle,
                              &match),
                  5);
        EXPECT_LE(oracle, di + 1e-9);
        EXPECT_LE(di, mmse + 1e-9);
    }
    EXPECT_EQ(rows, 10);
}

TEST(Cli, ThroughputSmallRun) {
    const std::string csv = ::testing::TempDir() + "tput.csv";
    const auto res = run_cli("throughput --nt 2 --nr 2 --snr 30 --blocks 2 --block-len 64 "
                             "--detectors MMSE --seed 17 --out " + csv);
    ASSERT_EQ(res.exit_code, 0) << res.output;
    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "detector,modulation,code_rate,snr_db,bler,throughput,seed");
    bool saw_envelope = false;
    std::string line;
    while (std::getline(in, line))
        if (line.find("MMSE,AMC,") == 0) saw_envelope = true;
    EXPECT_TRUE(saw_envelope);
}
