#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string kCli = BPGOF_CLI_PATH;

struct CliRun {
    int code;
    std::string out;
};

CliRun run(const std::string& args) {
    const fs::path out = fs::temp_directory_path() / ("bpgof_cli_" + std::to_string(::getpid()) + ".out");
    const std::string cmd = kCli + " " + args + " > " + out.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    std::ifstream in(out);
    std::stringstream ss;
    ss << in.rdbuf();
    fs::remove(out);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir = fs::temp_directory_path() / ("bpgof_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }
    std::string path(const std::string& name) const { return (dir / name).string(); }
    void write(const std::string& name, const std::string& text) const { std::ofstream(dir / name) << text; }

    fs::path dir;
};

} // namespace

TEST_F(CliTest, SampleThenTest) {
    ASSERT_EQ(run("sample --theta 1,1,0.25 --n 40 --seed 3 --out " + path("d.csv")).code, 0);
    const CliRun r = run("test --input " + path("d.csv") + " --stat tn,wn,crockett --boot 19 --seed 5 --workers 1");
    ASSERT_EQ(r.code, 0) << r.out;
    const auto j = nlohmann::json::parse(r.out);
    ASSERT_TRUE(j.is_array());
    EXPECT_EQ(j.size(), 3u);
    EXPECT_EQ(j[0]["n"], 40);
    EXPECT_EQ(j[0]["B"], 19);
}

TEST_F(CliTest, SameSeedSameReport) {
    ASSERT_EQ(run("sample --theta 1,1,0.25 --n 30 --seed 4 --out " + path("d.csv")).code, 0);
    const std::string args = "test --input " + path("d.csv") + " --stat wn --boot 19 --seed 8";
    EXPECT_EQ(run(args + " --workers 1").out, run(args + " --workers 2").out);
}

TEST_F(CliTest, InputErrorsExitTwo) {
    write("empty.csv", "");
    write("bad.csv", "x1,x2\n1,2\n1,z\n");
    const CliRun e = run("test --input " + path("empty.csv"));
    EXPECT_EQ(e.code, 2);
    const CliRun b = run("test --input " + path("bad.csv"));
    EXPECT_EQ(b.code, 2);
    EXPECT_NE(b.out.find("3"), std::string::npos);
    EXPECT_EQ(run("test --input " + path("missing.csv")).code, 2);
    EXPECT_EQ(run("sample --theta 1,1,5 --n 10").code, 2);
    EXPECT_EQ(run("simulate-power --family 'BB(2;0.5)' --reps 1").code, 2);
    EXPECT_EQ(run("test --input " + path("bad.csv") + " --stat nope").code, 2);
    EXPECT_EQ(run("--bogus").code, 2);
}

TEST_F(CliTest, ConfigFileOverridesFlags) {
    ASSERT_EQ(run("sample --theta 1,1,0.25 --n 30 --seed 4 --out " + path("d.csv")).code, 0);
    write("run.cfg", "boot = 9\n# comment\nstat = wn\n");
    const CliRun r = run("--config " + path("run.cfg") + " test --input " + path("d.csv") + " --boot 49 --seed 2");
    ASSERT_EQ(r.code, 0) << r.out;
    const auto j = nlohmann::json::parse(r.out);
    const auto& rep = j.is_array() ? j[0] : j;
    EXPECT_EQ(rep["B"], 9);
}

TEST_F(CliTest, SimulateShardAndMerge) {
    const std::string base = "simulate-size --theta 1,1,0.25 --n 20 --reps 4 --boot 9 --seed 6 --stat wn --workers 1";
    ASSERT_EQ(run(base + " --shard 0/2 --dump " + path("s0.json") + " --out " + path("o0.json")).code, 0);
    ASSERT_EQ(run(base + " --shard 1/2 --dump " + path("s1.json") + " --out " + path("o1.json")).code, 0);
    ASSERT_EQ(run(base + " --format csv --out " + path("whole.csv")).code, 0);
    const CliRun m = run("merge " + path("s0.json") + " " + path("s1.json") + " --format csv");
    ASSERT_EQ(m.code, 0) << m.out;
    std::ifstream in(path("whole.csv"));
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(m.out, ss.str());
}

TEST_F(CliTest, SimulatePowerAndBench) {
    const CliRun p = run("simulate-power --family 'BB(2;0.61,0.01,0.01)' --n 20 --reps 2 --boot 9 --stat wn,ib --format csv");
    ASSERT_EQ(p.code, 0) << p.out;
    EXPECT_NE(p.out.find("f05"), std::string::npos);
    const CliRun b = run("bench --n 20 --reps 1 --boot 9 --stat wn --format csv");
    ASSERT_EQ(b.code, 0) << b.out;
    EXPECT_NE(b.out.find("wn"), std::string::npos);
}

TEST_F(CliTest, Help) {
    const CliRun h = run("--help");
    EXPECT_EQ(h.code, 0);
    EXPECT_NE(h.out.find("simulate-size"), std::string::npos);
}
