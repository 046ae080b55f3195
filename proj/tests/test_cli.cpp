#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Result {
    int status = -1;
    std::string output;
};

Result cli(const std::string& args) {
    const std::string cmd = std::string(EWAN_CLI) + " " + args + " 2>&1";
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[512];
    while (std::fgets(buf, sizeof buf, pipe)) r.output += buf;
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

fs::path work_dir() {
    static const fs::path dir = [] {
        const fs::path p = fs::temp_directory_path() / "ewan_cli_test";
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

std::vector<std::string> lines(const fs::path& p) {
    std::ifstream is(p);
    std::vector<std::string> out;
    for (std::string l; std::getline(is, l);) out.push_back(l);
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Cli, GenerateVerifyRun) {
    const auto dir = work_dir();
    auto r = cli("scenario gen --kind mh --rho 0 --seed 2 --out " + (dir / "sc").string());
    ASSERT_EQ(r.status, 0) << r.output;
    r = cli("verify --scenario " + (dir / "sc" / "mh.scn").string());
    EXPECT_EQ(r.status, 0) << r.output;
    r = cli("run --scenario " + (dir / "sc" / "mh.scn").string() + " --protocol ewan --seed 1 --out " +
            (dir / "run").string());
    ASSERT_EQ(r.status, 0) << r.output;
    const auto metrics = lines(dir / "run" / "metrics.csv");
    ASSERT_EQ(metrics.size(), 16u);
    EXPECT_EQ(metrics[0], "node,e_in,p,t_active,t_com,efficiency,liveness,downtime");
    EXPECT_GT(lines(dir / "run" / "rounds.csv").size(), 100u);
    EXPECT_GT(lines(dir / "run" / "events.log").size(), 10u);
}

TEST(Cli, CampaignRowsAndDeterminism) {
    const auto dir = work_dir();
    const auto scen = (fs::path(EWAN_SOURCE_DIR) / "scenarios" / "example.scn").string();
    auto args = "campaign --scenario-template " + scen + " --protocols ewan,single_hop --runs 20 --seed 4 --out ";
    auto r = cli(args + (dir / "c1").string());
    ASSERT_EQ(r.status, 0) << r.output;
    r = cli(args + (dir / "c2").string() + " --threads 1");
    ASSERT_EQ(r.status, 0) << r.output;
    const auto agg = lines(dir / "c1" / "aggregate.csv");
    EXPECT_EQ(agg.size(), 1u + 2u * 7u);
    EXPECT_EQ(slurp(dir / "c1" / "aggregate.csv"), slurp(dir / "c2" / "aggregate.csv"));
    EXPECT_EQ(slurp(dir / "c1" / "per_node.csv"), slurp(dir / "c2" / "per_node.csv"));
}

TEST(Cli, VerifyNamesBrokenBottleneckContract) {
    const auto dir = work_dir();
    ASSERT_EQ(cli("scenario gen --kind bn --seed 3 --out " + (dir / "bn").string()).status, 0);
    const auto path = dir / "bn" / "bn.scn";
    auto text = slurp(path);
    const auto pos = text.find("bottleneck_nodes = 1 2");
    ASSERT_NE(pos, std::string::npos);
    text.replace(pos, 22, "bottleneck_nodes = 1 9");
    std::ofstream(path) << text;
    const auto r = cli("verify --scenario " + path.string());
    EXPECT_EQ(r.status, 1);
    EXPECT_NE(r.output.find("bn:"), std::string::npos) << r.output;
}

TEST(Cli, RejectsUnknownProtocol) {
    const auto scen = (fs::path(EWAN_SOURCE_DIR) / "scenarios" / "example.scn").string();
    const auto r = cli("run --scenario " + scen + " --protocol lorawan --out " + (work_dir() / "x").string());
    EXPECT_NE(r.status, 0);
    EXPECT_NE(r.output.find("unknown protocol"), std::string::npos);
}

TEST(Cli, OutputDirectoryFromEnvironment) {
    const auto dir = work_dir() / "env";
    const auto scen = (fs::path(EWAN_SOURCE_DIR) / "scenarios" / "example.scn").string();
    const std::string cmd = "EWAN_OUT_DIR=" + dir.string() + " " + EWAN_CLI + " run --scenario " + scen +
                            " --protocol drb > /dev/null 2>&1";
    ASSERT_EQ(std::system(cmd.c_str()), 0);
    EXPECT_TRUE(fs::exists(dir / "metrics.csv"));
}
