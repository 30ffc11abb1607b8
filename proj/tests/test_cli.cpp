#include "fusion_blocks/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int status;
    std::string out, err;
};

Result run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int s = fb::cli::run(args, out, err);
    return {s, out.str(), err.str()};
}

fs::path scratch() {
    static const fs::path dir = [] {
        auto p = fs::temp_directory_path() / ("fusion_blocks_cli_" + std::to_string(::getpid()));
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

std::string write_file(const std::string& name, const std::string& body) {
    const auto p = scratch() / name;
    std::ofstream(p) << body;
    return p.string();
}

std::string exported(const std::string& ring) {
    const auto p = (scratch() / (ring + ".json")).string();
    EXPECT_EQ(run({"catalog", "export", ring, "-o", p}).status, 0);
    return p;
}

const std::string data_dir = FB_DATA_DIR;

} // namespace

TEST(Cli, ExportThenVerifyRoundTrip) {
    for (const std::string name : {"ising", "lee_yang", "trivial", "su2_5", "ising*su2_2"}) {
        const auto r = run({"verify-ring", "--ring", exported(name)});
        EXPECT_EQ(r.status, 0) << name << r.out << r.err;
    }
}

TEST(Cli, RankExamples) {
    const auto ising = exported("ising");
    auto r = run({"rank", "--ring", ising, "--genus", "2"});
    EXPECT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(r.out, "10\n");
    EXPECT_EQ(run({"rank", "--ring", ising, "--graph", data_dir + "/theta.json"}).out, "10\n");
    EXPECT_EQ(run({"rank", "--ring", ising, "--graph", data_dir + "/dumbbell.json"}).out, "10\n");
    EXPECT_EQ(run({"rank", "--ring", ising, "--graph", data_dir + "/torus_eps.json"}).out, "1\n");
    EXPECT_EQ(run({"rank", "--ring", ising, "--genus", "0", "--legs", "sigma,sigma,sigma,sigma"}).out, "2\n");
    // (0, 2) is unstable: a vacuum leg is inserted unless disabled
    EXPECT_EQ(run({"rank", "--ring", ising, "--genus", "0", "--legs", "sigma,sigma"}).out, "1\n");
    EXPECT_EQ(run({"rank", "--ring", ising, "--genus", "0", "--legs", "sigma,sigma", "--no-vacuum-insertion"}).status, 2);
}

TEST(Cli, DecompCheck) {
    const auto r = run({"decomp-check", "--ring", exported("ising"), "--genus", "2"});
    EXPECT_EQ(r.status, 0) << r.err;
    EXPECT_NE(r.out.find("2 trivalent graphs, all give 10"), std::string::npos) << r.out;
    EXPECT_EQ(run({"decomp-check", "--ring", exported("ising"), "--genus", "4"}).status, 2);
}

TEST(Cli, VerifyRingReportsViolations) {
    auto j = fb::fusion::to_json(fb::catalog::ising());
    j["tensor"][0][1][1] = 0;
    const auto p = write_file("broken.json", j.dump());
    const auto r = run({"verify-ring", "--ring", p});
    EXPECT_EQ(r.status, 1);
    EXPECT_NE(r.out.find("identity"), std::string::npos);
}

TEST(Cli, SeriesCommands) {
    EXPECT_EQ(run({"series", "check-lemma", "--m", "2", "--order", "6"}).status, 0);
    for (int m = 1; m <= 6; ++m) EXPECT_EQ(run({"series", "check-lemma", "--m", std::to_string(m), "--order", "6"}).status, 0);
    const auto e = run({"series", "eisenstein", "--k", "1", "--order", "2"});
    EXPECT_EQ(e.status, 0);
    EXPECT_NE(e.out.find("q^0 z^0 u^2 : -1/12"), std::string::npos) << e.out;
    EXPECT_NE(e.out.find("q^1 z^0 u^2 : 2"), std::string::npos) << e.out;
    const auto p = run({"series", "p", "--m", "1", "--order", "2", "--z-order", "2"});
    EXPECT_NE(p.out.find("q^1 z^-1 u^1 : -1"), std::string::npos) << p.out;
    EXPECT_EQ(run({"series", "residue", "--wt", "3", "--m", "2", "--order", "4"}).status, 0);
    EXPECT_EQ(run({"series", "wp", "--m", "3", "--z-min", "-2", "--z-max", "4"}).status, 2); // window misses the pole
}

TEST(Cli, ZhuCheck) {
    for (const std::string id : {"a0", "am", "aminus1", "block", "sumformula"}) {
        const auto r = run({"zhu-check", "--identity", id, "--deg-max", "2", "--q-order", "4", "--z-window", "3"});
        EXPECT_EQ(r.status, 0) << id << r.out << r.err;
        EXPECT_NE(r.out.find("0 nonzero residuals"), std::string::npos) << r.out;
    }
    EXPECT_EQ(run({"zhu-check", "--identity", "block", "--m", "1", "--deg-max", "1"}).status, 2);
    EXPECT_EQ(run({"zhu-check", "--identity", "nope"}).status, 2);
}

TEST(Cli, JsonSchemaIsStable) {
    const auto ising = exported("ising");
    const std::vector<std::vector<std::string>> commands{
        {"--json", "catalog", "list"},
        {"--json", "verify-ring", "--ring", ising},
        {"--json", "rank", "--ring", ising, "--genus", "1", "--legs", "eps"},
        {"--json", "decomp-check", "--ring", ising, "--genus", "1", "--legs", "eps"},
        {"--json", "series", "check-lemma", "--m", "3", "--order", "4"},
        {"--json", "zhu-check", "--identity", "a0", "--deg-max", "1", "--q-order", "2"}};
    for (const auto& c : commands) {
        const auto r = run(c);
        ASSERT_EQ(r.status, 0) << c[1] << r.err;
        const json j = json::parse(r.out);
        for (const char* key : {"command", "inputs", "result", "residuals", "runtime-ms", "status"})
            EXPECT_TRUE(j.contains(key)) << c[1] << " missing " << key;
    }
    const json e = json::parse(run({"--json", "series", "eisenstein", "--k", "2", "--order", "1"}).out);
    // exact scalars serialize as strings
    EXPECT_TRUE(e["result"][0]["value"].is_string());
}

TEST(Cli, MalformedFileReportsLine) {
    const auto p = write_file("bad.json", "{\n  \"labels\": [\"1\"],\n  \"dual\": [0,\n}\n");
    const auto r = run({"verify-ring", "--ring", p});
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.err.find("line 4"), std::string::npos) << r.err;
    const auto q = write_file("missing.json", R"({"labels": ["1"], "tensor": [[[1]]]})");
    const auto s = run({"verify-ring", "--ring", q});
    EXPECT_EQ(s.status, 2);
    EXPECT_NE(s.err.find("'dual'"), std::string::npos) << s.err;
}

TEST(Cli, UnknownLabelListsValidOnes) {
    const auto r = run({"rank", "--ring", exported("ising"), "--genus", "1", "--legs", "psi"});
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.err.find("1, eps, sigma"), std::string::npos) << r.err;
}

TEST(Cli, ConfigValidation) {
    EXPECT_EQ(run({"--tolerance", "0.5", "catalog", "list"}).status, 2);
    EXPECT_EQ(run({"--tolerance", "0", "catalog", "list"}).status, 2);
    EXPECT_EQ(run({"--tolerance", "1e-8", "catalog", "smatrix", "su2_4"}).status, 0);
    EXPECT_EQ(run({"series", "eisenstein", "--k", "1", "--order", "0"}).status, 2);
    EXPECT_EQ(run({"catalog", "export", "e8"}).status, 2);
    EXPECT_NE(run({"no-such-command"}).status, 0);
}
