#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"

namespace fs = std::filesystem;
using namespace harmonious;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "harmonious");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("harmonious_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string p(const std::string& name) const { return (dir_ / name).string(); }

    static std::string slurp(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    fs::path dir_;
};

}  // namespace

TEST(CliGen, Examples) {
    auto r = run({"gen", "--nodes", "4"});
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(r.out == "0,1,2,1\n0,1,1,1\n" || r.out == "0,1,1,1\n0,1,2,1\n") << r.out;
    EXPECT_EQ(run({"gen", "--nodes", "7", "--count-only"}).out, "11\n");
    EXPECT_EQ(run({"gen", "--nodes", "1"}).out, "0\n");
    EXPECT_EQ(run({"gen", "--nodes", "0"}).code, 2);
    EXPECT_EQ(run({"gen", "--nodes", "x"}).code, 2);
    EXPECT_EQ(run({"gen"}).code, 2);
}

TEST(CliCount, Examples) {
    auto r = run({"count", "--nodes", "10"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "enumerated=106 formula=106\n");
    EXPECT_EQ(run({"count", "--nodes", "3"}).out, "enumerated=1 formula=1\n");
    EXPECT_EQ(run({"count", "--nodes", "14"}).out, "enumerated=3159 formula=3159\n");
    EXPECT_EQ(run({"count", "--nodes", "0"}).code, 2);
}

TEST(CliSolve, Examples) {
    auto r = run({"solve", "--levels", "0,1,1", "--seed", "7"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto c = parse_certificate(r.out);
    EXPECT_TRUE(verify_certificate(c));
    EXPECT_EQ(c.seed, 7u);

    r = run({"solve", "--levels", "0,1,1,1", "--solver", "twostage"});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(parse_certificate(r.out).solver, SolverTag::TwoStage);

    r = run({"solve", "--levels", "0,2,1"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("index 1"), std::string::npos);
}

TEST(CliSolve, DefaultSeedIsReproducible) {
    auto a = run({"solve", "--levels", "0,1,2,3,2,1,2,1"});
    auto b = run({"solve", "--levels", "0,1,2,3,2,1,2,1"});
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
}

TEST(CliSolve, FailureRecord) {
    // P5 has no root-duplicate labelling, so backtracking alone fails
    auto r = run({"solve", "--levels", "0,1,2,1,2", "--solver", "backtrack"});
    EXPECT_EQ(r.code, 1);
    auto j = nlohmann::json::parse(r.out);
    EXPECT_FALSE(j["success"].get<bool>());
    EXPECT_EQ(j["attempts"][0]["solver"], "backtrack");
    EXPECT_EQ(j["attempts"][0]["runs"], 20);
}

TEST(CliSolve, SolverFlags) {
    auto r = run({"solve", "--levels", "0,1,2,1,2", "--solver", "backtrack", "--restarts", "3",
                  "--backtrack-limit", "5"});
    EXPECT_EQ(r.code, 1);
    auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["attempts"][0]["runs"], 3);
    EXPECT_LE(j["attempts"][0]["backtracks"].get<int>(), 15);

    r = run({"solve", "--levels", "0,1,2,1", "--pipeline", "tabu,backtrack"});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(parse_certificate(r.out).solver, SolverTag::Tabu);

    EXPECT_EQ(run({"solve", "--levels", "0,1", "--perturbation", "2"}).code, 2);
    EXPECT_EQ(run({"solve", "--levels", "0,1", "--pipeline", "tabu,tabu"}).code, 2);
    EXPECT_EQ(run({"solve", "--levels", "0,1", "--pipeline", "magic"}).code, 2);
    EXPECT_EQ(run({"solve", "--levels", "0,1", "--tenure", "-3"}).code, 2);
    EXPECT_EQ(run({"solve", "--levels", "0,1", "--solver", "magic"}).code, 2);
    EXPECT_EQ(run({"solve", "--levels", "0,1,2,3,4,5,6,7,8,9,10", "--solver", "exhaustive"}).code, 2);
}

TEST_F(CliTest, ConfigFile) {
    {
        std::ofstream cfg(p("c.cfg"));
        cfg << "# tight limits\nrestarts = 2\nbacktrack_limit=1\n\nstall_limit=0\n";
    }
    auto r = run({"solve", "--levels", "0,1,2,1,2", "--solver", "backtrack", "--config", p("c.cfg")});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(nlohmann::json::parse(r.out)["attempts"][0]["runs"], 2);
    // flags override the file
    r = run({"solve", "--levels", "0,1,2,1,2", "--solver", "backtrack", "--config", p("c.cfg"), "--restarts", "4"});
    EXPECT_EQ(nlohmann::json::parse(r.out)["attempts"][0]["runs"], 4);

    {
        std::ofstream cfg(p("bad.cfg"));
        cfg << "restarts=2\nbogus=1\n";
    }
    r = run({"solve", "--levels", "0,1", "--config", p("bad.cfg")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find(":2:"), std::string::npos);
    EXPECT_EQ(run({"solve", "--levels", "0,1", "--config", p("missing.cfg")}).code, 2);
}

TEST_F(CliTest, SweepAndVerify) {
    auto r = run({"sweep", "--min", "2", "--max", "9", "--seed", "1", "--jobs", "4", "--out", p("r.jsonl"),
                  "--checkpoint", p("c.txt"), "--report", p("rep.jsonl")});
    ASSERT_EQ(r.code, 0) << r.err;
    auto v = run({"verify", p("r.jsonl")});
    EXPECT_EQ(v.code, 0);
    EXPECT_EQ(v.out, "verified 94 certificates\n");
    EXPECT_NE(slurp(p("c.txt")).find("seed=1 "), std::string::npos);

    // resuming a finished sweep changes nothing
    const auto before = slurp(p("r.jsonl"));
    r = run({"sweep", "--min", "2", "--max", "9", "--seed", "1", "--out", p("r.jsonl"), "--checkpoint", p("c.txt")});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(slurp(p("r.jsonl")), before);

    // a different seed against the same checkpoint is refused
    r = run({"sweep", "--min", "2", "--max", "9", "--seed", "2", "--out", p("r.jsonl"), "--checkpoint", p("c.txt")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("--fresh"), std::string::npos);
}

TEST_F(CliTest, SweepSabotageExitsOne) {
    auto r = run({"sweep", "--min", "5", "--max", "8", "--out", p("r.jsonl"), "--restarts", "0", "--max-iters", "0",
                  "--twostage-runs", "0"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("candidate counterexample"), std::string::npos);
}

TEST_F(CliTest, SweepIoError) {
    auto r = run({"sweep", "--min", "2", "--max", "3", "--out", p("nope/r.jsonl")});
    EXPECT_EQ(r.code, 2);
}

TEST_F(CliTest, VerifyFailures) {
    {
        std::ofstream f(p("mut.jsonl"));
        f << R"({"n":4,"levels":[0,1,2,1],"labels":[0,0,1,2],"solver":"twostage","seed":1})" << "\n";
        f << R"({"n":4,"levels":[0,1,2,1],"labels":[1,0,2,0],"solver":"twostage","seed":1})" << "\n";
    }
    auto r = run({"verify", p("mut.jsonl")});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("line 2"), std::string::npos);
    EXPECT_NE(r.err.find("duplicate edge label"), std::string::npos);

    {
        std::ofstream f(p("onto.jsonl"));
        f << R"({"n":4,"levels":[0,1,2,1],"labels":[0,0,1,1],"solver":"twostage","seed":1})" << "\n";
    }
    r = run({"verify", p("onto.jsonl")});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("label multiset not onto"), std::string::npos);

    {
        std::ofstream f(p("bad.jsonl"));
        f << R"({"n":4,"levels":[0,1,2,1],"labels":[0,0,1,2],"solver":"twostage","seed":1})" << "\n";
        f << "{broken\n";
    }
    r = run({"verify", p("bad.jsonl")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("line 2"), std::string::npos);

    { std::ofstream f(p("empty.jsonl")); }
    r = run({"verify", p("empty.jsonl")});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.err.find("warning"), std::string::npos);

    EXPECT_EQ(run({"verify", p("missing.jsonl")}).code, 2);
}

TEST(CliUsage, Errors) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({"gen", "--nodes", "3", "--bogus"}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
}
