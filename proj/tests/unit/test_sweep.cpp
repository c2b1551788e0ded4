#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include <harmonious/sweep.hpp>

using namespace harmonious;
namespace fs = std::filesystem;

namespace {

class SweepTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("harmonious_sweep_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path path(const std::string& name) const { return dir_ / name; }

    SweepOptions options(int lo, int hi, const std::string& tag) const {
        SweepOptions o;
        o.n_min = lo;
        o.n_max = hi;
        o.results = path(tag + ".jsonl");
        o.checkpoint = path(tag + ".ckpt");
        o.report = path(tag + ".report");
        return o;
    }

    static std::string slurp(const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    static std::vector<std::string> lines(const fs::path& p) {
        std::vector<std::string> out;
        std::ifstream in(p);
        std::string line;
        while (std::getline(in, line)) out.push_back(line);
        return out;
    }

    fs::path dir_;
};

SolverConfig sabotage() {
    SolverConfig cfg;
    cfg.restarts = 0;
    cfg.max_iters = 0;
    cfg.twostage_runs = 0;
    return cfg;
}

}  // namespace

TEST_F(SweepTest, TwoToNine) {
    auto o = options(2, 9, "a");
    auto r = sweep(o);
    ASSERT_TRUE(r.finished);
    ASSERT_EQ(r.reports.size(), 8u);
    std::uint64_t total = 0;
    for (const auto& rep : r.reports) {
        EXPECT_EQ(rep.trees_total, oracle_count_otter(rep.n));
        EXPECT_EQ(rep.trees_solved, rep.trees_total);
        EXPECT_TRUE(rep.failures.empty());
        EXPECT_EQ(rep.solved_by(SolverTag::TwoStage) + rep.solved_by(SolverTag::Backtrack) +
                      rep.solved_by(SolverTag::Tabu),
                  rep.trees_solved);
        total += rep.trees_total;
    }
    EXPECT_EQ(total, 94u);
    const auto certs = lines(o.results);
    ASSERT_EQ(certs.size(), 94u);
    for (const auto& line : certs) EXPECT_TRUE(verify_certificate(parse_certificate(line))) << line;
    EXPECT_EQ(lines(*o.report).size(), 8u);
    EXPECT_EQ(slurp(*o.checkpoint).rfind("n=2 completed=1 ", 0), 0u);
}

TEST_F(SweepTest, CertificateSeedsFollowStreamIndex) {
    auto o = options(7, 7, "s");
    sweep(o);
    const auto certs = lines(o.results);
    auto stream = free_trees(7);
    for (std::size_t i = 0; i < certs.size(); ++i) {
        auto c = parse_certificate(certs[i]);
        EXPECT_EQ(c.levels, *stream.next());
        EXPECT_EQ(c.seed, derive_seed(o.cfg.global_seed, 7, i));
    }
}

TEST_F(SweepTest, WorkerCountDoesNotChangeOutput) {
    auto a = options(2, 10, "a");
    a.workers = 1;
    a.block_size = 7;
    auto b = options(2, 10, "b");
    b.workers = 4;
    b.block_size = 7;
    sweep(a);
    sweep(b);
    EXPECT_EQ(slurp(a.results), slurp(b.results));
    EXPECT_EQ(slurp(*a.checkpoint), slurp(*b.checkpoint));
}

TEST_F(SweepTest, StagedRunMatchesUninterrupted) {
    auto whole = options(2, 10, "whole");
    whole.block_size = 10;
    sweep(whole);

    auto staged = options(2, 10, "staged");
    staged.block_size = 10;
    staged.max_blocks = 3;
    int rounds = 0;
    while (!sweep(staged).finished) ASSERT_LT(++rounds, 100);
    EXPECT_GT(rounds, 3);
    EXPECT_EQ(slurp(staged.results), slurp(whole.results));
    EXPECT_EQ(slurp(*staged.checkpoint), slurp(*whole.checkpoint));
    EXPECT_EQ(lines(*staged.report).size(), 9u);
}

TEST_F(SweepTest, TornWriteIsRolledBack) {
    auto whole = options(2, 9, "whole");
    whole.block_size = 5;
    sweep(whole);

    auto crash = options(2, 9, "crash");
    crash.block_size = 5;
    crash.max_blocks = 6;
    ASSERT_FALSE(sweep(crash).finished);
    // writer died after emitting lines the checkpoint never recorded
    const auto all = lines(whole.results);
    const auto kept = lines(crash.results).size();
    {
        std::ofstream out(crash.results, std::ios::app | std::ios::binary);
        out << all[kept] << "\n" << all[kept + 1] << "\n" << all[kept + 2].substr(0, 20);
    }
    crash.max_blocks.reset();
    ASSERT_TRUE(sweep(crash).finished);
    EXPECT_EQ(slurp(crash.results), slurp(whole.results));
}

TEST_F(SweepTest, RefusesForeignCheckpoint) {
    auto o = options(2, 6, "a");
    sweep(o);
    auto other = o;
    other.cfg.global_seed = 1;
    EXPECT_THROW(sweep(other), SweepError);
    other.fresh = true;
    EXPECT_TRUE(sweep(other).finished);

    {
        std::ofstream out(*o.checkpoint);
        out << "garbage\n";
    }
    EXPECT_THROW(sweep(o), SweepError);

    auto narrow = options(2, 6, "n");
    sweep(narrow);
    narrow.n_max = 4;
    EXPECT_THROW(sweep(narrow), SweepError);
}

TEST_F(SweepTest, SabotageRecordsFailures) {
    auto o = options(5, 9, "x");
    o.cfg = sabotage();
    auto r = sweep(o);
    ASSERT_TRUE(r.finished);
    std::uint64_t failures = 0, solved = 0;
    for (const auto& rep : r.reports) {
        EXPECT_EQ(rep.trees_solved + rep.failures.size(), rep.trees_total);
        EXPECT_EQ(rep.solved_by(SolverTag::Tabu), rep.trees_solved);
        failures += rep.failures.size();
        solved += rep.trees_solved;
    }
    EXPECT_GT(failures, 0u);
    EXPECT_EQ(lines(o.results).size(), solved);

    // the failures are solvable once limits return
    SolverConfig cfg;
    for (const auto& rep : r.reports) {
        for (const auto& f : rep.failures) {
            EXPECT_TRUE(solve_hybrid(Tree::from_level_sequence(f), cfg, 1).success) << format_level_sequence(f);
        }
    }
}

TEST_F(SweepTest, ResumeRecountsFailures) {
    auto whole = options(6, 8, "whole");
    whole.cfg = sabotage();
    whole.block_size = 4;
    auto expected = sweep(whole).reports;

    auto staged = options(6, 8, "staged");
    staged.cfg = sabotage();
    staged.block_size = 4;
    staged.max_blocks = 2;
    while (!sweep(staged).finished) {
    }
    const auto report_lines = lines(*staged.report);
    ASSERT_EQ(report_lines.size(), expected.size());
    for (std::size_t k = 0; k < expected.size(); ++k) {
        auto j = nlohmann::json::parse(report_lines[k]);
        EXPECT_EQ(j["failures"].size(), expected[k].failures.size());
        EXPECT_EQ(j["trees_solved"], expected[k].trees_solved);
    }
    EXPECT_EQ(slurp(staged.results), slurp(whole.results));
}

TEST_F(SweepTest, BadArguments) {
    auto o = options(3, 2, "a");
    EXPECT_THROW(sweep(o), std::invalid_argument);
    o = options(0, 2, "a");
    EXPECT_THROW(sweep(o), std::invalid_argument);
    o = options(2, 3, "a");
    o.workers = 0;
    EXPECT_THROW(sweep(o), std::invalid_argument);
    o = options(2, 3, "a");
    o.results = dir_ / "missing" / "x.jsonl";
    EXPECT_THROW(sweep(o), SweepError);
}

TEST(Checkpoint, FormatAndParse) {
    Checkpoint c;
    c.seed = 42;
    c.completed = {{2, 1}, {10, 106}};
    const auto text = format_checkpoint(c);
    EXPECT_EQ(text, "n=2 completed=1 seed=42 gen=wrom-lexmax-1\nn=10 completed=106 seed=42 gen=wrom-lexmax-1\n");
    std::istringstream in(text);
    auto back = parse_checkpoint(in);
    EXPECT_EQ(back.seed, 42u);
    EXPECT_EQ(back.generator, kGeneratorVersion);
    EXPECT_EQ(back.completed, c.completed);
}

TEST(Checkpoint, ParseErrors) {
    auto bad = [](const std::string& text) {
        std::istringstream in(text);
        EXPECT_THROW(parse_checkpoint(in), SweepError) << text;
    };
    bad("");
    bad("n=2 completed=1 seed=1\n");
    bad("n=2 completed=x seed=1 gen=g\n");
    bad("n=2 completed=1 seed=1 gen=g extra=1\n");
    bad("n=2 completed=1 seed=1 gen=g\nn=3 completed=1 seed=2 gen=g\n");
    bad("n=2 completed=1 seed=1 gen=g\nn=2 completed=1 seed=1 gen=g\n");
    bad("n=0 completed=1 seed=1 gen=g\n");
    bad("n=2 completed=-1 seed=1 gen=g\n");
    bad("n=2 completed=1 seed=99999999999999999999999 gen=g\n");
    bad("hello\n");
}

TEST(SweepReport, Json) {
    SweepReport r;
    r.n = 5;
    r.trees_total = 3;
    r.trees_solved = 2;
    r.solver_counts = {1, 1, 0};
    r.failures = {{0, 1, 2, 1, 2}};
    auto j = to_json(r);
    EXPECT_EQ(j["solver_counts"]["twostage"], 1);
    EXPECT_EQ(j["failures"][0], "0,1,2,1,2");
    EXPECT_EQ(j.begin().key(), "n");
}
