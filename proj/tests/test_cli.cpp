#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
};

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("skillrank_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

Run run(const std::string& args, const fs::path& dir) {
    const auto out = dir / "stdout.txt";
    const std::string cmd = std::string(SKILLRANK_CLI) + " " + args + " > " + out.string() + " 2> " +
                            (dir / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out)};
}

/// Two-skill dataset directory: main skill "a", related skill "b".
fs::path tiny_dataset(const fs::path& dir, const std::string& a_arcs, const std::string& b_arcs,
                      const std::string& matrix) {
    const auto ds = dir / "data";
    fs::create_directories(ds);
    write_file(ds / "base.txt", "4\n0 1\n1 2\n2 3\n");
    write_file(ds / "skills.txt", "a\nb\n");
    write_file(ds / "skill_0.txt", "4\n" + a_arcs);
    write_file(ds / "skill_1.txt", "4\n" + b_arcs);
    write_file(ds / "deduction.csv", matrix);
    return ds;
}

}  // namespace

TEST(Cli, HelpAndUsageErrors) {
    const auto dir = scratch("usage");
    EXPECT_EQ(run("--help", dir).code, 0);
    EXPECT_EQ(run("rank --config toy", dir).code, 2);
    EXPECT_EQ(run("frobnicate", dir).code, 2);
    EXPECT_EQ(run("rank --config nosuchpreset --skill 0", dir).code, 2);
    EXPECT_EQ(run("rank --config toy --skill Cobol", dir).code, 2);
    EXPECT_EQ(run("rank --config toy --skill 0 --alpha 1.5", dir).code, 2);
}

TEST(Cli, RankToyMatchesExample) {
    const auto dir = scratch("toy");
    auto r = run("rank --config toy --skill Programming", dir);
    ASSERT_EQ(r.code, 0);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "member_index,score,position");
    const double reported[] = {0.0988, 0.1828, 0.0988, 0.0988, 0.1828, 0.3380};
    const int positions[] = {4, 2, 4, 4, 2, 1};
    for (int i = 0; i < 6; ++i) {
        ASSERT_TRUE(std::getline(in, line));
        std::istringstream row(line);
        std::string idx, score, pos;
        std::getline(row, idx, ',');
        std::getline(row, score, ',');
        std::getline(row, pos, ',');
        EXPECT_EQ(std::stoi(idx), i);
        EXPECT_NEAR(std::stod(score), reported[i], 1.5e-4);
        EXPECT_EQ(std::stoi(pos), positions[i]);
    }
}

TEST(Cli, DeductionUntiesToyMembers) {
    const auto dir = scratch("untie");
    auto r = run("rank --config toy --skill Programming --deduce", dir);
    ASSERT_EQ(r.code, 0);
    std::istringstream in(r.out);
    std::string line;
    std::vector<std::string> pos;
    std::getline(in, line);
    while (std::getline(in, line)) pos.push_back(line.substr(line.rfind(',') + 1));
    ASSERT_EQ(pos.size(), 6u);
    EXPECT_NE(pos[1], pos[4]);
}

TEST(Cli, EmptySkillIsUniform) {
    const auto dir = scratch("uniform");
    const auto ds = tiny_dataset(dir, "", "0 1\n", "a,b\n1,0\n0,1\n");
    auto r = run("rank --dataset " + ds.string() + " --skill a", dir);
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "member_index,score,position\n0,0.25,1\n1,0.25,1\n2,0.25,1\n3,0.25,1\n");
}

TEST(Cli, NoRelatedSkillsMeansDeduceIsPlain) {
    const auto dir = scratch("norelated");
    const auto ds = tiny_dataset(dir, "0 1\n2 1\n", "3 0\n", "a,b\n1,0.4\n0,1\n");
    auto plain = run("rank --dataset " + ds.string() + " --skill a", dir);
    auto deduced = run("rank --dataset " + ds.string() + " --skill a --deduce", dir);
    ASSERT_EQ(plain.code, 0);
    ASSERT_EQ(deduced.code, 0);
    EXPECT_EQ(plain.out, deduced.out);
}

TEST(Cli, BadInputsExitTwo) {
    const auto dir = scratch("badinput");
    auto ds = tiny_dataset(dir, "0 1\n0 1\n", "", "a,b\n1,0\n0,1\n");
    EXPECT_EQ(run("rank --dataset " + ds.string() + " --skill a", dir).code, 2);
    ds = tiny_dataset(dir, "0 1\n", "", "a,b\n1,0\n1.5,1\n");
    EXPECT_EQ(run("rank --dataset " + ds.string() + " --skill a --deduce", dir).code, 2);
    EXPECT_EQ(run("rank --dataset " + (dir / "missing").string() + " --skill a", dir).code, 2);
}

TEST(Cli, InfeasibleTargetsExitThree) {
    const auto dir = scratch("infeasible");
    write_file(dir / "cfg.json",
               R"({"generator":{"n_target":30,"skills":["a","b"],"skill_arc_targets":[10,10],)"
               R"("arcs_per_holder":1.0,"cooccurrence_target":[[1,1],[0,1]],"cooccurrence_tolerance":0.01},)"
               R"("deduction_matrix":[[1,0],[0,1]]})");
    EXPECT_EQ(run("generate --config " + (dir / "cfg.json").string() + " --out " + (dir / "ds").string(), dir).code, 3);
}

TEST(Cli, NonConvergenceExitsFourButWrites) {
    const auto dir = scratch("noconv");
    auto text = slurp(fs::path(SKILLRANK_SOURCE_DIR) / "configs" / "toy.json");
    const auto at = text.find("\"max_iterations\": 1000");
    ASSERT_NE(at, std::string::npos);
    text.replace(at, std::string("\"max_iterations\": 1000").size(), "\"max_iterations\": 2");
    write_file(dir / "cfg.json", text);
    auto r = run("rank --config " + (dir / "cfg.json").string() + " --skill 0", dir);
    EXPECT_EQ(r.code, 4);
    EXPECT_NE(r.out.find("member_index,score,position"), std::string::npos);
}

TEST(Cli, GenerateThenRankFromDirectory) {
    const auto dir = scratch("generate");
    const auto ds = dir / "ds";
    ASSERT_EQ(run("generate --config table1 --seed 3 --out " + ds.string(), dir).code, 0);
    for (const char* f : {"base.txt", "skills.txt", "skill_0.txt", "skill_4.txt", "deduction.csv", "manifest.json"}) {
        EXPECT_TRUE(fs::exists(ds / f)) << f;
    }
    auto from_dir = run("rank --dataset " + ds.string() + " --skill C++ --deduce", dir);
    auto from_cfg = run("rank --config table1 --seed 3 --skill C++ --deduce", dir);
    ASSERT_EQ(from_dir.code, 0);
    EXPECT_EQ(from_dir.out, from_cfg.out);
    auto coo = run("cooccur --dataset " + ds.string(), dir);
    EXPECT_EQ(coo.code, 0);
    EXPECT_EQ(coo.out.rfind("Programming,C++,Java", 0), 0u);
    auto q = run("deduce --dataset " + ds.string() + " --skill 0", dir);
    EXPECT_EQ(q.code, 0);
    EXPECT_EQ(q.out.rfind("1493\n", 0), 0u);
}

TEST(Cli, EvaluateIsByteReproducible) {
    const auto dir = scratch("evaluate");
    const auto first = dir / "one", second = dir / "two";
    auto a = run("evaluate --config table1 --out " + first.string(), dir);
    auto b = run("evaluate --config table1 --workers 1 --out " + second.string(), dir);
    ASSERT_EQ(a.code, 0);
    ASSERT_EQ(b.code, 0);
    EXPECT_EQ(a.out, b.out);
    for (const char* f : {"report.csv", "sweep.csv", "histogram_0.csv", "histogram_4.csv"}) {
        ASSERT_TRUE(fs::exists(first / f)) << f;
        EXPECT_EQ(slurp(first / f), slurp(second / f)) << f;
    }
}
