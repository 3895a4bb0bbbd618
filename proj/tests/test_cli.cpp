#include "dbench/scenario.hpp"
#include "dbench/transversality.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <unistd.h>

using namespace dbench;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("dirac-bench-cli-" + std::to_string(::getpid()) + "-" +
                                            std::to_string(counter()++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

int run(const std::string& args, std::string* out = nullptr) {
    const std::string cmd = std::string(DIRAC_BENCH_EXE) + " " + args + " 2>/dev/null";
    FILE* p = ::popen(cmd.c_str(), "r");
    if (!p) return -1;
    std::string text;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) text.append(buf, n);
    const int st = ::pclose(p);
    if (out) *out = text;
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
    const fs::path p = dir / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const std::string kSmall = R"json({
  "seed": 3,
  "geometry": {"L1": 6.283185307179586, "L2": 6.283185307179586, "N1": 16, "N2": 16, "u": "cos_x(0.1)"},
  "bundle": {"rank": 1, "c1": -1, "mode": "random", "roughness": 0.2, "seed": 4},
  "weight": {"mode": "poisson", "lambda": "S+"},
  "solver": {"c_tol": 0.66},
  "tasks": ["bounds", {"type": "solve", "operator": "Dminus"}, "transversality"]
})json";

}  // namespace

TEST(Cli, MalformedScenarioWritesNothing) {
    TempDir t;
    const auto sc = write_file(t.path, "bad.json", "{\"geometry\": {\"L1\": 1,");
    const fs::path out = t.path / "out";
    EXPECT_EQ(run("run " + sc.string() + " --out " + out.string()), 2);
    EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, UnknownKeyRejected) {
    TempDir t;
    std::string text = kSmall;
    text.replace(text.find("\"seed\": 3"), 9, "\"seed\": 3, \"colour\": 1");
    const auto sc = write_file(t.path, "unknown.json", text);
    const fs::path out = t.path / "out";
    EXPECT_EQ(run("run " + sc.string() + " --out " + out.string()), 2);
    EXPECT_FALSE(fs::exists(out));
    EXPECT_THROW(validate_scenario(text), SchemaError);
    EXPECT_NO_THROW(validate_scenario(kSmall));
}

TEST(Cli, SchemaRangeErrors) {
    std::string text = kSmall;
    text.replace(text.find("\"N1\": 16"), 8, "\"N1\": 4");
    EXPECT_THROW(validate_scenario(text), SchemaError);
    std::string no_tasks = kSmall.substr(0, kSmall.find(",\n  \"tasks\"")) + "\n}";
    EXPECT_THROW(validate_scenario(no_tasks), SchemaError);
    const RunOutcome o = run_scenario_text("[1, 2]", ".", {});
    EXPECT_EQ(o.exit_code, kExitSchema);
    EXPECT_TRUE(o.written.empty());
}

TEST(Cli, ImpossibleFluxIsGaugeError) {
    TempDir t;
    std::string text = kSmall;
    text.replace(text.find("\"c1\": -1"), 8, "\"c1\": 500");
    const auto sc = write_file(t.path, "flux.json", text);
    const fs::path out = t.path / "out";
    EXPECT_EQ(run("run " + sc.string() + " --out " + out.string()), 3);
    ASSERT_TRUE(fs::exists(out / "report.json"));
    const json r = json::parse(read_file(out / "report.json"));
    EXPECT_EQ(r["error"]["kind"], "gauge");
    EXPECT_NE(r["error"]["message"].get<std::string>().find("flux too concentrated"), std::string::npos);
}

TEST(Cli, BundledLandauScenario) {
    TempDir t;
    std::string stdout_text;
    EXPECT_EQ(run("run " + std::string(DIRAC_BENCH_SCENARIOS) + "/landau.json --out " + t.path.string(), &stdout_text),
              0);
    const json r = json::parse(read_file(t.path / "report.json"));
    bool found = false;
    for (const auto& task : r["tasks"]) {
        if (task["type"] != "bounds") continue;
        for (const auto& rec : task["records"]) {
            if (rec["name"] != "line_dbar_chern") continue;
            found = true;
            EXPECT_TRUE(rec["pass"].get<bool>());
            EXPECT_NEAR(rec["rhs"].get<double>(), 1.0 / kTwoPi, 1e-12);
            EXPECT_NEAR(rec["lhs"].get<double>(), 1.0 / kTwoPi, 0.01 / kTwoPi);
        }
    }
    EXPECT_TRUE(found);
    EXPECT_TRUE(fs::exists(t.path / "spectrum_DmDp.csv"));
    EXPECT_NE(stdout_text.find("report.json"), std::string::npos);
}

TEST(Cli, DeterministicReports) {
    TempDir t;
    const auto sc = write_file(t.path, "small.json", kSmall);
    EXPECT_EQ(run("run " + sc.string() + " --out " + (t.path / "a").string()), 0);
    EXPECT_EQ(run("run " + sc.string() + " --out " + (t.path / "b").string()), 0);
    const std::string a = read_file(t.path / "a" / "report.json"), b = read_file(t.path / "b" / "report.json");
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, b);
    EXPECT_EQ(run("run " + sc.string() + " --seed 9 --out " + (t.path / "c").string()), 0);
    EXPECT_NE(a, read_file(t.path / "c" / "report.json"));
}

TEST(Cli, ViolationExitCode) {
    TempDir t;
    const std::string text = R"({
      "geometry": {"L1": 6.283185307179586, "L2": 6.283185307179586, "N1": 8, "N2": 8},
      "tasks": [{"type": "cylinder-weight", "T": 8, "Nt": 32, "cross_N": 4, "beta_fraction": 10}]
    })";
    const auto sc = write_file(t.path, "cyl.json", text);
    EXPECT_EQ(run("run " + sc.string() + " --out " + (t.path / "o").string()), 1);
    const json r = json::parse(read_file(t.path / "o" / "report.json"));
    EXPECT_FALSE(r["tasks"][0]["success"].get<bool>());
    EXPECT_TRUE(r["tasks"][0]["worst_in_K"].get<bool>());
    std::string ok = text;
    ok.replace(ok.find("\"beta_fraction\": 10"), 19, "\"beta_fraction\": 10, \"expect\": \"failure\"");
    const auto sc2 = write_file(t.path, "cyl2.json", ok);
    EXPECT_EQ(run("run " + sc2.string() + " --out " + (t.path / "p").string()), 0);
}

TEST(Cli, BadArguments) {
    EXPECT_EQ(run("frobnicate"), 2);
    EXPECT_EQ(run("run"), 2);
    EXPECT_EQ(run("transversality --rank 1"), 2);
    EXPECT_EQ(run("run /nonexistent/scenario.json"), 2);
}

TEST(Cli, TransversalitySummaryTable) {
    struct Row {
        int c1, genus;
        long long units;
        const char* verdict;
    };
    const Row rows[] = {{1, 0, 3, "transversal"},  {-1, 0, 1, "transversal"}, {-2, 0, 0, "inconclusive"},
                        {0, 1, 0, "inconclusive"}, {1, 1, 1, "transversal"},  {-3, 2, -5, "inconclusive"},
                        {3, 2, 1, "transversal"},  {2, 2, 0, "inconclusive"}};
    for (const auto& r : rows) {
        const auto v = transversality_summary(r.c1, 1, r.genus);
        EXPECT_TRUE(v.exact);
        EXPECT_EQ(v.margin_units, r.units) << r.c1 << " " << r.genus;
        EXPECT_EQ(v.verdict(), std::string(r.verdict)) << r.c1 << " " << r.genus;
        EXPECT_NEAR(v.margin, kTwoPi * static_cast<double>(r.units), 1e-12);
    }
    std::string out;
    EXPECT_EQ(run("transversality --c1 1 --genus 0", &out), 0);
    const json j = json::parse(out);
    EXPECT_EQ(j["verdict"], "transversal");
    EXPECT_NEAR(j["margin"].get<double>(), 3 * kTwoPi, 1e-12);
}

TEST(Cli, TransversalityRankTwoSummaryInconclusive) {
    const auto v = transversality_summary(5, 2, 0);
    EXPECT_FALSE(v.exact);
    EXPECT_EQ(v.verdict(), "inconclusive");
    EXPECT_NE(v.reason.find("not determined"), std::string::npos);
}

TEST(Cli, TransversalitySampled) {
    const auto g = build_torus(kTwoPi, kTwoPi, 32, 32, [](double, double) { return 0.0; });
    const auto two = transversality_sampled(g, constant_curvature_bundle(g, 2));
    EXPECT_NEAR(two.margin, 2.0 * kTwoPi, 1e-10);
    EXPECT_EQ(two.verdict(), "transversal");
    const auto zero = transversality_sampled(g, constant_curvature_bundle(g, 0));
    EXPECT_NEAR(zero.margin, 0.0, 1e-10);
    EXPECT_EQ(zero.verdict(), "inconclusive");
    TempDir t;
    const auto sc = write_file(t.path, "small.json", kSmall);
    std::string out;
    EXPECT_EQ(run("transversality --scenario " + sc.string(), &out), 0);
    EXPECT_NEAR(json::parse(out)["margin"].get<double>(), -kTwoPi, 1e-9);
}
