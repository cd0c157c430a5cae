#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string cli_path() {
    const char* p = std::getenv("OPTIMIST_CLI");
    REQUIRE(p != nullptr);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

RunResult run(const std::string& args, const fs::path& dir) {
    const fs::path out = dir / "stdout.txt";
    const fs::path err = dir / "stderr.txt";
    const std::string cmd =
        cli_path() + " " + args + " > " + out.string() + " 2> " + err.string();
    const int rc = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("optimist_cli_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

std::string strip_runtime_rows(const std::string& csv) {
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line))
        if (line.find(",runtime_s,") == std::string::npos) out += line + "\n";
    return out;
}

}  // namespace

TEST_CASE("simulate writes a deterministic csv", "[cli]") {
    TempDir tmp;
    const std::string traj = (tmp.path / "a.csv").string();
    const auto r1 = run("simulate --design etc --T 100 --arms bernoulli:0.5,0.5 --seed 7 --out " +
                            traj,
                        tmp.path);
    REQUIRE(r1.exit_code == 0);
    const std::string a = slurp(traj);
    CHECK(a.rfind("t,arm,outcome\n", 0) == 0);
    CHECK(std::count(a.begin(), a.end(), '\n') == 101);  // header + 100 rows

    const std::string traj2 = (tmp.path / "b.csv").string();
    const auto r2 = run("simulate --design etc --T 100 --arms bernoulli:0.5,0.5 --seed 7 --out " +
                            traj2,
                        tmp.path);
    REQUIRE(r2.exit_code == 0);
    CHECK(slurp(traj2) == a);  // byte-identical

    CHECK(fs::exists(traj + ".manifest"));
    const std::string manifest = slurp(traj + ".manifest");
    CHECK(manifest.find("seed = 7") != std::string::npos);
    CHECK(manifest.find("run.T = 100") != std::string::npos);
}

TEST_CASE("simulate with T=0 emits just the header", "[cli]") {
    TempDir tmp;
    const std::string traj = (tmp.path / "empty.csv").string();
    const auto r = run("simulate --design fixed_uniform --T 0 --arms bernoulli:0.5 --seed 1 "
                       "--out " +
                           traj,
                       tmp.path);
    REQUIRE(r.exit_code == 0);
    CHECK(slurp(traj) == "t,arm,outcome\n");
}

TEST_CASE("omitted seed is sampled and echoed", "[cli]") {
    TempDir tmp;
    const std::string traj = (tmp.path / "s.csv").string();
    const auto r =
        run("simulate --design ucb --T 10 --arms bernoulli:0.5,0.5 --out " + traj, tmp.path);
    REQUIRE(r.exit_code == 0);
    CHECK(r.err.find("seed:") != std::string::npos);
}

TEST_CASE("test emits the documented json keys", "[cli]") {
    TempDir tmp;
    const std::string traj = (tmp.path / "t.csv").string();
    REQUIRE(run("simulate --design etc --T 200 --arms bernoulli:0.5,0.5 --seed 11 --out " + traj,
                tmp.path)
                .exit_code == 0);
    const auto r = run("test --trajectory " + traj +
                           " --design etc --arm 1 --theta0 0.5 --seed 3 --B 100",
                       tmp.path);
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.contains("theta0"));
    CHECK(j.contains("cdf_value"));
    CHECK(j.contains("reject"));
    CHECK(j.contains("observed_stat"));
    CHECK(j.contains("B_effective"));
    CHECK(j["theta0"] == 0.5);
    CHECK(j["B_effective"] == 100);
}

TEST_CASE("repeated tests match the ci per-null values under one seed", "[cli]") {
    TempDir tmp;
    const std::string traj = (tmp.path / "t.csv").string();
    REQUIRE(run("simulate --design etc --T 200 --arms bernoulli:0.5,0.5 --seed 21 --out " + traj,
                tmp.path)
                .exit_code == 0);
    const auto ci = run("ci --trajectory " + traj +
                            " --design etc --arm 1 --seed 5 --B 100 --grid 0.3,0.5,0.7",
                        tmp.path);
    REQUIRE(ci.exit_code == 0);
    const auto jci = nlohmann::json::parse(ci.out);
    REQUIRE(jci["per_null"].size() == 3);
    int i = 0;
    for (const double theta0 : {0.3, 0.5, 0.7}) {
        const auto jt = nlohmann::json::parse(
            run("test --trajectory " + traj + " --design etc --arm 1 --theta0 " +
                    std::to_string(theta0) + " --seed 5 --B 100",
                tmp.path)
                .out);
        CHECK(jt["cdf_value"] == jci["per_null"][i]["cdf_value"]);
        ++i;
    }
}

TEST_CASE("ci output includes the observed mean in the accepted set", "[cli]") {
    TempDir tmp;
    const std::string traj = (tmp.path / "t.csv").string();
    REQUIRE(run("simulate --design ucb --T 150 --arms bernoulli:0.4,0.6 --seed 2 --out " + traj,
                tmp.path)
                .exit_code == 0);
    const auto r = run("ci --trajectory " + traj + " --design ucb --arm 1 --seed 9 --B 100",
                       tmp.path);
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    const double obs = j["observed_stat"];
    bool found = false;
    for (const auto& v : j["accepted"])
        if (v.get<double>() == obs) found = true;
    CHECK(found);
    REQUIRE(j["interval"].size() == 2);
    CHECK(j["interval"][0].get<double>() <= j["point_estimate"].get<double>());
    CHECK(j["point_estimate"].get<double>() <= j["interval"][1].get<double>());
}

TEST_CASE("ci handles the difference target", "[cli]") {
    TempDir tmp;
    const std::string traj = (tmp.path / "t.csv").string();
    REQUIRE(run("simulate --design fixed_uniform --T 300 --arms bernoulli:0.7,0.5 --seed 13 "
                "--out " +
                    traj,
                tmp.path)
                .exit_code == 0);
    const auto r = run("ci --trajectory " + traj +
                           " --design fixed_uniform --diff 1,2 --seed 4 --B 100 "
                           "--grid-lo -1 --grid-hi 1 --grid-count 41",
                       tmp.path);
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["interval"][0].get<double>() <= 0.2);
    CHECK(0.2 <= j["interval"][1].get<double>());
}

TEST_CASE("ci json is identical across worker counts", "[cli]") {
    TempDir tmp;
    const std::string traj = (tmp.path / "t.csv").string();
    REQUIRE(run("simulate --design etc --T 200 --arms bernoulli:0.5,0.5 --seed 31 --out " + traj,
                tmp.path)
                .exit_code == 0);
    const std::string o1 = (tmp.path / "w1.json").string();
    const std::string o2 = (tmp.path / "w2.json").string();
    REQUIRE(run("ci --trajectory " + traj +
                    " --design etc --arm 1 --seed 8 --B 80 --grid-count 30 --workers 1 --out " +
                    o1,
                tmp.path)
                .exit_code == 0);
    REQUIRE(run("ci --trajectory " + traj +
                    " --design etc --arm 1 --seed 8 --B 80 --grid-count 30 --workers 2 --out " +
                    o2,
                tmp.path)
                .exit_code == 0);
    CHECK(slurp(o1) == slurp(o2));
}

TEST_CASE("malformed trajectories exit with the data code and line numbers", "[cli]") {
    TempDir tmp;
    const fs::path bad = tmp.path / "bad.csv";
    {
        std::ofstream f(bad);
        f << "wrong,header,here\n1,1,0.5\n";
    }
    const auto r = run("test --trajectory " + bad.string() +
                           " --design etc --arm 1 --theta0 0.5 --seed 1",
                       tmp.path);
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("header") != std::string::npos);

    {
        std::ofstream f(bad);
        f << "t,arm,outcome\n1,1,0.5\n2,9,0.5\n";
    }
    const auto r2 = run("test --trajectory " + bad.string() +
                            " --K 2 --design etc --arm 1 --theta0 0.5 --seed 1",
                        tmp.path);
    CHECK(r2.exit_code == 3);
    CHECK(r2.err.find("line 3") != std::string::npos);
}

TEST_CASE("configuration problems exit with the config code", "[cli]") {
    TempDir tmp;
    const auto r = run("simulate --design no_such --T 10 --arms bernoulli:0.5 --seed 1 --out " +
                           (tmp.path / "x.csv").string(),
                       tmp.path);
    CHECK(r.exit_code == 2);
    const auto r2 = run("bogus-subcommand", tmp.path);
    CHECK(r2.exit_code == 2);
}

TEST_CASE("help enumerates designs and bias kinds", "[cli]") {
    TempDir tmp;
    const auto r = run("--help", tmp.path);
    REQUIRE(r.exit_code == 0);
    for (const char* name :
         {"etc", "ucb", "clipped_ucb", "batched_thompson", "fixed_uniform", "bias1", "bias3"})
        CHECK(r.out.find(name) != std::string::npos);

    const auto rd = run("designs", tmp.path);
    REQUIRE(rd.exit_code == 0);
    CHECK(rd.out.find("gamma_mixture") != std::string::npos);
}

TEST_CASE("experiment runs a plan and is worker-count invariant", "[cli]") {
    TempDir tmp;
    const fs::path plan = tmp.path / "mini.plan";
    {
        std::ofstream f(plan);
        f << "name = mini\n"
             "kind = sweep\n"
             "[design]\n"
             "template = clipped_ucb\n"
             "[model]\n"
             "kind = bernoulli\n"
             "means = 0.45,0.5,0.55\n"
             "[target]\n"
             "arm = 1\n"
             "[run]\n"
             "T = 80,160\n"
             "R = 6\n"
             "B = 30\n"
             "seed = 99\n"
             "[grid]\n"
             "count = 15\n"
             "[check]\n"
             "min_coverage = 0.0\n";
    }
    const fs::path d1 = tmp.path / "out1";
    const fs::path d2 = tmp.path / "out2";
    const auto r1 =
        run("experiment " + plan.string() + " --workers 1 --out " + d1.string(), tmp.path);
    REQUIRE(r1.exit_code == 0);
    CHECK(r1.out.find("[PASS] min_coverage") != std::string::npos);
    const auto r2 =
        run("experiment " + plan.string() + " --workers 2 --out " + d2.string(), tmp.path);
    REQUIRE(r2.exit_code == 0);

    CHECK(strip_runtime_rows(slurp(d1 / "metrics.csv")) ==
          strip_runtime_rows(slurp(d2 / "metrics.csv")));
    CHECK(slurp(d1 / "quantiles.csv") == slurp(d2 / "quantiles.csv"));
}

TEST_CASE("experiment check failures exit with the acceptance code", "[cli]") {
    TempDir tmp;
    const fs::path plan = tmp.path / "fail.plan";
    {
        std::ofstream f(plan);
        f << "name = failing\n"
             "kind = sweep\n"
             "design.template = ucb\n"
             "model.kind = bernoulli\n"
             "model.means = 0.5,0.5\n"
             "target.arm = 1\n"
             "run.T = 60\n"
             "run.R = 4\n"
             "run.B = 20\n"
             "run.seed = 5\n"
             "grid.count = 11\n"
             "check.min_coverage = 1.01\n";
    }
    const auto r = run("experiment " + plan.string() + " --out " + (tmp.path / "o").string(),
                       tmp.path);
    CHECK(r.exit_code == 4);
    CHECK(r.out.find("[FAIL]") != std::string::npos);
}
