#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

namespace {

namespace fs = std::filesystem;

struct CmdResult {
    int exit_code = -1;
    std::string out;
};

// Runs through /bin/sh with stderr folded into stdout.
CmdResult run_cmd(const std::string& cmd) {
    CmdResult res;
    FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) {
        res.out.append(buf.data(), got);
    }
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

std::string cli() { return std::string(COOPEQ_CLI_PATH); }

std::string fixture(const std::string& name) {
    return (fs::path(COOPEQ_FIXTURES_DIR) / name).string();
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("coopeq_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

}  // namespace

TEST_CASE("solve-soft runs the pd fixture") {
    TempDir tmp;
    const auto trace = (tmp.path / "t.csv").string();
    const auto res = run_cmd(cli() + " solve-soft --game " + fixture("pd.json") +
                             " --alpha 8 --trace " + trace);
    CHECK(res.exit_code == 0);
    CHECK(res.out.find("converged: yes") != std::string::npos);
    CHECK(res.out.find("fixed-point residual") != std::string::npos);

    const std::string t = read_file(trace);
    CHECK(t.rfind("iter,engine,max_delta,max_nash_gap,bound_max,consensus,best_value,"
                  "best_assignment\n",
                  0) == 0);
    CHECK(t.find(",soft,") != std::string::npos);
}

TEST_CASE("solve-soft exits 1 on a config error") {
    const auto res = run_cmd(cli() + " solve-soft --game " + fixture("pd.json") + " --alpha 0");
    CHECK(res.exit_code == 1);
    CHECK(res.out.find("error:") != std::string::npos);
}

TEST_CASE("solve-soft on the single-action game is instant") {
    const auto res =
        run_cmd(cli() + " solve-soft --game " + fixture("single_action.json") + " --alpha 2");
    CHECK(res.exit_code == 0);
    CHECK(res.out.find("iterations=1") != std::string::npos);
}

TEST_CASE("solve-hard behaviors") {
    SUBCASE("pd converges without consensus") {
        const auto res =
            run_cmd(cli() + " solve-hard --game " + fixture("pd.json") + " --lambda 0.5");
        CHECK(res.exit_code == 0);
        CHECK(res.out.find("best assignment: 2|2") != std::string::npos);
        CHECK(res.out.find("consensus: no") != std::string::npos);
    }
    SUBCASE("coordination reaches consensus with oracle verdicts") {
        const auto res =
            run_cmd(cli() + " solve-hard --game " + fixture("coordination.json") + " --lambda 0.3");
        CHECK(res.exit_code == 0);
        CHECK(res.out.find("consensus: yes") != std::string::npos);
        CHECK(res.out.find("pure nash yes") != std::string::npos);
        CHECK(res.out.find("global optimum yes") != std::string::npos);
    }
    SUBCASE("lambda at the boundary is rejected") {
        const auto res =
            run_cmd(cli() + " solve-hard --game " + fixture("pd.json") + " --lambda 1.0");
        CHECK(res.exit_code == 1);
    }
    SUBCASE("lambda zero converges right away") {
        const auto res =
            run_cmd(cli() + " solve-hard --game " + fixture("pd.json") + " --lambda 0");
        CHECK(res.exit_code == 0);
        CHECK(res.out.find("iterations=2") != std::string::npos);
    }
}

TEST_CASE("sweep") {
    SUBCASE("alpha sweep emits one row per value with the bound column") {
        const auto res = run_cmd(cli() + " sweep --sweep alpha --values 1,2,4 --game " +
                                 fixture("pd.json"));
        CHECK(res.exit_code == 0);
        std::istringstream ss(res.out);
        std::string line;
        std::getline(ss, line);
        CHECK(line == "alpha,converged,iterations,max_gap,gap_bound,residual");
        int rows = 0;
        while (std::getline(ss, line)) {
            if (!line.empty()) ++rows;
        }
        CHECK(rows == 3);
    }
    SUBCASE("alpha sweep keeps the gap column under the bound column") {
        const auto res = run_cmd(cli() + " sweep --sweep alpha --values 1,2,4,8,16,32,64,128" +
                                 " --game " + fixture("pd.json"));
        REQUIRE(res.exit_code == 0);
        std::istringstream ss(res.out);
        std::string line;
        std::getline(ss, line);  // header
        int rows = 0;
        while (std::getline(ss, line)) {
            if (line.empty()) continue;
            ++rows;
            std::istringstream cells(line);
            std::string cell;
            std::vector<std::string> cols;
            while (std::getline(cells, cell, ',')) cols.push_back(cell);
            REQUIRE(cols.size() >= 5);
            CHECK(std::stod(cols[3]) < std::stod(cols[4]));  // max_gap < gap_bound
        }
        CHECK(rows == 8);
    }
    SUBCASE("lambda sweep over the pd fixture converges at every value") {
        const auto res = run_cmd(cli() + " sweep --sweep lambda --values 0,0.25,0.5,0.75,0.9" +
                                 " --game " + fixture("pd.json"));
        REQUIRE(res.exit_code == 0);
        std::istringstream ss(res.out);
        std::string line;
        std::getline(ss, line);
        CHECK(line == "lambda,converged,iterations,consensus,contraction_modulus,final_ratio,"
                      "best_assignment");
        int rows = 0;
        while (std::getline(ss, line)) {
            if (line.empty()) continue;
            ++rows;
            std::istringstream cells(line);
            std::string cell;
            std::vector<std::string> cols;
            while (std::getline(cells, cell, ',')) cols.push_back(cell);
            REQUIRE(cols.size() >= 2);
            CHECK(cols[1] == "1");  // converged
        }
        CHECK(rows == 5);
    }
    SUBCASE("single-value sweep degenerates to one row") {
        const auto res = run_cmd(cli() + " sweep --sweep lambda --values 0.5 --game " +
                                 fixture("pd.json"));
        CHECK(res.exit_code == 0);
        CHECK(res.out.find("lambda,converged,") != std::string::npos);
    }
    SUBCASE("empty value list is a config error") {
        const auto res =
            run_cmd(cli() + " sweep --sweep alpha --values , --game " + fixture("pd.json"));
        CHECK(res.exit_code == 1);
    }
}

TEST_CASE("validate") {
    SUBCASE("fixtures pass") {
        const auto res = run_cmd(cli() + " validate --game " + fixture("coordination.json"));
        CHECK(res.exit_code == 0);
        CHECK(res.out.find("verdict: valid") != std::string::npos);
    }
    SUBCASE("identity w fails hard") {
        TempDir tmp;
        const auto wpath = (tmp.path / "eye.json").string();
        std::ofstream(wpath) << "[[1.0, 0.0], [0.0, 1.0]]";
        const auto res = run_cmd(cli() + " validate --w-file " + wpath);
        CHECK(res.exit_code == 1);
        CHECK(res.out.find("irreducible=no") != std::string::npos);
    }
    SUBCASE("periodic w only warns unless strict") {
        TempDir tmp;
        const auto wpath = (tmp.path / "swap.json").string();
        std::ofstream(wpath) << "[[0.0, 1.0], [1.0, 0.0]]";
        const auto lax = run_cmd(cli() + " validate --w-file " + wpath);
        CHECK(lax.exit_code == 0);
        CHECK(lax.out.find("aperiodic=no") != std::string::npos);
        const auto strict = run_cmd(cli() + " validate --w-file " + wpath + " --strict-w");
        CHECK(strict.exit_code == 1);
    }
}

TEST_CASE("oracle subcommand") {
    const auto res = run_cmd(cli() + " oracle --game " + fixture("pd.json"));
    CHECK(res.exit_code == 0);
    CHECK(res.out.find("pure nash equilibria: 1") != std::string::npos);
    CHECK(res.out.find("2|2") != std::string::npos);
    CHECK(res.out.find("global optimum value: 6") != std::string::npos);
}

TEST_CASE("traces are byte-identical across runs and thread caps") {
    TempDir tmp;
    const std::string base = " --game " + fixture("pd.json") +
                             " --alpha 8 --init random --seed 42 --trace ";
    const auto t1 = (tmp.path / "a.csv").string();
    const auto t2 = (tmp.path / "b.csv").string();
    const auto t3 = (tmp.path / "c.csv").string();
    CHECK(run_cmd("COOP_EQ_THREADS=1 " + cli() + " solve-soft" + base + t1).exit_code == 0);
    CHECK(run_cmd("COOP_EQ_THREADS=4 " + cli() + " solve-soft" + base + t2).exit_code == 0);
    CHECK(run_cmd("COOP_EQ_THREADS=1 " + cli() + " solve-soft" + base + t3).exit_code == 0);
    const std::string a = read_file(t1);
    CHECK(a == read_file(t2));
    CHECK(a == read_file(t3));

    const std::string hbase = " --game " + fixture("factored_chain.json") +
                              " --lambda 0.6 --init random --seed 9 --range 5 --trace ";
    const auto h1 = (tmp.path / "h1.csv").string();
    const auto h2 = (tmp.path / "h2.csv").string();
    CHECK(run_cmd("COOP_EQ_THREADS=1 " + cli() + " solve-hard" + hbase + h1).exit_code == 0);
    CHECK(run_cmd("COOP_EQ_THREADS=3 " + cli() + " solve-hard" + hbase + h2).exit_code == 0);
    CHECK(read_file(h1) == read_file(h2));
}
