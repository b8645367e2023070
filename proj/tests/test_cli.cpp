// End-to-end tests of the command-line binary: output shapes, exit codes,
// config/flag precedence, and byte reproducibility.

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "catch2/catch_amalgamated.hpp"

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

// Runs the CLI through the shell, capturing stdout; stderr is dropped.
RunResult run_cli(const std::string& args) {
    const std::string cmd =
        std::string(INVVOL_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    std::size_t k = 0;
    while ((k = std::fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, k);
    const int status = pclose(pipe);
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = out;
    return r;
}

double json_field(const std::string& out, const std::string& key) {
    const std::string pat = "\"" + key + "\": ";
    const std::size_t pos = out.find(pat);
    REQUIRE(pos != std::string::npos);
    return std::strtod(out.c_str() + pos + pat.size(), nullptr);
}

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path =
        (std::filesystem::temp_directory_path() / name).string();
    std::ofstream f(path, std::ios::trunc);
    f << content;
    return path;
}

std::string fixture_quotes() {
    return std::string(INVVOL_TEST_DATA_DIR) + "/sample_quotes.csv";
}

}  // namespace

TEST_CASE("price emits a JSON object with price, stderr, n") {
    const auto r =
        run_cli("price --model constvol --sigma0 0.3 --paths 20000 --seed 7");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.rfind("{\"price\": ", 0) == 0);
    CHECK(r.out.find("\"stderr\": ") != std::string::npos);
    CHECK(r.out.find("\"n\": ") != std::string::npos);
    const double price = json_field(r.out, "price");
    const double se = json_field(r.out, "stderr");
    CHECK(price > 0.0);
    CHECK(price < 1.0);
    CHECK(se > 0.0);
    CHECK(json_field(r.out, "n") == 10000.0);  // antithetic pairs
}

TEST_CASE("quanto price is the fixed rate times the plain price, bit-exact") {
    const std::string common =
        "price --model sabr --paths 30000 --seed 21 --maturity 0.001";
    const auto plain = run_cli(common);
    const auto quanto =
        run_cli(common + " --kind quanto-inverse --rate-R 2.5");
    REQUIRE(plain.exit_code == 0);
    REQUIRE(quanto.exit_code == 0);
    const double p = json_field(plain.out, "price");
    const double q = json_field(quanto.out, "price");
    CHECK(q == 2.5 * p);
    CHECK(json_field(quanto.out, "stderr") ==
          2.5 * json_field(plain.out, "stderr"));
}

TEST_CASE("identical invocations are byte-reproducible") {
    const std::string cmd = "skew --model sabr --paths 30000 --seed 9";
    const auto a = run_cli(cmd);
    const auto b = run_cli(cmd);
    REQUIRE(a.exit_code == 0);
    CHECK(a.out == b.out);

    // and across thread counts
    const auto one = run_cli("price --model bergomi --paths 8000 --seed 5");
    RunResult forced;
    {
        const std::string cmd2 = std::string("INVVOL_THREADS=1 ") +
                                 INVVOL_CLI_PATH +
                                 " price --model bergomi --paths 8000 --seed 5"
                                 " 2>/dev/null";
        FILE* pipe = popen(cmd2.c_str(), "r");
        REQUIRE(pipe != nullptr);
        char buf[4096];
        std::size_t k = 0;
        while ((k = std::fread(buf, 1, sizeof(buf), pipe)) > 0)
            forced.out.append(buf, k);
        forced.exit_code = WEXITSTATUS(pclose(pipe));
    }
    REQUIRE(forced.exit_code == 0);
    CHECK(one.out == forced.out);
}

TEST_CASE("--out writes the same bytes the console run prints") {
    const std::string out_path =
        (std::filesystem::temp_directory_path() / "invvol_cli_out.json")
            .string();
    const std::string cmd = "price --model constvol --paths 4000 --seed 3";
    const auto console = run_cli(cmd);
    const auto filed = run_cli(cmd + " --out " + out_path);
    REQUIRE(console.exit_code == 0);
    REQUIRE(filed.exit_code == 0);
    CHECK(filed.out.empty());
    std::ifstream f(out_path);
    std::string content((std::istreambuf_iterator<char>(f)),
                        std::istreambuf_iterator<char>());
    CHECK(content == console.out);
}

TEST_CASE("iv-level emits one CSV row per grid entry") {
    const auto r = run_cli(
        "iv-level --model sabr --grid 0.1,0.3 --paths 8000 --seed 1");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.rfind("sigma0,iv_mc,iv_limit\n", 0) == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 3);  // header + 2
    // json variant has the same content in object form
    const auto j = run_cli(
        "iv-level --model sabr --grid 0.1,0.3 --paths 8000 --seed 1 "
        "--format json");
    REQUIRE(j.exit_code == 0);
    CHECK(j.out.front() == '[');
    CHECK(json_field(j.out, "iv_limit") == 0.1);
}

TEST_CASE("term-structure emits one CSV row per maturity") {
    const auto r = run_cli(
        "term-structure --model sabr --maturities 0.001,0.01 "
        "--paths 8000 --seed 1");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.rfind("maturity_years,skew_mc\n", 0) == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 3);
}

TEST_CASE("skew reports the limit and scaling exponent") {
    const auto raw = run_cli(
        "skew --model bergomi --hurst 0.4 --paths 20000 --seed 2");
    REQUIRE(raw.exit_code == 0);
    CHECK(json_field(raw.out, "scaling_exponent") == Catch::Approx(0.1));
    CHECK(raw.out.find("\"scaled\": false") != std::string::npos);

    const auto scaled = run_cli(
        "skew --model bergomi --hurst 0.4 --paths 20000 --seed 2 --scaled");
    REQUIRE(scaled.exit_code == 0);
    CHECK(scaled.out.find("\"scaled\": true") != std::string::npos);
    // scaled value = T^0.1 * raw value at the default T = 0.001
    const double factor = std::pow(0.001, 0.1);
    CHECK(json_field(scaled.out, "skew_mc") ==
          Catch::Approx(factor * json_field(raw.out, "skew_mc"))
              .epsilon(1e-15));
}

TEST_CASE("fit-market reproduces the fixture fit and echoes its anchors") {
    const auto r = run_cli("fit-market " + fixture_quotes());
    REQUIRE(r.exit_code == 0);
    CHECK(json_field(r.out, "h_implied") == Catch::Approx(0.8).margin(1e-12));
    CHECK(json_field(r.out, "alpha") == Catch::Approx(0.3).margin(1e-12));
    CHECK(json_field(r.out, "r_squared") ==
          Catch::Approx(1.0).margin(1e-12));
    CHECK(json_field(r.out, "shortest_maturity_skew") ==
          Catch::Approx(0.014).margin(1e-12));
    CHECK(json_field(r.out, "shortest_maturity_atm_iv") == 0.36);
}

TEST_CASE("config file drives a run and flags override it") {
    const std::string cfg = write_temp(
        "invvol_cli_cfg.json",
        "{\"model\":{\"type\":\"constvol\",\"sigma0\":0.25},"
        "\"sim\":{\"paths\":4000,\"seed\":11}}");
    const auto base = run_cli("price --config " + cfg);
    REQUIRE(base.exit_code == 0);

    // same run spelled out in flags gives identical bytes
    const auto spelled =
        run_cli("price --model constvol --sigma0 0.25 --paths 4000 --seed 11");
    CHECK(base.out == spelled.out);

    // a flag beats the config value
    const auto overridden = run_cli("price --config " + cfg + " --sigma0 0.4");
    REQUIRE(overridden.exit_code == 0);
    CHECK(overridden.out ==
          run_cli("price --model constvol --sigma0 0.4 --paths 4000 --seed 11")
              .out);
}

TEST_CASE("configuration problems exit with code 2") {
    CHECK(run_cli("price --no-such-flag").exit_code == 2);
    CHECK(run_cli("").exit_code == 2);  // missing subcommand
    CHECK(run_cli("price --model heston").exit_code == 2);
    CHECK(run_cli("price --sigma0 -0.3").exit_code == 2);
    CHECK(run_cli("skew --model bergomi --hurst 1.5").exit_code == 2);
    CHECK(run_cli("term-structure --maturities \"\"").exit_code == 2);
    CHECK(run_cli("fit-market /no/such/file.csv").exit_code == 2);
    const std::string bad =
        write_temp("invvol_cli_bad.json", "{\"model\":{\"type\":");
    CHECK(run_cli("price --config " + bad).exit_code == 2);
    // too few rows for a 3-point fit
    const std::string tiny = write_temp(
        "invvol_cli_tiny.csv",
        "maturity_years,iv_put_d25,iv_call_d25,iv_call_d50\n"
        "0.1,0.4,0.39,0.36\n");
    CHECK(run_cli("fit-market " + tiny).exit_code == 2);
}

TEST_CASE("numerical failures exit with code 3") {
    // ATM price beyond the invertible cap: implied vol cannot be recovered.
    const auto r = run_cli(
        "skew --model constvol --sigma0 0.9163 --maturity 1.0 --paths 2000");
    CHECK(r.exit_code == 3);
}

TEST_CASE("sign problems in market data exit with code 4") {
    const std::string mixed = write_temp(
        "invvol_cli_mixed.csv",
        "maturity_years,iv_put_d25,iv_call_d25,iv_call_d50\n"
        "0.1,0.4,0.39,0.36\n"
        "0.2,0.4,0.41,0.36\n"
        "0.3,0.4,0.39,0.36\n");
    CHECK(run_cli("fit-market " + mixed).exit_code == 4);
}

TEST_CASE("help exits cleanly") {
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("price --help").exit_code == 0);
}
