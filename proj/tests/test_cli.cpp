#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>

#include "seedtrim/byteviz.hpp"
#include "test_util.hpp"

// End-to-end tests against the installed binary: exit codes, file outputs,
// flag/plan precedence.

using namespace seedtrim;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    const Bytes b = read_file_bytes(path);
    return std::string(b.begin(), b.end());
}

CliResult run_cli(const testutil::TempDir& tmp, const std::string& args) {
    const std::string out_path = tmp.file("cli_stdout.txt");
    const std::string err_path = tmp.file("cli_stderr.txt");
    const std::string cmd = std::string(SEEDTRIM_CLI_PATH) + " " + args + " >" +
                            out_path + " 2>" + err_path;
    const int rc = std::system(cmd.c_str());
    CliResult result;
    result.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    result.out = slurp(out_path);
    result.err = slurp(err_path);
    return result;
}

std::uint32_t png_width(const std::string& path) {
    const Bytes png = read_file_bytes(path);
    REQUIRE(png.size() >= 24);
    return std::uint32_t(png[16]) << 24 | std::uint32_t(png[17]) << 16 |
           std::uint32_t(png[18]) << 8 | std::uint32_t(png[19]);
}

}  // namespace

TEST_CASE("cli: usage errors exit 2") {
    testutil::TempDir tmp;
    write_text_file(tmp.file("s"), "abc");

    CHECK(run_cli(tmp, "").exit_code == 2);
    CHECK(run_cli(tmp, "frobnicate").exit_code == 2);
    CHECK(run_cli(tmp, "reduce --target sim:constant --seed " + tmp.file("s") +
                           " --c 101")
              .exit_code == 2);
    CHECK(run_cli(tmp, "reduce --target sim:nope --seed " + tmp.file("s"))
              .exit_code == 2);
    CHECK(run_cli(tmp, "reduce --target sim:constant").exit_code == 2);
    CHECK(run_cli(tmp, "--help").exit_code == 0);
}

TEST_CASE("cli: oracle and file errors exit 3") {
    testutil::TempDir tmp;
    CHECK(run_cli(tmp, "reduce --target sim:constant --seed " +
                           tmp.file("missing.bin"))
              .exit_code == 3);

    write_text_file(tmp.file("s"), "abc");
    const auto r = run_cli(
        tmp, "reduce --target-cmd 'definitely-not-a-real-command-zz @@' "
             "--coverage-report '@@.cov' --seed " +
                 tmp.file("s"));
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("command not found") != std::string::npos);
}

TEST_CASE("cli: reduce on the header-payload demo seed") {
    testutil::TempDir tmp;
    write_file_bytes(tmp.file("big.bin"), testutil::make_header_payload_seed(131072));

    const auto r = run_cli(
        tmp, "reduce --target sim:header-payload --seed " + tmp.file("big.bin") +
                 " --c 75 --r 40 --budget 300s --unit-size 1024 --out " +
                 tmp.file("out"));
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("status: reduced") != std::string::npos);

    const Bytes reduced = read_file_bytes(tmp.file("big.bin") + ".reduced");
    CHECK(reduced.size() <= 2048);
    CHECK(fs::exists(tmp.file("out/reduction.csv")));
    const std::string csv = slurp(tmp.file("out/reduction.csv"));
    CHECK(csv.find("sim:header-payload") != std::string::npos);
    CHECK(csv.find("131136") != std::string::npos);
}

TEST_CASE("cli: a rejected or retained reduction still exits 0") {
    testutil::TempDir tmp;
    write_text_file(tmp.file("s"), "abcdefgh");

    const auto retained = run_cli(
        tmp, "reduce --target sim:distinct-bytes --seed " + tmp.file("s") +
                 " --c 100 --r 0 --seed-type binary --unit-size 1 --out " +
                 tmp.file("retained_out"));
    CHECK(retained.exit_code == 0);
    CHECK(retained.out.find("original-retained") != std::string::npos);
    CHECK(read_file_bytes(tmp.file("s") + ".reduced") ==
          read_file_bytes(tmp.file("s")));

    write_text_file(tmp.file("t"), "ab");
    const auto rejected = run_cli(
        tmp, "reduce --target sim:distinct-bytes --seed " + tmp.file("t") +
                 " --c 0 --r 60 --seed-type binary --unit-size 1 --out " +
                 tmp.file("rejected_out"));
    CHECK(rejected.exit_code == 0);
    CHECK(rejected.out.find("rejected (no candidate meets R%)") !=
          std::string::npos);
}

TEST_CASE("cli: fuzz emits a dump that viz turns into frames") {
    testutil::TempDir tmp;
    write_text_file(tmp.file("s"), "ab");

    const auto fuzz = run_cli(
        tmp, "fuzz --target sim:distinct-bytes --seed " + tmp.file("s") +
                 " --duration 1s --rng-seed 7 --emit-dump --out " +
                 tmp.file("out"));
    REQUIRE(fuzz.exit_code == 0);
    CHECK(fs::exists(tmp.file("out/paths.csv")));
    CHECK(fs::exists(tmp.file("out/crashes.csv")));

    const auto dump = load_color_dump(tmp.file("out/tests_generated"));
    const auto viz = run_cli(tmp, "viz --dump " + tmp.file("out/tests_generated") +
                                      " --out " + tmp.file("frames") +
                                      " --box-px 1 --row 8");
    REQUIRE(viz.exit_code == 0);
    std::size_t frames = 0;
    for (const auto& entry : fs::directory_iterator(tmp.file("frames")))
        if (entry.path().extension() == ".png") ++frames;
    CHECK(frames == dump.size());

    SUBCASE("box and row flags set the frame geometry") {
        const auto wide = run_cli(tmp, "viz --dump " +
                                           tmp.file("out/tests_generated") +
                                           " --out " + tmp.file("frames16") +
                                           " --box-px 8 --row 16");
        REQUIRE(wide.exit_code == 0);
        CHECK(png_width(tmp.file("frames16/file_000000001.png")) == 128);
    }
}

TEST_CASE("cli: compare then report") {
    testutil::TempDir tmp;
    write_text_file(tmp.file("s"), "aabbccdd");

    const auto cmp = run_cli(
        tmp, "compare --target sim:distinct-bytes --seed " + tmp.file("s") +
                 " --c 50 --r 40 --seed-type binary --unit-size 1 "
                 "--duration 1s --reps 2 --rng-seed 3 --bucket-ms 500 --out " +
                 tmp.file("cmp"));
    REQUIRE(cmp.exit_code == 0);
    for (const char* f : {"reduction.csv", "paths_avg.csv", "crash_summary.csv",
                          "coverage_summary.csv", "reduced_seed.bin"})
        CHECK(fs::exists(fs::path(tmp.file("cmp")) / f));
    CHECK(fs::exists(tmp.file("cmp/original/run_2/paths.csv")));
    CHECK(fs::exists(tmp.file("cmp/reduced/run_2/crashes.csv")));

    const auto report = run_cli(tmp, "report --in " + tmp.file("cmp"));
    CHECK(report.exit_code == 0);
    CHECK(report.out.find("== reduction ==") != std::string::npos);
    CHECK(report.out.find("== coverage totals ==") != std::string::npos);
}

TEST_CASE("cli: print-config emits JSON and flags override the plan") {
    testutil::TempDir tmp;
    write_text_file(tmp.file("plan.json"), R"({
      "target": "sim:xml-like",
      "seed_path": "plan_seed.xml",
      "reduction": {"c_percent": 60}
    })");

    const auto r = run_cli(tmp, "reduce --plan " + tmp.file("plan.json") +
                                    " --c 80 --print-config");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["target"] == "sim:xml-like");
    CHECK(j["seed_path"] == "plan_seed.xml");
    CHECK(j["reduction"]["c_percent"] == 80.0);
    CHECK(j["reduction"]["r_percent"] == 40.0);  // default survives
}

TEST_CASE("cli: external script target end to end") {
    testutil::TempDir tmp;
    const std::string cmd = testutil::make_script_target(
        tmp, "always.sh", "echo 'stmt always' > \"$1.cov\"");
    write_text_file(tmp.file("s"), "abcdef");

    const auto r = run_cli(tmp, "reduce --target-cmd '" + cmd +
                                    "' --coverage-report '@@.cov' --seed " +
                                    tmp.file("s") +
                                    " --c 75 --r 40 --seed-type binary "
                                    "--unit-size 1 --out " +
                                    tmp.file("out"));
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("status: reduced") != std::string::npos);
    CHECK(read_file_bytes(tmp.file("s") + ".reduced").empty());
}
