// End-to-end checks of the command-line tool: exit codes, file outputs,
// determinism. Drives the real binary through the shell.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#ifndef GRIDECON_CLI
#error "GRIDECON_CLI must name the binary under test"
#endif

namespace {

namespace fs = std::filesystem;

const fs::path kWork = "tmp_cli_work";

int run_cmd(const std::string& line) {
    int rc = std::system(line.c_str());
    REQUIRE(rc != -1);
    return WEXITSTATUS(rc);
}

int cli(const std::string& args, const fs::path& stdout_file = {}) {
    std::string line = std::string(GRIDECON_CLI) + " " + args;
    line += stdout_file.empty() ? " >/dev/null 2>/dev/null"
                                : " >" + stdout_file.string() + " 2>/dev/null";
    return run_cmd(line);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path write_scenario(const std::string& name, const std::string& text) {
    fs::create_directories(kWork);
    fs::path p = kWork / name;
    std::ofstream out(p);
    out << text;
    return p;
}

const char* kScenario = R"({
  "seed": 7,
  "stop_time": 20000,
  "providers": [
    {
      "id": "gsp-1",
      "resource": {"resource_id": "r1", "node_count": 2, "price_schedule": {"flat_price": 1}},
      "offers": [{"offer_id": "r1-std", "negotiation_models": ["commodity"]}]
    },
    {
      "id": "gsp-2",
      "resource": {"resource_id": "r2", "node_count": 2, "price_schedule": {"flat_price": 2}},
      "offers": [{"offer_id": "r2-std", "negotiation_models": ["commodity"]}]
    }
  ],
  "brokers": [
    {"id": "alice", "deadline": 4000, "budget": 100000,
     "jobs": {"count": 6, "cpu_seconds": 300}}
  ]
})";

}  // namespace

TEST_CASE("validate accepts a good scenario and reports its shape") {
    auto p = write_scenario("good.json", kScenario);
    auto out = kWork / "validate.out";
    CHECK(cli("validate " + p.string(), out) == 0);
    CHECK(slurp(out).find("2 providers, 1 brokers, 6 jobs") != std::string::npos);
}

TEST_CASE("each failure class exits with its own code") {
    auto garbled = write_scenario("garbled.json", "{how did this");
    CHECK(cli("validate " + garbled.string()) == 1);  // parse

    std::string dangling = kScenario;
    dangling.replace(dangling.find("\"commodity\""), 11, "\"sorcery\"");
    CHECK(cli("validate " + write_scenario("dangling.json", dangling).string()) == 2);

    std::string invariant = kScenario;
    invariant.replace(invariant.find("\"stop_time\": 20000"), 18, "\"stop_time\": 0");
    CHECK(cli("validate " + write_scenario("invariant.json", invariant).string()) == 3);

    std::string hopeless = kScenario;
    hopeless.replace(hopeless.find("\"deadline\": 4000"), 16, "\"deadline\": 100");
    CHECK(cli("run " + write_scenario("hopeless.json", hopeless).string()) == 4);

    CHECK(cli("run missing-file.json") == 1);
    CHECK(cli("run " + write_scenario("good.json", kScenario).string() + " --format sideways") ==
          64);
    CHECK(cli("explode") == 64);
}

TEST_CASE("run prints the chosen format and respects overrides") {
    auto p = write_scenario("good.json", kScenario);
    auto out = kWork / "run.out";
    CHECK(cli("run " + p.string() + " --format csv", out) == 0);
    auto csv = slurp(out);
    CHECK(csv.rfind("resource,price,jobs,cost,makespan\n", 0) == 0);
    CHECK(csv.find("r1,1,") != std::string::npos);

    CHECK(cli("run " + p.string() + " --mode time_opt --format json", out) == 0);
    auto js = slurp(out);
    CHECK(js.find("\"mode\": \"time_opt\"") != std::string::npos);

    CHECK(cli("run " + p.string() + " --seed 123 --format json", out) == 0);
    CHECK(slurp(out).find("\"seed\": 123") != std::string::npos);
}

TEST_CASE("the trace directory flag and env var both work") {
    auto p = write_scenario("good.json", kScenario);
    auto d1 = kWork / "t1", d2 = kWork / "t2", d3 = kWork / "t3";

    CHECK(cli("run " + p.string() + " --seed 5 --trace " + d1.string()) == 0);
    CHECK(cli("run " + p.string() + " --seed 5 --trace " + d2.string()) == 0);
    for (const char* f : {"trace.csv", "trace.jsonl", "summary.txt", "summary.json"})
        CHECK(fs::exists(d1 / f));
    // same scenario, same seed: byte-identical traces
    CHECK(slurp(d1 / "trace.csv") == slurp(d2 / "trace.csv"));
    CHECK(slurp(d1 / "trace.jsonl") == slurp(d2 / "trace.jsonl"));

    int rc = run_cmd("GRIDECON_TRACE_DIR=" + d3.string() + " " + GRIDECON_CLI + " run " +
                     p.string() + " >/dev/null 2>/dev/null");
    CHECK(rc == 0);
    CHECK(fs::exists(d3 / "trace.csv"));
}

TEST_CASE("dump-directory shows the published offers") {
    auto p = write_scenario("good.json", kScenario);
    auto out = kWork / "dump.out";
    CHECK(cli("dump-directory " + p.string(), out) == 0);
    auto dump = slurp(out);
    CHECK(dump.find("r1-std") != std::string::npos);
    CHECK(dump.find("r2-std") != std::string::npos);
    fs::remove_all(kWork);
}
