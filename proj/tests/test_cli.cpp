#include "doctest.h"

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

namespace {

struct Run {
    int status = -1;
    std::string out;
};

Run cli(const std::string& args)
{
    const std::string cmd = std::string(RMT_CLI) + " " + args + " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) {
        r.out.append(buf.data(), n);
    }
    const int st = pclose(p);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string spec(const std::string& name)
{
    return std::string(RMT_DATA_DIR) + "/" + name;
}

nlohmann::json csv_provenance(const std::string& csv)
{
    REQUIRE(csv.rfind("# ", 0) == 0);
    return nlohmann::json::parse(csv.substr(2, csv.find('\n') - 2));
}

std::string body(const std::string& csv)
{
    return csv.substr(csv.find('\n') + 1);
}

std::filesystem::path scratch_dir()
{
    const auto dir = std::filesystem::temp_directory_path() / "rmt_cli_test";
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("density output is idempotent and carries provenance")
{
    const std::string args = "density --spec " + spec("mp.json") + " --range 0.5:3.5 --points 31";
    const Run a = cli(args);
    const Run b = cli(args);
    REQUIRE(a.status == 0);
    CHECK(a.out == b.out);
    const nlohmann::json p = csv_provenance(a.out);
    CHECK(p["command"] == "density");
    CHECK(p["artifact"] == "rmt");
    CHECK(p.contains("config_hash"));
    const std::string rows = body(a.out);
    CHECK(rows.rfind("x,rho\n", 0) == 0);
    CHECK(std::count(rows.begin(), rows.end(), '\n') == 32);
}

TEST_CASE("config hash changes iff an effective knob changes")
{
    const std::string base = "density --spec " + spec("mp.json") + " --range 0.5:3.5";
    const std::string h_default = csv_provenance(cli(base).out)["config_hash"];
    const std::string h_explicit = csv_provenance(cli(base + " --points 800").out)["config_hash"];
    const std::string h_changed = csv_provenance(cli(base + " --points 801").out)["config_hash"];
    const std::string h_spec = csv_provenance(
        cli("density --spec " + spec("two_atoms_square.json") + " --range 0.5:3.5").out)["config_hash"];
    CHECK(h_default == h_explicit);
    CHECK(h_default != h_changed);
    CHECK(h_default != h_spec);

    const auto cfg = scratch_dir() / "points.json";
    std::ofstream(cfg) << R"({"points": 800, "range": "0.5:3.5"})";
    const std::string h_file =
        csv_provenance(cli("--config " + cfg.string() + " density --spec " + spec("mp.json")).out)["config_hash"];
    CHECK(h_file == h_default);

    const auto out = scratch_dir() / "density.csv";
    REQUIRE(cli(base + " -o " + out.string()).status == 0);
    std::ifstream in(out);
    const std::string written((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(csv_provenance(written)["config_hash"] == h_default);
}

TEST_CASE("simulation output is reproducible for a seed")
{
    const std::string args = "simulate --spec " + spec("mp.json") + " --mode hard-edge --N 20 --reps 50 --seed 4";
    const Run a = cli(args);
    REQUIRE(a.status == 0);
    CHECK(a.out == cli(args).out);
    CHECK(csv_provenance(a.out)["seed"] == 4);
    CHECK(body(cli(args).out) != body(cli("simulate --spec " + spec("mp.json") +
                                          " --mode hard-edge --N 20 --reps 50 --seed 5")
                                          .out));
}

TEST_CASE("JSON commands")
{
    const Run s = cli("support --spec " + spec("two_atoms_cusp.json"));
    REQUIRE(s.status == 0);
    const nlohmann::json j = nlohmann::json::parse(s.out);
    CHECK(j.contains("provenance"));
    const Run c = cli("cusp-scan --spec " + spec("two_atoms_cusp.json"));
    REQUIRE(c.status == 0);
    CHECK(nlohmann::json::parse(c.out).contains("provenance"));
    const Run h = cli("hard-edge --alpha 2 --N 100");
    REQUIRE(h.status == 0);
    CHECK(nlohmann::json::parse(h.out).contains("provenance"));
}

TEST_CASE("show-config prints the merged configuration")
{
    const Run r = cli("density --spec " + spec("mp.json") + " --points 12 --show-config");
    REQUIRE(r.status == 0);
    const nlohmann::json j = nlohmann::json::parse(r.out);
    CHECK(j["points"] == 12);
    CHECK(j["range"] == "auto");
}

TEST_CASE("exit codes")
{
    CHECK(cli("validate --quick").status == 0);
    CHECK(cli("density --spec /nonexistent.json").status == 2);
    CHECK(cli("density --spec " + spec("mp.json") + " --points many").status == 2);
    const auto cfg = scratch_dir() / "unknown.json";
    std::ofstream(cfg) << R"({"bogus": 1})";
    CHECK(cli("--config " + cfg.string() + " density --spec " + spec("mp.json")).status == 2);
    CHECK(cli("pearcey --tau 0 --grid -200:200:3").status == 2);
    CHECK(cli("pearcey --gap --interval -100:100").status == 3);
}
