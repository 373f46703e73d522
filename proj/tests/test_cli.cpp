#include "support.hpp"

#include "ksm/cli.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ksm;
using namespace ksm::test;
namespace fs = std::filesystem;

namespace {

const char* kConfig = R"({
  "grid": {"dim": 1, "extents": [1.0], "cells": [64]},
  "motility": {"kind": "power", "a": 1, "alpha": 1},
  "epsilon": 0.01,
  "initial": {"u0": {"kind": "bump", "center": [0.3], "width": 0.1, "mass": 1},
              "v0": {"kind": "constant", "value": 1}},
  "time": {"dt": 0.001, "T": 1},
  "output": {"cadence": 0.01}%s
})";

struct Workspace {
    fs::path root;
    explicit Workspace(const std::string& name) : root(fs::temp_directory_path() / ("ksm_cli_" + name)) {
        fs::remove_all(root);
        fs::create_directories(root);
    }
    ~Workspace() { fs::remove_all(root); }

    std::string config(const std::string& extra = "") const {
        char buf[2048];
        std::snprintf(buf, sizeof buf, kConfig, extra.c_str());
        const fs::path p = root / "config.json";
        std::ofstream(p) << buf;
        return p.string();
    }
    std::string out(const std::string& name) const { return (root / name).string(); }
};

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

int lines(const fs::path& p) {
    std::ifstream is(p);
    std::string line;
    int n = 0;
    while (std::getline(is, line)) ++n;
    return n;
}

}  // namespace

TEST_CASE("run and check") {
    Workspace ws("run");
    const std::string cfg = ws.config();
    CHECK(cli_main({"run", "--config", cfg, "--out", ws.out("a")}) == kExitOk);
    // Header plus T / cadence + 1 records.
    CHECK(lines(fs::path(ws.out("a")) / "diag.csv") == 1 + 101);
    CHECK(fs::exists(fs::path(ws.out("a")) / "report.json"));
    CHECK(cli_main({"check", ws.out("a")}) == kExitOk);

    // Determinism: identical artifacts from a second run.
    CHECK(cli_main({"run", "--config", cfg, "--out", ws.out("b")}) == kExitOk);
    for (const char* f : {"diag.csv", "aux.csv", "manifest.json", "fields/000100.field"}) {
        CHECK(slurp(fs::path(ws.out("a")) / f) == slurp(fs::path(ws.out("b")) / f));
    }
}

TEST_CASE("check detects a tampered mass column") {
    Workspace ws("tamper");
    REQUIRE(cli_main({"run", "--config", ws.config(), "--out", ws.out("r")}) == kExitOk);
    const fs::path diag = fs::path(ws.out("r")) / "diag.csv";
    std::istringstream is(slurp(diag));
    std::ostringstream os;
    std::string line;
    std::getline(is, line);
    os << line << '\n';
    while (std::getline(is, line)) {
        const auto a = line.find(','), b = line.find(',', a + 1);
        const double mass = std::stod(line.substr(a + 1, b - a - 1)) * 1.01;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", mass);
        os << line.substr(0, a + 1) << buf << line.substr(b) << '\n';
    }
    std::ofstream(diag) << os.str();
    CHECK(cli_main({"check", ws.out("r")}) == kExitAudit);
}

TEST_CASE("validation failures exit 1") {
    Workspace ws("invalid");
    CHECK(cli_main({"sweep", "--config", ws.config(R"(, "sweep": {"epsilons": [0.1, 0.01]})"), "--out", ws.out("s")}) ==
          kExitValidation);
    CHECK(cli_main({"run", "--config", ws.out("missing.json")}) == kExitValidation);
    CHECK(cli_main({"frobnicate"}) == kExitValidation);
    CHECK(cli_main({}) == kExitValidation);
    CHECK(cli_main({"check", ws.out("nothing-here")}) == kExitValidation);
    CHECK(cli_main({"relax", "--config", ws.config(), "--out", ws.out("x")}) == kExitValidation);
    std::ofstream(ws.root / "typo.json") << R"({"grid": {"dim": 1, "extents": [1], "cells": [8]}, "epsilonn": 0.1})";
    CHECK(cli_main({"run", "--config", (ws.root / "typo.json").string()}) == kExitValidation);
}

TEST_CASE("studies write their reports") {
    Workspace ws("studies");
    const std::string sweep = ws.config(R"(, "sweep": {"epsilons": [0.1, 0.01, 0.001]})");
    CHECK(cli_main({"sweep", "--config", sweep, "--out", ws.out("s")}) == kExitOk);
    CHECK(fs::exists(fs::path(ws.out("s")) / "sweep_report.json"));
    CHECK(fs::exists(fs::path(ws.out("s")) / "eps_02" / "diag.csv"));
    CHECK(cli_main({"check", (fs::path(ws.out("s")) / "eps_01").string()}) == kExitOk);

    const std::string refine = ws.config(R"(, "refine": {"cells": [16, 32, 64]})");
    CHECK(cli_main({"refine", "--config", refine, "--out", ws.out("f")}) == kExitOk);
    CHECK(fs::exists(fs::path(ws.out("f")) / "refine_report.json"));
}
