#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace {

std::string binary_path() {
    const char* p = std::getenv("QEST_BIN");
    return p ? p : "";
}

int run_cmd(const std::string& args) {
    const std::string cmd = binary_path() + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("cost sweeps are byte-identical across reruns") {
    if (binary_path().empty()) return;  // only run under ctest
    const std::string f1 = "/tmp/qest_cli_a.csv", f2 = "/tmp/qest_cli_b.csv";
    CHECK(run_cmd("costs --n 6 --alpha 0.125 --delta 1e-10 --out " + f1) == 0);
    CHECK(run_cmd("costs --n 6 --alpha 0.125 --delta 1e-10 --out " + f2) == 0);
    const std::string a = slurp(f1), b = slurp(f2);
    CHECK(!a.empty());
    CHECK(a == b);
    CHECK(a.find("algorithm,n,alpha,delta,queries") != std::string::npos);
}

TEST_CASE("empty grid emits a header-only csv") {
    if (binary_path().empty()) return;
    const std::string f = "/tmp/qest_cli_empty.csv";
    CHECK(run_cmd("costs --empty-grid --out " + f) == 0);
    const std::string content = slurp(f);
    std::istringstream is(content);
    std::string line;
    int data_rows = 0;
    while (std::getline(is, line))
        if (!line.empty() && line[0] != '#' && line.rfind("algorithm", 0) != 0) ++data_rows;
    CHECK(data_rows == 0);
}

TEST_CASE("simulate emits the json report and respects the budget guard") {
    if (binary_path().empty()) return;
    const std::string f = "/tmp/qest_cli_sim.json";
    CHECK(run_cmd("simulate --alg improved_pe --n 3 --alpha 0.3 --delta 0.05 --dim 8 --seed 7 --out " + f) == 0);
    const std::string js = slurp(f);
    CHECK(js.find("\"per_eigenstate_success\"") != std::string::npos);
    CHECK(js.find("\"seed\": 7") != std::string::npos);
    CHECK(js.find("\"meets_target\": true") != std::string::npos);
    CHECK(run_cmd("simulate --alg improved_pe --n 10 --alpha 0.3 --delta 0.05 --dim 64 --seed 7") == 2);
}

TEST_CASE("no-promise flag reports the split support") {
    if (binary_path().empty()) return;
    const std::string f = "/tmp/qest_cli_np.json";
    CHECK(run_cmd("simulate --alg improved_pe --n 3 --alpha 0.3 --delta 0.05 --dim 4 --seed 3 --no-promise "
                  "--out " + f) == 0);
    const std::string js = slurp(f);
    CHECK(js.find("\"no_promise=1\"") == std::string::npos);  // echoed inside config string
    CHECK(js.find("no_promise=1") != std::string::npos);
}

TEST_CASE("poly dump has the documented columns") {
    if (binary_path().empty()) return;
    const std::string f = "/tmp/qest_cli_poly.csv";
    CHECK(run_cmd("poly --kind amp --eta 0.2 --delta 1e-3 --out " + f) == 0);
    CHECK(slurp(f).find("x,target,approx,abs_err") != std::string::npos);
    CHECK(run_cmd("poly --kind cos --t 6.28 --eps 1e-5 --out " + f) == 0);
    CHECK(slurp(f).find("x,target,approx,abs_err") != std::string::npos);
}

TEST_CASE("verify gates on failures and supports filters") {
    if (binary_path().empty()) return;
    CHECK(run_cmd("verify --suite lemma2") == 0);
    CHECK(run_cmd("verify --suite numerics.svd") == 0);
    CHECK(run_cmd("verify --suite numerics.svd --inject-fault") == 1);
}

TEST_CASE("figure presets and degenerate amplitude runs") {
    if (binary_path().empty()) return;
    const std::string f = "/tmp/qest_cli_fig5.csv";
    CHECK(run_cmd("costs --figure fig5 --out " + f) == 0);
    std::istringstream is(slurp(f));
    std::string line;
    int rows = 0;
    while (std::getline(is, line))
        if (!line.empty() && line[0] != '#' && line.rfind("algorithm", 0) != 0) ++rows;
    CHECK(rows == 27 * 4);
    CHECK(run_cmd("simulate --alg amplitude --n 3 --dim 1 --delta 0.1 --seed 5") == 0);
}

TEST_CASE("invalid arguments exit with code 2") {
    if (binary_path().empty()) return;
    CHECK(run_cmd("costs --figure bogus") == 2);
    CHECK(run_cmd("simulate --alg bogus") == 2);
    CHECK(run_cmd("definitely-not-a-subcommand") == 2);
}

TEST_SUITE_END();
