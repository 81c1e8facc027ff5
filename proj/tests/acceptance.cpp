#include "checks.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

using namespace icn::checks;

namespace {

struct Criterion {
    const char* name;
    double budget_s;  // 0 means unbudgeted
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv)
{
    std::string source_dir = argc > 1 ? argv[1] : ICN_SOURCE_DIR;
    auto scratch = std::filesystem::temp_directory_path() / "icn-acceptance";
    std::filesystem::remove_all(scratch);
    std::filesystem::create_directories(scratch);

    std::vector<Criterion> criteria = {
        {"1 conservation", 10, [] { return conservation({}); }},
        {"2 no double spend", 0, [] { return allocation_random_walk(2, 10'000); }},
        {"3 allocation oracle", 30, [] { return allocation_oracle(3, 500, 6); }},
        {"4 proof binding", 0, [] { return proof_binding(4, 100); }},
        {"5 slash proportionality", 0, [] { return slash_proportionality(5, 2000); }},
        {"6 nft lifecycle", 0, [] { return nft_lifecycle(6, 1000); }},
        {"7 regime switch", 0, [&] { return regime_switch(7, (scratch / "regime").string()); }},
        {"8 price fixing", 0, [] { return price_fixing(8); }},
        {"9 determinism", 0,
         [&] { return determinism(source_dir + "/scenarios/reference.json", (scratch / "determinism").string()); }},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("threw: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.budget_s > 0 && secs >= c.budget_s) {
            out.ok = false;
            out.detail += "; over the " + std::to_string(static_cast<int>(c.budget_s)) + " s budget";
        }
        failed += !out.ok;
        std::printf("%s  [%-24s] %7.2f s  %s\n", out.ok ? "PASS" : "FAIL", c.name, secs, out.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
