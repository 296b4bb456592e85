#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace std::string_literals;
namespace fs = std::filesystem;

#ifndef IUHFIT_CLI
#error "IUHFIT_CLI must point at the CLI binary"
#endif

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("iuh_cli_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    fs::path file(const std::string& name, const std::string& content) const {
        const fs::path p = path / name;
        std::ofstream out(p);
        out << content;
        return p;
    }
};

int run(const std::string& args) {
    const std::string cmd = IUHFIT_CLI + (" " + args) + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string tiny_sweep_json(const std::string& out_dir) {
    return "{\"seed\": 3, \"out_dir\": \"" + out_dir +
           "\", \"threads\": 2,"
           " \"chain\": {\"n_samples\": 600, \"burn_in\": 150},"
           " \"synth\": {\"snr_grid\": [5, 20], \"reps\": 2}}";
}

}  // namespace

TEST_CASE("no subcommand exits with a config error") {
    CHECK(run("") == 2);
    CHECK(run("bogus-subcommand") == 2);
}

TEST_CASE("missing config file exits 2") {
    CHECK(run("synth-sweep --config /nonexistent/cfg.json") == 2);
}

TEST_CASE("invalid config content exits 2") {
    TempDir tmp;
    const auto bad = tmp.file("bad.json", "{\"sede\": 1}");
    CHECK(run("synth-sweep --config " + bad.string()) == 2);
    const auto notjson = tmp.file("notjson.json", "hello");
    CHECK(run("synth-sweep --config " + notjson.string()) == 2);
}

TEST_CASE("fit without data paths exits 2") {
    TempDir tmp;
    const auto cfg = tmp.file("cfg.json", "{}");
    CHECK(run("fit --config " + cfg.string()) == 2);
}

TEST_CASE("fit on files whose episodes all fail QC exits 3 (data error)") {
    TempDir tmp;
    // wet-start everywhere: constant runoff ties the median, so extension
    // never clears the threshold
    std::string rain = "date,value\n";
    std::string runoff = "date,value\n";
    for (int month = 5; month <= 9; ++month) {
        const int days_in_month = month == 5 ? 31 : (month == 6 ? 30 : (month == 7 ? 31 : (month == 8 ? 31 : 30)));
        for (int day = 1; day <= days_in_month; ++day) {
            char date[16];
            std::snprintf(date, sizeof date, "2001-%02d-%02d", month, day);
            rain += std::string(date) + ",2.0\n";
            runoff += std::string(date) + ",5.0\n";
        }
    }
    tmp.file("rain_s1.csv", rain);
    tmp.file("runoff_s1.csv", runoff);
    tmp.file("ws.csv", "id,name,lat,lon,area_km2\ns1,S One,42,-76,100\n");
    const auto cfg = tmp.file("cfg.json",
                              "{\"out_dir\": \"" + (tmp.path / "out").string() +
                                  "\","
                                  " \"chain\": {\"n_samples\": 600, \"burn_in\": 150},"
                                  " \"data\": {\"watersheds\": \"" +
                                  (tmp.path / "ws.csv").string() +
                                  "\","
                                  "  \"rain_pattern\": \"" +
                                  (tmp.path / "rain_{id}.csv").string() +
                                  "\","
                                  "  \"runoff_pattern\": \"" +
                                  (tmp.path / "runoff_{id}.csv").string() +
                                  "\","
                                  "  \"runoff_variable\": \"runoff_depth\","
                                  "  \"years\": [2001, 2001]}}");
    CHECK(run("fit --config " + cfg.string()) == 3);
    // the rejection log names the wet-start reason
    const std::string log = slurp(tmp.path / "out" / "rejections.jsonl");
    CHECK(log.find("wet_start_after_max_extension") != std::string::npos);
}

TEST_CASE("malformed gauge file exits 3") {
    TempDir tmp;
    tmp.file("rain_s1.csv", "date,value\n2001-06-01,1\n2001-06-01,2\n");
    tmp.file("runoff_s1.csv", "date,value\n2001-06-01,1\n");
    tmp.file("ws.csv", "id,name,lat,lon,area_km2\ns1,S One,42,-76,100\n");
    const auto cfg = tmp.file("cfg.json",
                              "{\"data\": {\"watersheds\": \"" +
                                  (tmp.path / "ws.csv").string() +
                                  "\", \"rain_pattern\": \"" +
                                  (tmp.path / "rain_{id}.csv").string() +
                                  "\", \"runoff_pattern\": \"" +
                                  (tmp.path / "runoff_{id}.csv").string() +
                                  "\", \"years\": [2001, 2001]}}");
    CHECK(run("fit --config " + cfg.string()) == 3);
}

TEST_CASE("synth-sweep succeeds, is deterministic, and embeds provenance") {
    TempDir tmp;
    const auto cfg = tmp.file("cfg.json", tiny_sweep_json((tmp.path / "out").string()));
    REQUIRE(run("synth-sweep --config " + cfg.string()) == 0);
    const std::string first = slurp(tmp.path / "out" / "sweep.csv");
    CHECK(first.find("# config_hash=") == 0);
    CHECK(first.find("master_seed=3") != std::string::npos);

    REQUIRE(run("synth-sweep --config " + cfg.string()) == 0);
    CHECK(slurp(tmp.path / "out" / "sweep.csv") == first);

    // a different seed changes the data
    REQUIRE(run("synth-sweep --seed 4 --config " + cfg.string()) == 0);
    CHECK(slurp(tmp.path / "out" / "sweep.csv") != first);
}

TEST_CASE("out-dir override wins over the config") {
    TempDir tmp;
    const auto cfg = tmp.file("cfg.json", tiny_sweep_json((tmp.path / "ignored").string()));
    const fs::path out = tmp.path / "override";
    REQUIRE(run("synth-sweep --config " + cfg.string() + " --out " + out.string()) == 0);
    CHECK(fs::exists(out / "sweep.csv"));
    CHECK(!fs::exists(tmp.path / "ignored" / "sweep.csv"));
}
