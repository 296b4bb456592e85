// Regenerates the bundled desk-scale fixture set under data/fixtures/:
// synthetic gauge records in the documented CSV formats plus demo run
// configurations. Deterministic; committing the output keeps tests hermetic.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "iuh/kernel.hpp"
#include "iuh/rng.hpp"
#include "iuh/stats.hpp"
#include "iuh/synthetic.hpp"
#include "iuh/types.hpp"

namespace fs = std::filesystem;
using namespace iuh;

namespace {

constexpr std::uint64_t kFixtureSeed = 0x20240601ULL;

struct Station {
    std::string id;
    std::string name;
    double lat = 0, lon = 0, area_km2 = 0;
    IuhParams truth;
    double snr = 20.0;
    int year_from = 0, year_to = 0;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::uint64_t fnv(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// One station's gauge files: rainfall (mm/day) and discharge (m^3/s),
/// April-September each year so June episodes have pre-season history.
/// year_jitter adds seeded inter-annual variation around the base truth.
void write_station(const fs::path& dir, const Station& st,
                   const OccurrenceModel& occ, const IntensityPool& pool,
                   const std::vector<std::pair<Date, std::string>>& runoff_overrides,
                   bool append = false, bool year_jitter = true) {
    const auto mode = append ? std::ios::app : std::ios::out;
    std::ofstream rain_out(dir / ("rain_" + st.id + ".csv"), mode);
    std::ofstream runoff_out(dir / ("runoff_" + st.id + ".csv"), mode);
    if (!append) {
        rain_out << "date,value\n";
        runoff_out << "date,value\n";
    }

    for (int year = st.year_from; year <= st.year_to; ++year) {
        const std::uint64_t seed =
            child_seed(kFixtureSeed, fnv(st.id), static_cast<std::uint64_t>(year));
        const Date start{std::chrono::year{year}, std::chrono::April, std::chrono::day{1}};
        const int n_days = 183;  // April 1 .. September 30

        IuhParams truth = st.truth;
        if (year_jitter) {
            Rng jitter(child_seed(seed, 4));
            truth.lambda = std::clamp(truth.lambda + jitter.uniform(-0.08, 0.08), 0.05, 0.6);
            truth.k = std::clamp(truth.k + jitter.uniform(-0.3, 0.3), 0.4, 6.0);
            truth.theta = std::clamp(truth.theta + jitter.uniform(-0.5, 0.5), 0.6, 10.0);
        }
        const DiscreteKernel kernel = gamma_kernel(truth);

        const auto wet = gen_occurrence(occ, n_days, child_seed(seed, 1));
        const DailySeries rain = gen_rainfall(wet, pool, child_seed(seed, 2), start);
        const DailySeries clean = convolve(rain, kernel);
        const double sigma = sample_stdev(clean.values) / st.snr;
        Rng noise_rng(child_seed(seed, 3));

        for (int i = 0; i < n_days; ++i) {
            const Date date = add_days(start, i);
            const std::string date_str = format_date(date);
            rain_out << date_str << ',' << fmt(rain.values[static_cast<std::size_t>(i)])
                     << "\n";
            // Gauges do not report negative flow; clamp the noise floor.
            const double depth = std::max(
                0.0, clean.values[static_cast<std::size_t>(i)] +
                         noise_rng.normal(0.0, sigma));
            const double discharge = depth * st.area_km2 / 86.4;
            std::string value = fmt(discharge);
            for (const auto& [od, ov] : runoff_overrides) {
                if (od == date) value = ov;
            }
            runoff_out << date_str << ',' << value << "\n";
        }
    }
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::path("data/fixtures");
    fs::create_directories(root);
    fs::create_directories(root / "configs");

    const OccurrenceModel occ;
    const IntensityPool pool = IntensityPool::defaults();

    // Survey cohort: area and Gamma shape rise together, so median IDR grows
    // with the length scale.
    std::vector<Station> stations;
    for (int i = 0; i < 8; ++i) {
        Station st;
        st.id = "ws0" + std::to_string(i + 1);
        st.name = "Fixture Creek " + std::to_string(i + 1);
        st.lat = 42.0 + 0.35 * i;
        st.lon = -77.5 + 0.4 * i;
        st.area_km2 = 25.0 * std::pow(1.9, i);
        st.truth = {0.25 + 0.03 * i, 1.2 + 0.4 * i, 3.0};
        st.snr = 20.0;
        st.year_from = 1990;
        st.year_to = 2005;
        stations.push_back(st);
    }

    std::string meta = "id,name,lat,lon,area_km2\n";
    for (const auto& st : stations) {
        meta += st.id + "," + st.name + "," + fmt(st.lat) + "," + fmt(st.lon) + "," +
                fmt(st.area_km2) + "\n";
        std::vector<std::pair<Date, std::string>> overrides;
        if (st.id == "ws01") {
            // one missing observation so the demo exercises a QC rejection
            overrides.emplace_back(
                Date{std::chrono::year{1997}, std::chrono::July, std::chrono::day{15}},
                "-9999");
        }
        write_station(root, st, occ, pool, overrides);
    }

    // Long single-station record with a mid-record drop in the Gamma shape:
    // the track demo's change-point target.
    {
        Station st;
        st.id = "ws_track";
        st.name = "Fixture Track Creek";
        st.lat = 42.45;
        st.lon = -76.5;
        st.area_km2 = 324.0;
        st.snr = 10.0;
        st.truth = {0.3, 4.0, 3.0};
        st.year_from = 1960;
        st.year_to = 1979;
        write_station(root, st, occ, pool, {}, /*append=*/false, /*year_jitter=*/false);
        st.truth.k = 1.5;
        st.year_from = 1980;
        st.year_to = 1999;
        write_station(root, st, occ, pool, {}, /*append=*/true, /*year_jitter=*/false);
        meta += st.id + "," + st.name + "," + fmt(st.lat) + "," + fmt(st.lon) + "," +
                fmt(st.area_km2) + "\n";
    }

    write_file(root / "watersheds.csv", meta);

    const std::string fast_chain =
        "  \"chain\": {\"n_samples\": 4000, \"burn_in\": 1000, \"step_fraction\": 0.05,\n"
        "            \"grid_per_dim\": 10, \"sigma2_iterations\": 1, \"horizon\": 14},\n";

    write_file(root / "configs" / "sweep_demo.json",
               "{\n"
               "  \"seed\": 7,\n"
               "  \"out_dir\": \"../../../out/sweep_demo\",\n" +
                   fast_chain +
                   "  \"synth\": {\"snr_grid\": [5, 20], \"reps\": 6, \"n_days\": 92}\n"
                   "}\n");

    write_file(root / "configs" / "fit_demo.json",
               "{\n"
               "  \"seed\": 7,\n"
               "  \"out_dir\": \"../../../out/fit_demo\",\n" +
                   fast_chain +
                   "  \"mle\": {\"n_draws\": 20000},\n"
                   "  \"data\": {\"watersheds\": \"../watersheds.csv\",\n"
                   "           \"rain_pattern\": \"../rain_{id}.csv\",\n"
                   "           \"runoff_pattern\": \"../runoff_{id}.csv\",\n"
                   "           \"runoff_variable\": \"discharge\",\n"
                   "           \"years\": [1990, 2005],\n"
                   "           \"stations\": [\"ws01\"]}\n"
                   "}\n");

    write_file(root / "configs" / "track_demo.json",
               "{\n"
               "  \"seed\": 7,\n"
               "  \"out_dir\": \"../../../out/track_demo\",\n" +
                   fast_chain +
                   "  \"data\": {\"watersheds\": \"../watersheds.csv\",\n"
                   "           \"rain_pattern\": \"../rain_{id}.csv\",\n"
                   "           \"runoff_pattern\": \"../runoff_{id}.csv\",\n"
                   "           \"runoff_variable\": \"discharge\",\n"
                   "           \"years\": [1960, 1999],\n"
                   "           \"stations\": [\"ws_track\"]}\n"
                   "}\n");

    write_file(root / "configs" / "survey_demo.json",
               "{\n"
               "  \"seed\": 7,\n"
               "  \"out_dir\": \"../../../out/survey_demo\",\n" +
                   fast_chain +
                   "  \"survey\": {\"nse_threshold\": 0.2, \"min_episodes\": 5},\n"
                   "  \"data\": {\"watersheds\": \"../watersheds.csv\",\n"
                   "           \"rain_pattern\": \"../rain_{id}.csv\",\n"
                   "           \"runoff_pattern\": \"../runoff_{id}.csv\",\n"
                   "           \"runoff_variable\": \"discharge\",\n"
                   "           \"years\": [1990, 2005],\n"
                   "           \"stations\": [\"ws01\", \"ws02\", \"ws03\", \"ws04\","
                   " \"ws05\", \"ws06\", \"ws07\", \"ws08\"]}\n"
                   "}\n");

    std::printf("fixtures written to %s\n", root.string().c_str());
    return 0;
}
