#ifndef IUH_EXPERIMENTS_HPP
#define IUH_EXPERIMENTS_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "iuh/ingest.hpp"
#include "iuh/metrics.hpp"
#include "iuh/synthetic.hpp"

namespace iuh {

/// Settings for the file-driven commands (fit, track, survey).
struct DataConfig {
    std::filesystem::path watersheds_csv;
    std::string rain_pattern = "rain_{id}.csv";      // {id} -> station id
    std::string runoff_pattern = "runoff_{id}.csv";
    GaugeVariable runoff_variable = GaugeVariable::Discharge;
    int year_from = 0;
    int year_to = 0;
    std::vector<std::string> stations;  // empty = all stations in metadata
};

/// Full run configuration: JSON file with per-field defaults, then
/// command-line overrides. Relative paths resolve against the config file's
/// directory.
struct RunConfig {
    std::uint64_t seed = 0;
    std::filesystem::path out_dir = "out";
    int threads = 0;  // 0 = hardware concurrency
    ParamBox box = ParamBox::defaults();
    ChainConfig chain;
    EpisodeQcPolicy qc;
    DataConfig data;

    // synth-sweep
    std::vector<double> snr_grid{2.0, 5.0, 10.0, 20.0, 50.0};
    int reps = 50;
    int n_days = 92;
    double truth_margin = 0.05;
    OccurrenceModel occurrence;
    IntensityPool pool = IntensityPool::defaults();

    // fit
    std::size_t mle_draws = 100000;

    // track
    std::optional<std::filesystem::path> fits_csv;  // reuse an existing table
    int min_track_episodes = 8;

    // survey
    double nse_threshold = 0.2;
    int min_survey_episodes = 5;  // strictly more required

    std::string config_hash;  // FNV-1a of the effective config JSON

    static RunConfig from_file(const std::filesystem::path& path);
    static RunConfig from_json_text(const std::string& text,
                                    const std::filesystem::path& base_dir);

    /// Recomputes config_hash from the effective settings.
    void finalize();
    std::string to_json() const;
};

/// Per-split shift statistic over a yearly parameter series:
/// |mean(left) - mean(right)| / pooled stdev, split s = size of the left
/// segment, s in [2, n-2]. A surfacing aid, not a significance test.
struct ChangePointScan {
    std::vector<double> statistics;   // indexed by split position s - 2
    std::size_t split = 0;            // argmax split (left-segment size)
    double statistic = 0.0;           // value at the argmax
};

ChangePointScan change_point_scan(std::span<const double> values);

/// Experiment drivers behind the CLI subcommands. Each writes its artifact
/// files under cfg.out_dir and throws ConfigError / DataError on failure.
void cmd_synth_sweep(const RunConfig& cfg);
void cmd_fit(const RunConfig& cfg);
void cmd_track(const RunConfig& cfg);
void cmd_survey(const RunConfig& cfg);

/// Reads a fits.csv produced by cmd_fit/cmd_track back into records.
std::vector<FitRecord> read_fits_csv(const std::filesystem::path& path);

}  // namespace iuh

#endif
