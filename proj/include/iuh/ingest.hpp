#ifndef IUH_INGEST_HPP
#define IUH_INGEST_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "iuh/types.hpp"

namespace iuh {

enum class GaugeVariable { Rainfall, Discharge, RunoffDepth };

struct GaugeRecord {
    Date date{};
    std::optional<double> value;  // nullopt = missing observation
};

/// Quality-control policy for summer-period selection.
struct EpisodeQcPolicy {
    int max_extension = 10;                  // earliest start: max_extension days before June 1
    double start_threshold_quantile = 0.5;   // of the original 92-day runoff window
    bool drop_if_missing = true;             // false: missing data raises DataError instead

    void validate() const;
};

struct Rejection {
    std::string station;
    int year = 0;
    std::string reason;  // machine-readable: missing_values | wet_start_after_max_extension | negative_values
};

struct ExtractionResult {
    std::vector<EpisodeData> episodes;
    std::vector<Rejection> rejections;
};

/// Reads a gauge CSV (header "date,value", ISO-8601 dates, missing as -9999
/// or empty). Returns chronologically sorted records. Throws DataError on a
/// malformed row (with its line number), an unparseable date, or a
/// duplicated date (named in the message).
std::vector<GaugeRecord> parse_gauge_csv(const std::filesystem::path& path,
                                         GaugeVariable variable);

/// Converts discharge (m^3/s) to basin-average depth (mm/day):
/// depth = discharge * 86.4 / drainage_area_km2. Missing values pass
/// through. Throws std::domain_error on a non-positive area.
std::vector<GaugeRecord> discharge_to_depth(std::vector<GaugeRecord> records,
                                            const WatershedMeta& meta);

/// Extracts one quality-controlled June-August episode per requested year.
/// The start may move up to policy.max_extension days before June 1 while
/// runoff at the start date is at or above the threshold quantile of the
/// original 92-day runoff window. Years are rejected (not errors) for
/// missing values in the final window, a start still at/above threshold
/// after maximal extension, or negative depths in the window.
ExtractionResult extract_episodes(const std::vector<GaugeRecord>& rain_records,
                                  const std::vector<GaugeRecord>& runoff_records,
                                  const WatershedMeta& meta,
                                  const EpisodeQcPolicy& policy,
                                  int year_from, int year_to);

/// Reads a watershed metadata CSV (header "id,name,lat,lon,area_km2").
std::vector<WatershedMeta> parse_watershed_csv(const std::filesystem::path& path);

}  // namespace iuh

#endif
