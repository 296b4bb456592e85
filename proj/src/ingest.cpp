#include "iuh/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "iuh/errors.hpp"
#include "iuh/metrics.hpp"
#include "iuh/stats.hpp"

namespace iuh {

namespace {

constexpr double kMissingSentinel = -9999.0;

std::string strip(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(strip(field));
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

double parse_double(const std::string& s, const std::string& context) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw DataError(context + ": not a number: '" + s + "'");
    }
    if (pos != s.size() || !std::isfinite(v)) {
        throw DataError(context + ": not a finite number: '" + s + "'");
    }
    return v;
}

/// Daily values for one calendar window, looked up by date; absent dates
/// count as missing.
class WindowView {
public:
    WindowView(const std::vector<GaugeRecord>& records, const Date& start, int n_days)
        : values_(static_cast<std::size_t>(n_days)) {
        const long first = day_number(start);
        for (const auto& r : records) {
            const long offset = day_number(r.date) - first;
            if (offset >= 0 && offset < n_days) {
                values_[static_cast<std::size_t>(offset)] = r.value;
            }
        }
    }

    const std::optional<double>& at(int i) const {
        return values_[static_cast<std::size_t>(i)];
    }
    bool any_missing() const {
        return std::any_of(values_.begin(), values_.end(),
                           [](const auto& v) { return !v.has_value(); });
    }
    bool any_negative() const {
        return std::any_of(values_.begin(), values_.end(), [](const auto& v) {
            return v.has_value() && *v < 0.0;
        });
    }
    std::vector<double> dense() const {
        std::vector<double> out;
        out.reserve(values_.size());
        for (const auto& v : values_) out.push_back(v.value_or(0.0));
        return out;
    }

private:
    std::vector<std::optional<double>> values_;
};

}  // namespace

void EpisodeQcPolicy::validate() const {
    if (max_extension < 0) throw ConfigError("max_extension must be >= 0");
    if (!(start_threshold_quantile > 0.0) || !(start_threshold_quantile < 1.0)) {
        throw ConfigError("start_threshold_quantile must lie in (0, 1)");
    }
}

std::vector<GaugeRecord> parse_gauge_csv(const std::filesystem::path& path,
                                         GaugeVariable variable) {
    (void)variable;  // same format for all variables; role is the caller's
    std::ifstream in(path);
    if (!in) throw DataError("cannot open gauge file: " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw DataError(path.string() + ": empty file");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
        line = line.substr(3);  // UTF-8 BOM
    }
    {
        auto header = split_csv_line(line);
        if (header.size() != 2 || header[0] != "date" || header[1] != "value") {
            throw DataError(path.string() + ": expected header 'date,value'");
        }
    }

    std::vector<GaugeRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (strip(line).empty()) continue;
        const auto fields = split_csv_line(line);
        const std::string context = path.string() + ":" + std::to_string(line_no);
        if (fields.size() != 2) {
            throw DataError(context + ": malformed row (expected 2 fields, got " +
                            std::to_string(fields.size()) + ")");
        }
        GaugeRecord rec;
        try {
            rec.date = parse_date(fields[0]);
        } catch (const std::exception& e) {
            throw DataError(context + ": " + e.what());
        }
        if (fields[1].empty()) {
            rec.value = std::nullopt;
        } else {
            const double v = parse_double(fields[1], context);
            rec.value = (v == kMissingSentinel) ? std::nullopt : std::optional<double>(v);
        }
        records.push_back(rec);
    }

    std::stable_sort(records.begin(), records.end(),
                     [](const GaugeRecord& a, const GaugeRecord& b) {
                         return day_number(a.date) < day_number(b.date);
                     });
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (day_number(records[i].date) == day_number(records[i - 1].date)) {
            throw DataError(path.string() + ": duplicate date " +
                            format_date(records[i].date));
        }
    }
    return records;
}

std::vector<GaugeRecord> discharge_to_depth(std::vector<GaugeRecord> records,
                                            const WatershedMeta& meta) {
    if (!(meta.drainage_area_km2 > 0.0)) {
        throw std::domain_error("discharge_to_depth: drainage area must be > 0");
    }
    // m^3/s * 86400 s/day / (km^2 * 1e6 m^2/km^2) * 1e3 mm/m
    const double factor = 86.4 / meta.drainage_area_km2;
    for (auto& r : records) {
        if (r.value) r.value = *r.value * factor;
    }
    return records;
}

ExtractionResult extract_episodes(const std::vector<GaugeRecord>& rain_records,
                                  const std::vector<GaugeRecord>& runoff_records,
                                  const WatershedMeta& meta,
                                  const EpisodeQcPolicy& policy,
                                  int year_from, int year_to) {
    policy.validate();
    if (year_from > year_to) throw ConfigError("year_from must be <= year_to");

    ExtractionResult result;
    for (int year = year_from; year <= year_to; ++year) {
        const Date june1{std::chrono::year{year}, std::chrono::June, std::chrono::day{1}};
        const Date base_start = june1;
        constexpr int kSummerDays = 92;  // June + July + August

        // Threshold from the original 92-day window's non-missing runoff.
        const WindowView base_runoff(runoff_records, base_start, kSummerDays);
        std::vector<double> present;
        for (int i = 0; i < kSummerDays; ++i) {
            if (base_runoff.at(i)) present.push_back(*base_runoff.at(i));
        }
        const auto reject = [&](const std::string& reason) {
            result.rejections.push_back({meta.id, year, reason});
        };
        if (present.empty()) {
            if (!policy.drop_if_missing) {
                throw DataError(meta.id + " " + std::to_string(year) +
                                ": no runoff data in the summer window");
            }
            reject("missing_values");
            continue;
        }
        const double threshold = quantile(present, policy.start_threshold_quantile);

        // Adaptive extension: walk the start date earlier while runoff at the
        // start is at/above the threshold. Missing values end the walk; the
        // final-window scan below decides the episode's fate.
        int extension = 0;
        bool wet_start = false;
        for (;;) {
            const Date start = add_days(june1, -extension);
            const WindowView probe(runoff_records, start, 1);
            const auto& v = probe.at(0);
            if (!v.has_value()) break;
            if (*v < threshold) break;
            if (extension == policy.max_extension) {
                wet_start = true;
                break;
            }
            ++extension;
        }

        const Date start = add_days(june1, -extension);
        const int n_days = kSummerDays + extension;
        const WindowView rain_window(rain_records, start, n_days);
        const WindowView runoff_window(runoff_records, start, n_days);

        if (rain_window.any_missing() || runoff_window.any_missing()) {
            if (!policy.drop_if_missing) {
                throw DataError(meta.id + " " + std::to_string(year) +
                                ": missing values in the selected window");
            }
            reject("missing_values");
            continue;
        }
        if (wet_start) {
            reject("wet_start_after_max_extension");
            continue;
        }
        if (rain_window.any_negative() || runoff_window.any_negative()) {
            reject("negative_values");
            continue;
        }

        EpisodeData episode;
        episode.watershed = meta;
        episode.year = year;
        episode.rain = {start, rain_window.dense(), Quantity::RainfallDepth};
        episode.runoff = {start, runoff_window.dense(), Quantity::RunoffDepth};
        episode.extension_days = extension;
        result.episodes.push_back(std::move(episode));
    }
    return result;
}

std::vector<WatershedMeta> parse_watershed_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open watershed file: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw DataError(path.string() + ": empty file");
    {
        auto header = split_csv_line(line);
        const std::vector<std::string> expected{"id", "name", "lat", "lon", "area_km2"};
        if (std::vector<std::string>(header.begin(), header.end()) != expected) {
            throw DataError(path.string() + ": expected header 'id,name,lat,lon,area_km2'");
        }
    }
    std::vector<WatershedMeta> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (strip(line).empty()) continue;
        const auto fields = split_csv_line(line);
        const std::string context = path.string() + ":" + std::to_string(line_no);
        if (fields.size() != 5) throw DataError(context + ": malformed row");
        WatershedMeta meta;
        meta.id = fields[0];
        meta.name = fields[1];
        meta.latitude = parse_double(fields[2], context);
        meta.longitude = parse_double(fields[3], context);
        meta.drainage_area_km2 = parse_double(fields[4], context);
        if (meta.id.empty()) throw DataError(context + ": empty station id");
        if (!(meta.drainage_area_km2 > 0.0)) {
            throw DataError(context + ": drainage area must be > 0");
        }
        out.push_back(std::move(meta));
    }
    return out;
}

}  // namespace iuh
