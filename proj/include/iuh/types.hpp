#ifndef IUH_TYPES_HPP
#define IUH_TYPES_HPP

#include <chrono>
#include <optional>
#include <string>
#include <vector>

namespace iuh {

using Date = std::chrono::year_month_day;

/// Parses an ISO-8601 date (YYYY-MM-DD). Throws std::invalid_argument on
/// malformed input or an invalid calendar date.
Date parse_date(const std::string& text);

std::string format_date(const Date& date);

/// Calendar arithmetic in whole days.
Date add_days(const Date& date, int days);
long day_number(const Date& date);

/// Role of a daily series. Rainfall and runoff are basin-average depths in
/// mm/day; kernel weights are dimensionless daily masses.
enum class Quantity { RainfallDepth, RunoffDepth, KernelWeight };

/// A uniformly sampled daily sequence: values[i] belongs to start + i days.
struct DailySeries {
    Date start{};
    std::vector<double> values;
    Quantity quantity = Quantity::RunoffDepth;

    std::size_t size() const { return values.size(); }
};

/// The parameter triple of the rescaled-Gamma unit hydrograph:
/// lambda scales total response mass (runoff fraction of rainfall depth),
/// (k, theta) are the Gamma shape and scale (theta in days).
struct IuhParams {
    double lambda = 0.0;
    double k = 1.0;
    double theta = 1.0;
};

inline bool operator==(const IuhParams& a, const IuhParams& b) {
    return a.lambda == b.lambda && a.k == b.k && a.theta == b.theta;
}

/// Day-integrated unit-hydrograph kernel: weights[tau] is the response mass
/// at lag tau days, tau = 0..horizon. weights.size() == horizon + 1.
struct DiscreteKernel {
    std::vector<double> weights;
    int horizon = 0;
};

struct WatershedMeta {
    std::string id;
    std::string name;
    double latitude = 0.0;
    double longitude = 0.0;
    double drainage_area_km2 = 0.0;
};

/// One paired rainfall/runoff summer period — the unit of estimation.
/// rain and runoff share start date and length (92 + extension_days for
/// ingested episodes). truth is set only by the synthetic generator.
struct EpisodeData {
    WatershedMeta watershed;
    int year = 0;
    DailySeries rain;
    DailySeries runoff;
    int extension_days = 0;
    std::optional<IuhParams> truth;
};

}  // namespace iuh

#endif
