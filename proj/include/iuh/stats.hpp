#ifndef IUH_STATS_HPP
#define IUH_STATS_HPP

#include <cmath>
#include <numeric>
#include <span>
#include <vector>

namespace iuh {

inline double sum(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0);
}

inline double mean(std::span<const double> v) {
    return v.empty() ? 0.0 : sum(v) / static_cast<double>(v.size());
}

/// Sample variance (n-1 denominator). Zero for fewer than two values.
inline double sample_variance(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return ss / static_cast<double>(v.size() - 1);
}

inline double sample_stdev(std::span<const double> v) {
    return std::sqrt(sample_variance(v));
}

/// Linear-interpolation quantile between order statistics
/// (h = (n-1)p convention). values need not be sorted; p in [0, 1].
double quantile(std::vector<double> values, double p);

}  // namespace iuh

#endif
