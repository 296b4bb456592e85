#include "iuh/metrics.hpp"

#include <boost/math/distributions/fisher_f.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "iuh/inference.hpp"
#include "iuh/stats.hpp"

namespace iuh {

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw std::invalid_argument("quantile of empty sample");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("quantile level outside [0, 1]");
    std::sort(values.begin(), values.end());
    const double h = p * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

RelErrors relative_error(const IuhParams& est, const IuhParams& truth,
                         const ParamBox& box) {
    box.validate();
    RelErrors e;
    e.lambda = std::abs(est.lambda - truth.lambda) / box.width_lambda();
    e.k = std::abs(est.k - truth.k) / box.width_k();
    e.theta = std::abs(est.theta - truth.theta) / box.width_theta();
    return e;
}

std::optional<double> cc(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("cc: length mismatch");
    if (a.size() < 2) throw std::invalid_argument("cc: need at least 2 points");
    const double ma = mean(a);
    const double mb = mean(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) return std::nullopt;
    return sab / std::sqrt(saa * sbb);
}

std::optional<double> nse(std::span<const double> obs,
                          std::span<const double> sim) {
    if (obs.size() != sim.size()) throw std::invalid_argument("nse: length mismatch");
    const double m = mean(obs);
    double sse_model = 0.0, ss_obs = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        sse_model += (obs[i] - sim[i]) * (obs[i] - sim[i]);
        ss_obs += (obs[i] - m) * (obs[i] - m);
    }
    if (ss_obs == 0.0) return std::nullopt;
    return 1.0 - sse_model / ss_obs;
}

double snr_observed(std::span<const double> runoff,
                    std::span<const double> residuals) {
    const double s_res = sample_stdev(residuals);
    if (s_res == 0.0) return std::numeric_limits<double>::infinity();
    return sample_stdev(runoff) / s_res;
}

double runoff_coefficient(std::span<const double> rain,
                          std::span<const double> runoff) {
    const double total_rain = sum(rain);
    if (!(total_rain > 0.0)) {
        throw std::domain_error("runoff coefficient undefined for zero total rainfall");
    }
    return sum(runoff) / total_rain;
}

std::optional<double> r2_identity(std::span<const double> x,
                                  std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("r2_identity: length mismatch");
    if (x.size() < 2) throw std::invalid_argument("r2_identity: need at least 2 points");
    const double my = mean(y);
    double ss_line = 0.0, ss_y = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        ss_line += (y[i] - x[i]) * (y[i] - x[i]);
        ss_y += (y[i] - my) * (y[i] - my);
    }
    if (ss_y == 0.0) return std::nullopt;
    return 1.0 - ss_line / ss_y;
}

RegressionResult regress_f_test(std::span<const double> x,
                                std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("regress: length mismatch");
    const std::size_t n = x.size();
    if (n < 3) throw std::invalid_argument("regress: need at least 3 points");
    const double mx = mean(x);
    const double my = mean(y);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("regress: x is constant");

    RegressionResult r;
    r.n = n;
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    const double ss_explained = r.slope * sxy;  // slope^2 * sxx
    const double ss_residual = std::max(0.0, syy - ss_explained);
    const double df_residual = static_cast<double>(n - 2);
    if (ss_residual == 0.0) {
        r.f_statistic = std::numeric_limits<double>::infinity();
        r.p_one_tailed = 0.0;
        return r;
    }
    r.f_statistic = ss_explained / (ss_residual / df_residual);
    const boost::math::fisher_f_distribution<double> dist(1.0, df_residual);
    r.p_one_tailed = boost::math::cdf(boost::math::complement(dist, r.f_statistic));
    return r;
}

std::vector<std::pair<double, double>> ecdf(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("ecdf of empty sample");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    std::vector<std::pair<double, double>> steps;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const bool last_of_run = (i + 1 == values.size()) || (values[i + 1] != values[i]);
        if (last_of_run) {
            steps.emplace_back(values[i], static_cast<double>(i + 1) / n);
        }
    }
    return steps;
}

FitRecord make_fit_record(const EpisodeData& episode,
                          const PosteriorSummary& posterior,
                          const ParamBox& box, int horizon) {
    FitRecord rec;
    rec.watershed = episode.watershed.id;
    rec.year = episode.year;
    rec.extension_days = episode.extension_days;
    rec.bayes = posterior.mean;
    rec.grid_init = posterior.init;
    rec.sigma2 = posterior.sigma2;
    rec.acceptance_rate = posterior.acceptance_rate;

    const DailySeries fitted =
        convolve(episode.rain, gamma_kernel(posterior.mean, horizon));
    const auto& obs = episode.runoff.values;
    rec.cc = cc(obs, fitted.values);
    rec.nse = nse(obs, fitted.values);
    std::vector<double> residuals(obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i) residuals[i] = obs[i] - fitted.values[i];
    rec.snr_observed = snr_observed(obs, residuals);
    rec.runoff_coefficient =
        sum(episode.rain.values) > 0.0
            ? runoff_coefficient(episode.rain.values, obs)
            : 0.0;
    rec.idr = idr(posterior.mean);
    rec.iuh_type = classify(posterior.mean);
    rec.total_rain = sum(episode.rain.values);
    rec.total_runoff = sum(obs);

    if (episode.truth) {
        rec.truth = episode.truth;
        rec.rel_err_bayes = relative_error(posterior.mean, *episode.truth, box);
        rec.rel_err_grid = relative_error(posterior.init, *episode.truth, box);
    }
    return rec;
}

}  // namespace iuh
