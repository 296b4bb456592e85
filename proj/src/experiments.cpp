#include "iuh/experiments.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "iuh/errors.hpp"
#include "iuh/parallel.hpp"
#include "iuh/rng.hpp"
#include "iuh/stats.hpp"
#include "iuh/svg.hpp"

namespace iuh {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// formatting / hashing
// ---------------------------------------------------------------------------

std::string fmt_value(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v) {
    return v ? fmt_value(*v) : "";
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void write_text(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << content;
}

std::string stamp(const RunConfig& cfg) {
    return "config_hash=" + cfg.config_hash + " master_seed=" + std::to_string(cfg.seed);
}

json meta_json(const RunConfig& cfg) {
    return json{{"config_hash", cfg.config_hash}, {"master_seed", cfg.seed}};
}

// ---------------------------------------------------------------------------
// config parsing
// ---------------------------------------------------------------------------

void check_keys(const json& obj, const std::string& where,
                const std::set<std::string>& allowed) {
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) {
            throw ConfigError("unknown config key '" + key + "' in " + where);
        }
    }
}

double get_num(const json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) throw ConfigError(std::string(key) + " must be a number");
    return obj[key].get<double>();
}

std::uint64_t get_u64(const json& obj, const char* key, std::uint64_t fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_unsigned()) {
        throw ConfigError(std::string(key) + " must be a non-negative integer");
    }
    return obj[key].get<std::uint64_t>();
}

bool get_bool(const json& obj, const char* key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_boolean()) throw ConfigError(std::string(key) + " must be a boolean");
    return obj[key].get<bool>();
}

std::pair<double, double> get_range(const json& obj, const char* key,
                                    std::pair<double, double> fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& a = obj[key];
    if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number()) {
        throw ConfigError(std::string(key) + " must be a [low, high] pair");
    }
    return {a[0].get<double>(), a[1].get<double>()};
}

fs::path resolve(const fs::path& base, const fs::path& p) {
    return p.is_absolute() ? p : base / p;
}

}  // namespace

RunConfig RunConfig::from_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
    return from_json_text(buffer.str(), base);
}

RunConfig RunConfig::from_json_text(const std::string& text, const fs::path& base_dir) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be a JSON object");
    check_keys(root, "config root",
               {"seed", "out_dir", "threads", "box", "chain", "qc", "synth", "data",
                "mle", "track", "survey"});

    RunConfig cfg;
    cfg.seed = get_u64(root, "seed", cfg.seed);
    if (root.contains("out_dir")) {
        cfg.out_dir = resolve(base_dir, root["out_dir"].get<std::string>());
    }
    cfg.threads = static_cast<int>(get_num(root, "threads", cfg.threads));

    if (root.contains("box")) {
        const auto& b = root["box"];
        check_keys(b, "box", {"lambda", "k", "theta"});
        auto [l_lo, l_hi] = get_range(b, "lambda", {cfg.box.lower.lambda, cfg.box.upper.lambda});
        auto [k_lo, k_hi] = get_range(b, "k", {cfg.box.lower.k, cfg.box.upper.k});
        auto [t_lo, t_hi] = get_range(b, "theta", {cfg.box.lower.theta, cfg.box.upper.theta});
        cfg.box = {{l_lo, k_lo, t_lo}, {l_hi, k_hi, t_hi}};
    }

    if (root.contains("chain")) {
        const auto& c = root["chain"];
        check_keys(c, "chain", {"n_samples", "burn_in", "step_fraction", "grid_per_dim",
                                "sigma2_iterations", "horizon"});
        cfg.chain.n_samples = static_cast<std::size_t>(get_num(c, "n_samples",
                                                               static_cast<double>(cfg.chain.n_samples)));
        cfg.chain.burn_in = static_cast<std::size_t>(get_num(c, "burn_in",
                                                             static_cast<double>(cfg.chain.burn_in)));
        cfg.chain.step_fraction = get_num(c, "step_fraction", cfg.chain.step_fraction);
        cfg.chain.grid_per_dim = static_cast<int>(get_num(c, "grid_per_dim", cfg.chain.grid_per_dim));
        cfg.chain.sigma2_iterations =
            static_cast<int>(get_num(c, "sigma2_iterations", cfg.chain.sigma2_iterations));
        cfg.chain.horizon = static_cast<int>(get_num(c, "horizon", cfg.chain.horizon));
    }

    if (root.contains("qc")) {
        const auto& q = root["qc"];
        check_keys(q, "qc", {"max_extension", "start_threshold_quantile", "drop_if_missing"});
        cfg.qc.max_extension = static_cast<int>(get_num(q, "max_extension", cfg.qc.max_extension));
        cfg.qc.start_threshold_quantile =
            get_num(q, "start_threshold_quantile", cfg.qc.start_threshold_quantile);
        cfg.qc.drop_if_missing = get_bool(q, "drop_if_missing", cfg.qc.drop_if_missing);
    }

    if (root.contains("synth")) {
        const auto& s = root["synth"];
        check_keys(s, "synth",
                   {"snr_grid", "reps", "n_days", "truth_margin", "occurrence",
                    "intensity_pool"});
        if (s.contains("snr_grid")) {
            cfg.snr_grid.clear();
            for (const auto& v : s["snr_grid"]) cfg.snr_grid.push_back(v.get<double>());
        }
        cfg.reps = static_cast<int>(get_num(s, "reps", cfg.reps));
        cfg.n_days = static_cast<int>(get_num(s, "n_days", cfg.n_days));
        cfg.truth_margin = get_num(s, "truth_margin", cfg.truth_margin);
        if (s.contains("occurrence")) {
            const auto& o = s["occurrence"];
            check_keys(o, "occurrence",
                       {"p_rain_given_sunny", "p_rain_given_rainy", "p_rain_initial"});
            cfg.occurrence.p_rain_given_sunny =
                get_num(o, "p_rain_given_sunny", cfg.occurrence.p_rain_given_sunny);
            cfg.occurrence.p_rain_given_rainy =
                get_num(o, "p_rain_given_rainy", cfg.occurrence.p_rain_given_rainy);
            cfg.occurrence.p_rain_initial =
                get_num(o, "p_rain_initial", cfg.occurrence.p_rain_initial);
        }
        if (s.contains("intensity_pool")) {
            cfg.pool.intensities.clear();
            for (const auto& v : s["intensity_pool"]) {
                cfg.pool.intensities.push_back(v.get<double>());
            }
        }
    }

    if (root.contains("data")) {
        const auto& d = root["data"];
        check_keys(d, "data", {"watersheds", "rain_pattern", "runoff_pattern",
                               "runoff_variable", "years", "stations"});
        if (d.contains("watersheds")) {
            cfg.data.watersheds_csv = resolve(base_dir, d["watersheds"].get<std::string>());
        }
        if (d.contains("rain_pattern")) {
            cfg.data.rain_pattern =
                resolve(base_dir, d["rain_pattern"].get<std::string>()).string();
        }
        if (d.contains("runoff_pattern")) {
            cfg.data.runoff_pattern =
                resolve(base_dir, d["runoff_pattern"].get<std::string>()).string();
        }
        if (d.contains("runoff_variable")) {
            const std::string v = d["runoff_variable"].get<std::string>();
            if (v == "discharge") {
                cfg.data.runoff_variable = GaugeVariable::Discharge;
            } else if (v == "runoff_depth") {
                cfg.data.runoff_variable = GaugeVariable::RunoffDepth;
            } else {
                throw ConfigError("runoff_variable must be 'discharge' or 'runoff_depth'");
            }
        }
        if (d.contains("years")) {
            auto [from, to] = get_range(d, "years", {0.0, 0.0});
            cfg.data.year_from = static_cast<int>(from);
            cfg.data.year_to = static_cast<int>(to);
        }
        if (d.contains("stations")) {
            for (const auto& v : d["stations"]) {
                cfg.data.stations.push_back(v.get<std::string>());
            }
        }
    }

    if (root.contains("mle")) {
        check_keys(root["mle"], "mle", {"n_draws"});
        cfg.mle_draws = static_cast<std::size_t>(
            get_num(root["mle"], "n_draws", static_cast<double>(cfg.mle_draws)));
    }

    if (root.contains("track")) {
        const auto& t = root["track"];
        check_keys(t, "track", {"fits_csv", "min_episodes"});
        if (t.contains("fits_csv") && !t["fits_csv"].is_null()) {
            cfg.fits_csv = resolve(base_dir, t["fits_csv"].get<std::string>());
        }
        cfg.min_track_episodes =
            static_cast<int>(get_num(t, "min_episodes", cfg.min_track_episodes));
    }

    if (root.contains("survey")) {
        const auto& s = root["survey"];
        check_keys(s, "survey", {"nse_threshold", "min_episodes"});
        cfg.nse_threshold = get_num(s, "nse_threshold", cfg.nse_threshold);
        cfg.min_survey_episodes =
            static_cast<int>(get_num(s, "min_episodes", cfg.min_survey_episodes));
    }

    cfg.finalize();
    return cfg;
}

std::string RunConfig::to_json() const {
    json root;
    root["seed"] = seed;
    root["out_dir"] = out_dir.string();
    root["threads"] = threads;
    root["box"] = {{"lambda", {box.lower.lambda, box.upper.lambda}},
                   {"k", {box.lower.k, box.upper.k}},
                   {"theta", {box.lower.theta, box.upper.theta}}};
    root["chain"] = {{"n_samples", chain.n_samples},
                     {"burn_in", chain.burn_in},
                     {"step_fraction", chain.step_fraction},
                     {"grid_per_dim", chain.grid_per_dim},
                     {"sigma2_iterations", chain.sigma2_iterations},
                     {"horizon", chain.horizon}};
    root["qc"] = {{"max_extension", qc.max_extension},
                  {"start_threshold_quantile", qc.start_threshold_quantile},
                  {"drop_if_missing", qc.drop_if_missing}};
    root["synth"] = {{"snr_grid", snr_grid},
                     {"reps", reps},
                     {"n_days", n_days},
                     {"truth_margin", truth_margin},
                     {"occurrence",
                      {{"p_rain_given_sunny", occurrence.p_rain_given_sunny},
                       {"p_rain_given_rainy", occurrence.p_rain_given_rainy},
                       {"p_rain_initial", occurrence.p_rain_initial}}},
                     {"intensity_pool", pool.intensities}};
    root["data"] = {{"watersheds", data.watersheds_csv.string()},
                    {"rain_pattern", data.rain_pattern},
                    {"runoff_pattern", data.runoff_pattern},
                    {"runoff_variable",
                     data.runoff_variable == GaugeVariable::Discharge ? "discharge"
                                                                      : "runoff_depth"},
                    {"years", {data.year_from, data.year_to}},
                    {"stations", data.stations}};
    root["mle"] = {{"n_draws", mle_draws}};
    root["track"] = {{"fits_csv", fits_csv ? json(fits_csv->string()) : json(nullptr)},
                     {"min_episodes", min_track_episodes}};
    root["survey"] = {{"nse_threshold", nse_threshold},
                      {"min_episodes", min_survey_episodes}};
    return root.dump();
}

void RunConfig::finalize() {
    box.validate();
    chain.validate();
    qc.validate();
    occurrence.validate();
    pool.validate();
    if (reps < 1) throw ConfigError("synth.reps must be >= 1");
    if (n_days < 1) throw ConfigError("synth.n_days must be >= 1");
    if (truth_margin < 0.0 || truth_margin >= 0.5) {
        throw ConfigError("synth.truth_margin must lie in [0, 0.5)");
    }
    for (double s : snr_grid) {
        if (!(s > 0.0)) throw ConfigError("synth.snr_grid values must be > 0");
    }
    if (threads < 0) throw ConfigError("threads must be >= 0");
    config_hash = hex64(fnv1a64(to_json()));
}

// ---------------------------------------------------------------------------
// change-point scan
// ---------------------------------------------------------------------------

ChangePointScan change_point_scan(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 4) throw std::invalid_argument("change_point_scan: need at least 4 values");
    ChangePointScan scan;
    scan.statistic = -1.0;
    for (std::size_t s = 2; s + 2 <= n; ++s) {
        const std::span<const double> left = values.subspan(0, s);
        const std::span<const double> right = values.subspan(s);
        const double n_l = static_cast<double>(left.size());
        const double n_r = static_cast<double>(right.size());
        const double var_l = sample_variance(left);
        const double var_r = sample_variance(right);
        const double pooled =
            std::sqrt(((n_l - 1.0) * var_l + (n_r - 1.0) * var_r) / (n_l + n_r - 2.0));
        const double shift = std::abs(mean(left) - mean(right));
        double stat;
        if (pooled == 0.0) {
            stat = shift == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        } else {
            stat = shift / pooled;
        }
        scan.statistics.push_back(stat);
        if (stat > scan.statistic) {
            scan.statistic = stat;
            scan.split = s;
        }
    }
    return scan;
}

// ---------------------------------------------------------------------------
// table writers / readers
// ---------------------------------------------------------------------------

namespace {

std::string fits_csv_text(const RunConfig& cfg, const std::vector<FitRecord>& records) {
    std::ostringstream out;
    out << "# " << stamp(cfg) << "\n";
    out << "station,year,extension_days,lambda_bayes,k_bayes,theta_bayes,"
           "lambda_mle,k_mle,theta_mle,lambda_grid,k_grid,theta_grid,"
           "sigma2,acceptance_rate,cc,nse,snr_observed,runoff_coefficient,"
           "idr,iuh_type,total_rain,total_runoff\n";
    for (const auto& r : records) {
        out << r.watershed << ',' << r.year << ',' << r.extension_days << ','
            << fmt_value(r.bayes.lambda) << ',' << fmt_value(r.bayes.k) << ','
            << fmt_value(r.bayes.theta) << ','
            << (r.mle ? fmt_value(r.mle->lambda) : "") << ','
            << (r.mle ? fmt_value(r.mle->k) : "") << ','
            << (r.mle ? fmt_value(r.mle->theta) : "") << ','
            << fmt_value(r.grid_init.lambda) << ',' << fmt_value(r.grid_init.k) << ','
            << fmt_value(r.grid_init.theta) << ',' << fmt_value(r.sigma2) << ','
            << fmt_value(r.acceptance_rate) << ',' << fmt_opt(r.cc) << ','
            << fmt_opt(r.nse) << ',' << fmt_value(r.snr_observed) << ','
            << fmt_value(r.runoff_coefficient) << ',' << fmt_value(r.idr) << ','
            << to_string(r.iuh_type) << ',' << fmt_value(r.total_rain) << ','
            << fmt_value(r.total_runoff) << "\n";
    }
    return out.str();
}

std::string sweep_csv_text(const RunConfig& cfg, const std::vector<FitRecord>& records) {
    std::ostringstream out;
    out << "# " << stamp(cfg) << "\n";
    out << "snr_target,rep,lambda_truth,k_truth,theta_truth,"
           "lambda_bayes,k_bayes,theta_bayes,lambda_grid,k_grid,theta_grid,"
           "relerr_lambda_mcmc,relerr_k_mcmc,relerr_theta_mcmc,"
           "relerr_lambda_grid,relerr_k_grid,relerr_theta_grid,"
           "sigma2,noise_sigma,snr_noisy,snr_observed,acceptance_rate,cc,nse,"
           "runoff_coefficient\n";
    for (const auto& r : records) {
        out << fmt_opt(r.snr_target) << ',' << r.year << ','
            << fmt_value(r.truth->lambda) << ',' << fmt_value(r.truth->k) << ','
            << fmt_value(r.truth->theta) << ',' << fmt_value(r.bayes.lambda) << ','
            << fmt_value(r.bayes.k) << ',' << fmt_value(r.bayes.theta) << ','
            << fmt_value(r.grid_init.lambda) << ',' << fmt_value(r.grid_init.k) << ','
            << fmt_value(r.grid_init.theta) << ','
            << fmt_value(r.rel_err_bayes->lambda) << ','
            << fmt_value(r.rel_err_bayes->k) << ','
            << fmt_value(r.rel_err_bayes->theta) << ','
            << fmt_value(r.rel_err_grid->lambda) << ','
            << fmt_value(r.rel_err_grid->k) << ','
            << fmt_value(r.rel_err_grid->theta) << ',' << fmt_value(r.sigma2) << ','
            << fmt_opt(r.noise_sigma) << ',' << fmt_opt(r.snr_noisy) << ','
            << fmt_value(r.snr_observed) << ',' << fmt_value(r.acceptance_rate) << ','
            << fmt_opt(r.cc) << ',' << fmt_opt(r.nse) << ','
            << fmt_value(r.runoff_coefficient) << "\n";
    }
    return out.str();
}

std::vector<std::string> csv_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

}  // namespace

std::vector<FitRecord> read_fits_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open fits table: " + path.string());
    std::string line;
    std::vector<FitRecord> records;
    bool header_seen = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;  // column order is fixed by the writer
            continue;
        }
        const auto f = csv_fields(line);
        if (f.size() != 22) {
            throw DataError(path.string() + ":" + std::to_string(line_no) +
                            ": malformed fits row");
        }
        try {
            FitRecord r;
            auto num = [&](std::size_t i) { return std::stod(f[i]); };
            auto opt = [&](std::size_t i) -> std::optional<double> {
                if (f[i].empty()) return std::nullopt;
                return std::stod(f[i]);
            };
            r.watershed = f[0];
            r.year = static_cast<int>(num(1));
            r.extension_days = static_cast<int>(num(2));
            r.bayes = {num(3), num(4), num(5)};
            if (!f[6].empty()) r.mle = IuhParams{num(6), num(7), num(8)};
            r.grid_init = {num(9), num(10), num(11)};
            r.sigma2 = num(12);
            r.acceptance_rate = num(13);
            r.cc = opt(14);
            r.nse = opt(15);
            r.snr_observed = num(16);
            r.runoff_coefficient = num(17);
            r.idr = num(18);
            r.iuh_type = f[19] == "advection" ? IuhType::Advection : IuhType::Diffusion;
            r.total_rain = num(20);
            r.total_runoff = num(21);
            records.push_back(std::move(r));
        } catch (const std::exception&) {
            throw DataError(path.string() + ":" + std::to_string(line_no) +
                            ": unparseable fits row");
        }
    }
    if (!header_seen) throw DataError(path.string() + ": no header row");
    return records;
}

// ---------------------------------------------------------------------------
// shared pipeline pieces
// ---------------------------------------------------------------------------

namespace {

std::string substitute_id(const std::string& pattern, const std::string& id) {
    std::string out = pattern;
    const std::string token = "{id}";
    for (std::size_t pos = out.find(token); pos != std::string::npos;
         pos = out.find(token, pos)) {
        out.replace(pos, token.size(), id);
        pos += id.size();
    }
    return out;
}

struct StationData {
    WatershedMeta meta;
    ExtractionResult extraction;
};

std::vector<WatershedMeta> select_stations(const RunConfig& cfg) {
    if (cfg.data.watersheds_csv.empty()) {
        throw ConfigError("this command requires data.watersheds in the config");
    }
    if (!fs::exists(cfg.data.watersheds_csv)) {
        throw ConfigError("watershed metadata file does not exist: " +
                          cfg.data.watersheds_csv.string());
    }
    auto all = parse_watershed_csv(cfg.data.watersheds_csv);
    if (cfg.data.stations.empty()) return all;
    std::vector<WatershedMeta> picked;
    for (const auto& want : cfg.data.stations) {
        const auto it = std::find_if(all.begin(), all.end(),
                                     [&](const auto& m) { return m.id == want; });
        if (it == all.end()) {
            throw ConfigError("station '" + want + "' not found in " +
                              cfg.data.watersheds_csv.string());
        }
        picked.push_back(*it);
    }
    return picked;
}

StationData load_station(const RunConfig& cfg, const WatershedMeta& meta) {
    if (cfg.data.year_from == 0 && cfg.data.year_to == 0) {
        throw ConfigError("data.years is required for file-driven commands");
    }
    const fs::path rain_path = substitute_id(cfg.data.rain_pattern, meta.id);
    const fs::path runoff_path = substitute_id(cfg.data.runoff_pattern, meta.id);
    for (const auto& p : {rain_path, runoff_path}) {
        if (!fs::exists(p)) throw ConfigError("gauge file does not exist: " + p.string());
    }
    auto rain = parse_gauge_csv(rain_path, GaugeVariable::Rainfall);
    auto runoff = parse_gauge_csv(runoff_path, cfg.data.runoff_variable);
    if (cfg.data.runoff_variable == GaugeVariable::Discharge) {
        runoff = discharge_to_depth(std::move(runoff), meta);
    }
    StationData data;
    data.meta = meta;
    data.extraction = extract_episodes(rain, runoff, meta, cfg.qc,
                                       cfg.data.year_from, cfg.data.year_to);
    return data;
}

std::string rejections_jsonl(const RunConfig& cfg, const std::vector<Rejection>& rejections) {
    std::ostringstream out;
    out << meta_json(cfg).dump() << "\n";
    for (const auto& r : rejections) {
        out << json{{"station", r.station}, {"year", r.year}, {"reason", r.reason}}.dump()
            << "\n";
    }
    return out.str();
}

std::string describe_rejections(const std::vector<Rejection>& rejections) {
    std::map<std::string, int> counts;
    for (const auto& r : rejections) counts[r.reason]++;
    std::ostringstream out;
    bool first = true;
    for (const auto& [reason, count] : counts) {
        if (!first) out << ", ";
        out << reason << " x" << count;
        first = false;
    }
    return out.str();
}

/// Fits every episode of every station on the worker pool; records come back
/// sorted by (station order, year).
std::vector<FitRecord> fit_stations(const RunConfig& cfg,
                                    const std::vector<StationData>& stations,
                                    bool with_mle) {
    struct Unit {
        const EpisodeData* episode;
    };
    std::vector<Unit> units;
    for (const auto& s : stations) {
        for (const auto& e : s.extraction.episodes) units.push_back({&e});
    }
    std::vector<FitRecord> records(units.size());
    parallel_for(units.size(), cfg.threads, [&](std::size_t i) {
        const EpisodeData& episode = *units[i].episode;
        ChainConfig chain = cfg.chain;
        chain.rng_seed = child_seed(cfg.seed, fnv1a64(episode.watershed.id),
                                    static_cast<std::uint64_t>(episode.year));
        const PosteriorSummary posterior = fit_episode(episode, cfg.box, chain);
        FitRecord rec = make_fit_record(episode, posterior, cfg.box, cfg.chain.horizon);
        if (with_mle) {
            rec.mle = mle_random_search(episode, cfg.box, cfg.mle_draws,
                                        child_seed(chain.rng_seed, 0x31eULL),
                                        cfg.chain.horizon);
        }
        records[i] = std::move(rec);
    });
    return records;
}

struct Band {
    double p25 = 0.0, p50 = 0.0, p75 = 0.0;
};

Band band_of(std::vector<double> v) {
    Band b;
    b.p25 = quantile(v, 0.25);
    b.p50 = quantile(v, 0.50);
    b.p75 = quantile(v, 0.75);
    return b;
}

json band_json(const Band& b) {
    return json{{"p25", b.p25}, {"p50", b.p50}, {"p75", b.p75}};
}

struct SweepBands {
    double snr = 0.0;
    Band grid[3];  // lambda, k, theta
    Band mcmc[3];
};

std::vector<SweepBands> summarize_sweep(const RunConfig& cfg,
                                        const std::vector<FitRecord>& records) {
    std::vector<SweepBands> out;
    for (double snr : cfg.snr_grid) {
        SweepBands bands;
        bands.snr = snr;
        std::vector<double> g[3], m[3];
        for (const auto& r : records) {
            if (!r.snr_target || *r.snr_target != snr) continue;
            g[0].push_back(r.rel_err_grid->lambda);
            g[1].push_back(r.rel_err_grid->k);
            g[2].push_back(r.rel_err_grid->theta);
            m[0].push_back(r.rel_err_bayes->lambda);
            m[1].push_back(r.rel_err_bayes->k);
            m[2].push_back(r.rel_err_bayes->theta);
        }
        for (int i = 0; i < 3; ++i) {
            bands.grid[i] = band_of(g[i]);
            bands.mcmc[i] = band_of(m[i]);
        }
        out.push_back(bands);
    }
    return out;
}

std::string fig1_svg(const RunConfig& cfg, const std::vector<SweepBands>& bands) {
    const char* names[3] = {"lambda", "k", "theta"};
    std::vector<double> snr;
    for (const auto& b : bands) snr.push_back(b.snr);

    std::ostringstream body;
    const double panel_w = 250, panel_h = 220, margin = 60, gap = 40, top = 40;
    for (int p = 0; p < 3; ++p) {
        double ymax = 0.0;
        for (const auto& b : bands) {
            ymax = std::max({ymax, b.grid[p].p75, b.mcmc[p].p75});
        }
        ymax = std::max(ymax * 1.15, 1e-3);
        SvgPanel panel(margin + p * (panel_w + gap), top, panel_w, panel_h,
                       snr.front(), snr.back(), 0.0, ymax, /*log_x=*/true);
        std::vector<double> g25, g50, g75, m25, m50, m75;
        for (const auto& b : bands) {
            g25.push_back(b.grid[p].p25);
            g50.push_back(b.grid[p].p50);
            g75.push_back(b.grid[p].p75);
            m25.push_back(b.mcmc[p].p25);
            m50.push_back(b.mcmc[p].p50);
            m75.push_back(b.mcmc[p].p75);
        }
        std::vector<double> yticks;
        for (int i = 0; i <= 4; ++i) yticks.push_back(ymax * i / 4.0);
        panel.axes(body, "SNR", p == 0 ? "relative error (fraction of range)" : "",
                   snr, yticks, names[p]);
        panel.band(body, snr, g25, g75, "#1f77b4", 0.25);
        panel.band(body, snr, m25, m75, "#d62728", 0.25);
        panel.line(body, snr, g50, "#1f77b4", true);
        panel.line(body, snr, m50, "#d62728", true);
        if (p == 0) {
            panel.text(body, snr.front() * 1.2, ymax * 0.95, "grid init", "#1f77b4");
            panel.text(body, snr.front() * 1.2, ymax * 0.88, "MCMC", "#d62728");
        }
    }
    return svg_document(margin * 2 + 3 * panel_w + 2 * gap, top + panel_h + 60,
                        body.str(), stamp(cfg));
}

std::string ecdf_csv_text(const RunConfig& cfg,
                          const std::vector<std::pair<std::string, std::vector<double>>>& series) {
    std::ostringstream out;
    out << "# " << stamp(cfg) << "\n";
    out << "series,value,cum_prob\n";
    for (const auto& [name, values] : series) {
        if (values.empty()) continue;
        for (const auto& [v, p] : ecdf(values)) {
            out << name << ',' << fmt_value(v) << ',' << fmt_value(p) << "\n";
        }
    }
    return out.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// commands
// ---------------------------------------------------------------------------

void cmd_synth_sweep(const RunConfig& cfg) {
    SweepSpec spec;
    spec.box = cfg.box;
    spec.snr_grid = cfg.snr_grid;
    spec.reps = cfg.reps;
    spec.n_days = cfg.n_days;
    spec.truth_margin = cfg.truth_margin;
    spec.occurrence = cfg.occurrence;
    spec.pool = cfg.pool;
    spec.chain = cfg.chain;
    spec.master_seed = cfg.seed;
    spec.threads = cfg.threads;

    const auto records = snr_sweep(spec);
    write_text(cfg.out_dir / "sweep.csv", sweep_csv_text(cfg, records));

    const auto bands = summarize_sweep(cfg, records);
    json per_snr = json::array();
    const char* names[3] = {"lambda", "k", "theta"};
    for (const auto& b : bands) {
        json grid, mcmc;
        for (int i = 0; i < 3; ++i) {
            grid[names[i]] = band_json(b.grid[i]);
            mcmc[names[i]] = band_json(b.mcmc[i]);
        }
        per_snr.push_back(json{{"snr", b.snr}, {"grid", grid}, {"mcmc", mcmc}});
    }
    json summary = meta_json(cfg);
    summary["reps"] = cfg.reps;
    summary["n_days"] = cfg.n_days;
    summary["truth_margin"] = {{"k", cfg.truth_margin * cfg.box.width_k()},
                               {"theta", cfg.truth_margin * cfg.box.width_theta()}};
    summary["per_snr"] = per_snr;
    write_text(cfg.out_dir / "sweep_summary.json", summary.dump(2) + "\n");
    write_text(cfg.out_dir / "fig1.svg", fig1_svg(cfg, bands));
}

void cmd_fit(const RunConfig& cfg) {
    const auto stations = select_stations(cfg);
    std::vector<StationData> loaded;
    std::vector<Rejection> rejections;
    for (const auto& meta : stations) {
        loaded.push_back(load_station(cfg, meta));
        const auto& r = loaded.back().extraction.rejections;
        rejections.insert(rejections.end(), r.begin(), r.end());
    }
    write_text(cfg.out_dir / "rejections.jsonl", rejections_jsonl(cfg, rejections));

    std::size_t total_episodes = 0;
    for (const auto& s : loaded) total_episodes += s.extraction.episodes.size();
    if (total_episodes == 0) {
        throw DataError("no episodes survive quality control (" +
                        describe_rejections(rejections) + "); see rejections.jsonl");
    }

    auto records = fit_stations(cfg, loaded, /*with_mle=*/true);
    std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
        return std::tie(a.watershed, a.year) < std::tie(b.watershed, b.year);
    });
    write_text(cfg.out_dir / "fits.csv", fits_csv_text(cfg, records));

    // Skill ECDFs for the Bayesian-mean and MLE models, plus the per-parameter
    // estimate scatter.
    std::vector<double> cc_bayes, nse_bayes, cc_mle, nse_mle;
    std::vector<double> scatter[3][2];  // [param][bayes|mle]
    std::ostringstream scatter_csv;
    scatter_csv << "# " << stamp(cfg) << "\n";
    scatter_csv << "station,year,param,bayes,mle\n";
    const char* names[3] = {"lambda", "k", "theta"};
    for (const auto& rec : records) {
        if (!rec.mle) continue;
        const EpisodeData* episode = nullptr;
        for (const auto& s : loaded) {
            for (const auto& e : s.extraction.episodes) {
                if (e.watershed.id == rec.watershed && e.year == rec.year) episode = &e;
            }
        }
        if (!episode) continue;
        const DailySeries sim_mle =
            convolve(episode->rain, gamma_kernel(*rec.mle, cfg.chain.horizon));
        if (auto v = cc(episode->runoff.values, sim_mle.values)) cc_mle.push_back(*v);
        if (auto v = nse(episode->runoff.values, sim_mle.values)) nse_mle.push_back(*v);
        if (rec.cc) cc_bayes.push_back(*rec.cc);
        if (rec.nse) nse_bayes.push_back(*rec.nse);
        const double b[3] = {rec.bayes.lambda, rec.bayes.k, rec.bayes.theta};
        const double m[3] = {rec.mle->lambda, rec.mle->k, rec.mle->theta};
        for (int p = 0; p < 3; ++p) {
            scatter[p][0].push_back(b[p]);
            scatter[p][1].push_back(m[p]);
            scatter_csv << rec.watershed << ',' << rec.year << ',' << names[p] << ','
                        << fmt_value(b[p]) << ',' << fmt_value(m[p]) << "\n";
        }
    }
    write_text(cfg.out_dir / "ecdf_cc.csv",
               ecdf_csv_text(cfg, {{"bayes", cc_bayes}, {"mle", cc_mle}}));
    write_text(cfg.out_dir / "ecdf_nse.csv",
               ecdf_csv_text(cfg, {{"bayes", nse_bayes}, {"mle", nse_mle}}));

    std::optional<double> r2_vals[3];
    for (int p = 0; p < 3; ++p) {
        if (scatter[p][0].size() >= 2) {
            r2_vals[p] = r2_identity(scatter[p][0], scatter[p][1]);
        }
    }
    std::ostringstream scatter_meta;
    scatter_meta << "# r2_identity lambda=" << fmt_opt(r2_vals[0])
                 << " k=" << fmt_opt(r2_vals[1]) << " theta=" << fmt_opt(r2_vals[2])
                 << "\n";
    write_text(cfg.out_dir / "scatter_mle_bayes.csv",
               scatter_csv.str() + scatter_meta.str());

    double reference_snr = std::numeric_limits<double>::infinity();
    for (const auto& r : records) reference_snr = std::min(reference_snr, r.snr_observed);

    json r2;
    for (int p = 0; p < 3; ++p) r2[names[p]] = r2_vals[p] ? json(*r2_vals[p]) : json(nullptr);
    json summary = meta_json(cfg);
    summary["n_episodes"] = total_episodes;
    summary["n_rejections"] = rejections.size();
    summary["reference_snr"] = std::isinf(reference_snr) ? json(nullptr) : json(reference_snr);
    summary["r2_identity_bayes_vs_mle"] = r2;
    if (!cc_bayes.empty()) summary["median_cc_bayes"] = quantile(cc_bayes, 0.5);
    if (!nse_bayes.empty()) summary["median_nse_bayes"] = quantile(nse_bayes, 0.5);
    write_text(cfg.out_dir / "fit_summary.json", summary.dump(2) + "\n");
}

void cmd_track(const RunConfig& cfg) {
    std::vector<FitRecord> records;
    if (cfg.fits_csv) {
        if (!fs::exists(*cfg.fits_csv)) {
            throw ConfigError("track.fits_csv does not exist: " + cfg.fits_csv->string());
        }
        records = read_fits_csv(*cfg.fits_csv);
    } else {
        const auto stations = select_stations(cfg);
        std::vector<StationData> loaded;
        std::vector<Rejection> rejections;
        for (const auto& meta : stations) {
            loaded.push_back(load_station(cfg, meta));
            const auto& r = loaded.back().extraction.rejections;
            rejections.insert(rejections.end(), r.begin(), r.end());
        }
        write_text(cfg.out_dir / "rejections.jsonl", rejections_jsonl(cfg, rejections));
        std::size_t total = 0;
        for (const auto& s : loaded) total += s.extraction.episodes.size();
        if (total == 0) {
            throw DataError("no episodes survive quality control (" +
                            describe_rejections(rejections) + "); see rejections.jsonl");
        }
        records = fit_stations(cfg, loaded, /*with_mle=*/false);
        write_text(cfg.out_dir / "fits.csv", fits_csv_text(cfg, records));
    }

    std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
        return std::tie(a.watershed, a.year) < std::tie(b.watershed, b.year);
    });

    std::ostringstream track_csv;
    track_csv << "# " << stamp(cfg) << "\n";
    track_csv << "station,year,lambda,k,theta,idr,iuh_type,total_rain,total_runoff\n";
    std::vector<double> k_series;
    std::vector<int> years;
    for (const auto& r : records) {
        track_csv << r.watershed << ',' << r.year << ',' << fmt_value(r.bayes.lambda)
                  << ',' << fmt_value(r.bayes.k) << ',' << fmt_value(r.bayes.theta)
                  << ',' << fmt_value(r.idr) << ',' << to_string(r.iuh_type) << ','
                  << fmt_value(r.total_rain) << ',' << fmt_value(r.total_runoff) << "\n";
        k_series.push_back(r.bayes.k);
        years.push_back(r.year);
    }
    write_text(cfg.out_dir / "track.csv", track_csv.str());

    std::set<std::string> distinct_stations;
    for (const auto& r : records) distinct_stations.insert(r.watershed);

    json summary = meta_json(cfg);
    summary["n_episodes"] = records.size();
    summary["scan_note"] =
        "normalized segment-mean shift of k; a surfacing aid, not a significance test";
    if (static_cast<int>(records.size()) < cfg.min_track_episodes) {
        summary["scan_skipped"] = true;
        summary["warning"] = "fewer than " + std::to_string(cfg.min_track_episodes) +
                             " episodes; change-point scan skipped";
        std::fprintf(stderr, "track: %s\n",
                     summary["warning"].get<std::string>().c_str());
    } else if (distinct_stations.size() > 1) {
        summary["scan_skipped"] = true;
        summary["warning"] = "change-point scan needs a single station; got " +
                             std::to_string(distinct_stations.size());
        std::fprintf(stderr, "track: %s\n",
                     summary["warning"].get<std::string>().c_str());
    } else {
        summary["scan_skipped"] = false;
        const auto scan = change_point_scan(k_series);
        json splits = json::array();
        for (std::size_t s = 2; s + 2 <= k_series.size(); ++s) {
            splits.push_back(json{{"year", years[s]},
                                  {"statistic", scan.statistics[s - 2]}});
        }
        summary["splits"] = splits;
        summary["split_year"] = years[scan.split];
        summary["split_statistic"] = scan.statistic;
    }
    write_text(cfg.out_dir / "track_summary.json", summary.dump(2) + "\n");
}

void cmd_survey(const RunConfig& cfg) {
    const auto stations = select_stations(cfg);
    std::vector<StationData> loaded;
    std::vector<Rejection> rejections;
    for (const auto& meta : stations) {
        loaded.push_back(load_station(cfg, meta));
        const auto& r = loaded.back().extraction.rejections;
        rejections.insert(rejections.end(), r.begin(), r.end());
    }
    write_text(cfg.out_dir / "rejections.jsonl", rejections_jsonl(cfg, rejections));

    const auto records = fit_stations(cfg, loaded, /*with_mle=*/false);

    struct Row {
        WatershedMeta meta;
        std::size_t n_total = 0;
        std::size_t n_qualifying = 0;
        double median_idr = 0.0;
        bool kept = false;
    };
    std::vector<Row> rows;
    std::vector<double> x_length, y_idr;
    for (const auto& s : loaded) {
        Row row;
        row.meta = s.meta;
        std::vector<double> idrs;
        for (const auto& r : records) {
            if (r.watershed != s.meta.id) continue;
            ++row.n_total;
            if (r.nse && *r.nse > cfg.nse_threshold) {
                ++row.n_qualifying;
                idrs.push_back(r.idr);
            }
        }
        if (static_cast<int>(row.n_qualifying) > cfg.min_survey_episodes) {
            row.kept = true;
            row.median_idr = quantile(idrs, 0.5);
            x_length.push_back(std::sqrt(s.meta.drainage_area_km2));
            y_idr.push_back(row.median_idr);
        }
        rows.push_back(std::move(row));
    }

    std::ostringstream survey_csv;
    survey_csv << "# " << stamp(cfg) << "\n";
    survey_csv << "station,name,lat,lon,area_km2,length_scale_km,n_episodes,"
                  "n_qualifying,median_idr,kept\n";
    for (const auto& r : rows) {
        survey_csv << r.meta.id << ',' << r.meta.name << ',' << fmt_value(r.meta.latitude)
                   << ',' << fmt_value(r.meta.longitude) << ','
                   << fmt_value(r.meta.drainage_area_km2) << ','
                   << fmt_value(std::sqrt(r.meta.drainage_area_km2)) << ','
                   << r.n_total << ',' << r.n_qualifying << ','
                   << (r.kept ? fmt_value(r.median_idr) : "") << ','
                   << (r.kept ? "true" : "false") << "\n";
    }
    write_text(cfg.out_dir / "survey.csv", survey_csv.str());

    if (x_length.empty()) {
        throw DataError("zero qualifying watersheds (need > " +
                        std::to_string(cfg.min_survey_episodes) +
                        " episodes with NSE > " + fmt_value(cfg.nse_threshold) + ")");
    }
    if (x_length.size() < 3) {
        throw DataError("only " + std::to_string(x_length.size()) +
                        " qualifying watershed(s); regression needs at least 3");
    }
    const RegressionResult reg = regress_f_test(x_length, y_idr);

    json summary = meta_json(cfg);
    summary["n_watersheds_total"] = rows.size();
    summary["n_watersheds_kept"] = x_length.size();
    summary["nse_threshold"] = cfg.nse_threshold;
    summary["min_episodes"] = cfg.min_survey_episodes;
    summary["slope"] = reg.slope;
    summary["intercept"] = reg.intercept;
    summary["f_statistic"] = reg.f_statistic;
    summary["p_one_tailed"] = reg.p_one_tailed;
    write_text(cfg.out_dir / "survey_summary.json", summary.dump(2) + "\n");

    // fig7: location panel (circle size ~ length scale) + regression panel.
    std::ostringstream body;
    {
        double lat_min = 1e9, lat_max = -1e9, lon_min = 1e9, lon_max = -1e9;
        std::vector<double> lons, lats, radii;
        std::vector<bool> advective;
        for (const auto& r : rows) {
            if (!r.kept) continue;
            lat_min = std::min(lat_min, r.meta.latitude);
            lat_max = std::max(lat_max, r.meta.latitude);
            lon_min = std::min(lon_min, r.meta.longitude);
            lon_max = std::max(lon_max, r.meta.longitude);
            lons.push_back(r.meta.longitude);
            lats.push_back(r.meta.latitude);
            radii.push_back(2.0 + 0.15 * std::sqrt(r.meta.drainage_area_km2));
            advective.push_back(r.median_idr > 0.0);
        }
        const double pad_lat = std::max(0.1, (lat_max - lat_min) * 0.1);
        const double pad_lon = std::max(0.1, (lon_max - lon_min) * 0.1);
        SvgPanel map(60, 40, 300, 260, lon_min - pad_lon, lon_max + pad_lon,
                     lat_min - pad_lat, lat_max + pad_lat);
        const std::vector<double> lon_ticks{lon_min, lon_max};
        const std::vector<double> lat_ticks{lat_min, lat_max};
        map.axes(body, "longitude", "latitude", lon_ticks, lat_ticks,
                 "median IDR by location");
        for (std::size_t i = 0; i < lons.size(); ++i) {
            const std::vector<double> one_x{lons[i]}, one_y{lats[i]}, one_r{radii[i]};
            map.scatter_sized(body, one_x, one_y, one_r,
                              advective[i] ? "#d62728" : "#1f77b4");
        }
    }
    {
        const auto [xmin_it, xmax_it] = std::minmax_element(x_length.begin(), x_length.end());
        const auto [ymin_it, ymax_it] = std::minmax_element(y_idr.begin(), y_idr.end());
        const double xpad = std::max(1.0, (*xmax_it - *xmin_it) * 0.1);
        const double ypad = std::max(1.0, (*ymax_it - *ymin_it) * 0.1);
        SvgPanel panel(460, 40, 300, 260, *xmin_it - xpad, *xmax_it + xpad,
                       *ymin_it - ypad, *ymax_it + ypad);
        const std::vector<double> x_ticks{*xmin_it, *xmax_it};
        const std::vector<double> y_ticks{*ymin_it, 0.0, *ymax_it};
        panel.axes(body, "watershed length scale sqrt(area) [km]", "median IDR [1/day]",
                   x_ticks, y_ticks, "IDR vs watershed size");
        panel.scatter(body, x_length, y_idr, "#333");
        const std::vector<double> fit_x{*xmin_it, *xmax_it};
        const std::vector<double> fit_y{reg.intercept + reg.slope * fit_x[0],
                                        reg.intercept + reg.slope * fit_x[1]};
        panel.line(body, fit_x, fit_y, "#111");
        char label[96];
        std::snprintf(label, sizeof label, "slope=%.3g, one-tailed p=%.3g", reg.slope,
                      reg.p_one_tailed);
        panel.text(body, *xmin_it, *ymax_it + ypad * 0.5, label);
    }
    write_text(cfg.out_dir / "fig7.svg", svg_document(820, 360, body.str(), stamp(cfg)));
}

}  // namespace iuh
