#include "pvfc/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "pvfc/errors.hpp"
#include "pvfc/random.hpp"

namespace pvfc {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
    text = trim(text);
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ValidationError(fmt::format("{}: cannot parse '{}' as a number", what, text));
    }
    return value;
}

std::vector<double> parse_list(std::string_view text, std::string_view what) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const auto part = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        out.push_back(parse_number<double>(part, what));
        if (comma == std::string_view::npos) {
            break;
        }
        pos = comma + 1;
    }
    return out;
}

std::string format_list(const std::vector<double>& v) {
    return fmt::format("{}", fmt::join(v, ","));
}

using Setter = std::function<void(ExperimentConfig&, std::string_view)>;
using Getter = std::function<std::string(const ExperimentConfig&)>;

struct Key {
    const char* name;
    Setter set;
    Getter get;
};

template <typename T>
Key number_key(const char* name, T ExperimentConfig::*member) {
    return Key{name, [member, name](ExperimentConfig& c, std::string_view v) { c.*member = parse_number<T>(v, name); },
               [member](const ExperimentConfig& c) { return fmt::format("{}", c.*member); }};
}

template <typename S, typename T>
Key nested_key(const char* name, S ExperimentConfig::*outer, T S::*member) {
    return Key{name,
               [outer, member, name](ExperimentConfig& c, std::string_view v) {
                   (c.*outer).*member = parse_number<T>(v, name);
               },
               [outer, member](const ExperimentConfig& c) { return fmt::format("{}", (c.*outer).*member); }};
}

Key grid_key(const char* name, double GridSpec::*member) {
    return Key{name,
               [member, name](ExperimentConfig& c, std::string_view v) { c.weather.grid.*member = parse_number<double>(v, name); },
               [member](const ExperimentConfig& c) { return fmt::format("{}", c.weather.grid.*member); }};
}

Key grid_count_key(const char* name, std::size_t GridSpec::*member) {
    return Key{name,
               [member, name](ExperimentConfig& c, std::string_view v) {
                   c.weather.grid.*member = parse_number<std::size_t>(v, name);
               },
               [member](const ExperimentConfig& c) { return fmt::format("{}", c.weather.grid.*member); }};
}

Key search_key(const char* name, std::vector<double> SearchGrid::*member) {
    return Key{name,
               [member, name](ExperimentConfig& c, std::string_view v) { c.grid.*member = parse_list(v, name); },
               [member](const ExperimentConfig& c) { return format_list(c.grid.*member); }};
}

const std::vector<Key>& keys() {
    using W = WeatherGenConfig;
    using F = ForecastDegradationConfig;
    static const std::vector<Key> table = {
        Key{"seed", [](ExperimentConfig& c, std::string_view v) { c.apply_seed(parse_number<std::uint64_t>(v, "seed")); },
            [](const ExperimentConfig& c) { return fmt::format("{}", c.seed); }},
        grid_key("weather.lat_min", &GridSpec::lat_min),
        grid_key("weather.lat_max", &GridSpec::lat_max),
        grid_key("weather.lon_min", &GridSpec::lon_min),
        grid_key("weather.lon_max", &GridSpec::lon_max),
        grid_count_key("weather.n_lat", &GridSpec::n_lat),
        grid_count_key("weather.n_lon", &GridSpec::n_lon),
        Key{"weather.start", [](ExperimentConfig& c, std::string_view v) { c.weather.start = parse_date(trim(v)); },
            [](const ExperimentConfig& c) { return format_date(c.weather.start); }},
        Key{"weather.end", [](ExperimentConfig& c, std::string_view v) { c.weather.end = parse_date(trim(v)); },
            [](const ExperimentConfig& c) { return format_date(c.weather.end); }},
        nested_key("weather.correlation_length_deg", &ExperimentConfig::weather, &W::correlation_length_deg),
        nested_key("weather.persistence", &ExperimentConfig::weather, &W::persistence),
        nested_key("weather.k_min", &ExperimentConfig::weather, &W::k_min),
        nested_key("weather.k_max", &ExperimentConfig::weather, &W::k_max),
        nested_key("weather.k_mean_south", &ExperimentConfig::weather, &W::k_mean_south),
        nested_key("weather.k_mean_north", &ExperimentConfig::weather, &W::k_mean_north),
        nested_key("weather.k_seasonal_amplitude", &ExperimentConfig::weather, &W::k_seasonal_amplitude),
        nested_key("weather.k_std", &ExperimentConfig::weather, &W::k_std),
        nested_key("weather.north_variability_gain", &ExperimentConfig::weather, &W::north_variability_gain),
        nested_key("weather.t_mean_south", &ExperimentConfig::weather, &W::t_mean_south),
        nested_key("weather.t_lapse_per_deg", &ExperimentConfig::weather, &W::t_lapse_per_deg),
        nested_key("weather.t_amplitude", &ExperimentConfig::weather, &W::t_amplitude),
        nested_key("weather.t_warmest_day", &ExperimentConfig::weather, &W::t_warmest_day),
        nested_key("weather.t_noise_std", &ExperimentConfig::weather, &W::t_noise_std),
        nested_key("weather.t_persistence", &ExperimentConfig::weather, &W::t_persistence),
        nested_key("weather.t_cloud_coupling", &ExperimentConfig::weather, &W::t_cloud_coupling),
        nested_key("forecast.correlation_decay", &ExperimentConfig::forecast, &F::correlation_decay),
        nested_key("forecast.iqr_growth", &ExperimentConfig::forecast, &F::iqr_growth),
        nested_key("forecast.base_spread", &ExperimentConfig::forecast, &F::base_spread),
        nested_key("forecast.max_lead", &ExperimentConfig::forecast, &F::max_lead),
        nested_key("forecast.noise_length_deg", &ExperimentConfig::forecast, &F::noise_length_deg),
        nested_key("forecast.t2m_noise_scale", &ExperimentConfig::forecast, &F::t2m_noise_scale),
        nested_key("production.ssr_ref", &ExperimentConfig::production, &ProductionModel::ssr_ref),
        number_key("fleet.max_plants", &ExperimentConfig::max_plants),
        search_key("search.c", &SearchGrid::c),
        search_key("search.epsilon", &SearchGrid::epsilon),
        search_key("search.gamma", &SearchGrid::gamma),
        nested_key("cv.k", &ExperimentConfig::cv, &CvConfig::k),
        number_key("solver.tol", &ExperimentConfig::tol),
        number_key("solver.max_iter", &ExperimentConfig::max_iter),
        Key{"experiment.leads", [](ExperimentConfig& c, std::string_view v) { c.leads = parse_leads(v); },
            [](const ExperimentConfig& c) { return format_leads(c.leads); }},
        number_key("evaluation.floor_fraction", &ExperimentConfig::floor_fraction),
        number_key("experiment.threads", &ExperimentConfig::threads),
    };
    return table;
}

} // namespace

void ExperimentConfig::apply_seed(std::uint64_t global_seed) {
    seed = global_seed;
    weather.seed = derive_seed(global_seed, "weather");
    forecast.seed = derive_seed(global_seed, "forecast");
    fleet_seed = derive_seed(global_seed, "fleet");
    cv.seed = derive_seed(global_seed, "cv");
}

SolverOptions ExperimentConfig::solver() const {
    SolverOptions o;
    o.tol = tol;
    o.max_iter = max_iter;
    return o;
}

std::uint64_t ExperimentConfig::production_seed(std::string_view plant_id) const {
    return derive_seed(derive_seed(seed, "production"), plant_id);
}

void ExperimentConfig::validate() const {
    weather.validate();
    forecast.validate();
    grid.validate();
    if (!(production.ssr_ref > 0.0)) {
        throw ValidationError("production.ssr_ref must be positive");
    }
    if (cv.k < 2) {
        throw ValidationError("cv.k must be at least 2");
    }
    if (!(tol > 0.0) || max_iter == 0) {
        throw ValidationError("solver.tol must be positive and solver.max_iter non-zero");
    }
    if (leads.empty()) {
        throw ValidationError("at least one lead time is required");
    }
    for (int lead : leads) {
        if (lead < 1 || lead > 10 || lead > forecast.max_lead) {
            throw ValidationError(fmt::format("lead {} outside 1..{}", lead, std::min(10, forecast.max_lead)));
        }
    }
    if (!(floor_fraction >= 0.0 && floor_fraction < 1.0)) {
        throw ValidationError("evaluation.floor_fraction must lie in [0, 1)");
    }
}

std::vector<int> parse_leads(std::string_view text) {
    std::vector<int> out;
    text = trim(text);
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const auto part =
            trim(text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        const auto dots = part.find("..");
        if (dots == std::string_view::npos) {
            out.push_back(parse_number<int>(part, "leads"));
        } else {
            const int a = parse_number<int>(part.substr(0, dots), "leads");
            const int b = parse_number<int>(part.substr(dots + 2), "leads");
            if (a > b) {
                throw ValidationError(fmt::format("leads: empty range '{}'", part));
            }
            for (int l = a; l <= b; ++l) {
                out.push_back(l);
            }
        }
        if (comma == std::string_view::npos) {
            break;
        }
        pos = comma + 1;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    for (int lead : out) {
        if (lead < 1 || lead > 10) {
            throw ValidationError(fmt::format("lead {} outside 1..10", lead));
        }
    }
    return out;
}

std::string format_leads(const std::vector<int>& leads) {
    return fmt::format("{}", fmt::join(leads, ","));
}

ExperimentConfig parse_config(std::string_view text, ExperimentConfig base, const std::string& source_name) {
    std::map<std::string_view, const Key*> index;
    for (const Key& k : keys()) {
        index.emplace(k.name, &k);
    }
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError(source_name, line_no, "expected 'key = value'");
        }
        const auto key = trim(line.substr(0, eq));
        const auto it = index.find(key);
        if (it == index.end()) {
            throw ParseError(source_name, line_no, fmt::format("unknown key '{}'", key));
        }
        try {
            it->second->set(base, trim(line.substr(eq + 1)));
        } catch (const ValidationError& e) {
            throw ParseError(source_name, line_no, e.what());
        }
    }
    return base;
}

ExperimentConfig load_config(const std::string& spec) {
    if (spec == "default") {
        return ExperimentConfig{};
    }
    const std::filesystem::path path(spec);
    std::ifstream in(path);
    if (!in) {
        throw MissingInput(path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), ExperimentConfig{}, path.string());
}

std::string render_config(const ExperimentConfig& cfg) {
    std::string out;
    for (const Key& k : keys()) {
        out += fmt::format("{} = {}\n", k.name, k.get(cfg));
    }
    return out;
}

} // namespace pvfc
