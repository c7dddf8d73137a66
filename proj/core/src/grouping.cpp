#include "pvfc/grouping.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "pvfc/errors.hpp"

namespace pvfc {

std::string_view to_string(Season s) {
    switch (s) {
    case Season::djf:
        return "DJF";
    case Season::mam:
        return "MAM";
    case Season::jja:
        return "JJA";
    case Season::son:
        return "SON";
    }
    return "?";
}

Season season_of(Date d) {
    const int m = month_of(d);
    if (m == 12 || m <= 2) {
        return Season::djf;
    }
    if (m <= 5) {
        return Season::mam;
    }
    if (m <= 8) {
        return Season::jja;
    }
    return Season::son;
}

std::string GroupKey::label() const {
    std::string out;
    auto add = [&out](const std::string& part) {
        if (!out.empty()) {
            out += ';';
        }
        out += part;
    };
    if (season) {
        add(fmt::format("season={}", to_string(*season)));
    }
    if (region) {
        const std::string_view name = to_string(*region);
        add(fmt::format("region={}", name));
    }
    if (lead) {
        add(fmt::format("lead={}", *lead));
    }
    return out.empty() ? "all" : out;
}

GroupKey group_key(const EvalRecord& record, const Grouping& by) {
    GroupKey key;
    if (by.by_season) {
        key.season = season_of(record.date);
    }
    if (by.by_region) {
        key.region = record.region;
    }
    if (by.by_lead) {
        key.lead = record.lead;
    }
    return key;
}

std::map<GroupKey, GroupMetrics> grouped_metrics(std::span<const EvalRecord> records, const Grouping& by,
                                                 std::size_t min_n) {
    struct Columns {
        std::vector<double> pred;
        std::vector<double> truth;
        std::vector<double> floors;
    };
    std::map<GroupKey, Columns> parts;
    for (const EvalRecord& r : records) {
        Columns& c = parts[group_key(r, by)];
        c.pred.push_back(r.prediction);
        c.truth.push_back(r.target);
        c.floors.push_back(r.y_floor);
    }
    std::map<GroupKey, GroupMetrics> out;
    for (const auto& [key, c] : parts) {
        GroupMetrics g;
        g.records = c.pred.size();
        try {
            g.metrics = compute_metrics(c.pred, c.truth, c.floors);
        } catch (const ExcludedAll&) {
            g.defined = false;
            g.metrics.mdape = std::numeric_limits<double>::quiet_NaN();
            g.metrics.iqr = std::numeric_limits<double>::quiet_NaN();
            g.metrics.pearson_r = std::numeric_limits<double>::quiet_NaN();
        }
        g.low_confidence = g.metrics.n_samples < min_n;
        out.emplace(key, g);
    }
    return out;
}

} // namespace pvfc
