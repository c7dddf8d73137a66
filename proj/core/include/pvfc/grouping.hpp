#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pvfc/date.hpp"
#include "pvfc/metrics.hpp"
#include "pvfc/plant.hpp"

namespace pvfc {

/// Meteorological seasons.
enum class Season { djf, mam, jja, son };

std::string_view to_string(Season s);
Season season_of(Date d);

/// One evaluated plant-day.
struct EvalRecord {
    Date date{};
    Region region = Region::south;
    int lead = 0;
    double prediction = 0.0;
    double target = 0.0;
    double y_floor = 0.0;  ///< exclusion floor of the record's plant
};

/// Which dimensions partition the records.
struct Grouping {
    bool by_season = false;
    bool by_region = false;
    bool by_lead = false;
};

/// Unset dimensions are not part of the partition.
struct GroupKey {
    std::optional<Season> season;
    std::optional<Region> region;
    std::optional<int> lead;

    auto operator<=>(const GroupKey&) const = default;
    /// "region=North;lead=3" style label; "all" when no dimension is set.
    std::string label() const;
};

struct GroupMetrics {
    MetricSet metrics;
    std::size_t records = 0;  ///< records in the group before the floor is applied
    bool low_confidence = false;  ///< fewer than min_n retained samples
    bool defined = true;  ///< false when every record fell below its floor
};

GroupKey group_key(const EvalRecord& record, const Grouping& by);

/// Partitions the records and computes a MetricSet per group. Groups whose
/// records are all excluded are reported with defined = false.
std::map<GroupKey, GroupMetrics> grouped_metrics(std::span<const EvalRecord> records, const Grouping& by,
                                                 std::size_t min_n = 20);

} // namespace pvfc
