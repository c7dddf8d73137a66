#include "pvfc/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "pvfc/report.hpp"

namespace pvfc::cli {

namespace {

constexpr double kPanelW = 460.0;
constexpr double kPanelH = 340.0;
constexpr double kMarginL = 64.0;
constexpr double kMarginR = 16.0;
constexpr double kMarginT = 34.0;
constexpr double kMarginB = 48.0;
constexpr double kTitleH = 30.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

std::string coord(double v) {
    return fmt::format("{:.2f}", v);
}

// Roughly five round tick values covering [lo, hi].
std::vector<double> ticks(double lo, double hi) {
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        step = m * mag;
        if (step >= raw) {
            break;
        }
    }
    std::vector<double> out;
    for (double t = std::ceil(lo / step - 1e-9) * step; t <= hi + 1e-9 * step; t += step) {
        out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    void finish() {
        if (!std::isfinite(lo)) {
            lo = 0.0;
            hi = 1.0;
        }
        if (hi - lo < 1e-12) {
            const double pad = std::max(std::abs(lo) * 0.05, 0.5);
            lo -= pad;
            hi += pad;
        }
    }
};

void draw_panel(std::string& svg, const Panel& p, double ox, double oy) {
    Range xr;
    Range yr;
    for (const Series& s : p.series) {
        for (double v : s.x) {
            xr.add(v);
        }
        for (double v : s.y) {
            yr.add(v);
        }
        for (double v : s.lo) {
            yr.add(v);
        }
        for (double v : s.hi) {
            yr.add(v);
        }
    }
    xr.finish();
    yr.finish();
    const double pad = 0.05 * (yr.hi - yr.lo);
    yr.lo -= pad;
    yr.hi += pad;

    const double x0 = ox + kMarginL;
    const double x1 = ox + kPanelW - kMarginR;
    const double y0 = oy + kPanelH - kMarginB;
    const double y1 = oy + kMarginT;
    auto sx = [&](double v) { return x0 + (v - xr.lo) / (xr.hi - xr.lo) * (x1 - x0); };
    auto sy = [&](double v) { return y0 - (v - yr.lo) / (yr.hi - yr.lo) * (y0 - y1); };

    svg += fmt::format("<g class=\"panel\">\n<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
                       coord((x0 + x1) / 2), coord(oy + 20), escape(p.title));
    svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333\"/>\n",
                       coord(x0), coord(y1), coord(x1 - x0), coord(y0 - y1));
    for (double t : ticks(xr.lo, xr.hi)) {
        svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#333\"/>"
                           "<text x=\"{0}\" y=\"{3}\" text-anchor=\"middle\" font-size=\"11\">{4:.4g}</text>\n",
                           coord(sx(t)), coord(y0), coord(y0 + 5), coord(y0 + 18), t);
    }
    for (double t : ticks(yr.lo, yr.hi)) {
        svg += fmt::format("<line x1=\"{0}\" y1=\"{2}\" x2=\"{1}\" y2=\"{2}\" stroke=\"#ddd\"/>"
                           "<text x=\"{3}\" y=\"{4}\" text-anchor=\"end\" font-size=\"11\">{5:.4g}</text>\n",
                           coord(x0), coord(x1), coord(sy(t)), coord(x0 - 6), coord(sy(t) + 4), t);
    }
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\">{}</text>\n",
                       coord((x0 + x1) / 2), coord(y0 + 38), escape(p.x_label));
    svg += fmt::format("<text transform=\"translate({},{}) rotate(-90)\" text-anchor=\"middle\" font-size=\"12\">{}</text>\n",
                       coord(ox + 16), coord((y0 + y1) / 2), escape(p.y_label));

    for (std::size_t k = 0; k < p.series.size(); ++k) {
        const Series& s = p.series[k];
        const char* color = kPalette[k % std::size(kPalette)];
        if (!s.lo.empty() && s.lo.size() == s.x.size() && s.hi.size() == s.x.size()) {
            std::string pts;
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                pts += fmt::format("{},{} ", coord(sx(s.x[i])), coord(sy(s.hi[i])));
            }
            for (std::size_t i = s.x.size(); i-- > 0;) {
                pts += fmt::format("{},{} ", coord(sx(s.x[i])), coord(sy(s.lo[i])));
            }
            pts.pop_back();
            svg += fmt::format("<polygon class=\"band\" points=\"{}\" fill=\"{}\" fill-opacity=\"0.18\" stroke=\"none\"/>\n",
                               pts, color);
        }
        std::string pts;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (std::isfinite(s.y[i])) {
                pts += fmt::format("{},{} ", coord(sx(s.x[i])), coord(sy(s.y[i])));
            }
        }
        if (!pts.empty()) {
            pts.pop_back();
        }
        svg += fmt::format("<polyline class=\"series\" points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.8\"{}/>\n",
                           pts, color, s.dashed ? " stroke-dasharray=\"5,4\"" : "");
        const double ly = y1 + 14 + 16 * static_cast<double>(k);
        svg += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"{}/>"
                           "<text x=\"{}\" y=\"{}\" font-size=\"11\">{}</text>\n",
                           coord(x1 - 120), coord(ly), coord(x1 - 100), coord(ly), color,
                           s.dashed ? " stroke-dasharray=\"5,4\"" : "", coord(x1 - 95), coord(ly + 4), escape(s.name));
    }
    svg += "</g>\n";
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw MissingInput(path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Table load_table(const std::filesystem::path& report_dir, const std::string& name) {
    const auto path = report_dir / "tables" / name;
    return parse_table(read_file(path), path.string());
}

// "region=North;lead=3" -> {"region": "North", "lead": "3"}
std::map<std::string, std::string> parse_group(const std::string& group) {
    std::map<std::string, std::string> out;
    std::size_t pos = 0;
    while (pos < group.size()) {
        auto semi = group.find(';', pos);
        if (semi == std::string::npos) {
            semi = group.size();
        }
        const std::string part = group.substr(pos, semi - pos);
        const auto eq = part.find('=');
        if (eq != std::string::npos) {
            out[part.substr(0, eq)] = part.substr(eq + 1);
        }
        pos = semi + 1;
    }
    return out;
}

// Collects metric values by (series label, x) from rows matching `filter`.
struct Lookup {
    std::map<std::string, std::map<double, std::map<std::string, double>>> data;

    Series series(const std::string& label, const std::string& name, const std::string& metric,
                  const std::string& lo = "", const std::string& hi = "") const {
        Series s;
        s.name = name;
        const auto it = data.find(label);
        if (it == data.end()) {
            return s;
        }
        for (const auto& [x, metrics] : it->second) {
            const auto m = metrics.find(metric);
            if (m == metrics.end()) {
                continue;
            }
            s.x.push_back(x);
            s.y.push_back(m->second);
            if (!lo.empty()) {
                s.lo.push_back(metrics.count(lo) ? metrics.at(lo) : m->second);
                s.hi.push_back(metrics.count(hi) ? metrics.at(hi) : m->second);
            }
        }
        return s;
    }
};

template <typename LabelFn, typename XFn>
Lookup index_table(const Table& t, LabelFn label, XFn x) {
    Lookup out;
    for (const TableRow& r : t) {
        const auto g = parse_group(r.group);
        const auto l = label(g);
        if (!l) {
            continue;
        }
        out.data[*l][x(g)][r.metric] = r.value;
    }
    return out;
}

double lead_of(const std::map<std::string, std::string>& g) {
    return std::stod(g.at("lead"));
}

std::string fig4(const std::filesystem::path& dir) {
    const Table t = load_table(dir, "fig4_ssr_correlation.csv");
    const Lookup lk = index_table(
        t, [](const auto& g) { return std::optional<std::string>(g.at("variable")); }, lead_of);
    Panel corr{"Spatial correlation with observations", "lead time (days)", "correlation", {}};
    corr.series.push_back(lk.series("ssr", "SSR mean (IQR band)", "corr_mean", "corr_q1", "corr_q3"));
    corr.series.push_back(lk.series("t2m", "T2M mean (IQR band)", "corr_mean", "corr_q1", "corr_q3"));
    Series target = lk.series("ssr", "(1-r)^lead", "corr_target");
    target.dashed = true;
    corr.series.push_back(target);
    Panel iqr{"Spread of daily correlation", "lead time (days)", "IQR of daily correlation", {}};
    iqr.series.push_back(lk.series("ssr", "SSR", "corr_iqr"));
    iqr.series.push_back(lk.series("t2m", "T2M", "corr_iqr"));
    return render_svg("SSR and T2M forecast skill by lead time", {corr, iqr});
}

std::string fig6(const std::filesystem::path& dir) {
    const Table t = load_table(dir, "fig6_ssr_mdape_latitude.csv");
    const Lookup lk = index_table(
        t, [](const auto& g) { return std::optional<std::string>(g.at("lead")); },
        [](const auto& g) {
            const std::string& band = g.at("band");
            const auto dash = band.find('-');
            return 0.5 * (std::stod(band.substr(0, dash)) + std::stod(band.substr(dash + 1)));
        });
    Panel p{"SSR forecast MdAPE by latitude", "band centre latitude (deg N)", "MdAPE (%)", {}};
    std::vector<std::string> leads;
    for (const auto& [lead, rows] : lk.data) {
        leads.push_back(lead);
    }
    std::sort(leads.begin(), leads.end(), [](const auto& a, const auto& b) { return std::stoi(a) < std::stoi(b); });
    for (const auto& lead : leads) {
        const int l = std::stoi(lead);
        if (l == 1 || l == 5 || l == 10 || leads.size() <= 3) {
            p.series.push_back(lk.series(lead, "lead " + lead, "ssr_mdape"));
        }
    }
    return render_svg("SSR forecast error against latitude", {p});
}

std::string fig9(const std::filesystem::path& dir) {
    const Table t = load_table(dir, "fig9_lead_region.csv");
    const Lookup lk = index_table(
        t,
        [](const auto& g) {
            return g.count("region") ? std::optional<std::string>(g.at("region")) : std::optional<std::string>("all");
        },
        lead_of);
    Panel mdape{"Production MdAPE (SVR)", "lead time (days, 0 = CV modelling)", "MdAPE (%)", {}};
    Panel corr{"Prediction correlation (SVR)", "lead time (days, 0 = CV modelling)", "Pearson r", {}};
    for (const char* region : {"North", "South"}) {
        mdape.series.push_back(lk.series(region, region, "svr_mdape_median", "svr_mdape_q1", "svr_mdape_q3"));
        corr.series.push_back(lk.series(region, region, "svr_r_median", "svr_r_q1", "svr_r_q3"));
    }
    return render_svg("Forecast error by lead time and region (fleet median, IQR band)", {mdape, corr});
}

std::string fig10(const std::filesystem::path& dir) {
    const Table t = load_table(dir, "fig10_lead_season.csv");
    const Lookup lk = index_table(
        t,
        [](const auto& g) {
            return g.count("region") ? std::optional<std::string>() : std::optional<std::string>(g.at("season"));
        },
        lead_of);
    Panel p{"Production MdAPE by season", "lead time (days, 0 = CV modelling)", "MdAPE (%)", {}};
    for (const char* season : {"DJF", "MAM", "JJA", "SON"}) {
        p.series.push_back(lk.series(season, season, "mdape"));
    }
    return render_svg("Forecast error by season", {p});
}

std::string fig11(const std::filesystem::path& dir) {
    std::vector<Panel> panels;
    for (const char* region : {"north", "south"}) {
        const auto path = dir / "densities" / fmt::format("fig11_{}.csv", region);
        const DensityTable d = parse_density(read_file(path), path.string());
        Panel p{std::string(region == std::string("north") ? "North" : "South"), "normalized production", "density",
                {}};
        for (std::size_t k = 0; k < d.columns.size(); ++k) {
            Series s;
            s.name = d.columns[k];
            s.x = d.x;
            s.y = d.density[k];
            s.dashed = k > 0 && k % 2 == 0;
            p.series.push_back(std::move(s));
        }
        panels.push_back(std::move(p));
    }
    return render_svg("Normalized production: observed vs forecast-driven", panels);
}

std::string fig12(const std::filesystem::path& dir) {
    const Table t = load_table(dir, "fig12_uncertainty.csv");
    const Lookup lk = index_table(
        t, [](const auto&) { return std::optional<std::string>("all"); }, lead_of);
    Panel pct{"Input vs production error", "lead time (days, 0 = CV modelling)", "MdAPE (%)", {}};
    pct.series.push_back(lk.series("all", "production", "production_mdape_median", "production_mdape_q1",
                                   "production_mdape_q3"));
    pct.series.push_back(
        lk.series("all", "SSR input", "ssr_input_mdape_median", "ssr_input_mdape_q1", "ssr_input_mdape_q3"));
    Panel temp{"Temperature input error", "lead time (days)", "median |error| (deg C)", {}};
    temp.series.push_back(
        lk.series("all", "T2M input", "t2m_input_mae_median", "t2m_input_mae_q1", "t2m_input_mae_q3"));
    return render_svg("Propagation of input uncertainty", {pct, temp});
}

} // namespace

std::string render_svg(const std::string& title, const std::vector<Panel>& panels) {
    const double width = kPanelW * static_cast<double>(std::max<std::size_t>(panels.size(), 1));
    const double height = kPanelH + kTitleH;
    std::string svg = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
        "font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        "<text x=\"{2}\" y=\"20\" text-anchor=\"middle\" font-size=\"16\">{3}</text>\n",
        coord(width), coord(height), coord(width / 2), escape(title));
    for (std::size_t k = 0; k < panels.size(); ++k) {
        draw_panel(svg, panels[k], kPanelW * static_cast<double>(k), kTitleH);
    }
    svg += "</svg>\n";
    return svg;
}

const std::vector<std::string>& figure_ids() {
    static const std::vector<std::string> ids = {"fig4", "fig6", "fig9", "fig10", "fig11", "fig12"};
    return ids;
}

std::string render_figure(const std::filesystem::path& report_dir, const std::string& figure) {
    if (figure == "fig4") {
        return fig4(report_dir);
    }
    if (figure == "fig6") {
        return fig6(report_dir);
    }
    if (figure == "fig9") {
        return fig9(report_dir);
    }
    if (figure == "fig10") {
        return fig10(report_dir);
    }
    if (figure == "fig11") {
        return fig11(report_dir);
    }
    if (figure == "fig12") {
        return fig12(report_dir);
    }
    throw UnknownFigure(fmt::format("unknown figure '{}' (expected one of {} or all)", figure,
                                    fmt::join(figure_ids(), ", ")));
}

std::vector<std::filesystem::path> plot(const std::filesystem::path& report_dir, const std::string& figure,
                                        const std::filesystem::path& out_dir) {
    std::vector<std::string> ids;
    if (figure == "all") {
        ids = figure_ids();
    } else {
        ids.push_back(figure);
    }
    std::vector<std::pair<std::filesystem::path, std::string>> rendered;
    for (const auto& id : ids) {
        rendered.emplace_back(out_dir / (id + ".svg"), render_figure(report_dir, id));
    }
    std::vector<std::filesystem::path> written;
    for (const auto& [path, svg] : rendered) {
        write_text(path, svg);
        written.push_back(path);
    }
    return written;
}

} // namespace pvfc::cli
