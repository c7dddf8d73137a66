#include "pvfc/model_io.hpp"

#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include <fmt/format.h>

#include "pvfc/errors.hpp"
#include "text_table.hpp"

namespace pvfc {

namespace {

constexpr std::string_view kSvrMagic = "pvfc-svr-model";
constexpr std::string_view kLinearMagic = "pvfc-linear-model";
constexpr int kFormatVersion = 1;

// Reads one line, splits on spaces and checks the leading keyword.
class LineReader {
public:
    LineReader(std::istream& in, std::string src) : in_(in), src_(std::move(src)) {}

    std::vector<std::string_view> expect(std::string_view key, std::size_t n_values) {
        if (!detail::read_line(in_, line_)) {
            throw ParseError(src_, line_no_ + 1, fmt::format("unexpected end of file, expected '{}'", key));
        }
        ++line_no_;
        auto parts = detail::split_csv(line_, ' ');
        if (parts.empty() || parts[0] != key) {
            throw ParseError(src_, line_no_, fmt::format("expected '{}'", key));
        }
        if (parts.size() != n_values + 1) {
            throw ParseError(src_, line_no_, fmt::format("'{}' takes {} values", key, n_values));
        }
        parts.erase(parts.begin());
        return parts;
    }

    double number(std::string_view text) { return detail::parse_value<double>(text, src_, line_no_, "number"); }
    std::size_t count(std::string_view text) {
        return detail::parse_value<std::size_t>(text, src_, line_no_, "count");
    }
    std::size_t line_no() const { return line_no_; }
    const std::string& source() const { return src_; }

private:
    std::istream& in_;
    std::string src_;
    std::string line_;
    std::size_t line_no_ = 0;
};

void check_version(LineReader& r, std::string_view magic) {
    const auto v = r.expect(magic, 1);
    if (r.count(v[0]) != kFormatVersion) {
        throw ParseError(r.source(), r.line_no(), fmt::format("unsupported {} version {}", magic, v[0]));
    }
}

} // namespace

void write_svr_model(std::ostream& out, const SvrModel& m) {
    const auto& s = m.scaler();
    const auto& hp = m.hyper_params();
    out << fmt::format("{} {}\n", kSvrMagic, kFormatVersion);
    out << fmt::format("scaler_mean {} {}\n", s.mean()[0], s.mean()[1]);
    out << fmt::format("scaler_std {} {}\n", s.std()[0], s.std()[1]);
    out << fmt::format("target {} {}\n", m.target_scale().mean, m.target_scale().scale);
    out << fmt::format("hyper {} {} {}\n", hp.c, hp.epsilon, hp.gamma);
    out << fmt::format("bias {}\n", m.bias());
    out << fmt::format("support {}\n", m.support_vectors().size());
    for (std::size_t k = 0; k < m.support_vectors().size(); ++k) {
        const auto& x = m.support_vectors()[k];
        out << fmt::format("sv {} {} {} {}\n", m.support_indices()[k], x[0], x[1], m.coefficients()[k]);
    }
}

SvrModel read_svr_model(std::istream& in, const std::string& src) {
    LineReader r(in, src);
    check_version(r, kSvrMagic);
    auto v = r.expect("scaler_mean", 2);
    const Feature mean{r.number(v[0]), r.number(v[1])};
    v = r.expect("scaler_std", 2);
    const Feature sd{r.number(v[0]), r.number(v[1])};
    v = r.expect("target", 2);
    const TargetScale target{r.number(v[0]), r.number(v[1])};
    v = r.expect("hyper", 3);
    const SvrHyperParams hp{r.number(v[0]), r.number(v[1]), r.number(v[2])};
    v = r.expect("bias", 1);
    const double bias = r.number(v[0]);
    v = r.expect("support", 1);
    const std::size_t n = r.count(v[0]);
    std::vector<Feature> support;
    std::vector<double> coef;
    std::vector<std::size_t> index;
    for (std::size_t k = 0; k < n; ++k) {
        v = r.expect("sv", 4);
        index.push_back(r.count(v[0]));
        support.push_back({r.number(v[1]), r.number(v[2])});
        coef.push_back(r.number(v[3]));
    }
    try {
        hp.validate();
        return SvrModel(Scaler(mean, sd), target, hp, std::move(support), std::move(coef), std::move(index), bias);
    } catch (const Error& e) {
        throw ParseError(src, r.line_no(), e.what());
    }
}

void write_linear_model(std::ostream& out, const LinearModel& m) {
    out << fmt::format("{} {}\n", kLinearMagic, kFormatVersion);
    out << fmt::format("coef {} {} {}\n", m.a1, m.a2, m.a3);
}

LinearModel read_linear_model(std::istream& in, const std::string& src) {
    LineReader r(in, src);
    check_version(r, kLinearMagic);
    const auto v = r.expect("coef", 3);
    return LinearModel{r.number(v[0]), r.number(v[1]), r.number(v[2])};
}

namespace {

template <typename Writer, typename Model>
void store_with(Writer writer, const Model& model, const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(fmt::format("cannot open {} for writing", path.string()));
    }
    writer(out, model);
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw MissingInput(path.string());
    }
    return in;
}

} // namespace

void store_svr_model(const SvrModel& model, const std::filesystem::path& path) {
    store_with(write_svr_model, model, path);
}

SvrModel load_svr_model(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_svr_model(in, path.string());
}

void store_linear_model(const LinearModel& model, const std::filesystem::path& path) {
    store_with(write_linear_model, model, path);
}

LinearModel load_linear_model(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_linear_model(in, path.string());
}

} // namespace pvfc
