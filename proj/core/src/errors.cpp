#include "pvfc/errors.hpp"

#include <fmt/format.h>

namespace pvfc {

MissingInput::MissingInput(std::string path)
    : Error(fmt::format("missing input: {}", path)), path_(std::move(path)) {}

ParseError::ParseError(std::string source, std::size_t line, const std::string& message)
    : Error(fmt::format("{}:{}: {}", source, line, message)), line_(line) {}

NotConverged::NotConverged(std::size_t iterations, double kkt_gap, double tolerance)
    : Error(fmt::format("SVR solver did not converge after {} iterations (KKT gap {:.3e} > tol {:.1e})",
                        iterations, kkt_gap, tolerance)),
      iterations_(iterations),
      kkt_gap_(kkt_gap) {}

} // namespace pvfc
