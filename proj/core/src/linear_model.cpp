#include "pvfc/linear_model.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "pvfc/errors.hpp"

namespace pvfc {

double LinearModel::predict(double ssr, double t) const {
    return std::max(0.0, raw(ssr, t));
}

LinearModel fit_ols(std::span<const Sample> samples) {
    const auto n = static_cast<Eigen::Index>(samples.size());
    if (n < 3) {
        throw TooFewSamples(fmt::format("OLS needs at least 3 samples, got {}", n));
    }
    Eigen::MatrixXd x(n, 3);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Sample& s = samples[static_cast<std::size_t>(i)];
        x(i, 0) = s.ssr;
        x(i, 1) = s.t;
        x(i, 2) = 1.0;
        y(i) = s.y;
    }
    // Column equilibration keeps the rank decision independent of units.
    Eigen::Vector3d col_scale = x.colwise().norm().transpose();
    for (int c = 0; c < 3; ++c) {
        if (!(col_scale(c) > 0.0)) {
            throw RankDeficient("design matrix has an all-zero column");
        }
    }
    const Eigen::MatrixXd xs = x * col_scale.cwiseInverse().asDiagonal();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xs);
    qr.setThreshold(1e-10);
    if (qr.rank() < 3) {
        throw RankDeficient(fmt::format("design matrix has rank {} < 3", qr.rank()));
    }
    Eigen::Vector3d beta = qr.solve(y);
    // One step of iterative refinement.
    const Eigen::VectorXd residual = y - xs * beta;
    beta += qr.solve(residual);
    beta = beta.cwiseQuotient(col_scale);
    return LinearModel{beta(0), beta(1), beta(2)};
}

} // namespace pvfc
