#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "pvfc/sample.hpp"

namespace pvfc {

/// Dense symmetric kernel matrix, row-major.
class KernelMatrix {
public:
    KernelMatrix() = default;
    explicit KernelMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

    std::size_t size() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    std::span<const double> row(std::size_t i) const { return std::span<const double>(data_).subspan(i * n_, n_); }

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

/// exp(-gamma * |u - v|^2). Throws DimensionMismatch on unequal lengths.
double rbf_kernel(std::span<const double> u, std::span<const double> v, double gamma);

inline double rbf_kernel(const Feature& u, const Feature& v, double gamma) {
    const double d0 = u[0] - v[0];
    const double d1 = u[1] - v[1];
    return std::exp(-gamma * (d0 * d0 + d1 * d1));
}

KernelMatrix rbf_kernel_matrix(std::span<const Feature> x, double gamma);

struct SolverOptions {
    double tol = 1e-6;  ///< stop when the maximal KKT violation falls below this
    std::size_t max_iter = 1'000'000;  ///< pair updates
    /// Called after every pair update and every face step with the current
    /// dual objective; costs O(n) per call.
    std::function<void(std::size_t iteration, double dual_objective, std::span<const double> beta)> observer;
};

struct DualSolution {
    std::vector<double> beta;  ///< alpha - alpha*, one per training point
    double bias = 0.0;
    double objective = 0.0;  ///< dual objective (maximized)
    std::size_t iterations = 0;
    double kkt_gap = 0.0;
};

/// Epsilon-SVR dual, maximize
///     y'beta - eps * sum(alpha + alpha*) - 1/2 beta' K beta
/// subject to sum(beta) = 0 and 0 <= alpha, alpha* <= C, by pairwise
/// coordinate updates. The first index of each pair is the maximal KKT
/// violator; the second maximizes the guaranteed objective gain among the
/// violating partners. Every few pair updates the solver also moves towards
/// the exact maximizer of the current face (free coefficients keeping their
/// signs), stopping at the first bound; such steps never lower the objective.
/// The bias averages the free variables, or takes the midpoint of the
/// feasible interval when none are free.
/// `start`, when non-empty, is a feasible initial beta (sum zero, |beta| <= C),
/// such as a solution for a smaller C scaled up to this one. Throws
/// ValidationError otherwise.
/// Throws NotConverged when max_iter is exhausted.
DualSolution solve_svr_dual(const KernelMatrix& k, std::span<const double> y, double c, double epsilon,
                            const SolverOptions& options = {}, std::span<const double> start = {});

/// Dual objective at a feasible beta (assumes alpha * alpha* = 0, i.e. |beta| split).
double svr_dual_objective(const KernelMatrix& k, std::span<const double> y, std::span<const double> beta,
                          double epsilon);

} // namespace pvfc
