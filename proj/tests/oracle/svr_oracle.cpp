#include "svr_oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pvfc::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// argmin_b 1/2 |b - v|^2 + t*eps*|b|_1  s.t. |b_i| <= C, sum(b) = 0.
// Each coordinate is clip(soft(v_i - nu, t*eps), -C, C); nu is found by
// bisection on the monotone sum.
Eigen::VectorXd prox(const Eigen::VectorXd& v, double threshold, double c) {
    auto at = [&](double nu) {
        Eigen::VectorXd b(v.size());
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            const double u = v(i) - nu;
            const double s = u > threshold ? u - threshold : (u < -threshold ? u + threshold : 0.0);
            b(i) = std::clamp(s, -c, c);
        }
        return b;
    };
    double lo = v.minCoeff() - threshold - c - 1.0;
    double hi = v.maxCoeff() + threshold + c + 1.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (at(mid).sum() > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Eigen::VectorXd b = at(0.5 * (lo + hi));
    // Remove the residual sum from the coefficient with the most room.
    const double s = b.sum();
    Eigen::Index best = -1;
    double room = 0.0;
    for (Eigen::Index i = 0; i < b.size(); ++i) {
        if (b(i) != 0.0) {
            const double r = s > 0 ? (b(i) > 0 ? b(i) : c + b(i)) : (b(i) < 0 ? -b(i) : c - b(i));
            if (r > room) {
                room = r;
                best = i;
            }
        }
    }
    if (best >= 0 && std::abs(s) < room) {
        b(best) -= s;
    }
    return b;
}

// Bias interval implied by the KKT conditions for a fixed beta.
std::pair<double, double> bias_interval(const Eigen::MatrixXd& k, const Eigen::VectorXd& y,
                                        const Eigen::VectorXd& beta, double c, double eps, double tol) {
    const Eigen::VectorXd kb = k * beta;
    double lo = -kInf;
    double hi = kInf;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double r = y(i) - kb(i);  // f_i - y_i = b - r
        const double bi = beta(i);
        if (std::abs(bi) <= tol) {
            lo = std::max(lo, r - eps);
            hi = std::min(hi, r + eps);
        } else if (bi >= c - tol) {
            hi = std::min(hi, r - eps);
        } else if (bi <= -c + tol) {
            lo = std::max(lo, r + eps);
        } else if (bi > 0) {
            lo = std::max(lo, r - eps);
            hi = std::min(hi, r - eps);
        } else {
            lo = std::max(lo, r + eps);
            hi = std::min(hi, r + eps);
        }
    }
    return {lo, hi};
}

// Solves the KKT equations for a given state vector (-2, -1, 0, 1, 2 per
// coefficient). Returns false if the linear system is singular or the
// solution leaves its assigned region.
bool solve_pattern(const Eigen::MatrixXd& k, const Eigen::VectorXd& y, double c, double eps,
                   const std::vector<int>& state, Eigen::VectorXd& beta, double& bias) {
    const Eigen::Index n = y.size();
    std::vector<Eigen::Index> free;
    beta = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (state[i] == 2) {
            beta(i) = c;
        } else if (state[i] == -2) {
            beta(i) = -c;
        } else if (state[i] != 0) {
            free.push_back(i);
        }
    }
    const auto m = static_cast<Eigen::Index>(free.size());
    if (m == 0) {
        if (std::abs(beta.sum()) > 1e-9 * c) {
            return false;
        }
        const auto [lo, hi] = bias_interval(k, y, beta, c, eps, 0.0);
        if (lo > hi + 1e-9) {
            return false;
        }
        bias = std::isfinite(lo) && std::isfinite(hi) ? 0.5 * (lo + hi) : (std::isfinite(lo) ? lo : hi);
        return true;
    }
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m + 1, m + 1);
    Eigen::VectorXd rhs(m + 1);
    const Eigen::VectorXd kb_fixed = k * beta;
    for (Eigen::Index p = 0; p < m; ++p) {
        for (Eigen::Index q = 0; q < m; ++q) {
            a(p, q) = k(free[p], free[q]);
        }
        a(p, m) = 1.0;
        a(m, p) = 1.0;
        const double sign = state[free[p]] > 0 ? 1.0 : -1.0;
        rhs(p) = y(free[p]) - eps * sign - kb_fixed(free[p]);
    }
    rhs(m) = -beta.sum();
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) {
        return false;
    }
    const Eigen::VectorXd sol = lu.solve(rhs);
    for (Eigen::Index p = 0; p < m; ++p) {
        const double v = sol(p);
        const bool positive = state[free[p]] > 0;
        if ((positive && !(v > -1e-12 && v < c + 1e-12)) || (!positive && !(v < 1e-12 && v > -c - 1e-12))) {
            return false;
        }
        beta(free[p]) = v;
    }
    bias = sol(m);
    return true;
}

} // namespace

double dual_objective(const Eigen::MatrixXd& k, const Eigen::VectorXd& y, const Eigen::VectorXd& beta, double eps) {
    return y.dot(beta) - eps * beta.cwiseAbs().sum() - 0.5 * beta.dot(k * beta);
}

double kkt_violation(const Eigen::MatrixXd& k, const Eigen::VectorXd& y, const Eigen::VectorXd& beta, double bias,
                     double c, double eps) {
    const Eigen::VectorXd f = k * beta + Eigen::VectorXd::Constant(y.size(), bias);
    double worst = std::abs(beta.sum());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double r = y(i) - f(i);  // residual
        const double bi = beta(i);
        double v = 0.0;
        if (bi == 0.0) {
            v = std::max(0.0, std::abs(r) - eps);
        } else if (bi >= c) {
            v = std::max(0.0, eps - r);
        } else if (bi <= -c) {
            v = std::max(0.0, eps + r);
        } else if (bi > 0) {
            v = std::abs(r - eps);
        } else {
            v = std::abs(r + eps);
        }
        v = std::max(v, std::max(0.0, std::abs(bi) - c));
        worst = std::max(worst, v);
    }
    return worst;
}

OracleSolution solve_projected_gradient(const Eigen::MatrixXd& k, const Eigen::VectorXd& y, double c, double eps,
                                        double tol, std::size_t max_iter) {
    const Eigen::Index n = y.size();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
    const double lmax = std::max(es.eigenvalues().maxCoeff(), 1e-12);
    const double t = 1.0 / lmax;

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd z = x;
    double theta = 1.0;
    for (std::size_t it = 0; it < max_iter; ++it) {
        const Eigen::VectorXd grad = k * z - y;
        const Eigen::VectorXd next = prox(z - t * grad, t * eps, c);
        const double step = (next - x).norm();
        const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
        z = next + ((theta - 1.0) / theta_next) * (next - x);
        // Restart the momentum whenever the objective would decrease.
        if (dual_objective(k, y, next, eps) < dual_objective(k, y, x, eps)) {
            z = next;
            theta = 1.0;
        } else {
            theta = theta_next;
        }
        x = next;
        if (step < tol) {
            break;
        }
    }

    OracleSolution out;
    out.beta = x;
    const auto [lo, hi] = bias_interval(k, y, x, c, eps, 1e-7 * std::max(1.0, c));
    out.bias = std::isfinite(lo) && std::isfinite(hi) ? 0.5 * (lo + hi) : (std::isfinite(lo) ? lo : hi);
    out.objective = dual_objective(k, y, x, eps);
    out.kkt_violation = kkt_violation(k, y, out.beta, out.bias, c, eps);

    // Polish: read the active set off the iterate and solve its KKT system exactly.
    const double snap = 1e-6 * std::max(1.0, c);
    std::vector<int> state(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        const double b = x(i);
        state[i] = std::abs(b) <= snap ? 0 : (b >= c - snap ? 2 : (b <= -c + snap ? -2 : (b > 0 ? 1 : -1)));
    }
    Eigen::VectorXd beta;
    double bias = 0.0;
    if (solve_pattern(k, y, c, eps, state, beta, bias)) {
        const double v = kkt_violation(k, y, beta, bias, c, eps);
        if (v < 1e-9 * std::max(1.0, c)) {
            out.beta = beta;
            out.bias = bias;
            out.objective = dual_objective(k, y, beta, eps);
            out.kkt_violation = v;
            out.polished = true;
        }
    }
    return out;
}

OracleSolution solve_by_enumeration(const Eigen::MatrixXd& k, const Eigen::VectorXd& y, double c, double eps) {
    const auto n = static_cast<std::size_t>(y.size());
    if (n > 7) {
        throw std::invalid_argument("enumeration oracle is limited to n <= 7");
    }
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) {
        total *= 5;
    }
    OracleSolution best;
    best.objective = -kInf;
    best.kkt_violation = kInf;
    std::vector<int> state(n);
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t rest = code;
        for (std::size_t i = 0; i < n; ++i) {
            state[i] = static_cast<int>(rest % 5) - 2;
            rest /= 5;
        }
        Eigen::VectorXd beta;
        double bias = 0.0;
        if (!solve_pattern(k, y, c, eps, state, beta, bias)) {
            continue;
        }
        const double v = kkt_violation(k, y, beta, bias, c, eps);
        if (v > 1e-8 * std::max(1.0, c)) {
            continue;
        }
        const double w = dual_objective(k, y, beta, eps);
        if (w > best.objective) {
            best.beta = beta;
            best.bias = bias;
            best.objective = w;
            best.kkt_violation = v;
            best.polished = true;
        }
    }
    if (!best.polished) {
        throw std::runtime_error("no KKT-consistent active set found");
    }
    return best;
}

Eigen::MatrixXd rbf_gram(const std::vector<std::array<double, 2>>& x, double gamma) {
    const auto n = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double d0 = x[i][0] - x[j][0];
            const double d1 = x[i][1] - x[j][1];
            k(i, j) = std::exp(-gamma * (d0 * d0 + d1 * d1));
        }
    }
    return k;
}

} // namespace pvfc::oracle
