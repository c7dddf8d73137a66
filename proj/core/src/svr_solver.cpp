#include "pvfc/svr_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "pvfc/errors.hpp"

namespace pvfc {

namespace {

constexpr double kTau = 1e-12;
// Consecutive face solves attempted at each checkpoint.
constexpr int kSubspaceSteps = 20;
// Pair updates between face solves.
constexpr std::size_t kCheckpoint = 10;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Dual variables are stored per training point: alpha (pushes f up towards
// y - eps) and alpha* (pushes f down towards y + eps). Moving "up" on a
// variable raises beta = alpha - alpha*, moving "down" lowers it.
struct Variables {
    std::vector<double> alpha;
    std::vector<double> alpha_star;
};


// Moves beta towards the maximizer of the dual restricted to the current face
// (bounded and zero coefficients fixed, free coefficients keep their sign),
// stopping at the first coefficient that would leave the box or change sign.
// The dual objective is concave along that segment and maximal at its far
// end, so the step never decreases it. Returns false when no step was taken.
bool subspace_step(const KernelMatrix& k, std::span<const double> y, double c, double epsilon,
                   std::span<const double> kb, std::vector<double>& beta) {
    const std::size_t n = beta.size();
    std::vector<std::size_t> free;
    double bounded_sum = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        if (beta[a] != 0.0 && std::abs(beta[a]) < c) {
            free.push_back(a);
        } else {
            bounded_sum += beta[a];
        }
    }
    const std::size_t m = free.size();
    if (m < 2) {
        return false;
    }
    Eigen::MatrixXd kff(m, m);
    Eigen::VectorXd rhs(m);
    for (std::size_t p = 0; p < m; ++p) {
        const auto row = k.row(free[p]);
        // K beta restricted to the bounded coefficients.
        double fixed = kb[free[p]];
        for (std::size_t q = 0; q < m; ++q) {
            kff(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) = row[free[q]];
            fixed -= row[free[q]] * beta[free[q]];
        }
        const double sign = beta[free[p]] > 0.0 ? 1.0 : -1.0;
        rhs(static_cast<Eigen::Index>(p)) = y[free[p]] - epsilon * sign - fixed;
    }
    Eigen::VectorXd u;
    Eigen::VectorXd v;
    const Eigen::LLT<Eigen::MatrixXd> llt(kff);
    if (llt.info() == Eigen::Success) {
        u = llt.solve(rhs);
        v = llt.solve(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(m)));
    } else {
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(kff);
        if (ldlt.info() != Eigen::Success) {
            return false;
        }
        u = ldlt.solve(rhs);
        v = ldlt.solve(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(m)));
    }
    const double denom = v.sum();
    if (!std::isfinite(denom) || std::abs(denom) < 1e-300 || !u.allFinite() || !v.allFinite()) {
        return false;
    }
    const double bias = (u.sum() + bounded_sum) / denom;
    const Eigen::VectorXd target = u - bias * v;

    double t = 1.0;
    std::size_t blocking = m;
    double blocking_value = 0.0;
    for (std::size_t p = 0; p < m; ++p) {
        const double cur = beta[free[p]];
        const double dir = target(static_cast<Eigen::Index>(p)) - cur;
        if (dir == 0.0) {
            continue;
        }
        // Sign-preserving box for this coefficient: (0, C] or [-C, 0).
        const double limit = cur > 0.0 ? (dir > 0.0 ? c : 0.0) : (dir > 0.0 ? 0.0 : -c);
        const double reach = (limit - cur) / dir;
        if (reach < t) {
            t = std::max(0.0, reach);
            blocking = p;
            blocking_value = limit;
        }
    }
    if (t <= 0.0) {
        return false;
    }
    for (std::size_t p = 0; p < m; ++p) {
        const double cur = beta[free[p]];
        double next = p == blocking ? blocking_value : cur + t * (target(static_cast<Eigen::Index>(p)) - cur);
        next = std::clamp(next, -c, c);
        if ((cur > 0.0 && next < 0.0) || (cur < 0.0 && next > 0.0)) {
            next = 0.0;
        }
        beta[free[p]] = next;
    }
    // Restore sum(beta) = 0 exactly up to rounding on the largest free coefficient.
    double sum = 0.0;
    for (double b : beta) {
        sum += b;
    }
    std::size_t fix = n;
    for (std::size_t p = 0; p < m; ++p) {
        const double b = beta[free[p]];
        if (b != 0.0 && std::abs(b) < c && (fix == n || std::abs(b) > std::abs(beta[fix]))) {
            fix = free[p];
        }
    }
    if (fix != n) {
        const double adjusted = beta[fix] - sum;
        if (std::abs(adjusted) < c && (adjusted > 0.0) == (beta[fix] > 0.0)) {
            beta[fix] = adjusted;
        }
    }
    return true;
}

} // namespace

double rbf_kernel(std::span<const double> u, std::span<const double> v, double gamma) {
    if (u.size() != v.size()) {
        throw DimensionMismatch(fmt::format("rbf_kernel: dimensions {} and {} differ", u.size(), v.size()));
    }
    double d2 = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double d = u[k] - v[k];
        d2 += d * d;
    }
    return std::exp(-gamma * d2);
}

KernelMatrix rbf_kernel_matrix(std::span<const Feature> x, double gamma) {
    const std::size_t n = x.size();
    KernelMatrix k(n);
    for (std::size_t i = 0; i < n; ++i) {
        k(i, i) = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = rbf_kernel(x[i], x[j], gamma);
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    return k;
}

double svr_dual_objective(const KernelMatrix& k, std::span<const double> y, std::span<const double> beta,
                          double epsilon) {
    const std::size_t n = beta.size();
    double quad = 0.0;
    double lin = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (beta[i] == 0.0) {
            continue;
        }
        double kb = 0.0;
        const auto row = k.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            kb += row[j] * beta[j];
        }
        quad += beta[i] * kb;
        lin += y[i] * beta[i] - epsilon * std::abs(beta[i]);
    }
    return lin - 0.5 * quad;
}

DualSolution solve_svr_dual(const KernelMatrix& k, std::span<const double> y, double c, double epsilon,
                            const SolverOptions& options, std::span<const double> start) {
    const std::size_t n = y.size();
    if (k.size() != n) {
        throw DimensionMismatch(fmt::format("kernel is {}x{} but there are {} targets", k.size(), k.size(), n));
    }
    if (n < 2) {
        throw TooFewSamples("SVR needs at least 2 samples");
    }
    if (!(c > 0.0) || !(epsilon >= 0.0)) {
        throw ValidationError(fmt::format("invalid SVR parameters C={} eps={}", c, epsilon));
    }

    Variables v{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    std::vector<double> kb(n, 0.0);  // K * beta
    std::vector<double> beta(n, 0.0);
    if (!start.empty()) {
        if (start.size() != n) {
            throw DimensionMismatch(fmt::format("start has {} coefficients for {} samples", start.size(), n));
        }
        double sum = 0.0;
        double scale = 0.0;
        for (double b : start) {
            if (!(std::abs(b) <= c)) {
                throw ValidationError(fmt::format("start coefficient {} outside [-{}, {}]", b, c, c));
            }
            sum += b;
            scale += std::abs(b);
        }
        if (std::abs(sum) > 1e-9 * std::max(1.0, scale)) {
            throw ValidationError(fmt::format("start coefficients sum to {}, not 0", sum));
        }
        for (std::size_t a = 0; a < n; ++a) {
            beta[a] = start[a];
            v.alpha[a] = std::max(beta[a], 0.0);
            v.alpha_star[a] = std::max(-beta[a], 0.0);
            if (beta[a] != 0.0) {
                const auto row = k.row(a);
                for (std::size_t t = 0; t < n; ++t) {
                    kb[t] += beta[a] * row[t];
                }
            }
        }
    }

    auto objective = [&] {
        double w = 0.0;
        for (std::size_t a = 0; a < n; ++a) {
            w += y[a] * beta[a] - 0.5 * beta[a] * kb[a] - epsilon * (v.alpha[a] + v.alpha_star[a]);
        }
        return w;
    };

    // Violation measure of each variable: for alpha it is r - eps, for alpha*
    // it is r + eps, with r = y - K beta. At optimum every "up"-movable
    // variable has measure <= every "down"-movable one.
    // Every kCheckpoint pair updates the current face is solved directly,
    // which settles the many nearly-free coefficients of large-C problems
    // far faster than pairwise updates.
    std::vector<double> trial;
    std::vector<double> trial_kb(n, 0.0);

    std::size_t iter = 0;
    double gap = kInf;
    double m_up = -kInf;
    double m_low = kInf;
    while (true) {
        m_up = -kInf;
        m_low = kInf;
        std::size_t i_sample = n;
        bool i_is_star = false;
        for (std::size_t a = 0; a < n; ++a) {
            const double r = y[a] - kb[a];
            if (v.alpha[a] < c && r - epsilon > m_up) {
                m_up = r - epsilon;
                i_sample = a;
                i_is_star = false;
            }
            if (v.alpha_star[a] > 0.0 && r + epsilon > m_up) {
                m_up = r + epsilon;
                i_sample = a;
                i_is_star = true;
            }
            if (v.alpha[a] > 0.0) {
                m_low = std::min(m_low, r - epsilon);
            }
            if (v.alpha_star[a] < c) {
                m_low = std::min(m_low, r + epsilon);
            }
        }
        gap = m_up - m_low;
        if (!(gap >= options.tol) || i_sample == n) {
            break;
        }
        if (iter >= options.max_iter) {
            throw NotConverged(iter, gap, options.tol);
        }

        // Second-order choice of the partner among down-movable violators.
        const auto ki = k.row(i_sample);
        const double kii = ki[i_sample];
        std::size_t j_sample = n;
        bool j_is_star = false;
        double best = kInf;
        auto consider = [&](std::size_t a, double measure, bool star) {
            const double b = m_up - measure;
            if (b <= 0.0) {
                return;
            }
            double quad = kii + k(a, a) - 2.0 * ki[a];
            if (quad <= 0.0) {
                quad = kTau;
            }
            const double gain = -(b * b) / quad;
            if (gain < best) {
                best = gain;
                j_sample = a;
                j_is_star = star;
            }
        };
        for (std::size_t a = 0; a < n; ++a) {
            const double r = y[a] - kb[a];
            if (v.alpha[a] > 0.0) {
                consider(a, r - epsilon, false);
            }
            if (v.alpha_star[a] < c) {
                consider(a, r + epsilon, true);
            }
        }
        if (j_sample == n) {
            break;
        }

        const double ri = y[i_sample] - kb[i_sample];
        const double rj = y[j_sample] - kb[j_sample];
        const double vi = i_is_star ? ri + epsilon : ri - epsilon;
        const double vj = j_is_star ? rj + epsilon : rj - epsilon;
        double quad = kii + k(j_sample, j_sample) - 2.0 * ki[j_sample];
        if (quad <= 0.0) {
            quad = kTau;
        }
        // beta[i] rises by d, beta[j] falls by d.
        const double room_i = i_is_star ? v.alpha_star[i_sample] : c - v.alpha[i_sample];
        const double room_j = j_is_star ? c - v.alpha_star[j_sample] : v.alpha[j_sample];
        const double d_free = (vi - vj) / quad;
        double d = d_free;
        bool clip_i = false;
        bool clip_j = false;
        if (room_i <= d) {
            d = room_i;
            clip_i = true;
        }
        if (room_j <= d) {
            d = room_j;
            clip_j = true;
            clip_i = room_i <= d;
        }
        if (i_is_star) {
            v.alpha_star[i_sample] = clip_i ? 0.0 : v.alpha_star[i_sample] - d;
        } else {
            v.alpha[i_sample] = clip_i ? c : v.alpha[i_sample] + d;
        }
        if (j_is_star) {
            v.alpha_star[j_sample] = clip_j ? c : v.alpha_star[j_sample] + d;
        } else {
            v.alpha[j_sample] = clip_j ? 0.0 : v.alpha[j_sample] - d;
        }
        for (std::size_t a : {i_sample, j_sample}) {
            const double nb = v.alpha[a] - v.alpha_star[a];
            const double delta = nb - beta[a];
            if (delta != 0.0) {
                const auto row = k.row(a);
                for (std::size_t t = 0; t < n; ++t) {
                    kb[t] += delta * row[t];
                }
                beta[a] = nb;
            }
            if (i_sample == j_sample) {
                break;
            }
        }
        ++iter;
        if (options.observer) {
            options.observer(iter, objective(), beta);
        }

        if (iter % kCheckpoint == 0) {
            for (int step = 0; step < kSubspaceSteps; ++step) {
                trial = beta;
                if (!subspace_step(k, y, c, epsilon, kb, trial)) {
                    break;
                }
                trial_kb = kb;
                for (std::size_t a = 0; a < n; ++a) {
                    const double delta = trial[a] - beta[a];
                    if (delta != 0.0) {
                        const auto row = k.row(a);
                        for (std::size_t t = 0; t < n; ++t) {
                            trial_kb[t] += delta * row[t];
                        }
                    }
                }
                double w_old = 0.0;
                double w_new = 0.0;
                for (std::size_t a = 0; a < n; ++a) {
                    w_old += y[a] * beta[a] - 0.5 * beta[a] * kb[a] - epsilon * (v.alpha[a] + v.alpha_star[a]);
                    w_new += y[a] * trial[a] - 0.5 * trial[a] * trial_kb[a] - epsilon * std::abs(trial[a]);
                }
                if (!(w_new >= w_old)) {
                    break;
                }
                beta.swap(trial);
                kb.swap(trial_kb);
                for (std::size_t a = 0; a < n; ++a) {
                    v.alpha[a] = std::max(beta[a], 0.0);
                    v.alpha_star[a] = std::max(-beta[a], 0.0);
                }
                if (options.observer) {
                    options.observer(iter, objective(), beta);
                }
            }
        }
    }

    DualSolution out;
    out.iterations = iter;
    out.kkt_gap = std::max(0.0, gap);
    out.beta = beta;

    double free_sum = 0.0;
    std::size_t n_free = 0;
    for (std::size_t a = 0; a < n; ++a) {
        const double r = y[a] - kb[a];
        if (v.alpha[a] > 0.0 && v.alpha[a] < c) {
            free_sum += r - epsilon;
            ++n_free;
        }
        if (v.alpha_star[a] > 0.0 && v.alpha_star[a] < c) {
            free_sum += r + epsilon;
            ++n_free;
        }
    }
    if (n_free > 0) {
        out.bias = free_sum / static_cast<double>(n_free);
    } else if (std::isfinite(m_up) && std::isfinite(m_low)) {
        out.bias = 0.5 * (m_up + m_low);
    } else {
        out.bias = std::isfinite(m_up) ? m_up : (std::isfinite(m_low) ? m_low : 0.0);
    }
    out.objective = objective();
    return out;
}

} // namespace pvfc
