#include "anderson_dp/anderson.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include <fmt/core.h>

namespace anderson_dp {

AndersonWindow::AndersonWindow(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("AndersonWindow: capacity must be at least 1");
}

void AndersonWindow::push(const Vector& iterate, const Vector& image) {
    if (iterate.size() != image.size()) {
        throw std::invalid_argument(fmt::format("AndersonWindow::push: iterate has length {}, image {}",
                                                iterate.size(), image.size()));
    }
    if (dimension_ >= 0 && iterate.size() != dimension_) {
        throw std::invalid_argument(fmt::format("AndersonWindow::push: expected length {}, got {}",
                                                dimension_, iterate.size()));
    }
    dimension_ = iterate.size();
    if (entries_.size() == capacity_) entries_.pop_front();
    entries_.push_back({iterate, image, image - iterate});
}

Matrix AndersonWindow::residual_matrix() const {
    Matrix delta(dimension_ < 0 ? 0 : dimension_, static_cast<Eigen::Index>(entries_.size()));
    for (std::size_t i = 0; i < entries_.size(); ++i) delta.col(i) = entries_[i].residual;
    return delta;
}

namespace {

// Lower Cholesky factor of h, or nullopt when a pivot is not safely positive.
std::optional<Matrix> cholesky_factor(Matrix h) {
    const Eigen::Index n = h.rows();
    const double pivot_floor =
        static_cast<double>(n) * std::numeric_limits<double>::epsilon() * h.diagonal().maxCoeff();
    for (Eigen::Index j = 0; j < n; ++j) {
        double d = h(j, j);
        for (Eigen::Index k = 0; k < j; ++k) d -= h(j, k) * h(j, k);
        if (!(d > pivot_floor)) return std::nullopt;
        const double ljj = std::sqrt(d);
        h(j, j) = ljj;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            double x = h(i, j);
            for (Eigen::Index k = 0; k < j; ++k) x -= h(i, k) * h(j, k);
            h(i, j) = x / ljj;
        }
        for (Eigen::Index i = 0; i < j; ++i) h(i, j) = 0.0;
    }
    return h;
}

// Solves L L' x = b by forward and back substitution.
Vector cholesky_solve(const Matrix& l, Vector x) {
    const Eigen::Index n = l.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        double t = x[i];
        for (Eigen::Index k = 0; k < i; ++k) t -= l(i, k) * x[k];
        x[i] = t / l(i, i);
    }
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        double t = x[i];
        for (Eigen::Index k = i + 1; k < n; ++k) t -= l(k, i) * x[k];
        x[i] = t / l(i, i);
    }
    return x;
}

// b - a x accumulated in twice the working precision: products are split
// exactly with fma and sums carry their rounding error (compensated Dot2).
Vector compensated_residual(const Matrix& a, const Vector& x, const Vector& b) {
    Vector r(b.size());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        double sum = b[i];
        double carry = 0.0;
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            const double p = -a(i, j) * x[j];
            const double p_err = std::fma(-a(i, j), x[j], -p);
            const double t = sum + p;
            const double z = t - sum;
            carry += ((sum - (t - z)) + (p - z)) + p_err;
            sum = t;
        }
        r[i] = sum + carry;
    }
    return r;
}

// The oracle's refinement residual uses binary128 accumulation instead.
Vector quad_residual(const Matrix& a, const Vector& x, const Vector& b) {
    Vector r(b.size());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        __float128 t = b[i];
        for (Eigen::Index j = 0; j < a.cols(); ++j) t -= static_cast<__float128>(a(i, j)) * x[j];
        r[i] = static_cast<double>(t);
    }
    return r;
}

constexpr int kRefinementSteps = 3;

// H^{-1} 1 / (1' H^{-1} 1). The solve is refined against H with
// compensated residuals; the last correction is kept apart from y so the
// normalizing sum, which can cancel heavily, is formed in extended precision.
std::optional<Vector> normalized_gram_solve(const Matrix& h) {
    const auto l = cholesky_factor(h);
    if (!l) return std::nullopt;
    const Vector ones = Vector::Ones(h.rows());
    Vector y = cholesky_solve(*l, ones);
    for (int i = 0; i < kRefinementSteps; ++i) y += cholesky_solve(*l, compensated_residual(h, y, ones));
    const Vector low = cholesky_solve(*l, compensated_residual(h, y, ones));

    double sum = 0.0;
    double carry = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        for (const double term : {y[i], low[i]}) {
            const double t = sum + term;
            carry += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
            sum = t;
        }
    }
    const double total = sum + carry;
    if (!(total > 0.0) || !std::isfinite(total)) return std::nullopt;
    Vector alpha = (y + low) / total;
    if (!alpha.allFinite()) return std::nullopt;
    return alpha;
}

}  // namespace

AlphaSolution solve_alpha(const Matrix& residuals, double lambda_rel) {
    const Eigen::Index n = residuals.cols();
    if (n == 0) throw std::invalid_argument("solve_alpha: residual matrix has no columns");
    if (!(lambda_rel >= 0.0)) throw std::invalid_argument("solve_alpha: lambda_rel must be nonnegative");

    AlphaSolution sol;
    if (n == 1) {
        sol.alpha = Vector::Ones(1);
        sol.residual_norm = residuals.col(0).norm();
        return sol;
    }

    const Matrix gram = residuals.transpose() * residuals;
    const double mean_diag = gram.trace() / static_cast<double>(n);

    double rel = lambda_rel;
    while (true) {
        const double lambda = rel * mean_diag;
        Matrix h = gram;
        h.diagonal().array() += lambda;
        if (auto alpha = normalized_gram_solve(h)) {
            sol.alpha = std::move(*alpha);
            sol.regularization_used = lambda;
            sol.residual_norm = (residuals * sol.alpha).norm();
            return sol;
        }
        if (rel >= kMaxLambdaRel) break;
        rel = rel > 0.0 ? std::min(rel * kLambdaEscalation, kMaxLambdaRel) : kDefaultLambdaRel;
    }

    sol.alpha = Vector::Zero(n);
    sol.alpha[n - 1] = 1.0;
    sol.residual_norm = residuals.col(n - 1).norm();
    sol.regularization_used = rel * mean_diag;
    sol.fallback = true;
    return sol;
}

Vector solve_alpha_bruteforce(const Matrix& residuals, double lambda) {
    const Eigen::Index n = residuals.cols();
    if (n == 0) throw std::invalid_argument("solve_alpha_bruteforce: residual matrix has no columns");

    // Rescaling the Gram block by a power of two near its mean diagonal is exact,
    // leaves alpha unchanged and keeps the bordered system's pivots on one scale.
    Matrix h = residuals.transpose() * residuals;
    h.diagonal().array() += lambda;
    if (const double mean_diag = h.trace() / static_cast<double>(n); mean_diag > 0.0) {
        h *= std::ldexp(1.0, -std::ilogb(mean_diag));
    }

    Matrix kkt = Matrix::Zero(n + 1, n + 1);
    kkt.topLeftCorner(n, n) = h;
    kkt.block(0, n, n, 1).setOnes();
    kkt.block(n, 0, 1, n).setOnes();
    Vector rhs = Vector::Zero(n + 1);
    rhs[n] = 1.0;

    const Eigen::FullPivLU<Matrix> lu(kkt);
    if (!lu.isInvertible()) throw NumericError("solve_alpha_bruteforce: singular KKT system");
    Vector x = lu.solve(rhs);
    for (int i = 0; i < kRefinementSteps; ++i) x += lu.solve(quad_residual(kkt, x, rhs));
    if (!x.allFinite()) throw NumericError("solve_alpha_bruteforce: non-finite solution");
    return x.head(n);
}

Vector anderson_combine(const AndersonWindow& window, const Vector& alpha) {
    if (window.empty()) throw std::invalid_argument("anderson_combine: empty window");
    if (static_cast<std::size_t>(alpha.size()) != window.size()) {
        throw std::invalid_argument(fmt::format("anderson_combine: {} coefficients for {} entries",
                                                alpha.size(), window.size()));
    }
    // Start from the first term so a single weight of one returns the image unchanged.
    Vector out = alpha[0] * window[0].image;
    for (std::size_t i = 1; i < window.size(); ++i) out += alpha[i] * window[i].image;
    return out;
}

FixedPointTrace accelerate_fixed_point(const FixedPointOperator& op, const Vector& v0, std::size_t m,
                                       std::size_t num_iters, double lambda_rel) {
    if (num_iters == 0) throw std::invalid_argument("accelerate_fixed_point: num_iters must be at least 1");

    FixedPointTrace trace;
    trace.iterates.reserve(num_iters + 1);
    trace.iterates.push_back(v0);

    const auto check_finite = [](const Vector& v, std::size_t k) {
        if (!v.allFinite()) {
            throw DivergenceError(k, fmt::format("fixed-point iterate {} is not finite", k));
        }
    };

    AndersonWindow window(m + 1);
    for (std::size_t k = 0; k < num_iters; ++k) {
        const Vector& current = trace.iterates.back();
        Vector image = op(current);
        if (image.size() != current.size()) {
            throw std::invalid_argument("accelerate_fixed_point: operator changed the vector length");
        }
        window.push(current, image);
        if (window.size() == 1) {
            check_finite(image, k + 1);
            trace.iterates.push_back(std::move(image));
            continue;
        }
        auto sol = solve_alpha(window.residual_matrix(), lambda_rel);
        Vector next = anderson_combine(window, sol.alpha);
        trace.alpha_history.push_back(std::move(sol));
        check_finite(next, k + 1);
        trace.iterates.push_back(std::move(next));
    }
    return trace;
}

}  // namespace anderson_dp
