#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <stdexcept>
#include <vector>

#include "anderson_dp/mdp.hpp"

namespace anderson_dp {

inline constexpr double kDefaultLambdaRel = 1e-8;
/// Largest relative regularization tried before falling back to a plain step.
inline constexpr double kMaxLambdaRel = 1e-2;
inline constexpr double kLambdaEscalation = 100.0;

/// A fixed-point iterate became NaN or infinite.
class DivergenceError : public NumericError {
public:
    DivergenceError(std::size_t iteration, const std::string& what)
        : NumericError(what), iteration_(iteration) {}

    std::size_t iteration() const { return iteration_; }

private:
    std::size_t iteration_;
};

/**
 * Sliding history of (iterate, image, residual) triples, oldest first.
 *
 * Capacity is m + 1 for memory parameter m. Pushing onto a full window evicts
 * the oldest entry, so after k pushes the window holds min(k, m + 1) entries.
 */
class AndersonWindow {
public:
    struct Entry {
        Vector iterate;
        Vector image;
        Vector residual;  // image - iterate
    };

    explicit AndersonWindow(std::size_t capacity);

    void push(const Vector& iterate, const Vector& image);

    std::size_t size() const { return entries_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return entries_.empty(); }
    /// Vector length, fixed by the first push.
    Eigen::Index dimension() const { return dimension_; }

    const Entry& operator[](std::size_t i) const { return entries_[i]; }
    const Entry& newest() const { return entries_.back(); }

    /// Residuals as columns, oldest first: the matrix Delta_k.
    Matrix residual_matrix() const;

private:
    std::size_t capacity_;
    Eigen::Index dimension_ = -1;
    std::deque<Entry> entries_;
};

struct AlphaSolution {
    Vector alpha;
    double residual_norm = 0.0;        // ||Delta alpha||_2, unregularized
    double regularization_used = 0.0;  // absolute lambda added to the Gram diagonal
    bool fallback = false;             // alpha = e_last because every solve failed
};

/**
 * Mixing coefficients minimizing ||Delta a||^2 + lambda ||a||^2 subject to sum(a) = 1.
 *
 * Closed form a = H^{-1} 1 / (1' H^{-1} 1) with H = Delta'Delta + lambda I and
 * lambda = lambda_rel * trace(Delta'Delta) / ncols. H is factored by Cholesky;
 * on a non-positive pivot lambda_rel is raised 100x, up to kMaxLambdaRel,
 * after which the newest column gets weight one (fallback).
 */
AlphaSolution solve_alpha(const Matrix& residuals, double lambda_rel = kDefaultLambdaRel);

/// The same constrained problem at a fixed absolute lambda, solved through the
/// full KKT system [[H, 1], [1', 0]] [a; nu] = [0; 1] with a pivoting dense LU.
/// Throws NumericError when the KKT matrix is singular.
Vector solve_alpha_bruteforce(const Matrix& residuals, double lambda);

/// sum_i alpha_i * image_i over the window (images, not iterates).
Vector anderson_combine(const AndersonWindow& window, const Vector& alpha);

using FixedPointOperator = std::function<Vector(const Vector&)>;

struct FixedPointTrace {
    std::vector<Vector> iterates;             // v_0 .. v_n
    std::vector<AlphaSolution> alpha_history;  // one per step from v_2 on
};

/**
 * Anderson-accelerated fixed-point iteration.
 *
 * v_1 = f(v_0); for k >= 1 the window holds the last min(m, k) + 1 pairs
 * (v_i, f(v_i)) and v_{k+1} = sum_i alpha_i f(v_i). With m = 0 this is plain
 * iteration v_{k+1} = f(v_k), bit for bit. Throws DivergenceError carrying the
 * iteration index if an iterate is not finite.
 */
FixedPointTrace accelerate_fixed_point(const FixedPointOperator& op, const Vector& v0, std::size_t m,
                                       std::size_t num_iters, double lambda_rel = kDefaultLambdaRel);

}  // namespace anderson_dp
