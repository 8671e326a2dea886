#pragma once
#include <span>
#include <vector>

#include "glnn/errors.hpp"

namespace glnn {

using Vec = std::vector<double>;

/// Dense row-major matrix.
struct Mat {
    int rows = 0, cols = 0;
    Vec a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(std::size_t(r) * c, 0.0) {}

    double& operator()(int i, int j) { return a[std::size_t(i) * cols + j]; }
    double operator()(int i, int j) const { return a[std::size_t(i) * cols + j]; }
};

bool all_finite(std::span<const double> v);

/// (H + Hᵀ)/2, removing round-off asymmetry before a solve.
Mat symmetrized(const Mat& H);

/// LU factorization with partial pivoting, in place. Returns det(A).
double lu_factor(Mat& A, std::vector<int>& piv);

/// Back-substitution for a previously factored system.
void lu_solve(const Mat& lu, const std::vector<int>& piv, std::span<double> x);

/// x = (M + ridge·I)⁻¹ b by pivoted elimination.
/// Throws SingularMassMatrixError when |det(M + ridge·I)| < 1e-12.
Vec solve_spd(const Mat& M, std::span<const double> b, double ridge);

} // namespace glnn
