#include "glnn/linalg.hpp"

#include <cmath>
#include <cstdlib>

namespace glnn {

bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

Mat symmetrized(const Mat& H) {
    Mat S(H.rows, H.cols);
    for (int i = 0; i < H.rows; ++i)
        for (int j = 0; j < H.cols; ++j)
            S(i, j) = 0.5 * (H(i, j) + H(j, i));
    return S;
}

double lu_factor(Mat& A, std::vector<int>& piv) {
    const int n = A.rows;
    piv.resize(n);
    double det = 1.0;
    for (int k = 0; k < n; ++k) {
        int p = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(A(i, k)) > std::abs(A(p, k))) p = i;
        piv[k] = p;
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(A(k, j), A(p, j));
            det = -det;
        }
        const double pivot = A(k, k);
        det *= pivot;
        if (pivot == 0.0) continue;
        for (int i = k + 1; i < n; ++i) {
            const double f = A(i, k) / pivot;
            A(i, k) = f;
            for (int j = k + 1; j < n; ++j) A(i, j) -= f * A(k, j);
        }
    }
    return det;
}

void lu_solve(const Mat& lu, const std::vector<int>& piv, std::span<double> x) {
    const int n = lu.rows;
    for (int k = 0; k < n; ++k)
        if (piv[k] != k) std::swap(x[k], x[piv[k]]);
    for (int i = 1; i < n; ++i)
        for (int k = 0; k < i; ++k) x[i] -= lu(i, k) * x[k];
    for (int i = n - 1; i >= 0; --i) {
        for (int k = i + 1; k < n; ++k) x[i] -= lu(i, k) * x[k];
        x[i] /= lu(i, i);
    }
}

Vec solve_spd(const Mat& M, std::span<const double> b, double ridge) {
    if (M.rows != M.cols || M.rows != int(b.size()))
        throw NumericError("solve_spd: dimension mismatch");
    Mat A = M;
    for (int i = 0; i < A.rows; ++i) A(i, i) += ridge;
    std::vector<int> piv;
    const double det = lu_factor(A, piv);
    if (!std::isfinite(det) || std::abs(det) < 1e-12)
        throw SingularMassMatrixError("solve_spd: singular mass matrix");
    Vec x(b.begin(), b.end());
    lu_solve(A, piv, x);
    return x;
}

} // namespace glnn
