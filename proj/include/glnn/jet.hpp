#pragma once
#include <cmath>
#include <span>

#include "glnn/linalg.hpp"
#include "glnn/packed.hpp"

namespace glnn::ad {

// Truncated second-order multivariate Taylor scalar in n directions:
// value, gradient, and packed symmetric Hessian. Slow but transparent;
// serves as an independent oracle for the layer-wise derivative engine
// and evaluates closed-form test functions.
struct Jet2 {
    double v = 0.0;
    Vec g;  // n
    Vec h;  // sym_count(n)

    Jet2() = default;
    explicit Jet2(int n) : g(n, 0.0), h(sym_count(n), 0.0) {}
    Jet2(int n, double value) : v(value), g(n, 0.0), h(sym_count(n), 0.0) {}

    int n() const { return int(g.size()); }

    /// Seed as the i-th independent variable with value x.
    static Jet2 variable(int n, int i, double x) {
        Jet2 j(n, x);
        j.g[i] = 1.0;
        return j;
    }
};

inline Jet2 operator+(const Jet2& a, const Jet2& b) {
    Jet2 r = a;
    r.v += b.v;
    for (std::size_t i = 0; i < r.g.size(); ++i) r.g[i] += b.g[i];
    for (std::size_t i = 0; i < r.h.size(); ++i) r.h[i] += b.h[i];
    return r;
}

inline Jet2 operator-(const Jet2& a, const Jet2& b) {
    Jet2 r = a;
    r.v -= b.v;
    for (std::size_t i = 0; i < r.g.size(); ++i) r.g[i] -= b.g[i];
    for (std::size_t i = 0; i < r.h.size(); ++i) r.h[i] -= b.h[i];
    return r;
}

inline Jet2 operator-(const Jet2& a) {
    Jet2 r = a;
    r.v = -r.v;
    for (auto& x : r.g) x = -x;
    for (auto& x : r.h) x = -x;
    return r;
}

inline Jet2 operator*(const Jet2& a, const Jet2& b) {
    const int n = a.n();
    Jet2 r(n);
    r.v = a.v * b.v;
    for (int i = 0; i < n; ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const int c = sym_index(n, i, j);
            r.h[c] = a.h[c] * b.v + a.v * b.h[c] + a.g[i] * b.g[j] + a.g[j] * b.g[i];
        }
    return r;
}

inline Jet2 operator*(double s, const Jet2& a) {
    Jet2 r = a;
    r.v *= s;
    for (auto& x : r.g) x *= s;
    for (auto& x : r.h) x *= s;
    return r;
}

inline Jet2 operator*(const Jet2& a, double s) { return s * a; }

inline Jet2 operator+(const Jet2& a, double s) {
    Jet2 r = a;
    r.v += s;
    return r;
}

inline Jet2 operator+(double s, const Jet2& a) { return a + s; }
inline Jet2 operator-(const Jet2& a, double s) { return a + (-s); }
inline Jet2 operator-(double s, const Jet2& a) { return (-a) + s; }

/// Compose a smooth scalar function given f(a.v), f'(a.v), f''(a.v).
inline Jet2 compose(const Jet2& a, double f, double d1, double d2) {
    const int n = a.n();
    Jet2 r(n);
    r.v = f;
    for (int i = 0; i < n; ++i) r.g[i] = d1 * a.g[i];
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const int c = sym_index(n, i, j);
            r.h[c] = d2 * a.g[i] * a.g[j] + d1 * a.h[c];
        }
    return r;
}

inline Jet2 exp(const Jet2& a) {
    const double e = std::exp(a.v);
    return compose(a, e, e, e);
}

inline Jet2 sin(const Jet2& a) { return compose(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
inline Jet2 cos(const Jet2& a) { return compose(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }

inline Jet2 softplus(const Jet2& a) {
    const double x = a.v;
    const double f = x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
    const double s = x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
    return compose(a, f, s, s * (1.0 - s));
}

inline Jet2 tanh(const Jet2& a) {
    const double t = std::tanh(a.v);
    return compose(a, t, 1.0 - t * t, -2.0 * t * (1.0 - t * t));
}

} // namespace glnn::ad
