#pragma once

namespace glnn::ad {

// Packed storage of symmetric derivative tensors over n variables.
// Order 2: pairs (i,j) with i <= j, row-major upper triangle.
// Order 3: triples (i,j,k) with i <= j <= k.

constexpr int sym_count(int n) { return n * (n + 1) / 2; }

constexpr int sym_index(int n, int i, int j) {
    // requires i <= j < n
    return i * n - i * (i - 1) / 2 + (j - i);
}

constexpr int trip_count(int n) { return n * (n + 1) * (n + 2) / 6; }

constexpr int trip_index(int n, int i, int j, int k) {
    // requires i <= j <= k < n; offset of the (j,k) block within slice i
    const int tail = n - i;
    const int slice = trip_count(n) - trip_count(tail);
    return slice + sym_index(tail, j - i, k - i);
}

// Packed index for an unordered pair.
constexpr int sym_index_u(int n, int i, int j) {
    return i <= j ? sym_index(n, i, j) : sym_index(n, j, i);
}

// Packed index for an unordered triple.
constexpr int trip_index_u(int n, int i, int j, int k) {
    if (i > j) { const int t = i; i = j; j = t; }
    if (j > k) { const int t = j; j = k; k = t; }
    if (i > j) { const int t = i; i = j; j = t; }
    return trip_index(n, i, j, k);
}

} // namespace glnn::ad
