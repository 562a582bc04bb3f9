#include "toricgh/exact_linalg.hpp"

#include "toricgh/error.hpp"

#include <algorithm>
#include <utility>

namespace toricgh {

namespace {

// Reduces `a` in place to reduced row echelon form, choosing pivots among the first
// `cols` columns and applying the row operations to every column; returns pivot columns.
std::vector<std::size_t> row_reduce(RMatrix& a, std::size_t cols) {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t c = 0; c < cols && row < a.size(); ++c) {
        std::size_t p = row;
        while (p < a.size() && a[p][c] == 0) ++p;
        if (p == a.size()) continue;
        std::swap(a[p], a[row]);
        const Rational inv = 1 / a[row][c];
        const std::size_t width = a[row].size();
        for (std::size_t j = c; j < width; ++j) a[row][j] *= inv;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (i == row || a[i][c] == 0) continue;
            const Rational f = a[i][c];
            for (std::size_t j = c; j < width; ++j) a[i][j] -= f * a[row][j];
        }
        pivots.push_back(c);
        ++row;
    }
    return pivots;
}

Integer floor_div(const Integer& a, const Integer& b) {
    Integer q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

void add_row_multiple(IMatrix& m, std::size_t dst, std::size_t src, const Integer& f) {
    if (f == 0) return;
    for (std::size_t j = 0; j < m[dst].size(); ++j) m[dst][j] += f * m[src][j];
}

void add_col_multiple(IMatrix& m, std::size_t dst, std::size_t src, const Integer& f) {
    if (f == 0) return;
    for (auto& row : m) row[dst] += f * row[src];
}

void swap_cols(IMatrix& m, std::size_t a, std::size_t b) {
    if (a == b) return;
    for (auto& row : m) std::swap(row[a], row[b]);
}

}  // namespace

std::size_t rank(RMatrix rows) {
    if (rows.empty()) return 0;
    return row_reduce(rows, rows.front().size()).size();
}

std::optional<RVector> solve(RMatrix a, RVector b) {
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i) a[i].push_back(b[i]);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && a[p][c] == 0) ++p;
        if (p == n) return std::nullopt;
        std::swap(a[p], a[c]);
        for (std::size_t i = c + 1; i < n; ++i) {
            if (a[i][c] == 0) continue;
            const Rational f = a[i][c] / a[c][c];
            for (std::size_t j = c; j <= n; ++j) a[i][j] -= f * a[c][j];
        }
    }
    RVector x(n);
    for (std::size_t i = n; i-- > 0;) {
        Rational s = a[i][n];
        for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
        x[i] = s / a[i][i];
    }
    return x;
}

Rational determinant(RMatrix a) {
    const std::size_t n = a.size();
    Rational det = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && a[p][c] == 0) ++p;
        if (p == n) return 0;
        if (p != c) {
            std::swap(a[p], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (std::size_t i = c + 1; i < n; ++i) {
            if (a[i][c] == 0) continue;
            const Rational f = a[i][c] / a[c][c];
            for (std::size_t j = c; j < n; ++j) a[i][j] -= f * a[c][j];
        }
    }
    return det;
}

Integer determinant(const IMatrix& a) {
    RMatrix r;
    r.reserve(a.size());
    for (const auto& row : a) r.push_back(to_rational(row));
    const Rational d = determinant(std::move(r));
    return boost::multiprecision::numerator(d);
}

std::vector<RVector> nullspace(const RMatrix& a, std::size_t cols) {
    RMatrix m = a;
    const auto pivots = row_reduce(m, cols);
    std::vector<bool> is_pivot(cols, false);
    for (auto p : pivots) is_pivot[p] = true;
    std::vector<RVector> basis;
    for (std::size_t free = 0; free < cols; ++free) {
        if (is_pivot[free]) continue;
        RVector v(cols, Rational(0));
        v[free] = 1;
        for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m[r][free];
        basis.push_back(std::move(v));
    }
    return basis;
}

int affine_dimension(const std::vector<RVector>& points) {
    if (points.empty()) return -1;
    RMatrix diffs;
    diffs.reserve(points.size() - 1);
    for (std::size_t i = 1; i < points.size(); ++i) {
        RVector d(points[i].size());
        for (std::size_t k = 0; k < d.size(); ++k) d[k] = points[i][k] - points[0][k];
        diffs.push_back(std::move(d));
    }
    return static_cast<int>(rank(std::move(diffs)));
}

IMatrix multiply(const IMatrix& a, const IMatrix& b) {
    const std::size_t inner = b.size();
    const std::size_t cols = inner == 0 ? 0 : b.front().size();
    IMatrix out(a.size(), IVector(cols, Integer(0)));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < inner; ++k)
            if (a[i][k] != 0)
                for (std::size_t j = 0; j < cols; ++j) out[i][j] += a[i][k] * b[k][j];
    return out;
}

IMatrix transpose(const IMatrix& a) {
    if (a.empty()) return {};
    IMatrix out(a.front().size(), IVector(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j) out[j][i] = a[i][j];
    return out;
}

IMatrix identity_matrix(std::size_t n) {
    IMatrix id(n, IVector(n, Integer(0)));
    for (std::size_t i = 0; i < n; ++i) id[i][i] = 1;
    return id;
}

IMatrix unimodular_inverse(const IMatrix& a) {
    const std::size_t n = a.size();
    const Integer det = determinant(a);
    if (boost::multiprecision::abs(det) != 1) fail(ErrorKind::InvalidInput, "matrix is not unimodular");
    RMatrix aug(n, RVector(2 * n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug[i][j] = a[i][j];
        aug[i][n + i] = 1;
    }
    row_reduce(aug, n);
    IMatrix inv(n, IVector(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv[i][j] = boost::multiprecision::numerator(aug[i][n + j]);
    return inv;
}

SmithForm smith_normal_form(const IMatrix& a) {
    const std::size_t m = a.size();
    const std::size_t n = m == 0 ? 0 : a.front().size();
    SmithForm s{a, identity_matrix(m), identity_matrix(n), {}};
    IMatrix& d = s.d;
    for (std::size_t t = 0; t < std::min(m, n); ++t) {
        for (;;) {
            // smallest nonzero entry of the trailing block becomes the pivot
            std::size_t pi = m, pj = n;
            for (std::size_t i = t; i < m; ++i)
                for (std::size_t j = t; j < n; ++j)
                    if (d[i][j] != 0 &&
                        (pi == m || boost::multiprecision::abs(d[i][j]) < boost::multiprecision::abs(d[pi][pj]))) {
                        pi = i;
                        pj = j;
                    }
            if (pi == m) return s;
            std::swap(d[t], d[pi]);
            std::swap(s.u[t], s.u[pi]);
            swap_cols(d, t, pj);
            swap_cols(s.v, t, pj);

            bool clean = true;
            for (std::size_t i = t + 1; i < m; ++i) {
                const Integer q = d[i][t] / d[t][t];
                add_row_multiple(d, i, t, -q);
                add_row_multiple(s.u, i, t, -q);
                if (d[i][t] != 0) clean = false;
            }
            for (std::size_t j = t + 1; j < n; ++j) {
                const Integer q = d[t][j] / d[t][t];
                add_col_multiple(d, j, t, -q);
                add_col_multiple(s.v, j, t, -q);
                if (d[t][j] != 0) clean = false;
            }
            if (!clean) continue;
            for (std::size_t i = t + 1; i < m && clean; ++i)
                for (std::size_t j = t + 1; j < n; ++j)
                    if (d[i][j] % d[t][t] != 0) {
                        add_row_multiple(d, t, i, 1);
                        add_row_multiple(s.u, t, i, 1);
                        clean = false;
                        break;
                    }
            if (clean) break;
        }
        if (d[t][t] < 0) {
            for (auto& e : d[t]) e = -e;
            for (auto& e : s.u[t]) e = -e;
        }
        s.divisors.push_back(d[t][t]);
    }
    return s;
}

IMatrix hermite_normal_form(IMatrix rows) {
    if (rows.empty()) return rows;
    const std::size_t n = rows.front().size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < n && r < rows.size(); ++c) {
        for (;;) {
            std::size_t p = rows.size();
            for (std::size_t k = r; k < rows.size(); ++k)
                if (rows[k][c] != 0 &&
                    (p == rows.size() || boost::multiprecision::abs(rows[k][c]) < boost::multiprecision::abs(rows[p][c])))
                    p = k;
            if (p == rows.size()) break;
            std::swap(rows[r], rows[p]);
            bool done = true;
            for (std::size_t k = r + 1; k < rows.size(); ++k) {
                if (rows[k][c] == 0) continue;
                add_row_multiple(rows, k, r, -floor_div(rows[k][c], rows[r][c]));
                if (rows[k][c] != 0) done = false;
            }
            if (done) break;
        }
        if (rows[r][c] == 0) continue;
        if (rows[r][c] < 0)
            for (auto& e : rows[r]) e = -e;
        for (std::size_t k = 0; k < r; ++k) add_row_multiple(rows, k, r, -floor_div(rows[k][c], rows[r][c]));
        ++r;
    }
    rows.resize(r);
    return rows;
}

}  // namespace toricgh
