#pragma once

// Dense exact linear algebra over Q and Z for the small systems that polytope
// combinatorics produces (n <= ~6, a few dozen rows).

#include "toricgh/rational.hpp"

#include <optional>
#include <vector>

namespace toricgh {

using RMatrix = std::vector<RVector>;  // row-major, rows of equal length
using IMatrix = std::vector<IVector>;

std::size_t rank(RMatrix rows);

/// Solves the square system A x = b; nullopt when A is singular.
std::optional<RVector> solve(RMatrix a, RVector b);

Rational determinant(RMatrix a);
Integer determinant(const IMatrix& a);

/// Basis of the right null space {x : A x = 0}, one vector per free column.
std::vector<RVector> nullspace(const RMatrix& a, std::size_t cols);

/// Affine dimension of a finite point set (-1 for the empty set).
int affine_dimension(const std::vector<RVector>& points);

IMatrix multiply(const IMatrix& a, const IMatrix& b);
IMatrix transpose(const IMatrix& a);
IMatrix identity_matrix(std::size_t n);

/// Inverse of a unimodular integer matrix. Throws InvalidInput if |det| != 1.
IMatrix unimodular_inverse(const IMatrix& a);

/// Smith normal form D = U A V with U, V unimodular.
struct SmithForm {
    IMatrix d;
    IMatrix u;
    IMatrix v;
    std::vector<Integer> divisors;  // nonzero diagonal entries, d_1 | d_2 | ...
};
SmithForm smith_normal_form(const IMatrix& a);

/// Row-style Hermite normal form of the lattice spanned by the given row vectors
/// (zero rows dropped, pivots positive, entries above pivots reduced into [0, pivot)).
IMatrix hermite_normal_form(IMatrix rows);

}  // namespace toricgh
