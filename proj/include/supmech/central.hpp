#pragma once

#include <map>
#include <vector>

#include "supmech/algebra.hpp"

namespace supmech {

/// Every supported algebra factors as (commutative polynomial part) ⊗ (matrix
/// part). A `CentralSplit` writes an element as a sum over monomials of the
/// commutative part, each carrying a matrix of the matrix part.
using CentralSplit = std::map<std::vector<int>, Matrix>;

/// Number of polynomial variables of the commutative part.
int central_variable_count(const AlgebraDescriptor& algebra);
/// Side length of the matrix part (1 when there is none).
int matrix_part_dimension(const AlgebraDescriptor& algebra);

CentralSplit split_central(const AlgebraElement& a);
/// Inverse of split_central.
AlgebraElement join_central(const AlgebraDescriptor& algebra, const CentralSplit& split);

/// The central element ξ^exponents ⊗ I.
AlgebraElement central_monomial(const AlgebraDescriptor& algebra, const std::vector<int>& exponents,
                                Complex coefficient = 1.0);
/// The central coordinate function with the given index (ξ^index ⊗ I).
AlgebraElement central_coordinate(const AlgebraDescriptor& algebra, int index);
/// Embedding of a matrix-part matrix as (1 ⊗ m).
AlgebraElement matrix_part_element(const AlgebraDescriptor& algebra, const Matrix& m);

/// If `a` is a scalar multiple of the unit, returns that scalar.
std::optional<Complex> scalar_value(const AlgebraElement& a, double tolerance);

}  // namespace supmech
