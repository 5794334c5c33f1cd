#pragma once

#include "hopinf/types.hpp"

namespace hopinf {

enum class SymmetryKind { Symmetric, Skew };

struct SvdResult {
  Matrix U;      // thin left singular vectors
  Vector sigma;  // nonincreasing
  Matrix Vt;
};

// Block (i,j) of the result is a_ij * B.
Matrix kron(const Matrix& A, const Matrix& B);

// Column stacking.
Vector vec(const Matrix& A);
Matrix unvec(const Vector& v, Index m, Index n);

// K with K * vec(X) = vec(X^T) for every m x n matrix X.
Matrix commutation_matrix(Index m, Index n);
SparseMatrix commutation_matrix_sparse(Index m, Index n);

SvdResult svd(const Matrix& A);

// A (x) B + B (x) A.
Matrix oplus_bar(const Matrix& A, const Matrix& B);

// argmin_D ||Xt - D X||^2 + eta ||D||^2.
Matrix lstsq_opinf(const Matrix& Xt, const Matrix& X, double eta);

// argmin over D = +-D^T of ||C - A D B||^2 + eta ||D||^2.
Matrix constrained_lstsq(const Matrix& A, const Matrix& B, const Matrix& C,
                         SymmetryKind kind, double eta);

// Solves (G oplus_bar S + 2 eta I) vec D = vec(R) over matrices of the given
// symmetry class. G and S must be symmetric; R should already lie in the class.
// This is the normal-equation core shared by constrained_lstsq and the
// approximate canonical inference.
Matrix solve_oplus_normal(const Matrix& G, const Matrix& S, const Matrix& R,
                          SymmetryKind kind, double eta);

// Symmetric or skew part.
Matrix symmetry_part(const Matrix& D, SymmetryKind kind);

// Frobenius-relative difference ||A - B|| / ||B||  (absolute when B = 0).
double rel_diff(const Matrix& A, const Matrix& B);

}  // namespace hopinf
