#pragma once

#include "harnack/grid.hpp"

#include <functional>

namespace harnack {

// Second-order central differences with periodic wraparound. All operators are
// exact (identically zero) on constant fields.

VectorField gradient(const ScalarField& u);

/// Diagonal entries by central second differences, off-diagonal by nested
/// central first differences.
SymTensorField hessian(const ScalarField& u);

/// Sum of the 1-D central second differences (equal to the trace of hessian()).
ScalarField laplacian(const ScalarField& u);

/// L_f u = Lap u - <grad f, grad u>.
ScalarField weighted_laplacian(const ScalarField& u, const ScalarField& f);

/// Same, reusing a precomputed grad f.
ScalarField weighted_laplacian(const ScalarField& u, const VectorField& grad_f);

/// Pointwise <a, b>.
ScalarField dot(const VectorField& a, const VectorField& b);

/// Pointwise |v|^2.
ScalarField norm_squared(const VectorField& v);

/// Pointwise |T|^2 (Hilbert-Schmidt).
ScalarField frobenius_squared(const SymTensorField& t);

/// Samples a function of (x, y) on every node.
ScalarField sample(const Grid& grid, const std::function<double(double, double)>& fn, double t = 0.0);

/// Pointwise map of a scalar field.
ScalarField map(const ScalarField& u, const std::function<double(double)>& fn);

}  // namespace harnack
