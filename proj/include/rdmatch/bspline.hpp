#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rdmatch {

/// Clamped knot vector for a degree-`degree` spline with `df` columns after
/// the first basis function is dropped (the `bs(x, df)` convention):
/// df - degree interior knots at equally spaced quantiles of `values`, and
/// the boundary knots min/max repeated degree + 1 times. Throws
/// DegenerateCovariate when `values` has zero spread and InvalidArgument
/// when df < degree.
std::vector<double> make_knots(std::span<const double> values, int df, int degree);

/// Number of basis functions on a clamped knot vector: knots - degree - 1.
std::size_t bspline_size(std::span<const double> knots, int degree);

/// Evaluates every B-spline basis function at x into `out` (length
/// bspline_size). x outside [first knot, last knot] is clamped to the
/// boundary. Uses the triangular Cox-de Boor scheme, so only the degree + 1
/// functions supported on x's knot span are touched.
void bspline_basis(double x, std::span<const double> knots, int degree, std::span<double> out);

}  // namespace rdmatch
