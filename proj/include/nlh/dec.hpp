#pragma once

// Exterior calculus on cubical complexes.
//
// Cochain values approximate form components: d divides the signed boundary
// sums by the spacing, and the Hodge star is an algebraic metric contraction
// collocated at the base vertex of each cell.  The codifferential is the
// adjoint of d for the diagonal metric-weighted inner product, which reduces
// to -div on 1-forms.

#include "nlh/cochain.hpp"

#include <vector>

namespace nlh::dec {

/// d: p-cochain -> (p+1)-cochain.
Cochain exterior_derivative(const Cochain& c);

/// *: p-cochain -> (n-p)-cochain.  On periodic flat grids star(star(c)) is
/// exactly (-1)^{p(n-p)} c.  On boxes source indices are clamped to the
/// nearest existing cell, so the involution holds on cells away from the
/// upper faces.
Cochain hodge_star(const Cochain& c);

/// delta: p-cochain -> (p-1)-cochain, the weighted adjoint of d.
Cochain codifferential(const Cochain& c);

/// Inner-product weights of the p-cells: vol * sqrt(g) * det(g^{-1}[S,S]),
/// metric averaged over the cell's vertices.
std::vector<double> cell_weights(const Complex& k, int p);

/// Weighted L2 inner product sum_cells w * <a, b>.
double inner_product(const Cochain& a, const Cochain& b);
double norm_squared(const Cochain& a);

enum class QAggregation {
  /// Average each component over the incident p-cells of a top cell, then
  /// contract with the inverse metric.
  AverageComponents,
  /// Average |component|^2 over incident cells of each orientation (diagonal
  /// metric weights); invariant under pointwise conjugation of the values.
  MeanOfSquares,
};

/// Q = <c, c> per top cell, returned as an n-cochain with one component.
Cochain pointwise_Q(const Cochain& c, QAggregation mode = QAggregation::AverageComponents);

/// Components of c averaged to the centre of each top cell (one block of
/// C(n,p)*components values per top cell, orientations in complex order).
std::vector<double> cell_averaged_components(const Cochain& c);

/// Indices of the cells of degree p whose centres lie within `radius` of
/// `center` (ties included).  Throws BallError when the ball leaves the box.
std::vector<std::size_t> discrete_ball(const Complex& k, int p, const Point& center, double radius);

/// Largest radius for which the ball around `center` stays in the box.
double max_ball_radius(const Complex& k, const Point& center);

/// sum over the ball of vol * |f - mean_ball(f)|^2, mean taken per orientation and component.
double campanato_seminorm(const Cochain& field, const Point& center, double radius);

}  // namespace nlh::dec
