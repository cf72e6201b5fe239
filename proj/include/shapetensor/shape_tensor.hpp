#ifndef SHAPETENSOR_SHAPE_TENSOR_HPP
#define SHAPETENSOR_SHAPE_TENSOR_HPP

#include <vector>

#include "shapetensor/mesh.hpp"

namespace shapetensor {

// K = (grad u . grad y) I - grad y (x) grad u - grad u (x) grad y.
// Symmetric, and trace-free in 2D.
Mat2 shape_tensor(const Vec2& grad_u, const Vec2& grad_y);

// Elementwise constant K from P0 gradients of state and adjoint.
std::vector<Mat2> compute_K(const Mesh& m, const std::vector<Vec2>& grad_u,
                            const std::vector<Vec2>& grad_y);

// Closed forms for the radial benchmark on the disk of radius R > 1 centered
// at the origin, with f = -1/2 inside the unit circle and +1/2 outside. The
// disk of radius sqrt(2) is the stationary shape.
double example1_state(double R, const Vec2& x);
double example1_adjoint(double R, const Vec2& x);
Mat2 example1_shape_tensor(double R, const Vec2& x);

}  // namespace shapetensor

#endif
