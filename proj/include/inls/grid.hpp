#pragma once

#include <memory>
#include <span>
#include <vector>

namespace inls {

// Surface measure of the unit sphere S^{N-1}: 2, 2 pi, 4 pi, 2 pi^2, 8 pi^2 / 3.
double unit_sphere_measure(int dimension);

// Cell-centered radial grid on [0, r_max].
//
//   nodes  r_j       = (j + 1/2) dr,             j = 0..M-1
//   faces  r_{j+1/2} = (j + 1) dr,               j = 0..M-1 (last face is r_max)
//   cell weights w_j = sigma_N r_j^{N-1} dr       (midpoint rule), except that
//                the last cell closes the sum to the exact ball volume
//   face weights W_f = N V_f dr / r_f,             V_f = sum_{k<=f} w_k
//
// W_f approximates sigma_N r_f^{N-1} dr (and equals it for N = 1, 2). The
// face weights define the discrete gradient norm and the finite-volume
// Laplacian; they are chosen so that the Laplacian is exact on r^2 away from
// the outer boundary and consistent at the origin cell.
class RadialGrid {
 public:
  RadialGrid(int dimension, double r_max, std::size_t cells);

  static std::shared_ptr<const RadialGrid> make(int dimension, double r_max, std::size_t cells) {
    return std::make_shared<const RadialGrid>(dimension, r_max, cells);
  }

  int dimension() const noexcept { return dimension_; }
  double r_max() const noexcept { return r_max_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  double dr() const noexcept { return dr_; }

  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<const double> faces() const noexcept { return faces_; }
  std::span<const double> face_weights() const noexcept { return face_weights_; }

  double node(std::size_t j) const { return nodes_[j]; }
  double weight(std::size_t j) const { return weights_[j]; }

  // Volume of the ball of radius r_max.
  double ball_volume() const noexcept;

  // Index of the first node with r_j > radius (size() if none).
  std::size_t first_node_beyond(double radius) const noexcept;

  bool operator==(const RadialGrid& other) const noexcept {
    return dimension_ == other.dimension_ && r_max_ == other.r_max_ && size() == other.size();
  }

 private:
  int dimension_;
  double r_max_;
  double dr_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> faces_;
  std::vector<double> face_weights_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

}  // namespace inls
