#pragma once

#include <cstddef>
#include <vector>

#include "vmlab/geodesic.hpp"
#include "vmlab/profile.hpp"

namespace vmlab {

// Lattice move between vertices: di rings outward, dj steps in theta.
struct MeshMove {
  int di = 0;
  int dj = 0;
};

// Polar lattice t_i = i t_max / (n_t - 1), theta_j = 2 pi j / n_theta with a
// single pole vertex. Edges are implicit: every vertex off the pole connects
// through each stencil move, and the pole connects to ring 1 by meridians.
// An edge weight is the exact length of the coordinate-straight curve joining
// its ends, so every graph path is an admissible curve.
class RevolutionMesh {
public:
  std::size_t n_t() const { return n_t_; }
  std::size_t n_theta() const { return n_theta_; }
  double t_max() const { return t_max_; }
  double dt() const { return dt_; }
  double dtheta() const { return dtheta_; }
  std::size_t vertex_count() const { return 1 + (n_t_ - 1) * n_theta_; }
  const std::vector<MeshMove>& moves() const { return moves_; }

  std::size_t vertex(std::size_t ring, std::size_t j) const;
  PolarPoint position(std::size_t v) const;
  // Weight of move k leaving ring i; infinite when the move leaves the mesh.
  double weight(std::size_t ring, std::size_t k) const { return weights_[ring * moves_.size() + k]; }

private:
  friend RevolutionMesh build_mesh(const ProfileModel&, double, std::size_t, std::size_t, int);
  std::size_t n_t_ = 0, n_theta_ = 0;
  double t_max_ = 0.0, dt_ = 0.0, dtheta_ = 0.0;
  std::vector<MeshMove> moves_;
  std::vector<double> weights_;
};

// stencil bounds |dj| of the moves, and |di| up to stencil times the largest
// cell aspect ratio f dtheta / dt. With stencil 1 on square cells this is
// meridian, parallel and both diagonals.
RevolutionMesh build_mesh(const ProfileModel& model, double t_max, std::size_t n_t,
                          std::size_t n_theta, int stencil = 2);

struct SnappedPoint {
  std::size_t vertex = 0;
  PolarPoint at;       // vertex position
  double error = 0.0;  // length of the coordinate-straight curve to the vertex
};

SnappedPoint snap(const ProfileModel& model, const RevolutionMesh& mesh, PolarPoint p);

struct OracleDistance {
  double length = 0.0;  // graph distance between the snapped vertices
  SnappedPoint a, b;
  // length + a.error + b.error bounds d(a, b) from above.
  double upper() const { return length + a.error + b.error; }
};

OracleDistance dijkstra_distance(const ProfileModel& model, const RevolutionMesh& mesh, PolarPoint a,
                                 PolarPoint b);

// Graph distances from one vertex to all others.
std::vector<double> dijkstra_field(const RevolutionMesh& mesh, std::size_t source);

}  // namespace vmlab
