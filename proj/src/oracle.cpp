#include "vmlab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <queue>

#include <boost/math/quadrature/gauss.hpp>

#include "vmlab/errors.hpp"

namespace vmlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Length of the curve that is straight in (t, theta) from (t0, .) to (t1, .)
// with angular extent dth.
double straight_length(const ProfileModel& model, double t0, double t1, double dth) {
  if (dth == 0.0) return std::abs(t1 - t0);
  const double dt = t1 - t0;
  auto g = [&](double lam) {
    const double t = t0 + lam * dt;
    const double w = model.f(t) * dth;
    return std::sqrt(dt * dt + w * w);
  };
  return boost::math::quadrature::gauss<double, 20>::integrate(g, 0.0, 1.0);
}

}  // namespace

std::size_t RevolutionMesh::vertex(std::size_t ring, std::size_t j) const {
  if (ring == 0) return 0;
  return 1 + (ring - 1) * n_theta_ + (j % n_theta_);
}

PolarPoint RevolutionMesh::position(std::size_t v) const {
  if (v == 0) return {0.0, 0.0};
  const std::size_t ring = 1 + (v - 1) / n_theta_;
  const std::size_t j = (v - 1) % n_theta_;
  return {static_cast<double>(ring) * dt_, static_cast<double>(j) * dtheta_};
}

RevolutionMesh build_mesh(const ProfileModel& model, double t_max, std::size_t n_t,
                          std::size_t n_theta, int stencil) {
  if (n_t < 2) throw PreconditionError("mesh needs n_t >= 2");
  if (n_theta < 3) throw PreconditionError("mesh needs n_theta >= 3");
  if (!(t_max > 0.0)) throw PreconditionError("mesh needs t_max > 0");
  if (stencil < 1) throw PreconditionError("stencil must be at least 1");
  RevolutionMesh mesh;
  mesh.n_t_ = n_t;
  mesh.n_theta_ = n_theta;
  mesh.t_max_ = t_max;
  mesh.dt_ = t_max / static_cast<double>(n_t - 1);
  mesh.dtheta_ = 2.0 * std::numbers::pi / static_cast<double>(n_theta);
  // Cells are stretched by the aspect ratio f dtheta / dt; the radial reach
  // of the stencil grows with it so that near-radial directions stay
  // resolved. The ratio is invariant under nested refinement.
  double aspect = 0.0;
  for (std::size_t i = 1; i < n_t; ++i) {
    aspect = std::max(aspect, model.f(static_cast<double>(i) * mesh.dt_) * mesh.dtheta_ / mesh.dt_);
  }
  const int reach_t = stencil * static_cast<int>(std::clamp(std::ceil(aspect), 1.0, 16.0));
  // Primitive moves only: a multiple of a move is a path of copies of it.
  for (int di = -reach_t; di <= reach_t; ++di) {
    for (int dj = -stencil; dj <= stencil; ++dj) {
      if (std::gcd(std::abs(di), std::abs(dj)) != 1) continue;
      if (2 * std::abs(dj) > static_cast<int>(n_theta)) continue;
      mesh.moves_.push_back({di, dj});
    }
  }
  const std::size_t nm = mesh.moves_.size();
  mesh.weights_.assign(n_t * nm, kInf);
  for (std::size_t i = 1; i < n_t; ++i) {
    for (std::size_t k = 0; k < nm; ++k) {
      const MeshMove mv = mesh.moves_[k];
      const long target = static_cast<long>(i) + mv.di;
      if (target < 1 || target >= static_cast<long>(n_t)) continue;
      mesh.weights_[i * nm + k] = straight_length(model, static_cast<double>(i) * mesh.dt_,
                                                  static_cast<double>(target) * mesh.dt_,
                                                  mv.dj * mesh.dtheta_);
    }
  }
  return mesh;
}

SnappedPoint snap(const ProfileModel& model, const RevolutionMesh& mesh, PolarPoint p) {
  p = canonical(p);
  if (p.t > mesh.t_max() * (1.0 + 1e-12)) throw DomainError("point lies outside the mesh");
  const auto ring = static_cast<std::size_t>(std::llround(p.t / mesh.dt()));
  SnappedPoint s;
  if (ring == 0) {
    s.vertex = 0;
    s.at = {0.0, 0.0};
    s.error = p.t;
    return s;
  }
  const auto j = static_cast<std::size_t>(std::llround(p.theta / mesh.dtheta())) % mesh.n_theta();
  s.vertex = mesh.vertex(ring, j);
  s.at = mesh.position(s.vertex);
  s.error = straight_length(model, p.t, s.at.t, wrap_signed(s.at.theta - p.theta));
  return s;
}

namespace {

template <class Stop>
void dijkstra(const RevolutionMesh& mesh, std::size_t source, std::vector<double>& dist, Stop stop) {
  const std::size_t nth = mesh.n_theta();
  const auto& moves = mesh.moves();
  dist.assign(mesh.vertex_count(), kInf);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[source] = 0.0;
  pq.push({0.0, source});
  auto relax = [&](std::size_t v, double d) {
    if (d < dist[v]) {
      dist[v] = d;
      pq.push({d, v});
    }
  };
  while (!pq.empty()) {
    const auto [d, v] = pq.top();
    pq.pop();
    if (d > dist[v]) continue;
    if (stop(v)) return;
    if (v == 0) {
      for (std::size_t j = 0; j < nth; ++j) relax(mesh.vertex(1, j), d + mesh.dt());
      continue;
    }
    const std::size_t ring = 1 + (v - 1) / nth;
    const std::size_t j = (v - 1) % nth;
    if (ring == 1) relax(0, d + mesh.dt());
    for (std::size_t k = 0; k < moves.size(); ++k) {
      const double w = mesh.weight(ring, k);
      if (!std::isfinite(w)) continue;
      const std::size_t r2 = static_cast<std::size_t>(static_cast<long>(ring) + moves[k].di);
      const std::size_t j2 = static_cast<std::size_t>(static_cast<long>(j + nth) + moves[k].dj) % nth;
      relax(mesh.vertex(r2, j2), d + w);
    }
  }
}

}  // namespace

OracleDistance dijkstra_distance(const ProfileModel& model, const RevolutionMesh& mesh, PolarPoint a,
                                 PolarPoint b) {
  OracleDistance out;
  out.a = snap(model, mesh, a);
  out.b = snap(model, mesh, b);
  std::vector<double> dist;
  const std::size_t target = out.b.vertex;
  dijkstra(mesh, out.a.vertex, dist, [&](std::size_t v) { return v == target; });
  out.length = dist[target];
  return out;
}

std::vector<double> dijkstra_field(const RevolutionMesh& mesh, std::size_t source) {
  if (source >= mesh.vertex_count()) throw PreconditionError("source vertex out of range");
  std::vector<double> dist;
  dijkstra(mesh, source, dist, [](std::size_t) { return false; });
  return dist;
}

}  // namespace vmlab
