#include "riskopt/problems/fin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace riskopt::fin {

double TriMesh::element_area(std::size_t e) const {
  const auto& [a, b, c] = elements[e];
  const auto& p = nodes[a];
  const auto& q = nodes[b];
  const auto& r = nodes[c];
  return 0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (r[0] - p[0]) * (q[1] - p[1]));
}

double TriMesh::total_area() const {
  double s = 0.0;
  for (std::size_t e = 0; e < elements.size(); ++e) s += element_area(e);
  return s;
}

TriMesh mesh_rectangles(std::span<const Rect> rects, double h,
                        const std::function<EdgeTag(double, double, double, double)>& tag) {
  if (rects.empty()) throw std::invalid_argument("mesh_rectangles: no rectangles");
  if (!(h > 0.0)) throw std::invalid_argument("mesh_rectangles: element size must be positive");
  constexpr double inf = std::numeric_limits<double>::infinity();
  double xmin = inf, xmax = -inf, ymin = inf, ymax = -inf;
  for (const auto& r : rects) {
    xmin = std::min(xmin, r.x0);
    xmax = std::max(xmax, r.x1);
    ymin = std::min(ymin, r.y0);
    ymax = std::max(ymax, r.y1);
  }
  const auto nx = static_cast<std::size_t>(std::llround((xmax - xmin) / h));
  const auto ny = static_cast<std::size_t>(std::llround((ymax - ymin) / h));
  for (const auto& r : rects) {
    for (double v : {(r.x0 - xmin) / h, (r.x1 - xmin) / h, (r.y0 - ymin) / h, (r.y1 - ymin) / h})
      if (std::abs(v - std::round(v)) > 1e-9) throw std::invalid_argument("mesh_rectangles: rectangles are not grid-aligned");
  }

  auto region_of = [&](std::size_t i, std::size_t j) {
    const double xc = xmin + (static_cast<double>(i) + 0.5) * h;
    const double yc = ymin + (static_cast<double>(j) + 0.5) * h;
    for (const auto& r : rects)
      if (xc > r.x0 && xc < r.x1 && yc > r.y0 && yc < r.y1) return r.region;
    return -1;
  };
  std::vector<int> cell(nx * ny);
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) cell[j * nx + i] = region_of(i, j);
  auto inside = [&](long i, long j) {
    return i >= 0 && j >= 0 && i < static_cast<long>(nx) && j < static_cast<long>(ny) &&
           cell[static_cast<std::size_t>(j) * nx + static_cast<std::size_t>(i)] >= 0;
  };

  TriMesh mesh;
  std::vector<std::size_t> corner((nx + 1) * (ny + 1), SIZE_MAX);
  auto corner_id = [&](std::size_t i, std::size_t j) {
    auto& id = corner[j * (nx + 1) + i];
    if (id == SIZE_MAX) {
      id = mesh.nodes.size();
      mesh.nodes.push_back({xmin + static_cast<double>(i) * h, ymin + static_cast<double>(j) * h});
    }
    return id;
  };

  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const int reg = cell[j * nx + i];
      if (reg < 0) continue;
      const std::size_t c00 = corner_id(i, j);
      const std::size_t c10 = corner_id(i + 1, j);
      const std::size_t c11 = corner_id(i + 1, j + 1);
      const std::size_t c01 = corner_id(i, j + 1);
      const std::size_t mid = mesh.nodes.size();
      mesh.nodes.push_back({xmin + (static_cast<double>(i) + 0.5) * h, ymin + (static_cast<double>(j) + 0.5) * h});
      for (const auto& tri : {std::array<std::size_t, 3>{c00, c10, mid}, std::array<std::size_t, 3>{c10, c11, mid},
                              std::array<std::size_t, 3>{c11, c01, mid}, std::array<std::size_t, 3>{c01, c00, mid}}) {
        mesh.elements.push_back(tri);
        mesh.region.push_back(reg);
      }
      const long li = static_cast<long>(i);
      const long lj = static_cast<long>(j);
      struct Side {
        std::size_t a, b;
        long ni, nj;
        double nx, ny;
      };
      for (const Side& s : {Side{c00, c10, li, lj - 1, 0.0, -1.0}, Side{c10, c11, li + 1, lj, 1.0, 0.0},
                            Side{c11, c01, li, lj + 1, 0.0, 1.0}, Side{c01, c00, li - 1, lj, -1.0, 0.0}}) {
        if (inside(s.ni, s.nj)) continue;
        const double xm = 0.5 * (mesh.nodes[s.a][0] + mesh.nodes[s.b][0]);
        const double ym = 0.5 * (mesh.nodes[s.a][1] + mesh.nodes[s.b][1]);
        mesh.boundary.push_back({s.a, s.b, tag(xm, ym, s.nx, s.ny)});
      }
    }
  }
  return mesh;
}

std::vector<Rect> fin_rectangles(bool half) {
  using G = Geometry;
  std::vector<Rect> rects;
  rects.push_back({half ? 0.0 : -G::kPostHalfWidth, G::kPostHalfWidth, 0.0, G::kPostHeight, 0});
  for (std::size_t i = 0; i < G::kFinBottom.size(); ++i) {
    const double y0 = G::kFinBottom[i];
    const double y1 = y0 + G::kFinThickness;
    const int region = static_cast<int>(i) + 1;
    if (!half) rects.push_back({-G::kPostHalfWidth - G::kFinLength, -G::kPostHalfWidth, y0, y1, region});
    rects.push_back({G::kPostHalfWidth, G::kPostHalfWidth + G::kFinLength, y0, y1, region});
  }
  return rects;
}

TriMesh fin_mesh(std::size_t resolution, bool half) {
  if (resolution == 0) throw std::invalid_argument("fin_mesh: resolution must be at least 1");
  const auto rects = fin_rectangles(half);
  return mesh_rectangles(rects, Geometry::element_size(resolution), [half](double xm, double ym, double nx, double) {
    if (ym == 0.0 && std::abs(xm) < Geometry::kPostHalfWidth) return EdgeTag::Root;
    if (half && xm == 0.0 && nx < 0.0) return EdgeTag::Insulated;
    return EdgeTag::Exterior;
  });
}

void write_mesh(std::ostream& os, const TriMesh& mesh) {
  os.precision(17);
  os << "nodes " << mesh.nodes.size() << '\n';
  for (const auto& p : mesh.nodes) os << p[0] << ' ' << p[1] << '\n';
  os << "elements " << mesh.elements.size() << '\n';
  for (std::size_t e = 0; e < mesh.elements.size(); ++e)
    os << mesh.elements[e][0] << ' ' << mesh.elements[e][1] << ' ' << mesh.elements[e][2] << ' ' << mesh.region[e]
       << '\n';
  os << "boundary " << mesh.boundary.size() << '\n';
  for (const auto& b : mesh.boundary) {
    const char* tag = b.tag == EdgeTag::Root ? "root" : b.tag == EdgeTag::Exterior ? "exterior" : "insulated";
    os << b.a << ' ' << b.b << ' ' << tag << '\n';
  }
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

double edge_length(const TriMesh& m, std::size_t a, std::size_t b) {
  return std::hypot(m.nodes[b][0] - m.nodes[a][0], m.nodes[b][1] - m.nodes[a][1]);
}

}  // namespace

FemSystem::FemSystem(TriMesh mesh, std::size_t regions) : mesh_(std::move(mesh)), regions_(regions) {
  const auto n = static_cast<Eigen::Index>(mesh_.nodes.size());
  std::vector<Triplets> per_region(regions_);
  Triplets robin;
  Triplets all;
  for (std::size_t e = 0; e < mesh_.elements.size(); ++e) {
    const int reg = mesh_.region[e];
    if (reg < 0 || static_cast<std::size_t>(reg) >= regions_) throw std::invalid_argument("FemSystem: bad region tag");
    const double area = mesh_.element_area(e);
    if (!(area > 0.0)) throw std::invalid_argument("FemSystem: element with nonpositive area");
    const auto& v = mesh_.elements[e];
    std::array<double, 3> bx{}, by{};
    for (int k = 0; k < 3; ++k) {
      const auto& pj = mesh_.nodes[v[(k + 1) % 3]];
      const auto& pk = mesh_.nodes[v[(k + 2) % 3]];
      bx[k] = (pj[1] - pk[1]) / (2.0 * area);
      by[k] = (pk[0] - pj[0]) / (2.0 * area);
    }
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        if (v[a] < v[b]) continue;  // lower triangle only
        const double k = area * (bx[a] * bx[b] + by[a] * by[b]);
        per_region[static_cast<std::size_t>(reg)].emplace_back(v[a], v[b], k);
        all.emplace_back(v[a], v[b], 1.0);
      }
    }
  }
  load_ = Eigen::VectorXd::Zero(n);
  for (const auto& edge : mesh_.boundary) {
    const double len = edge_length(mesh_, edge.a, edge.b);
    if (edge.tag == EdgeTag::Exterior) {
      robin.emplace_back(edge.a, edge.a, 0.5 * len);
      robin.emplace_back(edge.b, edge.b, 0.5 * len);
      all.emplace_back(edge.a, edge.a, 1.0);
      all.emplace_back(edge.b, edge.b, 1.0);
    } else if (edge.tag == EdgeTag::Root) {
      load_[static_cast<Eigen::Index>(edge.a)] += 0.5 * len;
      load_[static_cast<Eigen::Index>(edge.b)] += 0.5 * len;
      root_edges_.push_back({edge.a, edge.b});
      root_edge_length_.push_back(len);
      root_length_ += len;
    }
  }
  if (root_edges_.empty()) throw std::invalid_argument("FemSystem: mesh has no root edges");

  pattern_.resize(n, n);
  pattern_.setFromTriplets(all.begin(), all.end());
  pattern_.makeCompressed();
  Eigen::SparseMatrix<double> zero = pattern_ * 0.0;

  auto aligned = [&](const Triplets& t) {
    Eigen::SparseMatrix<double> m(n, n);
    m.setFromTriplets(t.begin(), t.end());
    Eigen::SparseMatrix<double> sum = m + zero;
    sum.makeCompressed();
    if (sum.nonZeros() != pattern_.nonZeros()) throw std::logic_error("FemSystem: pattern mismatch");
    return std::vector<double>(sum.valuePtr(), sum.valuePtr() + sum.nonZeros());
  };
  for (const auto& t : per_region) region_values_.push_back(aligned(t));
  robin_values_ = aligned(robin);
}

Eigen::SparseMatrix<double> FemSystem::matrix(std::span<const double> kappa, double bi) const {
  if (kappa.size() != regions_) throw std::invalid_argument("FemSystem: one conductivity per region is required");
  Eigen::SparseMatrix<double> a = pattern_;
  double* v = a.valuePtr();
  const auto nnz = static_cast<std::size_t>(a.nonZeros());
  for (std::size_t k = 0; k < nnz; ++k) {
    double s = bi * robin_values_[k];
    for (std::size_t r = 0; r < regions_; ++r) s += kappa[r] * region_values_[r][k];
    v[k] = s;
  }
  return a;
}

double FemSystem::root_average(const Eigen::VectorXd& y) const {
  double s = 0.0;
  for (std::size_t e = 0; e < root_edges_.size(); ++e)
    s += 0.5 * (y[static_cast<Eigen::Index>(root_edges_[e][0])] + y[static_cast<Eigen::Index>(root_edges_[e][1])]) *
         root_edge_length_[e];
  return s / root_length_;
}

FemSystem::Solver::Solver(const FemSystem& system) : system_(&system), a_(system.pattern_) {
  llt_.analyzePattern(a_);
}

FinSolution FemSystem::Solver::solve(std::span<const double> kappa, double bi) {
  const auto& sys = *system_;
  if (kappa.size() != sys.regions_) throw std::invalid_argument("FemSystem: one conductivity per region is required");
  for (double k : kappa)
    if (!(k > 0.0)) throw std::domain_error("FemSystem: conductivities must be positive");
  if (!(bi > 0.0)) throw std::domain_error("FemSystem: Biot number must be positive");
  double* v = a_.valuePtr();
  const auto nnz = static_cast<std::size_t>(a_.nonZeros());
  const double* robin = sys.robin_values_.data();
  for (std::size_t k = 0; k < nnz; ++k) v[k] = bi * robin[k];
  for (std::size_t r = 0; r < sys.regions_; ++r) {
    const double kr = kappa[r];
    const double* rv = sys.region_values_[r].data();
    for (std::size_t k = 0; k < nnz; ++k) v[k] += kr * rv[k];
  }
  llt_.factorize(a_);
  if (llt_.info() != Eigen::Success) throw std::runtime_error("FemSystem: factorization failed");
  y_ = llt_.solve(sys.load_);
  Eigen::Index arg = 0;
  const double max_t = y_.maxCoeff(&arg);
  return {sys.root_average(y_), max_t, static_cast<std::size_t>(arg)};
}

std::shared_ptr<const FemSystem> build_fin_mesh(std::size_t resolution) {
  return std::make_shared<const FemSystem>(fin_mesh(resolution, false), Geometry::kRegions);
}

std::shared_ptr<const FemSystem> build_half_fin_mesh(std::size_t resolution) {
  return std::make_shared<const FemSystem>(fin_mesh(resolution, true), Geometry::kRegions);
}

FinSolution solve_fin(const FemSystem& system, std::span<const double> design, std::span<const double> z) {
  if (design.size() != 4 || z.size() != 6) throw std::invalid_argument("solve_fin: expects 4 conductivities and 6 perturbations");
  const std::array<double, 5> kappa = {Geometry::kPostConductivity + z[0], design[0] + z[1], design[1] + z[2],
                                       design[2] + z[3], design[3] + z[4]};
  FemSystem::Solver solver(system);
  return solver.solve(kappa, Geometry::kBiot + z[5]);
}

double fin_cost(std::span<const double> design) {
  constexpr double a0 = 2.0 * Geometry::kPostHalfWidth * Geometry::kPostHeight;
  constexpr double ai = 2.0 * Geometry::kFinLength * Geometry::kFinThickness;
  double num = Geometry::kPostConductivity * a0;
  for (double k : design) num += k * ai;
  return num / (5.0 * a0 + 10.0 * 4.0 * ai);
}

double fin_objective(std::span<const double> design, double root_average_at_mean) {
  return root_average_at_mean + fin_cost(design);
}

}  // namespace riskopt::fin
