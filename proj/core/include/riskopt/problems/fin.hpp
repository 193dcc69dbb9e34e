#pragma once

#include <Eigen/SparseCore>
#include <Eigen/SparseCholesky>
#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace riskopt::fin {

/// Geometry and nominal parameters of the fin array: a 1 x 4 post on the root
/// edge with four pairs of 2.5 x 0.25 sub-fins, one pair per conductivity
/// region. Region 0 is the post; region i (1..4) is the i-th pair from the
/// bottom.
struct Geometry {
  static constexpr double kPostHalfWidth = 0.5;
  static constexpr double kPostHeight = 4.0;
  static constexpr double kFinLength = 2.5;
  static constexpr double kFinThickness = 0.25;
  /// Lower edge of each sub-fin pair; the top pair is flush with the post top.
  static constexpr std::array<double, 4> kFinBottom = {0.75, 1.75, 2.75, 3.75};
  static constexpr std::size_t kRegions = 5;

  static constexpr double kPostConductivity = 5.0;
  static constexpr double kBiot = 0.5;
  static constexpr double kDesignLower = 1.0;
  static constexpr double kDesignUpper = 10.0;
  static constexpr double kConductivitySigma = 0.1;
  static constexpr double kBiotSigma = 0.02;
  static constexpr double kThreshold = 0.35;

  /// Element size is kFinThickness / resolution.
  static double element_size(std::size_t resolution) { return kFinThickness / static_cast<double>(resolution); }
  /// Total area of post plus sub-fins.
  static double area() { return 2.0 * kPostHalfWidth * kPostHeight + 8.0 * kFinLength * kFinThickness; }
};

struct Rect {
  double x0, x1, y0, y1;
  int region;
};

enum class EdgeTag { Root, Exterior, Insulated };

struct BoundaryEdge {
  std::size_t a;
  std::size_t b;
  EdgeTag tag;
};

struct TriMesh {
  std::vector<std::array<double, 2>> nodes;
  std::vector<std::array<std::size_t, 3>> elements;
  std::vector<int> region;
  std::vector<BoundaryEdge> boundary;

  double element_area(std::size_t e) const;
  double total_area() const;
};

/// Criss-cross triangulation of a union of grid-aligned rectangles: every
/// h x h cell whose centre lies in a rectangle gets a centre node and four
/// triangles. `tag` classifies each boundary edge from its midpoint and
/// outward normal.
TriMesh mesh_rectangles(std::span<const Rect> rects, double h,
                        const std::function<EdgeTag(double xm, double ym, double nx, double ny)>& tag);

/// Rectangles of the fin array; `half` keeps only x >= 0.
std::vector<Rect> fin_rectangles(bool half);

/// Fin mesh at the given resolution. With `half`, only x >= 0 is meshed and
/// the symmetry line x = 0 is insulated.
TriMesh fin_mesh(std::size_t resolution, bool half);

/// Writes nodes, elements (with region) and boundary edges (with tag) as text.
void write_mesh(std::ostream& os, const TriMesh& mesh);

struct FinSolution {
  double root_average;
  double max_temperature;
  std::size_t argmax_node;
};

/// P1 steady conduction: -div(kappa grad y) = 0, unit inflow flux density on
/// root edges, lumped Robin kappa dy/dn + Bi y = 0 on exterior edges,
/// insulation elsewhere. The operator is sum_r kappa_r K_r + Bi K_B on one
/// shared sparsity pattern.
class FemSystem {
 public:
  FemSystem(TriMesh mesh, std::size_t regions);

  const TriMesh& mesh() const noexcept { return mesh_; }
  std::size_t dofs() const noexcept { return mesh_.nodes.size(); }
  std::size_t regions() const noexcept { return regions_; }
  double root_length() const noexcept { return root_length_; }
  const Eigen::VectorXd& load() const noexcept { return load_; }

  Eigen::SparseMatrix<double> matrix(std::span<const double> kappa, double bi) const;
  double root_average(const Eigen::VectorXd& y) const;

  /// Factorization workspace; the symbolic analysis is shared by all solves
  /// through one workspace. Not thread-safe; use one per thread.
  class Solver {
   public:
    explicit Solver(const FemSystem& system);
    FinSolution solve(std::span<const double> kappa, double bi);
    const Eigen::VectorXd& field() const noexcept { return y_; }

   private:
    const FemSystem* system_;
    Eigen::SparseMatrix<double> a_;
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower> llt_;
    Eigen::VectorXd y_;
  };

 private:
  TriMesh mesh_;
  std::size_t regions_;
  Eigen::SparseMatrix<double> pattern_;
  std::vector<std::vector<double>> region_values_;
  std::vector<double> robin_values_;
  Eigen::VectorXd load_;
  std::vector<std::array<std::size_t, 2>> root_edges_;
  std::vector<double> root_edge_length_;
  double root_length_ = 0.0;
};

/// Full fin system (both sides) at the given resolution.
std::shared_ptr<const FemSystem> build_fin_mesh(std::size_t resolution);
/// Half fin system (x >= 0, insulated symmetry line); same root average and
/// maximum as the full system.
std::shared_ptr<const FemSystem> build_half_fin_mesh(std::size_t resolution);

/// kappa = (k0 + xi0, k1 + xi1, ..., k4 + xi4), Bi = 0.5 + xi_Bi.
FinSolution solve_fin(const FemSystem& system, std::span<const double> design, std::span<const double> z);

/// Material cost term (k0 A0 + sum k_i A_i) / (5 A0 + 10 sum A_i).
double fin_cost(std::span<const double> design);
/// Root average at the nominal inputs plus the material cost.
double fin_objective(std::span<const double> design, double root_average_at_mean);

}  // namespace riskopt::fin
