#include "riskopt/problems/cooling_fin.hpp"

#include <array>
#include <stdexcept>

#include "riskopt/parallel.hpp"

namespace riskopt {

namespace {

constexpr std::size_t kRowsPerBlock = 512;

std::array<double, 5> conductivities(std::span<const double> design, std::span<const double> z) {
  return {fin::Geometry::kPostConductivity + z[0], design[0] + z[1], design[1] + z[2], design[2] + z[3],
          design[3] + z[4]};
}

void check_design(std::span<const double> design) {
  if (design.size() != 4) throw std::invalid_argument("cooling fin: expects four conductivities");
}

}  // namespace

CoolingFinModel::CoolingFinModel(std::size_t resolution, FinTruncation truncation, unsigned threads)
    : resolution_(resolution),
      truncation_(truncation),
      threads_(threads == 0 ? default_thread_count() : threads),
      system_(fin::build_half_fin_mesh(resolution)),
      full_dofs_(fin::fin_mesh(resolution, false).nodes.size()) {
  if (!(truncation.lower_sigmas > 0.0) || !(truncation.upper_sigmas > 0.0))
    throw std::invalid_argument("cooling fin: truncation widths must be positive");
}

Box CoolingFinModel::design_bounds() const {
  return Box(std::vector<double>(4, fin::Geometry::kDesignLower), std::vector<double>(4, fin::Geometry::kDesignUpper));
}

std::vector<DistributionSpec> CoolingFinModel::input_distributions() const {
  std::vector<DistributionSpec> out;
  auto add = [&](double sigma) {
    out.push_back(DistributionSpec::truncated_normal(0.0, sigma, -truncation_.lower_sigmas * sigma,
                                                     truncation_.upper_sigmas * sigma));
  };
  for (int i = 0; i < 5; ++i) add(fin::Geometry::kConductivitySigma);
  add(fin::Geometry::kBiotSigma);
  return out;
}

ModelEvaluation CoolingFinModel::evaluate(std::span<const double> design, std::span<const double> z) const {
  check_design(design);
  fin::FemSystem::Solver solver(*system_);
  const auto s = solver.solve(conductivities(design, z), fin::Geometry::kBiot + z[5]);
  return {fin::fin_objective(design, s.root_average), s.max_temperature};
}

std::optional<double> CoolingFinModel::deterministic_objective(std::span<const double> design) const {
  check_design(design);
  const std::array<double, 6> nominal{};
  fin::FemSystem::Solver solver(*system_);
  const auto s = solver.solve(conductivities(design, nominal), fin::Geometry::kBiot);
  return fin::fin_objective(design, s.root_average);
}

template <typename Pick>
void CoolingFinModel::solve_rows(std::span<const double> design, const RandomBatch& batch, std::span<double> out,
                                 Pick pick) const {
  check_design(design);
  if (out.size() != batch.rows()) throw std::invalid_argument("cooling fin: output span size mismatch");
  const double cost = fin::fin_cost(design);
  parallel_for_blocks(batch.rows(), kRowsPerBlock, threads_, [&](std::size_t begin, std::size_t end) {
    fin::FemSystem::Solver solver(*system_);
    for (std::size_t i = begin; i < end; ++i) {
      const auto z = batch.row(i);
      out[i] = pick(solver.solve(conductivities(design, z), fin::Geometry::kBiot + z[5]), cost);
    }
  });
}

void CoolingFinModel::limit_states(std::span<const double> design, const RandomBatch& batch, std::span<double> g,
                                   std::span<double> grad) const {
  if (!grad.empty()) {
    StochasticModel::limit_states(design, batch, g, grad);
    return;
  }
  solve_rows(design, batch, g, [](const fin::FinSolution& s, double) { return s.max_temperature; });
}

void CoolingFinModel::objectives(std::span<const double> design, const RandomBatch& batch, std::span<double> f,
                                 std::span<double> grad) const {
  if (!grad.empty()) {
    StochasticModel::objectives(design, batch, f, grad);
    return;
  }
  solve_rows(design, batch, f, [](const fin::FinSolution& s, double cost) { return s.root_average + cost; });
}

}  // namespace riskopt
