#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "riskopt/problems/cooling_fin.hpp"
#include "riskopt/problems/fin.hpp"
#include "riskopt/problems/short_column.hpp"
#include "riskopt/risk.hpp"
#include "riskopt/stochastics.hpp"

using namespace riskopt;

namespace {

std::vector<double> random_design(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> k(1.0, 10.0);
  return {k(rng), k(rng), k(rng), k(rng)};
}

std::vector<double> fin_draw(const CoolingFinModel& model, std::uint64_t seed) {
  const auto b = sample_batch(model.input_distributions(), {}, 1, seed, 3);
  return {b.data().begin(), b.data().end()};
}

}  // namespace

TEST_CASE("short column limit state at the means is 0.65") {
  const std::vector<double> d{10, 20};
  const std::vector<double> z{500, 2000, 5};
  CHECK(short_column_limit_state(d, z) == 0.65);
  CHECK(short_column_limit_state(d, std::vector<double>{0, 0, 5}) == 0.0);
  CHECK(short_column_limit_state(d, std::vector<double>{500, 2000, 1e12}) < 1e-11);
  const auto [area, g] = short_column_convex_forms(std::vector<double>{std::log(10.0), std::log(20.0)}, z);
  CHECK(area == doctest::Approx(200.0).epsilon(1e-14));
  CHECK(g == doctest::Approx(0.65).epsilon(1e-14));
}

TEST_CASE("short column convex forms agree with the natural forms") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> w(5, 15), h(15, 25);
  const auto z = sample_batch(short_column_inputs(), short_column_correlation(), 10000, 2, 1);
  ShortColumnModel natural;
  for (std::size_t i = 0; i < z.rows(); ++i) {
    const std::vector<double> d{w(rng), h(rng)};
    const std::vector<double> x{std::log(d[0]), std::log(d[1])};
    const auto [area, g] = short_column_convex_forms(x, z.row(i));
    CHECK(area == doctest::Approx(d[0] * d[1]).epsilon(1e-12));
    CHECK(g == doctest::Approx(short_column_limit_state(d, z.row(i))).epsilon(1e-12));
    CHECK(natural.evaluate(d, z.row(i)).limit_state == short_column_limit_state(d, z.row(i)));
  }
}

TEST_CASE("short column convex forms are midpoint convex") {
  ShortColumnConvexModel model;
  const auto box = model.design_bounds();
  CHECK(box.lower[0] == std::log(5.0));
  CHECK(box.upper[0] == std::log(15.0));
  CHECK(box.lower[1] == std::log(15.0));
  CHECK(box.upper[1] == std::log(25.0));
  const auto z = sample_batch(short_column_inputs(), short_column_correlation(), 100, 3, 1);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  for (int seg = 0; seg < 1000; ++seg) {
    std::vector<double> x(2), y(2), mid(2);
    for (int j = 0; j < 2; ++j) {
      x[j] = box.lower[j] + u(rng) * (box.upper[j] - box.lower[j]);
      y[j] = box.lower[j] + u(rng) * (box.upper[j] - box.lower[j]);
      mid[j] = 0.5 * (x[j] + y[j]);
    }
    for (std::size_t i = 0; i < z.rows(); ++i) {
      const auto a = short_column_convex_forms(x, z.row(i));
      const auto b = short_column_convex_forms(y, z.row(i));
      const auto c = short_column_convex_forms(mid, z.row(i));
      CHECK(c.first <= 0.5 * (a.first + b.first) + 1e-9);
      CHECK(c.second <= 0.5 * (a.second + b.second) + 1e-9);
    }
  }
}

TEST_CASE("short column analytic gradients match central differences") {
  const auto z = sample_batch(short_column_inputs(), short_column_correlation(), 50, 5, 1);
  ShortColumnModel natural;
  ShortColumnConvexModel convex;
  for (const StochasticModel* model : {static_cast<const StochasticModel*>(&natural),
                                       static_cast<const StochasticModel*>(&convex)}) {
    const auto box = model->design_bounds();
    const std::vector<double> d{0.5 * (box.lower[0] + box.upper[0]), 0.3 * box.lower[1] + 0.7 * box.upper[1]};
    std::vector<double> g(z.rows()), grad(2 * z.rows());
    model->limit_states(d, z, g, grad);
    for (std::size_t i = 0; i < z.rows(); ++i)
      for (int j = 0; j < 2; ++j) {
        auto dp = d, dm = d;
        const double h = 1e-6 * std::max(1.0, std::abs(d[j]));
        dp[j] += h;
        dm[j] -= h;
        const double fd = (model->evaluate(dp, z.row(i)).limit_state - model->evaluate(dm, z.row(i)).limit_state) / (2 * h);
        CHECK(grad[i * 2 + j] == doctest::Approx(fd).epsilon(1e-5));
      }
    std::vector<double> og(2);
    model->deterministic_objective_gradient(d, og);
    for (int j = 0; j < 2; ++j) {
      auto dp = d, dm = d;
      const double h = 1e-6 * std::max(1.0, std::abs(d[j]));
      dp[j] += h;
      dm[j] -= h;
      const double fd = (*model->deterministic_objective(dp) - *model->deterministic_objective(dm)) / (2 * h);
      CHECK(og[j] == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("fin mesh: DOF counts, area and boundary tags") {
  const auto r1 = fin::build_fin_mesh(1);
  const auto r4 = fin::build_fin_mesh(4);
  CHECK(r1->dofs() >= 200);
  CHECK(r1->dofs() <= 800);
  const double ratio = static_cast<double>(r4->dofs()) / static_cast<double>(r1->dofs());
  CHECK(ratio >= 8.0);
  CHECK(ratio <= 32.0);
  CHECK(CoolingFinModel().full_dofs() >= 1000);
  CHECK(CoolingFinModel().full_dofs() <= 2000);

  // Post 1 x 4 plus eight 2.5 x 0.25 sub-fins.
  for (std::size_t res : {1u, 2u, 3u}) {
    const auto mesh = fin::fin_mesh(res, false);
    CHECK(std::abs(mesh.total_area() - 9.0) < 1e-10);
    CHECK(std::abs(fin::fin_mesh(res, true).total_area() - 4.5) < 1e-10);
    std::vector<double> region_area(fin::Geometry::kRegions, 0.0);
    for (std::size_t e = 0; e < mesh.elements.size(); ++e) region_area[mesh.region[e]] += mesh.element_area(e);
    CHECK(std::abs(region_area[0] - 4.0) < 1e-10);
    for (int r = 1; r <= 4; ++r) CHECK(std::abs(region_area[r] - 1.25) < 1e-10);
  }

  const auto mesh = fin::fin_mesh(2, false);
  // Every boundary edge appears once and is not shared by two elements.
  std::map<std::pair<std::size_t, std::size_t>, int> edge_use;
  for (const auto& el : mesh.elements)
    for (int k = 0; k < 3; ++k) {
      auto a = el[k], b = el[(k + 1) % 3];
      ++edge_use[{std::min(a, b), std::max(a, b)}];
    }
  std::set<std::pair<std::size_t, std::size_t>> tagged;
  double root_length = 0.0, perimeter = 0.0;
  for (const auto& be : mesh.boundary) {
    const auto key = std::make_pair(std::min(be.a, be.b), std::max(be.a, be.b));
    CHECK(tagged.insert(key).second);
    CHECK(edge_use[key] == 1);
    const auto& p = mesh.nodes[be.a];
    const auto& q = mesh.nodes[be.b];
    const double len = std::hypot(p[0] - q[0], p[1] - q[1]);
    perimeter += len;
    CHECK(be.tag != fin::EdgeTag::Insulated);
    if (be.tag == fin::EdgeTag::Root) {
      root_length += len;
      CHECK(p[1] == 0.0);
      CHECK(q[1] == 0.0);
    }
  }
  std::size_t boundary_edges = 0;
  for (const auto& [key, uses] : edge_use) boundary_edges += uses == 1;
  CHECK(tagged.size() == boundary_edges);
  CHECK(root_length == doctest::Approx(1.0).epsilon(1e-12));
  // Post sides and top plus each sub-fin's three free sides.
  CHECK(perimeter == doctest::Approx(1.0 + 2 * 4.0 + 1.0 + 8 * (2 * 2.5 + 0.25) - 8 * 0.25).epsilon(1e-12));

  std::ostringstream os;
  fin::write_mesh(os, mesh);
  CHECK(os.str().find("root") != std::string::npos);
  CHECK(os.str().size() > mesh.nodes.size() * 4);
}

TEST_CASE("fem patch test: linear solution on the post alone") {
  const std::vector<fin::Rect> post{{-0.5, 0.5, 0.0, 4.0, 0}};
  const auto mesh = fin::mesh_rectangles(post, 0.125, [](double, double ym, double, double ny) {
    if (ym == 0.0) return fin::EdgeTag::Root;
    if (ny > 0.5) return fin::EdgeTag::Exterior;
    return fin::EdgeTag::Insulated;
  });
  const fin::FemSystem system(mesh, 1);
  fin::FemSystem::Solver solver(system);
  for (auto [kappa, bi] : {std::pair{1.0, 1.0}, std::pair{3.7, 0.2}, std::pair{0.4, 5.0}}) {
    const std::vector<double> k{kappa};
    const auto sol = solver.solve(k, bi);
    const auto& y = solver.field();
    double err = 0.0;
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i)
      err = std::max(err, std::abs(y[i] - (1.0 / bi + (4.0 - mesh.nodes[i][1]) / kappa)));
    CHECK(err < 1e-10);
    CHECK(std::abs(sol.root_average - (1.0 / bi + 4.0 / kappa)) < 1e-10);
    CHECK(std::abs(sol.max_temperature - (1.0 / bi + 4.0 / kappa)) < 1e-10);
  }
}

TEST_CASE("fin: half-domain solve reproduces the full solve") {
  const auto full = fin::build_fin_mesh(2);
  const auto half = fin::build_half_fin_mesh(2);
  std::mt19937_64 rng(6);
  CoolingFinModel model;
  for (int rep = 0; rep < 10; ++rep) {
    const auto d = random_design(rng);
    const auto z = fin_draw(model, rep);
    const auto a = fin::solve_fin(*full, d, z);
    const auto b = fin::solve_fin(*half, d, z);
    CHECK(a.root_average == doctest::Approx(b.root_average).epsilon(1e-10));
    CHECK(a.max_temperature == doctest::Approx(b.max_temperature).epsilon(1e-10));
  }
}

TEST_CASE("fin: nominal solve is positive with the maximum on the root") {
  const auto system = fin::build_fin_mesh(2);
  const std::vector<double> d(4, 5.5), z(6, 0.0);
  const auto sol = fin::solve_fin(*system, d, z);
  CHECK(std::isfinite(sol.root_average));
  CHECK(sol.root_average > 0.0);
  CHECK(system->mesh().nodes[sol.argmax_node][1] == 0.0);
}

TEST_CASE("fin: maximum temperature lies on the root for random inputs") {
  const auto system = fin::build_half_fin_mesh(2);
  CoolingFinModel model;
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 200; ++rep) {
    const auto d = random_design(rng);
    const auto z = fin_draw(model, 1000 + rep);
    const auto sol = fin::solve_fin(*system, d, z);
    CHECK(system->mesh().nodes[sol.argmax_node][1] == 0.0);
  }
}

TEST_CASE("fin: root temperature decreases when any conductivity increases") {
  const auto system = fin::build_half_fin_mesh(2);
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> which(0, 3);
  std::uniform_real_distribution<double> bump(0.05, 2.0);
  const std::vector<double> z(6, 0.0);
  for (int rep = 0; rep < 50; ++rep) {
    auto d = random_design(rng);
    auto e = d;
    e[which(rng)] += bump(rng);
    CHECK(fin::solve_fin(*system, e, z).root_average < fin::solve_fin(*system, d, z).root_average);
  }
}

TEST_CASE("fin: refinement differences shrink") {
  const std::vector<double> d(4, 5.5), z(6, 0.0);
  std::vector<double> avg;
  for (std::size_t res : {1u, 2u, 4u, 8u}) avg.push_back(fin::solve_fin(*fin::build_half_fin_mesh(res), d, z).root_average);
  const double d1 = std::abs(avg[0] - avg[1]);
  const double d2 = std::abs(avg[1] - avg[2]);
  const double d3 = std::abs(avg[2] - avg[3]);
  CHECK(d2 < d1);
  CHECK(d3 < d2);
}

TEST_CASE("fin objective: cost normalization and the initial design") {
  CHECK(fin::fin_cost(std::vector<double>(4, 10.0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(fin::fin_cost(std::vector<double>(4, 1.0)) == doctest::Approx(25.0 / 70.0).epsilon(1e-15));
  CoolingFinModel model;
  const double initial = *model.deterministic_objective(std::vector<double>(4, 5.5));
  CHECK(std::abs(initial - 1.0141) < 0.05);
}

TEST_CASE("fin: superquantile of the maximum temperature decreases in each conductivity") {
  CoolingFinModel model(2, {}, 1);
  const auto batch = sample_batch(model.input_distributions(), {}, 200, 9, 3);
  std::mt19937_64 rng(10);
  std::uniform_int_distribution<int> which(0, 3);
  std::uniform_real_distribution<double> bump(0.05, 2.0);
  std::vector<double> g(batch.rows()), h(batch.rows());
  for (int rep = 0; rep < 50; ++rep) {
    auto d = random_design(rng);
    auto e = d;
    e[which(rng)] += bump(rng);
    model.limit_states(d, batch, g, {});
    model.limit_states(e, batch, h, {});
    CHECK(estimate_superquantile(SampleSet(h), 0.95).value < estimate_superquantile(SampleSet(g), 0.95).value);
  }
}

TEST_CASE("fin model: batch evaluation matches per-row solves for any thread count") {
  const auto d = std::vector<double>{3.0, 4.0, 1.5, 7.0};
  CoolingFinModel one(2, {}, 1);
  CoolingFinModel many(2, {}, 3);
  const auto batch = sample_batch(one.input_distributions(), {}, 1500, 11, 3);
  std::vector<double> a(batch.rows()), b(batch.rows()), f(batch.rows());
  one.limit_states(d, batch, a, {});
  many.limit_states(d, batch, b, {});
  many.objectives(d, batch, f, {});
  CHECK(a == b);
  for (std::size_t i = 0; i < batch.rows(); i += 97) {
    const auto ev = one.evaluate(d, batch.row(i));
    CHECK(ev.limit_state == a[i]);
    CHECK(ev.objective == f[i]);
  }
  for (const auto& spec : one.input_distributions()) {
    REQUIRE(spec.truncation);
    CHECK(spec.truncation->lo == doctest::Approx(-4.0 * spec.std_dev));
    CHECK(spec.truncation->hi == doctest::Approx(2.0 * spec.std_dev));
  }
}
