#include "riskopt/harness/io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <stdexcept>

namespace riskopt::harness {

namespace pt = boost::property_tree;

namespace {

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + num(v[i]);
  return out;
}

std::vector<double> split_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    out.push_back(std::stod(item, &used));
    if (item.find_first_not_of(" \t", used) != std::string::npos)
      throw std::invalid_argument("config: bad number '" + item + "'");
  }
  return out;
}

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"problem", {"id", "mesh_resolution", "truncation_lower", "truncation_upper", "threads"}},
      {"formulation", {"id", "alpha", "beta", "threshold", "budget", "samples", "seed", "initial_design"}},
      {"solver",
       {"kind", "max_evals", "initial_trust_radius", "final_trust_radius", "feasibility_tol", "smoothing_schedule",
        "seed"}},
      {"sampling", {"pof_target_rel_err", "pof_initial", "pof_cap", "eval_samples", "eval_seed"}},
  };
  return keys;
}

template <typename T>
T parse_value(const pt::ptree& tree, const std::string& path) {
  try {
    return tree.get<T>(path);
  } catch (const pt::ptree_bad_data&) {
    throw std::invalid_argument("config: bad value for " + path);
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace

void write_config(std::ostream& out, const RunConfig& config) {
  const auto& s = config.spec;
  out << "[problem]\n";
  out << "id = " << config.problem_id << "\n";
  out << "mesh_resolution = " << config.options.mesh_resolution << "\n";
  out << "truncation_lower = " << num(config.options.truncation.lower_sigmas) << "\n";
  out << "truncation_upper = " << num(config.options.truncation.upper_sigmas) << "\n";
  out << "threads = " << config.options.threads << "\n";
  out << "\n[formulation]\n";
  out << "id = " << to_string(s.id) << "\n";
  out << "alpha = " << num(s.alpha) << "\n";
  out << "beta = " << num(s.beta) << "\n";
  if (s.threshold) out << "threshold = " << num(*s.threshold) << "\n";
  if (s.budget) out << "budget = " << num(*s.budget) << "\n";
  out << "samples = " << s.samples << "\n";
  out << "seed = " << s.seed << "\n";
  if (s.initial_design) out << "initial_design = " << join(*s.initial_design) << "\n";
  out << "\n[solver]\n";
  out << "kind = " << to_string(s.solver) << "\n";
  if (s.solver_config) {
    const auto& c = *s.solver_config;
    out << "max_evals = " << c.max_evals << "\n";
    out << "initial_trust_radius = " << num(c.initial_trust_radius) << "\n";
    out << "final_trust_radius = " << num(c.final_trust_radius) << "\n";
    out << "feasibility_tol = " << num(c.feasibility_tol) << "\n";
    out << "smoothing_schedule = " << join(c.smoothing_schedule) << "\n";
    out << "seed = " << c.seed << "\n";
  }
  out << "\n[sampling]\n";
  out << "pof_target_rel_err = " << num(s.pof_target_rel_err) << "\n";
  out << "pof_initial = " << s.pof_initial << "\n";
  out << "pof_cap = " << s.pof_cap << "\n";
  out << "eval_samples = " << s.eval_samples << "\n";
  if (s.eval_seed) out << "eval_seed = " << *s.eval_seed << "\n";
}

RunConfig read_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) throw std::invalid_argument("config: unknown section [" + section + "]");
    for (const auto& [key, value] : body)
      if (!it->second.count(key)) throw std::invalid_argument("config: unknown key " + section + "." + key);
  }

  RunConfig c;
  c.problem_id = tree.get<std::string>("problem.id", c.problem_id);
  if (tree.get_optional<std::string>("problem.mesh_resolution"))
    c.options.mesh_resolution = parse_value<std::size_t>(tree, "problem.mesh_resolution");
  if (tree.get_optional<std::string>("problem.truncation_lower"))
    c.options.truncation.lower_sigmas = parse_value<double>(tree, "problem.truncation_lower");
  if (tree.get_optional<std::string>("problem.truncation_upper"))
    c.options.truncation.upper_sigmas = parse_value<double>(tree, "problem.truncation_upper");
  if (tree.get_optional<std::string>("problem.threads"))
    c.options.threads = parse_value<unsigned>(tree, "problem.threads");

  auto& s = c.spec;
  if (const auto id = tree.get_optional<std::string>("formulation.id")) s.id = parse_formulation(*id);
  if (tree.get_optional<std::string>("formulation.alpha")) s.alpha = parse_value<double>(tree, "formulation.alpha");
  if (tree.get_optional<std::string>("formulation.beta")) s.beta = parse_value<double>(tree, "formulation.beta");
  if (tree.get_optional<std::string>("formulation.threshold"))
    s.threshold = parse_value<double>(tree, "formulation.threshold");
  if (tree.get_optional<std::string>("formulation.budget")) s.budget = parse_value<double>(tree, "formulation.budget");
  if (tree.get_optional<std::string>("formulation.samples"))
    s.samples = parse_value<std::size_t>(tree, "formulation.samples");
  if (tree.get_optional<std::string>("formulation.seed")) s.seed = parse_value<std::uint64_t>(tree, "formulation.seed");
  if (const auto d = tree.get_optional<std::string>("formulation.initial_design")) s.initial_design = split_doubles(*d);

  if (const auto kind = tree.get_optional<std::string>("solver.kind")) s.solver = parse_solver(*kind);
  const auto solver = tree.get_child_optional("solver");
  if (solver && (solver->size() > (tree.get_optional<std::string>("solver.kind") ? 1u : 0u))) {
    SolverConfig cfg;
    if (tree.get_optional<std::string>("solver.max_evals"))
      cfg.max_evals = parse_value<std::size_t>(tree, "solver.max_evals");
    if (tree.get_optional<std::string>("solver.initial_trust_radius"))
      cfg.initial_trust_radius = parse_value<double>(tree, "solver.initial_trust_radius");
    if (tree.get_optional<std::string>("solver.final_trust_radius"))
      cfg.final_trust_radius = parse_value<double>(tree, "solver.final_trust_radius");
    if (tree.get_optional<std::string>("solver.feasibility_tol"))
      cfg.feasibility_tol = parse_value<double>(tree, "solver.feasibility_tol");
    if (const auto sched = tree.get_optional<std::string>("solver.smoothing_schedule"))
      cfg.smoothing_schedule = split_doubles(*sched);
    if (tree.get_optional<std::string>("solver.seed")) cfg.seed = parse_value<std::uint64_t>(tree, "solver.seed");
    s.solver_config = cfg;
  }

  if (tree.get_optional<std::string>("sampling.pof_target_rel_err"))
    s.pof_target_rel_err = parse_value<double>(tree, "sampling.pof_target_rel_err");
  if (tree.get_optional<std::string>("sampling.pof_initial"))
    s.pof_initial = parse_value<std::size_t>(tree, "sampling.pof_initial");
  if (tree.get_optional<std::string>("sampling.pof_cap"))
    s.pof_cap = parse_value<std::size_t>(tree, "sampling.pof_cap");
  if (tree.get_optional<std::string>("sampling.eval_samples"))
    s.eval_samples = parse_value<std::size_t>(tree, "sampling.eval_samples");
  if (tree.get_optional<std::string>("sampling.eval_seed"))
    s.eval_seed = parse_value<std::uint64_t>(tree, "sampling.eval_seed");
  s.validate();
  return c;
}

RunConfig read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  return read_config(in);
}

void write_trace_csv(std::ostream& out, const SolveTrace& trace) {
  const std::size_t n = trace.iterates.empty() ? trace.x.size() : trace.iterates.front().x.size();
  out << "eval";
  for (std::size_t j = 0; j < n; ++j) out << ",d" << j + 1;
  out << ",objective,max_violation\n";
  for (std::size_t i = 0; i < trace.iterates.size(); ++i) {
    const auto& it = trace.iterates[i];
    out << i;
    for (double v : it.x) out << ',' << num(v);
    out << ',' << num(it.objective) << ',' << num(it.max_violation) << '\n';
  }
}

void write_certificates_json(std::ostream& out, const OptimizationRun& run) {
  const auto& c = run.certificates;
  nlohmann::ordered_json j;
  j["problem"] = run.problem_id;
  j["formulation"] = to_string(run.spec.id);
  j["solver"] = run.solver;
  j["termination"] = to_string(run.trace.termination_reason);
  j["eval_count"] = run.trace.eval_count;
  j["design"] = run.design;
  j["objective"] = run.objective;
  j["max_violation"] = run.trace.max_violation;
  j["certificates"] = {
      {"threshold", c.threshold},   {"alpha", c.alpha},
      {"pof", c.pof},               {"pof_std_error", c.pof_std_error},
      {"quantile", c.quantile},     {"superquantile", c.superquantile},
      {"bpof", c.bpof},             {"expected_objective", c.expected_objective},
      {"m_eval", c.m_eval},         {"seed", c.seed},
      {"stream", c.stream},
  };
  out << std::setw(2) << j << '\n';
}

void write_frontier_csv(std::ostream& out, const std::vector<FrontierCell>& cells) {
  std::size_t n = 0;
  for (const auto& c : cells)
    if (c.run) n = std::max(n, c.run->design.size());
  out << "formulation,alpha,pof_target,samples,seed,solver,status";
  for (std::size_t j = 0; j < n; ++j) out << ",d" << j + 1;
  out << ",objective,expected_objective,pof,bpof,quantile,superquantile,m_eval,error\n";
  for (const auto& c : cells) {
    out << to_string(c.formulation) << ',' << num(c.alpha) << ',' << num(1.0 - c.alpha) << ',' << c.samples << ','
        << c.seed << ',';
    if (c.run) {
      const auto& r = *c.run;
      const auto& k = r.certificates;
      out << r.solver << ',' << to_string(r.trace.termination_reason);
      for (std::size_t j = 0; j < n; ++j) out << ',' << (j < r.design.size() ? num(r.design[j]) : "");
      out << ',' << num(r.objective) << ',' << num(k.expected_objective) << ',' << num(k.pof) << ',' << num(k.bpof)
          << ',' << num(k.quantile) << ',' << num(k.superquantile) << ',' << k.m_eval << ",\n";
    } else {
      out << ",failed";
      for (std::size_t j = 0; j < n; ++j) out << ',';
      out << ",,,,,,,," << csv_field(c.error) << '\n';
    }
  }
}

void write_conservativeness_csv(std::ostream& out, const std::vector<ConservativenessRow>& rows, double alpha) {
  out << "variant,lower_sigmas,upper_sigmas,alpha,quantile,superquantile,percent_difference\n";
  for (const auto& r : rows)
    out << csv_field(r.variant.label) << ',' << num(r.variant.truncation.lower_sigmas) << ','
        << num(r.variant.truncation.upper_sigmas) << ',' << num(alpha) << ',' << num(r.quantile) << ','
        << num(r.superquantile) << ',' << num(r.percent_difference) << '\n';
}

void write_histograms_csv(std::ostream& out, const std::vector<ConservativenessRow>& rows) {
  out << "variant,bin_lower,bin_upper,count\n";
  for (const auto& r : rows)
    for (std::size_t k = 0; k < r.histogram.counts.size(); ++k)
      out << csv_field(r.variant.label) << ',' << num(r.histogram.edges[k]) << ',' << num(r.histogram.edges[k + 1])
          << ',' << r.histogram.counts[k] << '\n';
}

void write_remark4_csv(std::ostream& out, const std::vector<Remark4Row>& rows) {
  out << "t,analytic_pof,analytic_bpof,sampled_pof,sampled_bpof\n";
  for (const auto& r : rows)
    out << num(r.t) << ',' << num(r.analytic_pof) << ',' << num(r.analytic_bpof) << ',' << num(r.sampled_pof) << ','
        << num(r.sampled_bpof) << '\n';
}

std::filesystem::path make_run_directory(const std::filesystem::path& root, const std::string& label) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  std::ostringstream stamp;
  stamp << std::put_time(&utc, "%Y%m%dT%H%M%SZ");
  std::filesystem::create_directories(root);
  for (int k = 0;; ++k) {
    auto dir = root / (stamp.str() + "-" + label + (k ? "-" + std::to_string(k) : ""));
    if (std::filesystem::create_directory(dir)) return dir;
  }
}

void persist_run(const std::filesystem::path& dir, const RunConfig& config, const OptimizationRun& run) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    return f;
  };
  auto cfg = open("config.ini");
  write_config(cfg, config);
  auto trace = open("trace.csv");
  write_trace_csv(trace, run.trace);
  auto cert = open("certificates.json");
  write_certificates_json(cert, run);
}

}  // namespace riskopt::harness
