// finfactor: command-line front end.
//
//   finfactor demo shift --k 5
//   finfactor demo hyperfinite --dims 3,3
//   finfactor demo nested-units --sizes 2,3
//   finfactor sparsity x1.json x2.json --k 2 --strategy combined
//   finfactor pipeline x.json --k 8 --out-dir run/
//   finfactor verify-all --seed 7
//
// Exit codes: 0 success, 1 usage or parse error, 2 precondition violation,
// 3 numerical failure (including failed verifications).

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "finfactor/acceptance.hpp"
#include "finfactor/finfactor.hpp"
#include "finfactor/instances.hpp"
#include "finfactor/io.hpp"

namespace fs = std::filesystem;
using namespace finfactor;
using io::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitPrecondition = 2;
constexpr int kExitNumerical = 3;

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::ParseError:
    case ErrorKind::UnknownStrategy:
      return kExitUsage;
    case ErrorKind::NumericalFailure:
      return kExitNumerical;
    default:
      return kExitPrecondition;
  }
}

struct Common {
  bool json_out = false;
  std::string out;      // report path
  std::string out_dir;  // matrix artifacts
  std::optional<double> eta;
  std::optional<double> structural_tol;
  std::optional<double> span_tol;

  Tolerances tolerances() const {
    Tolerances t;
    if (eta) t.zero_block_eta = *eta;
    if (structural_tol) t.structural_tol = *structural_tol;
    if (span_tol) t.span_tol = *span_tol;
    t.validate();
    return t;
  }
};

void add_common(CLI::App* cmd, Common& c, bool artifacts) {
  cmd->add_flag("--json", c.json_out, "Print the report as JSON");
  cmd->add_option("--out", c.out, "Also write the JSON report to this file");
  if (artifacts) cmd->add_option("--out-dir", c.out_dir, "Directory for matrix files");
  cmd->add_option("--eta", c.eta, "Relative threshold for a zero block");
  cmd->add_option("--structural-tol", c.structural_tol, "Projection/self-adjoint residual tolerance");
  cmd->add_option("--span-tol", c.span_tol, "Span membership tolerance");
}

void save_artifact(const Common& c, const std::string& name, const Matrix& x) {
  if (c.out_dir.empty()) return;
  fs::create_directories(c.out_dir);
  io::save_matrix((fs::path(c.out_dir) / name).string(), x);
}

void save_json_artifact(const Common& c, const std::string& name, const json& j) {
  if (c.out_dir.empty()) return;
  fs::create_directories(c.out_dir);
  io::write_file((fs::path(c.out_dir) / name).string(), j.dump(2) + "\n");
}

/// Writes the report file if requested and prints either the JSON or the
/// human-readable lines.
void emit(const Common& c, const json& report, const std::vector<std::string>& lines) {
  const std::string text = report.dump(2) + "\n";
  if (!c.out.empty()) io::write_file(c.out, text);
  if (c.json_out) {
    std::cout << text;
  } else {
    for (const auto& l : lines) std::cout << l << "\n";
  }
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

json rational(std::int64_t num, std::int64_t den) {
  const Rational r(num, den);
  return json{{"num", r.num()}, {"den", r.den()}, {"value", r.value()},
              {"text", std::to_string(num) + "/" + std::to_string(den)}};
}

GeneratorTuple load_tuple(const std::vector<std::string>& paths) {
  std::vector<Matrix> xs;
  std::vector<std::string> labels;
  for (const auto& p : paths) {
    xs.push_back(io::load_matrix(p));
    labels.push_back(fs::path(p).stem().string());
  }
  return GeneratorTuple(std::move(xs), std::move(labels));
}

// --- demo ------------------------------------------------------------------

int demo_shift(const Common& c, int k) {
  if (k < 2) throw Error(ErrorKind::SystemTooSmall, "--k must be >= 2");
  if (static_cast<Eigen::Index>(k) > dim_cap()) throw Error(ErrorKind::DimensionOverflow, "--k exceeds the cap");
  const Tolerances tol = c.tolerances();
  const MatrixUnitSystem sys = standard_units(k);
  auto [x1, x2] = shift_pair(sys);
  const AlgebraBasis a = generate({x1, x2}, tol);
  const bool generates = a.dim() == static_cast<Eigen::Index>(k) * k;
  const SparsityReport rep = interaction_index(GeneratorTuple({x1, x2}), diagonal_family(k, k), tol);
  const bool pass = generates;
  save_artifact(c, "x1.json", x1);
  save_artifact(c, "x2.json", x2);
  json report{{"command", "demo"},
              {"kind", "shift"},
              {"k", k},
              {"algebra_dim", a.dim()},
              {"expected_dim", k * k},
              {"generates", generates},
              {"sparsity", io::sparsity_to_json(rep)},
              {"pass", pass}};
  emit(c, report,
       {"shift pair in M_" + std::to_string(k),
        "  algebra dim      " + std::to_string(a.dim()) + " (expected " + std::to_string(k * k) + ")",
        "  index (diagonal) " + rep.index.str(), "  pass             " + yes_no(pass)});
  return pass ? 0 : kExitNumerical;
}

int demo_hyperfinite(const Common& c, const std::vector<int>& dims, const std::vector<double>& weights) {
  const Tolerances tol = c.tolerances();
  const HyperfinitePair h = hyperfinite_pair(dims, weights);
  const Eigen::Index n = h.x1.rows();
  const AlgebraBasis a = generate({h.x1, h.x2}, tol);
  const bool generates = a.dim() == n * n;
  const SparsityReport rep = interaction_index(GeneratorTuple({h.x1, h.x2}), h.first_factor_family, tol);
  const int n1 = dims.front();
  const Rational bound(3, n1);
  const bool bound_ok = rep.index <= bound;
  const bool pass = generates && bound_ok;
  save_artifact(c, "x1.json", h.x1);
  save_artifact(c, "x2.json", h.x2);
  json report{{"command", "demo"},
              {"kind", "hyperfinite"},
              {"dims", dims},
              {"ambient_dim", n},
              {"algebra_dim", a.dim()},
              {"expected_dim", n * n},
              {"generates", generates},
              {"sparsity", io::sparsity_to_json(rep)},
              {"bound", rational(3, n1)},
              {"bound_satisfied", bound_ok},
              {"pass", pass}};
  emit(c, report,
       {"truncated hyperfinite pair in M_" + std::to_string(n),
        "  algebra dim         " + std::to_string(a.dim()) + " (expected " + std::to_string(n * n) + ")",
        "  index (1st factor)  " + rep.index.str() + " <= 3/" + std::to_string(n1) + ": " + yes_no(bound_ok),
        "  pass                " + yes_no(pass)});
  return pass ? 0 : kExitNumerical;
}

/// Level l of the tower is e22 (x) ... (x) e22 (x) M_{m_l} (x) I, so each level
/// sits under the (2,2) unit of the one before it.
std::vector<MatrixUnitSystem> nested_chain(const std::vector<int>& sizes) {
  std::int64_t total = 1;
  for (int m : sizes) {
    if (m < 2) throw Error(ErrorKind::SystemTooSmall, "every size must be >= 2");
    total *= m;
    if (total > dim_cap()) throw Error(ErrorKind::DimensionOverflow, "product of sizes exceeds the cap");
  }
  const auto n = static_cast<Eigen::Index>(total);
  std::vector<MatrixUnitSystem> chain;
  Matrix head = identity(1);
  for (int m : sizes) {
    const Eigen::Index after = n / (head.rows() * m);
    std::vector<Matrix> units;
    for (const auto& e : standard_units(m).units())
      units.push_back(tensor_product(tensor_product(head, e), identity(after)));
    chain.emplace_back(n, m, std::move(units));
    head = tensor_product(head, unit(m, 1, 1));
  }
  return chain;
}

int demo_nested(const Common& c, const std::vector<int>& sizes) {
  const Tolerances tol = c.tolerances();
  const NestedProduct np = nested_product(nested_chain(sizes), tol);
  const UnitSystemReport r = verify(np.system, tol);
  const bool pass = r.pass && r.full;
  save_json_artifact(c, "units.json", io::units_to_json(np.system));
  json report{{"command", "demo"},
              {"kind", "nested-units"},
              {"sizes", sizes},
              {"system_size", np.system.size()},
              {"ambient_dim", np.system.ambient_dim()},
              {"axioms", io::unit_report_to_json(r)},
              {"pass", pass}};
  std::ostringstream res;
  res << std::scientific << std::setprecision(2) << "  residuals        projection " << r.projection_residual
      << ", adjoint " << r.adjoint_residual << ", product " << r.product_residual;
  emit(c, report,
       {"nested product of sizes " + io::json(sizes).dump(),
        "  system size      " + std::to_string(np.system.size()) + " in M_" +
            std::to_string(np.system.ambient_dim()),
        res.str(), "  full             " + yes_no(r.full), "  pass             " + yes_no(pass)});
  return pass ? 0 : kExitNumerical;
}

// --- sparsity ----------------------------------------------------------------

int cmd_sparsity(const Common& c, const std::vector<std::string>& inputs, int k, const std::string& strategy,
                 int restarts, std::uint64_t seed) {
  const Tolerances tol = c.tolerances();
  MinimizeOptions opt;
  opt.strategy = parse_strategy(strategy);
  opt.restarts = restarts;
  opt.seed = seed;
  const GeneratorTuple xs = load_tuple(inputs);
  const MinimizeResult r = minimize_index(xs, k, opt, tol);
  json report = io::sparsity_to_json(r.report);
  report["strategy"] = strategy;
  report["seed"] = seed;
  save_json_artifact(c, "family.json", io::family_to_json(r.family));
  std::vector<std::string> lines{"index " + r.report.index.str() + " (k=" + std::to_string(k) + ", " +
                                     std::to_string(r.report.count) + " blocks)",
                                 "family " + r.family.id()};
  for (std::size_t m = 0; m < r.report.patterns.size(); ++m) {
    lines.push_back(r.report.labels[m] + ":");
    for (const auto& row : r.report.patterns[m].rows()) lines.push_back("  " + row);
  }
  emit(c, report, lines);
  return 0;
}

// --- pipeline ----------------------------------------------------------------

MatrixUnitSystem pipeline_units(const std::string& units_path, int k, Eigen::Index n) {
  if (!units_path.empty()) return io::units_from_json(io::parse(io::read_file(units_path)));
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "give --k or --units");
  if (n % k != 0) {
    throw Error(ErrorKind::NotDivisible, "k=" + std::to_string(k) + " does not divide n=" + std::to_string(n));
  }
  return instances::amplified_units(k, static_cast<int>(n / k));
}

int cmd_pipeline(const Common& c, const std::vector<std::string>& inputs, const std::string& units_path, int k) {
  const Tolerances tol = c.tolerances();
  const GeneratorTuple xs = load_tuple(inputs);
  const MatrixUnitSystem sys = pipeline_units(units_path, k, xs.ambient_dim());
  const PipelineReport rep = pipeline(xs, sys, tol);
  save_artifact(c, "q.json", rep.compression->q);
  save_artifact(c, "x1.json", rep.pair->x1);
  save_artifact(c, "x2.json", rep.pair->x2);
  save_artifact(c, "generator.json", rep.final_element);
  json report = io::pipeline_to_json(rep);
  std::vector<std::string> lines;
  std::ostringstream head;
  head << std::left << std::setw(12) << "stage" << std::setw(10) << "c" << std::setw(10) << "limit"
       << std::setw(10) << "tau(S)" << std::setw(14) << "dims" << std::setw(5) << "ok"
       << "note";
  lines.push_back(head.str());
  for (const auto& s : rep.stages) {
    std::ostringstream row;
    row << std::left << std::setw(12) << s.name << std::setw(10) << std::setprecision(4) << s.c << std::setw(10)
        << s.limit << std::setw(10) << s.support_trace.str() << std::setw(14)
        << (std::to_string(s.dim_before) + "->" + std::to_string(s.dim_after)) << std::setw(5) << yes_no(s.ok)
        << s.note;
    lines.push_back(row.str());
  }
  lines.push_back(std::string("pipeline ") + (rep.ok ? "ok" : "failed"));
  emit(c, report, lines);
  return rep.ok ? 0 : kExitNumerical;
}

// --- verify-all --------------------------------------------------------------

int cmd_verify_all(const Common& c, std::uint64_t seed) {
  const Tolerances tol = c.tolerances();
  const auto results = acceptance::run_all(seed, tol);
  json items = json::array();
  std::vector<std::string> lines;
  bool all = true;
  for (const auto& r : results) {
    all = all && r.pass;
    items.push_back(json{{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    char buf[64];
    std::snprintf(buf, sizeof buf, " (%.2fs)", r.seconds);
    lines.push_back(std::string(r.pass ? "[PASS] " : "[FAIL] ") + std::to_string(r.id) + " " + r.name + ": " +
                    r.detail + buf);
  }
  json report{{"command", "verify-all"}, {"seed", seed}, {"eta", tol.zero_block_eta}, {"criteria", items},
              {"pass", all}};
  emit(c, report, lines);
  return all ? 0 : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-dimensional generator sparsity, compression and single-generator synthesis"};
  app.require_subcommand(1);

  Common common;

  auto* demo = app.add_subcommand("demo", "Build and verify a named construction");
  demo->require_subcommand(1);
  int shift_k = 5;
  auto* shift = demo->add_subcommand("shift", "Shift pair of M_k");
  shift->add_option("--k", shift_k, "Matrix size")->check(CLI::Range(2, 4096));
  add_common(shift, common, true);

  std::vector<int> hf_dims{3, 3};
  std::vector<double> hf_weights;
  auto* hyper = demo->add_subcommand("hyperfinite", "Truncated hyperfinite generator pair");
  hyper->add_option("--dims", hf_dims, "Factor sizes, comma separated")->delimiter(',');
  hyper->add_option("--weights", hf_weights, "Weights for factors 2..m (default 2^-k)")->delimiter(',');
  add_common(hyper, common, true);

  std::vector<int> nested_sizes{2, 3};
  auto* nested = demo->add_subcommand("nested-units", "Compose a chain of nested unit systems");
  nested->add_option("--sizes", nested_sizes, "Level sizes, comma separated")->delimiter(',');
  add_common(nested, common, true);

  std::vector<std::string> sp_inputs;
  int sp_k = 0;
  std::string sp_strategy = "diagonal_grouping";
  int sp_restarts = 16;
  std::uint64_t sp_seed = 1;
  auto* sparsity = app.add_subcommand("sparsity", "Minimize the interaction index of a tuple");
  sparsity->add_option("inputs", sp_inputs, "Matrix files")->required()->check(CLI::ExistingFile);
  sparsity->add_option("--k", sp_k, "Family size")->required();
  sparsity->add_option("--strategy", sp_strategy, "diagonal_grouping | unitary_local_search | combined");
  sparsity->add_option("--restarts", sp_restarts, "Random restarts")->check(CLI::NonNegativeNumber);
  sparsity->add_option("--seed", sp_seed, "Random seed");
  add_common(sparsity, common, true);

  std::vector<std::string> pl_inputs;
  std::string pl_units;
  int pl_k = 0;
  auto* pipe = app.add_subcommand("pipeline", "Compress, synthesize and fuse a sparse tuple");
  pipe->add_option("inputs", pl_inputs, "Matrix files")->required()->check(CLI::ExistingFile);
  auto* units_opt = pipe->add_option("--units", pl_units, "Unit bundle file (keys e_i_j)")->check(CLI::ExistingFile);
  pipe->add_option("--k", pl_k, "Use e_ij (x) I_{n/k} as the units")->excludes(units_opt);
  add_common(pipe, common, true);

  std::uint64_t va_seed = 1;
  auto* verify_all = app.add_subcommand("verify-all", "Run every acceptance criterion");
  verify_all->add_option("--seed", va_seed, "Random seed");
  add_common(verify_all, common, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*shift) return demo_shift(common, shift_k);
    if (*hyper) return demo_hyperfinite(common, hf_dims, hf_weights);
    if (*nested) return demo_nested(common, nested_sizes);
    if (*sparsity) return cmd_sparsity(common, sp_inputs, sp_k, sp_strategy, sp_restarts, sp_seed);
    if (*pipe) return cmd_pipeline(common, pl_inputs, pl_units, pl_k);
    if (*verify_all) return cmd_verify_all(common, va_seed);
  } catch (const Error& e) {
    std::cerr << "finfactor: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "finfactor: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
