#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "exactpot/catalog.hpp"
#include "exactpot/helmholtz.hpp"
#include "exactpot/verification.hpp"

namespace exactpot::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kExactnessBug = 1;
inline constexpr int kInputError = 2;
inline constexpr int kRefused = 3;

struct ResolvedOperator {
  std::string id;
  DiffOperator op;
};

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("'" + path + "' is neither a catalog id nor a readable file");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Catalog id or path to an operator JSON file.
inline ResolvedOperator resolve_operator(const std::string& spec) {
  if (catalog::contains(spec)) return {spec, catalog::get(spec).op};
  const Json j = parse_json_text(read_text_file(spec), spec);
  try {
    auto op = operator_from_json(j);
    std::string id = j.is_object() && j.contains("id") && j["id"].is_string() ? j["id"].get<std::string>() : spec;
    return {std::move(id), std::move(op)};
  } catch (const InputError& e) {
    throw InputError(spec + ": " + e.what());
  }
}

inline RationalPoint parse_point(const std::string& text) {
  RationalPoint p;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) p.push_back(parse_rational(item));
  return p;
}

inline GridField load_field(const std::string& path) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    return read_grid_field_csv(in);
  }
  return load_grid_field(path);
}

inline void emit(std::ostream& out, const Json& j) { out << j.dump(2) << '\n'; }

inline int construct(const std::string& operator_spec, bool reduce, std::ostream& out, std::ostream& err) {
  const auto resolved = resolve_operator(operator_spec);
  PotentialOptions options;
  options.reduce_content = reduce;
  const auto pot = potential(resolved.op, options);
  Json j = to_json(pot);
  j["operator"] = resolved.id;
  std::vector<std::string> warnings = pot.warnings;
  const auto scan = constant_rank_scan(resolved.op, 200, 0);
  if (scan.constant_rank == ConstantRankVerdict::kNo) {
    std::string where;
    for (const auto& x : *scan.rank_drop_witness) where += (where.empty() ? "" : ",") + to_string(x);
    warnings.push_back("not constant rank: rank A(xi) drops at xi = (" + where +
                       "); im B(xi) = ker A(xi) only where c_r(xi) != 0");
  }
  j["warnings"] = warnings;
  for (const auto& w : warnings) err << "warning: " << w << '\n';
  emit(out, j);
  return kOk;
}

inline int verify(const std::string& operator_spec, std::size_t samples, std::uint64_t seed, std::ostream& out,
                  std::ostream& err) {
  const auto resolved = resolve_operator(operator_spec);
  const auto pot = potential(resolved.op);
  const auto report = verify_exactness(resolved.op, pot.b, scan_points(resolved.op.num_vars(), samples, seed),
                                       resolved.id);
  emit(out, to_json(report));
  if (!report.exact()) {
    err << "error: rank A + rank B != N at a point where c_r does not vanish\n";
    return kExactnessBug;
  }
  return kOk;
}

inline int pinv(const std::string& operator_spec, const std::string& matrix_path, bool projector,
                const std::string& at, std::ostream& out) {
  PolyMatrix p(1, 1, 1);
  std::string id;
  if (!matrix_path.empty()) {
    p = matrix_from_json(parse_json_text(read_text_file(matrix_path), matrix_path));
    id = matrix_path;
  } else {
    const auto resolved = resolve_operator(operator_spec);
    p = resolved.op.symbol();
    id = resolved.id;
  }
  const RationalMatrixFunction f =
      projector ? kernel_projection_symbolic(DiffOperator::from_symbol(p)) : decell_pseudoinverse_symbolic(p);
  Json j = to_json(f);
  j["operator"] = id;
  j["kind"] = projector ? "kernel_projector" : "pseudoinverse";
  if (!at.empty()) {
    const auto pt = parse_point(at);
    if (pt.size() != p.num_vars()) {
      throw InputError("--at has " + std::to_string(pt.size()) + " coordinates, expected " +
                       std::to_string(p.num_vars()));
    }
    j["at"] = point_to_json(pt);
    j["value"] = to_json(f.eval(pt));
  }
  emit(out, j);
  return kOk;
}

struct ProjectOptions {
  std::string operator_spec;
  std::string field = "random";
  std::size_t grid = 32;
  std::uint64_t seed = 0;
  std::int64_t band = 4;
  std::string out_dir = ".";
};

inline int project(const ProjectOptions& o, std::ostream& out) {
  const auto resolved = resolve_operator(o.operator_spec);
  const auto pot = potential(resolved.op);
  const std::vector<std::size_t> shape(resolved.op.num_vars(), o.grid);
  const std::size_t channels = resolved.op.cols();

  GridField v;
  if (o.field == "random") {
    v = random_band_limited(shape, channels, o.band, o.seed);
  } else if (o.field == "gradient" || o.field == "solenoidal") {
    if (channels != shape.size()) {
      throw InputError(o.field + " fields need N = n, the operator has N = " + std::to_string(channels));
    }
    v = o.field == "gradient" ? gradient_field(shape, o.band, o.seed) : solenoidal_field(shape, o.band, o.seed);
  } else {
    v = load_field(o.field);
  }

  const auto plan = build_multiplier_plan(resolved.op, pot, v.shape());
  const auto split = helmholtz_decompose(plan, v);
  const auto diag = diagnose_split(plan, v, split);

  namespace fs = std::filesystem;
  fs::create_directories(o.out_dir);
  const auto path = [&](const char* name) { return (fs::path(o.out_dir) / name).string(); };
  save_grid_field(path("v1.field"), split.v1);
  save_grid_field(path("v2.field"), split.v2);
  save_grid_field(path("u.field"), split.u);

  Json j = to_json(diag);
  j["operator"] = resolved.id;
  j["field"] = o.field;
  j["shape"] = v.shape();
  j["seed"] = o.seed;
  j["ambiguous_frequencies"] = plan.ambiguous_frequencies;
  j["zero_frequency_policy"] = plan.zero_frequency_policy;
  j["files"] = {{"v1", "v1.field"}, {"v2", "v2.field"}, {"u", "u.field"}};
  std::ofstream report(path("report.json"));
  report << j.dump(2) << '\n';
  emit(out, j);
  return kOk;
}

inline int list_catalog(const std::string& id, std::ostream& out) {
  if (!id.empty()) {
    emit(out, to_json(catalog::get(id)));
    return kOk;
  }
  Json all = Json::array();
  for (const auto& name : catalog::list()) all.push_back(to_json(catalog::get(name)));
  emit(out, all);
  return kOk;
}

/// Runs the command line `args` (without the program name).
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact potentials of constant-rank differential operators"};
  app.require_subcommand(1);

  std::string operator_spec;
  bool reduce = false;
  auto* construct_cmd = app.add_subcommand("construct", "build the potential B with A B = 0");
  construct_cmd->add_option("--operator", operator_spec, "catalog id or operator JSON file")->required();
  construct_cmd->add_flag("--reduce-content", reduce, "divide B by the gcd of its coefficients");

  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  auto* verify_cmd = app.add_subcommand("verify", "check rank A + rank B = N at sample points");
  verify_cmd->add_option("--operator", operator_spec, "catalog id or operator JSON file")->required();
  verify_cmd->add_option("--samples", samples, "random sample points")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--seed", seed, "sampling seed");

  std::string matrix_path, at;
  bool projector = false;
  auto* pinv_cmd = app.add_subcommand("pinv", "symbolic pseudoinverse of a symbol");
  auto* pinv_op = pinv_cmd->add_option("--operator", operator_spec, "catalog id or operator JSON file");
  auto* pinv_mat = pinv_cmd->add_option("--matrix", matrix_path, "polynomial matrix JSON file");
  pinv_op->excludes(pinv_mat);
  pinv_cmd->add_flag("--projector", projector, "kernel projector instead of the pseudoinverse");
  pinv_cmd->add_option("--at", at, "evaluate at a rational point, e.g. 1,2/3");

  ProjectOptions popts;
  auto* project_cmd = app.add_subcommand("project", "split a periodic field into A-free part and remainder");
  project_cmd->add_option("--operator", popts.operator_spec, "catalog id or operator JSON file")->required();
  project_cmd->add_option("--field", popts.field, "random, gradient, solenoidal, or a field file (.field or .csv)");
  project_cmd->add_option("--grid", popts.grid, "samples per axis (power of two)");
  project_cmd->add_option("--seed", popts.seed, "seed for generated fields");
  project_cmd->add_option("--band", popts.band, "frequency cutoff for generated fields")->check(CLI::NonNegativeNumber);
  project_cmd->add_option("--out", popts.out_dir, "output directory");

  std::string catalog_id;
  auto* catalog_cmd = app.add_subcommand("catalog", "list built-in operators");
  catalog_cmd->add_option("--id", catalog_id, "show a single entry");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  try {
    if (construct_cmd->parsed()) return construct(operator_spec, reduce, out, err);
    if (verify_cmd->parsed()) return verify(operator_spec, samples, seed, out, err);
    if (pinv_cmd->parsed()) {
      if (operator_spec.empty() && matrix_path.empty()) throw InputError("pinv needs --operator or --matrix");
      return pinv(operator_spec, matrix_path, projector, at, out);
    }
    if (project_cmd->parsed()) return project(popts, out);
    if (catalog_cmd->parsed()) return list_catalog(catalog_id, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const PreconditionError& e) {
    err << "refused: " << e.what() << '\n';
    return kRefused;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExactnessBug;
  }
  return kInputError;
}

}  // namespace exactpot::cli
