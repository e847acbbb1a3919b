#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

#include "subrc/engine.hpp"

namespace {

std::vector<subrc::Rational> parse_grid(const std::string& csv) {
  std::vector<subrc::Rational> grid;
  std::size_t start = 0;
  while (start <= csv.size()) {
    std::size_t comma = csv.find(',', start);
    std::string tok = csv.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!tok.empty()) grid.push_back(subrc::parse_rational(tok));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return grid;
}

int emit(const subrc::Report& rep, const subrc::Options& opts) {
  std::string rendered =
      opts.format == "structured" ? subrc::render_structured(rep) : subrc::render_text(rep);
  if (opts.out_path.empty()) {
    std::cout << rendered;
  } else {
    std::ofstream out(opts.out_path, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write to " << opts.out_path << "\n";
      return 1;
    }
    out << rendered;
  }
  return subrc::exit_code(rep);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact curvature engine for graded sub-Riemannian frames"};
  app.require_subcommand(1);

  std::string spec_arg, format = "text", tol = "1/1000000", grid_csv, grading = "as-given",
              out_path;
  auto add_common = [&](CLI::App* cmd, bool needs_spec) {
    if (needs_spec) cmd->add_option("spec", spec_arg, "catalog name or input file path")->required();
    cmd->add_option("--format", format, "text | structured")
        ->check(CLI::IsMember({"text", "structured"}));
    cmd->add_option("--tol", tol, "rational tolerance for eigenvalue brackets");
    cmd->add_option("--mu-grid", grid_csv, "comma-separated rationals: mu values (riemann) or rho1 values (frontier)");
    cmd->add_option("--grading", grading, "basic | full | k (merge grades k..r)");
    cmd->add_option("--out", out_path, "write the report to a file");
  };

  CLI::App* analyze = app.add_subcommand("analyze", "full pipeline");
  CLI::App* chk = app.add_subcommand("check", "identity suites only");
  CLI::App* frontier = app.add_subcommand("frontier", "curvature-dimension frontier table");
  CLI::App* riemann = app.add_subcommand("riemann", "rescaled-metric comparisons");
  CLI::App* bochner = app.add_subcommand("bochner", "pointwise jet suite on the coordinate model");
  CLI::App* catalog = app.add_subcommand("catalog", "list built-in frames");
  for (CLI::App* cmd : {analyze, chk, frontier, riemann, bochner}) add_common(cmd, true);
  add_common(catalog, false);

  CLI11_PARSE(app, argc, argv);

  subrc::Options opts;
  opts.format = format;
  opts.grading = grading;
  opts.out_path = out_path;
  try {
    opts.tol = subrc::parse_rational(tol);
    if (opts.tol <= 0) throw std::invalid_argument("tolerance must be positive");
    if (!grid_csv.empty()) opts.grid = parse_grid(grid_csv);
  } catch (const std::exception& e) {
    std::cerr << "bad option: " << e.what() << "\n";
    return 1;
  }

  try {
    if (catalog->parsed()) return emit(subrc::run_catalog(), opts);
    subrc::GradedFrameSpec f = subrc::load_spec(spec_arg, opts);
    if (analyze->parsed()) return emit(subrc::run_analyze(f, opts), opts);
    if (chk->parsed()) return emit(subrc::run_check(f, opts), opts);
    if (frontier->parsed()) return emit(subrc::run_frontier(f, opts), opts);
    if (riemann->parsed()) return emit(subrc::run_riemann(f, opts), opts);
    if (bochner->parsed()) return emit(subrc::run_bochner(f, opts), opts);
  } catch (const subrc::ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
