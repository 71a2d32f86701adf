// topomin: command-line front end for the spanning-set solver.
//
//   topomin homology --input problem.json
//   topomin check    --input problem.json
//   topomin solve    --input problem.json [--seed N] [--budget N] [--exhaustive]
//   topomin lemmas   --pair orthogonal --samples 100000 --seed 7
//   topomin export   --input problem.json --mesh-out best.mesh [--csv-out verdicts.csv]

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "topomin/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Weighted spanning-set minimization on grid complexes"};
  app.require_subcommand(1);

  topomin::RunOptions opt;
  std::string input;
  std::uint64_t seed = 0;
  std::size_t budget = 0, raster = 0;
  double tol = 0;
  std::string mesh_out, csv_out;

  auto add_common = [&](CLI::App* sub, bool needs_input) {
    auto* in = sub->add_option("--input", input, "problem file (JSON)");
    if (needs_input) in->required();
    sub->add_option("--seed", seed, "random seed (overrides the problem file)");
    sub->add_option("--tol", tol, "floating-point tolerance");
  };
  auto* homology = app.add_subcommand("homology", "homology of the grid and of the complement of the initial set");
  add_common(homology, true);
  auto* check = app.add_subcommand("check", "spanning and competitor checks for the initial set");
  add_common(check, true);
  auto* solve = app.add_subcommand("solve", "minimize the weighted measure");
  auto* exp = app.add_subcommand("export", "solve, then write the best set as a mesh and verdicts as CSV");
  for (auto* sub : {solve, exp}) {
    add_common(sub, true);
    sub->add_option("--budget", budget, "local search evaluation budget");
    sub->add_option("--raster", raster, "projection raster resolution per axis");
    sub->add_flag("--exhaustive", opt.exhaustive, "force the exhaustive search");
    sub->add_option("--mesh-out", mesh_out, "mesh output file");
    sub->add_option("--csv-out", csv_out, "CSV output file");
  }
  auto* lemmas = app.add_subcommand("lemmas", "sample the projection-sum bounds for a plane pair");
  add_common(lemmas, false);
  lemmas->add_option("--pair", opt.pair, "'orthogonal' or 'theta,phi' (radians)");
  lemmas->add_option("--samples", opt.samples, "number of random simple unit 2-vectors");
  lemmas->add_option("--inject", opt.inject, "equality-family samples added (orthogonal pair only)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  opt.command = sub->get_name();
  for (int i = 1; i < argc; ++i) opt.arguments.emplace_back(argv[i]);
  if (sub->count("--seed")) opt.seed = seed;
  if (sub->count("--tol")) opt.tol = tol;
  if (opt.command == "solve" || opt.command == "export") {
    if (sub->count("--budget")) opt.budget = budget;
    if (sub->count("--raster")) opt.raster = raster;
    if (sub->count("--mesh-out")) opt.mesh_out = mesh_out;
    if (sub->count("--csv-out")) opt.csv_out = csv_out;
  }

  std::optional<std::string> text;
  if (!input.empty()) {
    std::ifstream in(input);
    if (!in) {
      topomin::RunReport r;
      r.command = opt.command;
      r.arguments = opt.arguments;
      r.exit_code = 1;
      r.errors.push_back("cannot read " + input);
      std::cout << topomin::render(r);
      return 1;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  auto report = topomin::run(text, opt);
  std::cout << topomin::render(report);
  return report.exit_code;
}
