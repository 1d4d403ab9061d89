#include <iostream>
#include <thread>

#include "CLI11.hpp"

#include "glmp/cli.hpp"

int main(int argc, char** argv) {
  using namespace glmp::cli;
  CLI::App app{"Hierarchical soft-skill evaluation with linguistic models"};
  app.require_subcommand(1);
  RunConfig cfg;
  cfg.jobs = std::max(1u, std::thread::hardware_concurrency());
  bool quiet = false;
  bool verbose = false;
  app.add_flag("-q,--quiet", quiet, "Suppress warnings");
  app.add_flag("-v,--verbose", verbose, "Print every file written");

  auto* validate = app.add_subcommand("validate", "Check a model file");
  validate->add_option("-m,--model", cfg.model, "Model file (.glmp)")->required();

  auto* eval = app.add_subcommand("eval", "Evaluate measure bundles and write pre-reports");
  eval->add_option("-m,--model", cfg.model, "Model file (.glmp)")->required();
  eval->add_option("-i,--input", cfg.inputs, "Bundle file(s) (.json or .csv)")->required();
  eval->add_option("-o,--out", cfg.out_dir, "Output directory")->required();
  eval->add_option("--tie-epsilon", cfg.tie_epsilon, "Maximum validity gap for combined labels");
  eval->add_option("-j,--jobs", cfg.jobs, "Parallel evaluations")->check(CLI::PositiveNumber);

  auto* report = app.add_subcommand("report", "Render report.md next to each prereport.json");
  report->add_option("-i,--input", cfg.inputs, "prereport.json or output directory")
      ->required()
      ->expected(1);
  report->add_flag("--prompt", cfg.prompt, "Also write prompt.txt");
  std::string prompt_template;
  report->add_option("--prompt-template", prompt_template, "Prompt template file");

  auto* correlate = app.add_subcommand("correlate", "Correlate labels with instructor grades");
  correlate->add_option("--labels", cfg.labels, "Labels CSV")->required();
  correlate->add_option("--ratings", cfg.ratings, "Ratings CSV")->required();
  std::string mapping, output;
  correlate->add_option("--mapping", mapping, "Label score mapping CSV");
  correlate->add_option("-o,--output", output, "Correlation CSV (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidationFailure;
  }
  cfg.verbosity = quiet ? 0 : verbose ? 2 : 1;
  if (!prompt_template.empty()) cfg.prompt_template = prompt_template;
  if (!mapping.empty()) cfg.mapping = mapping;
  if (!output.empty()) cfg.output = output;

  if (*validate) return cmd_validate(cfg.model, std::cout, std::cerr);
  if (*eval) return cmd_eval(cfg, std::cout, std::cerr);
  if (*report) return cmd_report(cfg, std::cout, std::cerr);
  return cmd_correlate(cfg, std::cout, std::cerr);
}
