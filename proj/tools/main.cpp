// treeshift: construct exact weight families on the two canonical
// infinitely-branching directed trees and verify their operator-theoretic
// properties with machine-checkable certificates.

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "treeshift — exact weighted-shift constructions and certificates on "
      "infinitely branching directed trees"};
  app.require_subcommand(1);

  treeshift::cli::ConstructArgs construct_args;
  auto* construct = app.add_subcommand(
      "construct", "Write the truncated weight dump of a construction spec");
  construct->add_option("spec", construct_args.spec,
                        "mode=<sqtrivial|hypo|nonhypo|perturb>;rooted=<0|1>"
                        ";theta=<p/q>;v0=<address>")
      ->required();
  construct->add_option("--depth", construct_args.depth, "window depth (default 3)");
  construct->add_option("--width", construct_args.width, "children per vertex (default 8)");
  construct->add_option("--out", construct_args.out, "output path (default stdout)");

  treeshift::cli::VerifyArgs verify_args;
  auto* verify = app.add_subcommand("verify", "Check a property and emit certificates");
  verify->add_option("property", verify_args.property,
                     "consistency | hyponormal | square-trivial | adjoint-quantity | "
                     "phi-unbounded | admissible")
      ->required();
  verify->add_option("--spec", verify_args.spec, "construction spec string")->required();
  verify->add_option("--vertex", verify_args.vertex,
                     "restrict to one vertex (default: probe window)");
  verify->add_option("--depth", verify_args.depth, "probe depth (default 6)");
  verify->add_option("--width", verify_args.width, "probe width (default 64)");
  verify->add_option("--threshold", verify_args.threshold,
                     "divergence / unboundedness threshold as p/q (default 1000000)");
  verify->add_option("--format", verify_args.format, "text | json (default text)");
  verify->add_option("--out", verify_args.out, "output path (default stdout)");
  verify->add_option("--expect", verify_args.expect,
                     "pass | fail: expected overall verdict (default pass)");

  treeshift::cli::ReportArgs report_args;
  auto* report = app.add_subcommand("report", "Replay certificates and print a summary table");
  report->add_option("files", report_args.files, "certificate JSON files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (construct->parsed()) return treeshift::cli::run_construct(construct_args);
  if (verify->parsed()) return treeshift::cli::run_verify(verify_args);
  return treeshift::cli::run_report(report_args);
}
