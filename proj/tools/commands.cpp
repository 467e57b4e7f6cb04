#include "commands.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "treeshift/construct.hpp"
#include "treeshift/diagnose.hpp"
#include "treeshift/weight_family.hpp"

namespace treeshift::cli {

namespace {

int write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return kExitOk;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open '" << path << "' for writing\n";
    return kExitError;
  }
  out << content;
  return kExitOk;
}

bool property_holds(const std::string& property, const Certificate& cert) {
  if (property == "square-trivial")
    return cert.kind == CertificateKind::Divergence && cert.verdict;
  return cert.verdict;
}

std::vector<Certificate> run_property(const std::string& property, const Construction& c,
                                      const DiagnoseOptions& opts,
                                      const std::vector<VertexAddr>& vertices) {
  std::vector<Certificate> certs;
  if (property == "consistency") {
    for (const VertexAddr& u : vertices)
      certs.push_back(consistency_certificate(*c.tree, *c.family, u, opts));
  } else if (property == "hyponormal") {
    for (const VertexAddr& u : vertices)
      certs.push_back(hyponormality_test(*c.tree, *c.family, u, opts));
  } else if (property == "square-trivial") {
    for (const VertexAddr& u : vertices)
      certs.push_back(
          square_domain_test(*c.tree, *c.family, FiniteVector::basis(u), opts.threshold, opts));
  } else if (property == "adjoint-quantity") {
    certs.push_back(adjoint_unboundedness_search(*c.tree, *c.family, vertices.front(),
                                                 opts.threshold, opts));
  } else if (property == "phi-unbounded") {
    certs.push_back(
        phi_unboundedness_witness(*c.tree, *c.family, vertices.front(), opts.threshold, opts));
  } else if (property == "admissible") {
    AdmissibilityReport report = tree_admissibility(*c.tree, c.family.get(), opts);
    certs.push_back(report.probe);
    if (report.membership) certs.push_back(*report.membership);
  } else {
    throw std::invalid_argument("unknown property '" + property + "'");
  }
  return certs;
}

}  // namespace

int run_construct(const ConstructArgs& args) {
  try {
    Construction c = build(ConstructionSpec::parse(args.spec));
    return write_output(args.out, format_weight_dump(*c.tree, *c.family, args.depth, args.width));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}

int run_verify(const VerifyArgs& args) {
  try {
    Construction c = build(ConstructionSpec::parse(args.spec));
    DiagnoseOptions opts;
    opts.depth = args.depth;
    opts.width = args.width;
    opts.threshold = Rational::parse(args.threshold);
    opts.spec_label = c.spec.str();

    bool single_vertex_property =
        args.property == "adjoint-quantity" || args.property == "phi-unbounded";
    std::vector<VertexAddr> vertices;
    if (!args.vertex.empty()) {
      VertexAddr u = VertexAddr::parse(args.vertex);
      if (!c.tree->contains(u))
        throw std::invalid_argument("vertex '" + args.vertex + "' is not in the tree");
      vertices.push_back(u);
    } else if (single_vertex_property) {
      vertices.push_back(c.tree->base_vertex());
    } else {
      vertices = c.tree->probe_window(opts.depth, opts.width);
    }

    std::vector<Certificate> certs = run_property(args.property, c, opts, vertices);

    bool all_hold = true;
    for (const Certificate& cert : certs)
      all_hold = all_hold && property_holds(args.property, cert);

    std::string rendered;
    if (args.format == "json") {
      rendered = to_json_text(certs);
    } else if (args.format == "text") {
      std::ostringstream os;
      for (const Certificate& cert : certs) os << cert.to_text() << "\n";
      os << "property " << args.property << ": " << (all_hold ? "holds" : "fails") << " on "
         << certs.size() << " certificate(s)\n";
      rendered = os.str();
    } else {
      throw std::invalid_argument("unknown format '" + args.format + "'");
    }
    int rc = write_output(args.out, rendered);
    if (rc != kExitOk) return rc;

    if (args.expect != "pass" && args.expect != "fail")
      throw std::invalid_argument("--expect must be pass or fail");
    bool expected = args.expect == "pass";
    return all_hold == expected ? kExitOk : kExitMismatch;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}

int run_report(const ReportArgs& args) {
  std::vector<std::pair<std::string, Certificate>> certs;
  for (const std::string& path : args.files) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      std::cerr << "error: cannot read '" << path << "'\n";
      return kExitError;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
      for (Certificate& c : certificates_from_json_text(buffer.str()))
        certs.emplace_back(path, std::move(c));
    } catch (const std::invalid_argument& e) {
      std::cerr << "error: " << path << ": " << e.what() << "\n";
      return kExitError;
    }
  }

  // Every transcript is re-checked (and recomputed when the spec string
  // names a construction) before anything is printed.
  for (const auto& [path, cert] : certs) {
    ReplayResult r = replay_certificate(cert);
    if (!r.ok) {
      std::cerr << "replay failed: " << path << " address=" << cert.address << " line " << r.line
                << ": " << r.message << "\n";
      return kExitMismatch;
    }
  }

  std::cout << std::left << std::setw(22) << "property" << std::setw(14) << "vertex"
            << std::setw(28) << "value" << std::setw(9) << "verdict" << "guarantee\n";
  for (const auto& [path, cert] : certs) {
    std::string value = cert.transcript.empty() ? "-" : cert.transcript.back().value.str();
    if (value.size() > 26) value = value.substr(0, 23) + "...";
    std::cout << std::left << std::setw(22) << to_string(cert.kind) << std::setw(14)
              << cert.address << std::setw(28) << value << std::setw(9)
              << (cert.verdict ? "true" : "false") << to_string(cert.guarantee) << "\n";
  }
  return kExitOk;
}

}  // namespace treeshift::cli
