#pragma once

// Machine-checkable verdicts.
//
// A certificate is either an exact bound/total (every quantity an exact
// rational, tails in closed form) or a divergence/unboundedness witness (a
// finite monotone transcript of partial sums exceeding a stated threshold —
// no finite computation can "verify infinity", so infinite-sum claims are
// always certified this way).
//
// JSON schema:
//   {kind, inputs:{spec, address, threshold}, transcript:[{label, value:"p/q"}],
//    verdict, guarantee:"exact"|"window-only"}
//
// Transcript label grammar (replay dispatches on these):
//   "head"                head term (1+zeta^2(u))|f(u)|^2 of a divergence transcript
//   "inner_partial m=K"   partial sum of zeta^2*lambda^2 terms over the first K children
//   "weight_partial m=K"  partial sum of lambda^2 over the first K children
//   "term j=J"            J-th term lambda^2/zeta^2 of the hyponormality criterion
//   "tail m=K"            closed-form tail of the criterion series past K
//   "criterion_value"     exact criterion total; verdict means "<= 1"
//   "sum_prefix m=K"      prefix of the child lambda^2 sum (consistency certificates)
//   "lambda_sq"           lambda^2 of the tested vertex (or the root seed)
//   "identity_product"    (prefix + tail) * lambda_sq; verdict means "== 1"
//   "term u=A"            per-vertex total of a finite membership certificate
//   "total"               finite membership total
//   "zeta_sq j=J"         zeta^2 of child J (unboundedness witness lines)
//   "mismatch j=J"        single-term adjoint mismatch value at branch J
//   "children u=A"        admissibility probe; value 1 = countably many children

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "treeshift/rational.hpp"

namespace treeshift {

// A diagnostic was invoked outside its stated preconditions (inapplicable
// criterion, unclassifiable series, exhausted search). Maps to exit code 2.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class CertificateKind { ExactBound, Divergence, FiniteMembership, UnboundednessWitness };
enum class Guarantee { Exact, WindowOnly };

std::string_view to_string(CertificateKind kind);
std::string_view to_string(Guarantee g);

struct TranscriptLine {
  std::string label;
  Rational value;
};

struct Certificate {
  CertificateKind kind = CertificateKind::ExactBound;
  std::string spec = "user:unspecified";  // construction spec string, or "user:<description>"
  std::string address;                    // vertex the certificate is about
  Rational threshold;     // divergence/unboundedness threshold; 0 when unused
  std::vector<TranscriptLine> transcript;
  bool verdict = false;
  Guarantee guarantee = Guarantee::Exact;

  nlohmann::json to_json() const;
  static Certificate from_json(const nlohmann::json& j);  // throws std::invalid_argument
  std::string to_text() const;
};

// Serialization of certificate batches (a JSON array of schema objects).
std::string to_json_text(const std::vector<Certificate>& certs);
std::vector<Certificate> certificates_from_json_text(std::string_view text);

struct ReplayResult {
  bool ok = true;
  std::size_t line = 0;  // 1-based transcript line of the first failure
  std::string message;

  static ReplayResult failure(std::size_t line, std::string message) {
    return {false, line, std::move(message)};
  }
};

// Re-checks a certificate from its transcript alone: monotone partial sums,
// totals that re-add, thresholds actually exceeded, verdict consistent with
// the recorded values. Needs no weight family.
ReplayResult replay_structural(const Certificate& cert);

// Helpers for the "key=value" suffix of transcript labels.
std::string label_with_index(std::string_view prefix, std::string_view key, std::int64_t value);
std::optional<std::int64_t> index_from_label(std::string_view label, std::string_view prefix,
                                             std::string_view key);

}  // namespace treeshift
