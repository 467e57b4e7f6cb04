#include "treeshift/certificate.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace treeshift {

std::string_view to_string(CertificateKind kind) {
  switch (kind) {
    case CertificateKind::ExactBound:
      return "ExactBound";
    case CertificateKind::Divergence:
      return "Divergence";
    case CertificateKind::FiniteMembership:
      return "FiniteMembership";
    case CertificateKind::UnboundednessWitness:
      return "UnboundednessWitness";
  }
  return "?";
}

std::string_view to_string(Guarantee g) {
  return g == Guarantee::Exact ? "exact" : "window-only";
}

namespace {

CertificateKind kind_from_string(std::string_view s) {
  if (s == "ExactBound") return CertificateKind::ExactBound;
  if (s == "Divergence") return CertificateKind::Divergence;
  if (s == "FiniteMembership") return CertificateKind::FiniteMembership;
  if (s == "UnboundednessWitness") return CertificateKind::UnboundednessWitness;
  throw std::invalid_argument("certificate: unknown kind '" + std::string(s) + "'");
}

Guarantee guarantee_from_string(std::string_view s) {
  if (s == "exact") return Guarantee::Exact;
  if (s == "window-only") return Guarantee::WindowOnly;
  throw std::invalid_argument("certificate: unknown guarantee '" + std::string(s) + "'");
}

}  // namespace

nlohmann::json Certificate::to_json() const {
  nlohmann::json lines = nlohmann::json::array();
  for (const TranscriptLine& l : transcript)
    lines.push_back({{"label", l.label}, {"value", l.value.str()}});
  return nlohmann::json{{"kind", to_string(kind)},
                        {"inputs",
                         {{"spec", spec}, {"address", address}, {"threshold", threshold.str()}}},
                        {"transcript", std::move(lines)},
                        {"verdict", verdict},
                        {"guarantee", std::string(to_string(guarantee))}};
}

Certificate Certificate::from_json(const nlohmann::json& j) {
  try {
    Certificate c;
    c.kind = kind_from_string(j.at("kind").get<std::string>());
    const auto& in = j.at("inputs");
    c.spec = in.at("spec").get<std::string>();
    c.address = in.at("address").get<std::string>();
    c.threshold = Rational::parse(in.at("threshold").get<std::string>());
    for (const auto& l : j.at("transcript"))
      c.transcript.push_back(
          {l.at("label").get<std::string>(), Rational::parse(l.at("value").get<std::string>())});
    c.verdict = j.at("verdict").get<bool>();
    c.guarantee = guarantee_from_string(j.at("guarantee").get<std::string>());
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("certificate: malformed JSON: ") + e.what());
  }
}

std::string Certificate::to_text() const {
  std::ostringstream out;
  out << to_string(kind) << " address=" << address << " verdict=" << (verdict ? "true" : "false")
      << " guarantee=" << to_string(guarantee) << "\n";
  out << "  spec: " << spec << "\n";
  if (!threshold.is_zero()) out << "  threshold: " << threshold.str() << "\n";
  for (const TranscriptLine& l : transcript)
    out << "  " << l.label << " = " << l.value.str() << "\n";
  return out.str();
}

std::string to_json_text(const std::vector<Certificate>& certs) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Certificate& c : certs) arr.push_back(c.to_json());
  return arr.dump(2) + "\n";
}

std::vector<Certificate> certificates_from_json_text(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("certificate: invalid JSON: ") + e.what());
  }
  std::vector<Certificate> out;
  if (j.is_array())
    for (const auto& item : j) out.push_back(Certificate::from_json(item));
  else
    out.push_back(Certificate::from_json(j));
  return out;
}

std::string label_with_index(std::string_view prefix, std::string_view key, std::int64_t value) {
  std::string out(prefix);
  out += ' ';
  out += key;
  out += '=';
  out += std::to_string(value);
  return out;
}

std::optional<std::int64_t> index_from_label(std::string_view label, std::string_view prefix,
                                             std::string_view key) {
  if (label.size() <= prefix.size() + key.size() + 2) return std::nullopt;
  if (label.substr(0, prefix.size()) != prefix || label[prefix.size()] != ' ') return std::nullopt;
  std::string_view rest = label.substr(prefix.size() + 1);
  if (rest.substr(0, key.size()) != key || rest[key.size()] != '=') return std::nullopt;
  rest.remove_prefix(key.size() + 1);
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), v);
  if (ec != std::errc{} || p != rest.data() + rest.size()) return std::nullopt;
  return v;
}

namespace {

bool has_prefix(std::string_view label, std::string_view prefix) {
  return label.size() >= prefix.size() && label.substr(0, prefix.size()) == prefix;
}

ReplayResult replay_divergence(const Certificate& cert) {
  const Rational* prev = nullptr;
  std::int64_t prev_m = 0;
  std::size_t last_line = 0;
  for (std::size_t i = 0; i < cert.transcript.size(); ++i) {
    const TranscriptLine& l = cert.transcript[i];
    std::optional<std::int64_t> m = index_from_label(l.label, "inner_partial", "m");
    if (!m) m = index_from_label(l.label, "weight_partial", "m");
    if (!m) {
      if (l.label == "head") continue;
      return ReplayResult::failure(i + 1, "unexpected line '" + l.label + "'");
    }
    if (prev) {
      if (*m <= prev_m) return ReplayResult::failure(i + 1, "term counts not increasing");
      if (!(l.value > *prev)) return ReplayResult::failure(i + 1, "partial sums not increasing");
    }
    prev = &l.value;
    prev_m = *m;
    last_line = i + 1;
  }
  if (!prev) return ReplayResult::failure(0, "no partial sums recorded");
  bool reached = *prev >= cert.threshold;
  if (!reached) return ReplayResult::failure(last_line, "final partial sum below threshold");
  if (cert.verdict != reached) return ReplayResult::failure(last_line, "verdict mismatch");
  return {};
}

ReplayResult replay_finite_membership(const Certificate& cert) {
  Rational sum(0);
  const Rational* total = nullptr;
  std::size_t total_line = 0;
  for (std::size_t i = 0; i < cert.transcript.size(); ++i) {
    const TranscriptLine& l = cert.transcript[i];
    if (has_prefix(l.label, "term u=") || has_prefix(l.label, "zeta_total u=")) {
      sum += l.value;
    } else if (l.label == "total") {
      total = &l.value;
      total_line = i + 1;
    } else {
      return ReplayResult::failure(i + 1, "unexpected line '" + l.label + "'");
    }
  }
  if (!total) return ReplayResult::failure(0, "no total recorded");
  if (!(*total == sum)) return ReplayResult::failure(total_line, "total does not re-add");
  if (!cert.verdict) return ReplayResult::failure(total_line, "verdict mismatch");
  return {};
}

ReplayResult replay_exact_bound(const Certificate& cert) {
  Rational term_sum(0);
  std::optional<Rational> tail, value, prefix_sum, lambda_sq;
  bool is_identity = false;
  bool saw_children = false, all_children_infinite = true;
  std::size_t value_line = 0;
  for (std::size_t i = 0; i < cert.transcript.size(); ++i) {
    const TranscriptLine& l = cert.transcript[i];
    if (index_from_label(l.label, "term", "j")) {
      term_sum += l.value;
    } else if (index_from_label(l.label, "tail", "m")) {
      tail = l.value;
    } else if (index_from_label(l.label, "sum_prefix", "m")) {
      prefix_sum = l.value;
    } else if (l.label == "lambda_sq") {
      lambda_sq = l.value;
    } else if (l.label == "criterion_value") {
      value = l.value;
      value_line = i + 1;
    } else if (l.label == "identity_product") {
      value = l.value;
      value_line = i + 1;
      is_identity = true;
    } else if (has_prefix(l.label, "children u=")) {
      saw_children = true;  // value 1 = countably many children, 0 = finite
      if (!(l.value == Rational(1))) all_children_infinite = false;
    } else {
      return ReplayResult::failure(i + 1, "unexpected line '" + l.label + "'");
    }
  }
  if (!value) {
    if (!saw_children) return ReplayResult::failure(0, "no value recorded");
    if (cert.verdict != all_children_infinite)
      return ReplayResult::failure(cert.transcript.size(), "verdict mismatch");
    return {};
  }
  if (is_identity) {
    if (prefix_sum && tail && lambda_sq) {
      Rational product = (*prefix_sum + *tail) * *lambda_sq;
      if (!(product == *value))
        return ReplayResult::failure(value_line, "identity product does not re-multiply");
    }
    if (cert.verdict != (*value == Rational(1)))
      return ReplayResult::failure(value_line, "verdict mismatch");
    return {};
  }
  if (tail) {
    Rational total = term_sum + *tail;
    if (!(total == *value))
      return ReplayResult::failure(value_line, "criterion value does not re-add");
  }
  if (cert.verdict != (*value <= Rational(1)))
    return ReplayResult::failure(value_line, "verdict mismatch");
  return {};
}

ReplayResult replay_unboundedness(const Certificate& cert) {
  if (cert.transcript.empty()) return ReplayResult::failure(0, "empty transcript");
  for (std::size_t i = 0; i < cert.transcript.size(); ++i) {
    const TranscriptLine& l = cert.transcript[i];
    bool known = index_from_label(l.label, "zeta_sq", "j").has_value() ||
                 index_from_label(l.label, "mismatch", "j").has_value();
    if (!known) return ReplayResult::failure(i + 1, "unexpected line '" + l.label + "'");
    bool final_line = i + 1 == cert.transcript.size();
    bool exceeds = l.value > cert.threshold;
    if (!final_line && exceeds)
      return ReplayResult::failure(i + 1, "witness is not the first exceeding value");
    if (final_line && cert.verdict != exceeds)
      return ReplayResult::failure(i + 1, "verdict mismatch");
  }
  return {};
}

}  // namespace

ReplayResult replay_structural(const Certificate& cert) {
  switch (cert.kind) {
    case CertificateKind::Divergence:
      return replay_divergence(cert);
    case CertificateKind::FiniteMembership:
      return replay_finite_membership(cert);
    case CertificateKind::ExactBound:
      return replay_exact_bound(cert);
    case CertificateKind::UnboundednessWitness:
      return replay_unboundedness(cert);
  }
  return ReplayResult::failure(0, "unknown certificate kind");
}

}  // namespace treeshift
