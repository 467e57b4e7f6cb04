#include "treeshift/construct.hpp"

#include <stdexcept>
#include <utility>
#include <vector>

namespace treeshift {

namespace {

const Rational kHalf(1, 2);
const Rational kOne(1);
const Rational kBranchBudget(3, 2);  // spine children j >= 2 share 2 - 1/2

void require_positive(const Rational& theta) {
  if (theta.sign() <= 0) throw std::invalid_argument("construction: theta must be positive");
}

// --- geometric rule: children of a vertex with weight w split 1/w ----------

Rational geometric_child(const Rational& parent_w, std::int64_t j) {
  return parent_w.reciprocal().mul_pow2(-j);
}

Rational geometric_tail_sq(const Rational& parent_w, std::int64_t m) {
  return parent_w.reciprocal().mul_pow2(-m);  // sum_{j>m} (1/w)*2^-j
}

Rational geometric_tail_quartic(const Rational& parent_w, std::int64_t m) {
  return (parent_w.sq().reciprocal() / Rational(3)).mul_pow2(-2 * m);
}

struct GeometricCursor final : ChildWeightCursor {
  Rational lam;   // lambda^2 of the upcoming child
  Rational zeta;  // its zeta^2 = 1/lambda^2; both advance by exponent shifts
  explicit GeometricCursor(const Rational& parent_w)
      : lam(parent_w.reciprocal().mul_pow2(-1)), zeta(parent_w) {
    zeta.mul_pow2(1);
  }
  void next_into(ChildWeight& out) override {
    out.lambda_sq = lam;
    out.zeta_sq.assign_finite(zeta);
    lam.mul_pow2(-1);
    zeta.mul_pow2(1);
  }
};

// --- hyponormal schedule ----------------------------------------------------
//
// For parent weight r: n = max(2, ceil(1/r^2)); children get 1/(rn) while
// j <= n-1 and 1/(rn) * 2^-(j-n+1) afterwards. Then
//   sum_j r_j   = ((n-1) + 1) / (rn) = 1/r,
//   sum_j r_j^2 = (3n-2) / (3 r^2 n^2) <= 1/(r^2 n) <= 1,
// and every r_j < 1 because rn > 1 for all r > 0.

struct HypoSchedule {
  mpz_class n;
  Rational plateau;  // 1/(rn)

  explicit HypoSchedule(const Rational& r) {
    mpq_class inv_r_sq = r.sq().reciprocal().to_mpq();
    mpz_cdiv_q(n.get_mpz_t(), inv_r_sq.get_num().get_mpz_t(), inv_r_sq.get_den().get_mpz_t());
    if (n < 2) n = 2;
    plateau = (r * Rational(mpq_class(n))).reciprocal();
  }

  bool in_plateau(std::int64_t j) const { return mpz_cmp_si(n.get_mpz_t(), j) > 0; }  // j <= n-1

  // Requires j >= n (so n fits a machine word).
  std::int64_t n_int() const { return mpz_get_si(n.get_mpz_t()); }

  Rational child(std::int64_t j) const {
    if (in_plateau(j)) return plateau;
    Rational w = plateau;
    return w.mul_pow2(-(j - n_int() + 1));
  }

  Rational tail_sq(std::int64_t m) const {
    if (in_plateau(m + 1)) {  // m <= n-2: (n-1-m) plateau terms + geometric part 1/(rn)
      Rational count{mpq_class(mpz_class(n - m))};
      return count * plateau;
    }
    Rational w = plateau;
    return w.mul_pow2(n_int() - m - 1);
  }

  Rational tail_quartic(std::int64_t m) const {
    Rational p2 = plateau.sq();
    if (in_plateau(m + 1)) {  // (n-1-m) * plateau^2 + plateau^2 / 3
      Rational count{mpq_class(mpz_class(n - 1 - m))};
      return count * p2 + p2 / Rational(3);
    }
    Rational w = p2 / Rational(3);
    return w.mul_pow2(2 * (n_int() - m - 1));
  }
};

struct HypoCursor final : ChildWeightCursor {
  HypoSchedule sched;
  std::int64_t j = 0;
  Rational cur, zeta;
  explicit HypoCursor(const Rational& parent_w)
      : sched(parent_w), cur(sched.plateau), zeta(sched.plateau.reciprocal()) {}
  void next_into(ChildWeight& out) override {
    ++j;  // n >= 2 keeps j = 1 on the plateau; afterwards each step halves
    if (!sched.in_plateau(j)) {
      cur.mul_pow2(-1);
      zeta.mul_pow2(1);
    }
    out.lambda_sq = cur;
    out.zeta_sq.assign_finite(zeta);
  }
};

// --- rooted square-trivial --------------------------------------------------

class SquareTrivialRootedFamily final : public WeightFamily {
 public:
  explicit SquareTrivialRootedFamily(Rational theta) : theta_(std::move(theta)) {
    require_positive(theta_);
  }

  Rational lambda_sq(const VertexAddr& v) const override {
    if (v.in_rootless_tree()) throw std::invalid_argument("family is rooted");
    if (v.is_root()) throw std::domain_error("WeightFamily: root has no weight");
    Rational cur = theta_;
    for (std::int64_t j : v.path()) cur = geometric_child(cur, j);
    return cur;
  }

  ExtRational tail_sum_sq(const VertexAddr& u, std::int64_t m) const override {
    return geometric_tail_sq(weight_or_seed(u), m);
  }
  ExtRational tail_sum_quartic(const VertexAddr& u, std::int64_t m) const override {
    return geometric_tail_quartic(weight_or_seed(u), m);
  }
  std::optional<ExtRational> inner_tail(const VertexAddr&, std::int64_t) const override {
    return ExtRational::infinity();  // each term is exactly 1
  }
  std::optional<ExtRational> criterion_tail(const VertexAddr& u, std::int64_t m) const override {
    return tail_sum_quartic(u, m);  // zeta^2 = 1/lambda^2, so terms are lambda^4
  }
  std::unique_ptr<ChildWeightCursor> child_cursor(const VertexAddr& u) const override {
    return std::make_unique<GeometricCursor>(weight_or_seed(u));
  }
  bool has_reciprocal_norm_identity() const override { return true; }
  DensityGuarantee density_guarantee() const override { return DensityGuarantee::kAllVertices; }
  std::optional<Rational> root_seed() const override { return theta_; }

 private:
  Rational theta_;
};

// --- rootless helpers -------------------------------------------------------

enum class RootlessClass { SpineWithSpineChild, U1, Branch };

RootlessClass classify_rootless(const VertexAddr& u) {
  if (!u.path().empty()) return RootlessClass::Branch;
  return u.spine_offset() >= 1 ? RootlessClass::SpineWithSpineChild : RootlessClass::U1;
}

Rational branch_seed(std::int64_t j) {  // child j >= 2 of a spine vertex
  Rational w = kBranchBudget;
  return w.mul_pow2(-(j - 1));
}

// Spine vertices u_{k+1}, k >= 1: child 1 is u_k (weight 1/2), children
// j >= 2 get (3/2)*2^-(j-1). Closed tails:
//   tail_sq(0) = 2, tail_sq(m >= 1) = 3*2^-m,
//   tail_quartic(0) = 1, tail_quartic(m >= 1) = 3*4^-m.
Rational spine_tail_sq(std::int64_t m) {
  if (m == 0) return Rational(2);
  Rational w(3);
  return w.mul_pow2(-m);
}

Rational spine_tail_quartic(std::int64_t m) {
  if (m == 0) return kOne;
  Rational w(3);
  return w.mul_pow2(-2 * m);
}

struct SpineCursor final : ChildWeightCursor {
  std::int64_t j = 0;
  Rational lam = branch_seed(2);  // 3/4 for the first branch child
  Rational zeta = branch_seed(2).reciprocal();
  void next_into(ChildWeight& out) override {
    ++j;
    if (j == 1) {  // the spine child u_k
      out.lambda_sq = kHalf;
      out.zeta_sq.assign_finite(Rational(2));
      return;
    }
    if (j > 2) {
      lam.mul_pow2(-1);
      zeta.mul_pow2(1);
    }
    out.lambda_sq = lam;
    out.zeta_sq.assign_finite(zeta);
  }
};

// Shared skeleton of the two rootless families; the Rule type supplies the
// subtree recurrence (geometric or hyponormal schedule).
template <typename Rule>
class RootlessFamily final : public WeightFamily {
 public:
  Rational lambda_sq(const VertexAddr& v) const override {
    if (!v.in_rootless_tree()) throw std::invalid_argument("family is rootless");
    if (v.path().empty()) return kHalf;  // spine vertex
    std::int64_t first = v.path().front();
    Rational cur = v.spine_offset() >= 1 ? branch_seed(first) : Rule::child(kHalf, first);
    for (std::size_t i = 1; i < v.path().size(); ++i) cur = Rule::child(cur, v.path()[i]);
    return cur;
  }

  ExtRational tail_sum_sq(const VertexAddr& u, std::int64_t m) const override {
    switch (classify_rootless(u)) {
      case RootlessClass::SpineWithSpineChild:
        return spine_tail_sq(m);
      case RootlessClass::U1:
        return Rule::tail_sq(kHalf, m);
      case RootlessClass::Branch:
        return Rule::tail_sq(lambda_sq(u), m);
    }
    return Rational(0);
  }

  ExtRational tail_sum_quartic(const VertexAddr& u, std::int64_t m) const override {
    switch (classify_rootless(u)) {
      case RootlessClass::SpineWithSpineChild:
        return spine_tail_quartic(m);
      case RootlessClass::U1:
        return Rule::tail_quartic(kHalf, m);
      case RootlessClass::Branch:
        return Rule::tail_quartic(lambda_sq(u), m);
    }
    return Rational(0);
  }

  std::optional<ExtRational> inner_tail(const VertexAddr&, std::int64_t) const override {
    return ExtRational::infinity();
  }
  std::optional<ExtRational> criterion_tail(const VertexAddr& u, std::int64_t m) const override {
    return tail_sum_quartic(u, m);
  }
  std::unique_ptr<ChildWeightCursor> child_cursor(const VertexAddr& u) const override {
    if (classify_rootless(u) == RootlessClass::SpineWithSpineChild)
      return std::make_unique<SpineCursor>();
    Rational w = u.path().empty() ? kHalf : lambda_sq(u);
    return Rule::cursor(w);
  }
  bool has_reciprocal_norm_identity() const override { return true; }
  DensityGuarantee density_guarantee() const override { return DensityGuarantee::kAllVertices; }
};

struct GeometricRule {
  static Rational child(const Rational& w, std::int64_t j) { return geometric_child(w, j); }
  static Rational tail_sq(const Rational& w, std::int64_t m) { return geometric_tail_sq(w, m); }
  static Rational tail_quartic(const Rational& w, std::int64_t m) {
    return geometric_tail_quartic(w, m);
  }
  static std::unique_ptr<ChildWeightCursor> cursor(const Rational& w) {
    return std::make_unique<GeometricCursor>(w);
  }
};

struct HypoRule {
  static Rational child(const Rational& w, std::int64_t j) { return HypoSchedule(w).child(j); }
  static Rational tail_sq(const Rational& w, std::int64_t m) {
    return HypoSchedule(w).tail_sq(m);
  }
  static Rational tail_quartic(const Rational& w, std::int64_t m) {
    return HypoSchedule(w).tail_quartic(m);
  }
  static std::unique_ptr<ChildWeightCursor> cursor(const Rational& w) {
    return std::make_unique<HypoCursor>(w);
  }
};

// --- rooted hyponormal --------------------------------------------------------

class HyponormalRootedFamily final : public WeightFamily {
 public:
  explicit HyponormalRootedFamily(Rational theta) : theta_(std::move(theta)) {
    require_positive(theta_);
  }

  Rational lambda_sq(const VertexAddr& v) const override {
    if (v.in_rootless_tree()) throw std::invalid_argument("family is rooted");
    if (v.is_root()) throw std::domain_error("WeightFamily: root has no weight");
    Rational cur = theta_;
    for (std::int64_t j : v.path()) cur = HypoSchedule(cur).child(j);
    return cur;
  }

  ExtRational tail_sum_sq(const VertexAddr& u, std::int64_t m) const override {
    return HypoSchedule(weight_or_seed(u)).tail_sq(m);
  }
  ExtRational tail_sum_quartic(const VertexAddr& u, std::int64_t m) const override {
    return HypoSchedule(weight_or_seed(u)).tail_quartic(m);
  }
  std::optional<ExtRational> inner_tail(const VertexAddr&, std::int64_t) const override {
    return ExtRational::infinity();
  }
  std::optional<ExtRational> criterion_tail(const VertexAddr& u, std::int64_t m) const override {
    return tail_sum_quartic(u, m);
  }
  std::unique_ptr<ChildWeightCursor> child_cursor(const VertexAddr& u) const override {
    return std::make_unique<HypoCursor>(weight_or_seed(u));
  }
  bool has_reciprocal_norm_identity() const override { return true; }
  DensityGuarantee density_guarantee() const override { return DensityGuarantee::kAllVertices; }
  std::optional<Rational> root_seed() const override { return theta_; }

 private:
  Rational theta_;
};

// --- non-hyponormal -----------------------------------------------------------
//
// Below the j-th child of the root (weight c = theta^-1 * 2^-j) sits the
// sequence realizing alpha^2 = 1/c: first child alpha^2*(1-delta) with
// delta = min(1, c)/2, child 1+i gets alpha^2 * delta * 2^-i.

struct AlphLayer {
  Rational alpha_sq;
  Rational delta;

  explicit AlphLayer(const Rational& parent_w) {
    alpha_sq = parent_w.reciprocal();
    delta = parent_w < kOne ? parent_w : kOne;  // min(1, 1/alpha^2)
    delta.mul_pow2(-1);
  }

  Rational child(std::int64_t j) const {
    if (j == 1) return alpha_sq * (kOne - delta);
    Rational w = alpha_sq * delta;
    return w.mul_pow2(-(j - 1));
  }
  Rational tail_sq(std::int64_t m) const {
    if (m == 0) return alpha_sq;
    Rational w = alpha_sq * delta;
    return w.mul_pow2(-(m - 1));
  }
  Rational tail_quartic(std::int64_t m) const {
    Rational geo = (alpha_sq * delta).sq() / Rational(3);
    if (m == 0) return child(1).sq() + geo;
    return geo.mul_pow2(-2 * (m - 1));
  }
};

struct AlphCursor final : ChildWeightCursor {
  AlphLayer layer;
  std::int64_t j = 0;
  Rational cur, zeta;
  explicit AlphCursor(const Rational& parent_w) : layer(parent_w) {}
  void next_into(ChildWeight& out) override {
    ++j;
    if (j <= 2) {
      cur = layer.child(j);
      zeta = cur.reciprocal();
    } else {
      cur.mul_pow2(-1);
      zeta.mul_pow2(1);
    }
    out.lambda_sq = cur;
    out.zeta_sq.assign_finite(zeta);
  }
};

class NonHyponormalFamily final : public WeightFamily {
 public:
  explicit NonHyponormalFamily(Rational theta) : theta_(std::move(theta)) {
    require_positive(theta_);
  }

  Rational lambda_sq(const VertexAddr& v) const override {
    if (v.in_rootless_tree()) throw std::invalid_argument("family is rooted");
    if (v.is_root()) throw std::domain_error("WeightFamily: root has no weight");
    const auto& path = v.path();
    Rational cur = geometric_child(theta_, path[0]);
    if (path.size() >= 2) cur = AlphLayer(cur).child(path[1]);
    for (std::size_t i = 2; i < path.size(); ++i) cur = geometric_child(cur, path[i]);
    return cur;
  }

  ExtRational tail_sum_sq(const VertexAddr& u, std::int64_t m) const override {
    if (u.depth() == 1) return AlphLayer(lambda_sq(u)).tail_sq(m);
    return geometric_tail_sq(weight_or_seed(u), m);
  }
  ExtRational tail_sum_quartic(const VertexAddr& u, std::int64_t m) const override {
    if (u.depth() == 1) return AlphLayer(lambda_sq(u)).tail_quartic(m);
    return geometric_tail_quartic(weight_or_seed(u), m);
  }
  std::optional<ExtRational> inner_tail(const VertexAddr&, std::int64_t) const override {
    return ExtRational::infinity();
  }
  std::optional<ExtRational> criterion_tail(const VertexAddr& u, std::int64_t m) const override {
    return tail_sum_quartic(u, m);
  }
  std::unique_ptr<ChildWeightCursor> child_cursor(const VertexAddr& u) const override {
    if (u.depth() == 1) return std::make_unique<AlphCursor>(lambda_sq(u));
    return std::make_unique<GeometricCursor>(weight_or_seed(u));
  }
  bool has_reciprocal_norm_identity() const override { return true; }
  DensityGuarantee density_guarantee() const override { return DensityGuarantee::kAllVertices; }
  std::optional<Rational> root_seed() const override { return theta_; }

 private:
  Rational theta_;
};

// --- perturbation -------------------------------------------------------------

class PerturbedFamily final : public WeightFamily {
 public:
  PerturbedFamily(std::shared_ptr<const WeightFamily> base, VertexAddr v0)
      : base_(std::move(base)), v0_(std::move(v0)) {
    if (!v0_.in_rootless_tree() && v0_.is_root())
      throw std::invalid_argument("perturbation: v0 must not be the root");
    ExtRational zeta = base_->tail_sum_sq(v0_, 0);
    if (!zeta.is_finite())
      throw std::invalid_argument("perturbation: zeta^2(v0) must be finite");
    old_w_ = base_->lambda_sq(v0_);
    new_w_ = kOne + zeta.value();
    delta_w_ = new_w_ - old_w_;
    parent_ = *v0_.parent();
    idx_v0_ = v0_.index_in_parent();
    grand_ = parent_.parent();
    idx_parent_ = grand_ ? parent_.index_in_parent() : 0;
  }

  Rational lambda_sq(const VertexAddr& v) const override {
    return v == v0_ ? new_w_ : base_->lambda_sq(v);
  }

  ExtRational tail_sum_sq(const VertexAddr& u, std::int64_t m) const override {
    ExtRational t = base_->tail_sum_sq(u, m);
    if (u == parent_ && idx_v0_ > m) t += delta_w_;
    return t;
  }

  ExtRational tail_sum_quartic(const VertexAddr& u, std::int64_t m) const override {
    ExtRational t = base_->tail_sum_quartic(u, m);
    if (u == parent_ && idx_v0_ > m) t += new_w_.sq() - old_w_.sq();
    return t;
  }

  std::optional<ExtRational> inner_tail(const VertexAddr& u, std::int64_t m) const override {
    auto t = base_->inner_tail(u, m);
    if (!t || !t->is_finite()) return t;
    ExtRational adjusted = *t;
    if (u == parent_ && idx_v0_ > m) {
      ExtRational zeta_v0 = base_->tail_sum_sq(v0_, 0);  // children of v0 untouched
      adjusted += zeta_v0 * delta_w_;
    }
    if (grand_ && u == *grand_ && idx_parent_ > m)
      adjusted += ExtRational(delta_w_) * base_->lambda_sq(parent_);
    return adjusted;
  }

  std::optional<ExtRational> criterion_tail(const VertexAddr& u, std::int64_t m) const override {
    auto t = base_->criterion_tail(u, m);
    if (!t || !t->is_finite()) return t;
    ExtRational adjusted = *t;
    if (u == parent_ && idx_v0_ > m) {
      ExtRational zeta_v0 = base_->tail_sum_sq(v0_, 0);
      adjusted += ExtRational(delta_w_ / zeta_v0.value());
    }
    if (grand_ && u == *grand_ && idx_parent_ > m) {
      ExtRational zeta_p = base_->tail_sum_sq(parent_, 0);
      if (zeta_p.is_finite()) {  // infinite zeta makes both terms zero
        Rational lam_p = base_->lambda_sq(parent_);
        Rational perturbed_zeta = zeta_p.value() + delta_w_;
        adjusted += ExtRational(lam_p / perturbed_zeta - lam_p / zeta_p.value());
      }
    }
    return adjusted;
  }

  std::unique_ptr<ChildWeightCursor> child_cursor(const VertexAddr& u) const override {
    struct Patched final : ChildWeightCursor {
      std::unique_ptr<ChildWeightCursor> inner;
      std::int64_t lambda_at = 0, zeta_at = 0, j = 0;
      Rational new_lambda, zeta_delta;
      void next_into(ChildWeight& out) override {
        ++j;
        inner->next_into(out);
        if (j == lambda_at) out.lambda_sq = new_lambda;
        if (j == zeta_at) out.zeta_sq += zeta_delta;
      }
    };
    auto p = std::make_unique<Patched>();
    p->inner = base_->child_cursor(u);
    if (u == parent_) {
      p->lambda_at = idx_v0_;
      p->new_lambda = new_w_;
    }
    if (grand_ && u == *grand_) {
      p->zeta_at = idx_parent_;
      p->zeta_delta = delta_w_;
    }
    return p;
  }

  DensityGuarantee density_guarantee() const override { return DensityGuarantee::kAllVertices; }
  std::optional<Rational> root_seed() const override { return base_->root_seed(); }

  const VertexAddr& perturbed_vertex() const { return v0_; }

 private:
  std::shared_ptr<const WeightFamily> base_;
  VertexAddr v0_;
  Rational old_w_, new_w_, delta_w_;
  VertexAddr parent_;
  std::int64_t idx_v0_ = 0;
  std::optional<VertexAddr> grand_;
  std::int64_t idx_parent_ = 0;
};

}  // namespace

std::shared_ptr<const WeightFamily> build_square_trivial_rooted(const Rational& theta) {
  return std::make_shared<SquareTrivialRootedFamily>(theta);
}

std::shared_ptr<const WeightFamily> build_square_trivial_rootless() {
  return std::make_shared<RootlessFamily<GeometricRule>>();
}

std::shared_ptr<const WeightFamily> build_hyponormal_rooted(const Rational& theta) {
  return std::make_shared<HyponormalRootedFamily>(theta);
}

std::shared_ptr<const WeightFamily> build_hyponormal_rootless() {
  return std::make_shared<RootlessFamily<HypoRule>>();
}

std::shared_ptr<const WeightFamily> build_non_hyponormal(const Rational& theta) {
  return std::make_shared<NonHyponormalFamily>(theta);
}

std::shared_ptr<const WeightFamily> build_perturbed(std::shared_ptr<const WeightFamily> base,
                                                    const VertexAddr& v0) {
  return std::make_shared<PerturbedFamily>(std::move(base), v0);
}

std::string_view to_string(ConstructionMode mode) {
  switch (mode) {
    case ConstructionMode::SquareTrivial:
      return "sqtrivial";
    case ConstructionMode::Hyponormal:
      return "hypo";
    case ConstructionMode::NonHyponormal:
      return "nonhypo";
    case ConstructionMode::Perturbed:
      return "perturb";
  }
  return "?";
}

ConstructionSpec ConstructionSpec::parse(std::string_view text) {
  ConstructionSpec spec;
  bool saw_mode = false, saw_rooted = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto semi = text.find(';', pos);
    auto end = semi == std::string_view::npos ? text.size() : semi;
    std::string_view field = text.substr(pos, end - pos);
    if (!field.empty()) {
      auto eq = field.find('=');
      if (eq == std::string_view::npos)
        throw std::invalid_argument("spec: field without '=': '" + std::string(field) + "'");
      std::string_view key = field.substr(0, eq);
      std::string_view value = field.substr(eq + 1);
      if (key == "mode") {
        if (value == "sqtrivial")
          spec.mode = ConstructionMode::SquareTrivial;
        else if (value == "hypo")
          spec.mode = ConstructionMode::Hyponormal;
        else if (value == "nonhypo")
          spec.mode = ConstructionMode::NonHyponormal;
        else if (value == "perturb")
          spec.mode = ConstructionMode::Perturbed;
        else
          throw std::invalid_argument("spec: unknown mode '" + std::string(value) + "'");
        saw_mode = true;
      } else if (key == "rooted") {
        if (value == "0")
          spec.rooted = false;
        else if (value == "1")
          spec.rooted = true;
        else
          throw std::invalid_argument("spec: rooted must be 0 or 1");
        saw_rooted = true;
      } else if (key == "theta") {
        spec.theta = Rational::parse(value);
      } else if (key == "v0") {
        spec.perturb_at = VertexAddr::parse(value);
      } else {
        throw std::invalid_argument("spec: unknown key '" + std::string(key) + "'");
      }
    }
    if (semi == std::string_view::npos) break;
    pos = semi + 1;
  }
  if (!saw_mode) throw std::invalid_argument("spec: missing mode");
  (void)saw_rooted;
  return spec;
}

std::string ConstructionSpec::str() const {
  std::string out = "mode=";
  out += to_string(mode);
  out += ";rooted=";
  out += rooted ? '1' : '0';
  if (theta) {
    out += ";theta=";
    out += theta->str();
  }
  if (perturb_at) {
    out += ";v0=";
    out += perturb_at->str();
  }
  return out;
}

Construction build(const ConstructionSpec& spec) {
  ConstructionSpec canonical = spec;
  if (!spec.rooted && spec.theta)
    throw std::invalid_argument("spec: theta applies to rooted constructions only");
  if (spec.mode != ConstructionMode::Perturbed && spec.perturb_at)
    throw std::invalid_argument("spec: v0 applies to mode=perturb only");
  if (spec.mode == ConstructionMode::NonHyponormal && !spec.rooted)
    throw std::invalid_argument("spec: mode=nonhypo is rooted only");

  Rational theta = spec.theta.value_or(kOne);
  require_positive(theta);
  if (spec.rooted) canonical.theta = theta;

  Construction c;
  c.tree = spec.rooted ? std::shared_ptr<const TreeModel>(std::make_shared<RootedInfiniteTree>())
                       : std::make_shared<RootlessInfiniteTree>();

  switch (spec.mode) {
    case ConstructionMode::SquareTrivial:
      c.family = spec.rooted ? build_square_trivial_rooted(theta) : build_square_trivial_rootless();
      break;
    case ConstructionMode::Hyponormal:
      c.family = spec.rooted ? build_hyponormal_rooted(theta) : build_hyponormal_rootless();
      break;
    case ConstructionMode::NonHyponormal:
      c.family = build_non_hyponormal(theta);
      break;
    case ConstructionMode::Perturbed: {
      if (!spec.perturb_at) throw std::invalid_argument("spec: mode=perturb requires v0");
      if (!c.tree->contains(*spec.perturb_at))
        throw std::invalid_argument("spec: v0 does not belong to the selected tree");
      auto base =
          spec.rooted ? build_square_trivial_rooted(theta) : build_square_trivial_rootless();
      c.family = build_perturbed(std::move(base), *spec.perturb_at);
      break;
    }
  }
  c.spec = canonical;
  return c;
}

}  // namespace treeshift
