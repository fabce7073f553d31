// Acceptance criteria. One PASS/FAIL line each; the exit status is non-zero
// when any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "rational_oracle.hpp"
#include "seqprod/axioms.hpp"
#include "seqprod/random.hpp"
#include "seqprod/suite.hpp"

using namespace seqprod;

namespace {

const std::vector<std::vector<std::size_t>> kShapes = {{2}, {3}, {4}, {2, 2}};
constexpr std::uint64_t kSeed = kDefaultSeed;

struct Verdict {
  bool passed = true;
  std::ostringstream note;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      note << (note.tellp() > 0 ? "; " : "") << what;
    }
  }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

RunConfig config(std::size_t samples) {
  RunConfig c;
  c.seed = kSeed;
  c.samples = samples;
  c.dims = kShapes;
  return c;
}

void require_property(Verdict& v, const std::string& suite, const std::string& name, std::size_t samples) {
  for (const auto& r : run_property(suite, name, config(samples)))
    v.require(r.passed, name + " on [" + Json(r.shape).dump() + "] residual " + fmt(r.residual));
}

struct Shape {
  InstanceSet instances;
  std::vector<NamedProcess> homs;
};

Shape shape_instances(const std::vector<std::size_t>& dims, std::size_t count, const std::string& tag) {
  const Algebra algebra(dims);
  Rng rng = Rng::stream(kSeed, "acceptance", tag, dims.size() * 16 + dims[0]);
  InstanceSet instances = make_instances(algebra, count, rng);
  auto homs = standard_homs(algebra, rng);
  return {std::move(instances), std::move(homs)};
}

Verdict standard_axioms() {
  Verdict v;
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (const auto& dims : kShapes) {
    const Shape s = shape_instances(dims, 500, "standard");
    const AxiomReport r = check_all(standard_candidate(), s.homs, s.instances);
    for (const auto& a : r.results) {
      worst = std::max(worst, a.max_residual);
      v.require(a.status == Status::Pass, to_string(a.axiom) + " " + to_string(a.status) + " on " + Json(dims).dump());
    }
    v.require(r.at(Axiom::Ax1).detail == "certified", "Ax1 not certified on " + Json(dims).dump());
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  v.require(worst <= 1e-8, "max residual " + fmt(worst));
  v.require(seconds <= 60.0, "runtime " + fmt(seconds) + " s");
  v.note << (v.note.tellp() > 0 ? "; " : "") << "max residual " << fmt(worst) << ", " << fmt(seconds) << " s";
  return v;
}

Verdict ax2_sign() {
  Verdict v;
  const Ax2SignWitness w = ax2_sign_witness();
  const double up = distance(w.u_p, Element::unit(w.p.algebra()));
  const double up2 = distance(w.u_p2, Element(CMatrix::diagonal({1.0, -1.0})));
  // Pinned from exact arithmetic: p q p - p D q D p = (2/3) [[0, 1], [1, 0]].
  const double frozen_bound = 2.0 / 3.0 - 1e-12;
  v.require(up <= 1e-12, "u_p off by " + fmt(up));
  v.require(up2 <= 1e-12, "u_p2 off by " + fmt(up2));
  v.require(w.gap > frozen_bound, "gap " + fmt(w.gap));
  return v;
}

Verdict ax1_pqp() {
  Verdict v;
  const Ax1PqpWitness w = ax1_pqp_witness();
  v.require(std::abs(w.gap - 3.0 / 16.0) <= 1e-12, "gap " + fmt(w.gap));
  for (const auto& dims : kShapes) {
    const Shape s = shape_instances(dims, 500, "pqp");
    const AxiomReport r = check_all(pqp_candidate(), s.homs, s.instances);
    v.require(r.at(Axiom::Ax1).status == Status::Fail, "Ax1 not failing on " + Json(dims).dump());
    for (Axiom a : {Axiom::Ax2, Axiom::Ax3, Axiom::Ax4})
      v.require(r.at(a).status == Status::Pass, to_string(a) + " " + to_string(r.at(a).status) + " on " +
                                                    Json(dims).dump() + " residual " + fmt(r.at(a).max_residual));
  }
  return v;
}

Verdict ax4_phase() {
  Verdict v;
  const Candidate c = ax4_phase_candidate();
  for (const auto& dims : kShapes) {
    const Shape s = shape_instances(dims, 500, "phase");
    const AxiomResult r = check_ax2(c, s.instances);
    const double identity = r.metrics.at("phase_square_identity");
    v.require(identity <= 1e-9, "g^2 vs g(x^2) " + fmt(identity) + " on " + Json(dims).dump());
    v.require(r.status == Status::Pass, "Ax2 " + to_string(r.status) + " on " + Json(dims).dump());
  }
  const OrthogonalityInstance inst = ax4_instance(c, ax4_phase_frozen_witness());
  const auto [holding, violated] = ax4_margins(c, inst.p, inst.e1, inst.e2);
  v.require(holding >= -1e-8, "holding side margin " + fmt(holding));
  v.require(violated < -1e-6, "violated side margin " + fmt(violated));
  v.note << (v.note.tellp() > 0 ? "; " : "") << "witness margin " << fmt(violated);
  return v;
}

Verdict universal() {
  Verdict v;
  require_property(v, "universal", "compression_finality", 200);
  require_property(v, "universal", "corner_initiality", 200);
  require_property(v, "universal", "compression_limit", 200);
  return v;
}

Verdict inequalities() {
  Verdict v;
  require_property(v, "processes", "kadison_inequality", 1000);
  require_property(v, "processes", "cauchy_schwarz", 1000);
  require_property(v, "processes", "block_positivity_consequences", 1000);
  require_property(v, "effects", "connected_agreement", 1000);
  require_property(v, "processes", "multiplicativity_characterizations", 1000);
  return v;
}

Verdict oracle_equivalence() {
  using oracle::Mat2;
  using oracle::Rational;
  Verdict v;
  const long triples[][3] = {{1, 0, 1}, {3, 4, 5}, {5, 12, 13}, {8, 15, 17}, {20, 21, 29}};
  const Rational spectrum[] = {Rational(0),    Rational(1, 4), Rational(9, 16), Rational(4, 9),
                               Rational(1, 9), Rational(25, 36), Rational(1)};
  std::vector<Mat2> effects;
  for (const auto& t : triples)
    for (const auto& a : spectrum)
      for (const auto& b : spectrum)
        if (a <= b) effects.push_back(oracle::with_spectrum(oracle::rotation(t[0], t[1], t[2]), a, b));

  const Candidate pqp = pqp_candidate();
  double worst = 0.0;
  for (const Mat2& p : effects) {
    const Effect e(p.to_cmatrix());
    worst = std::max(worst, oracle::max_entry_distance(oracle::ceil(p), ceil(e).block(0)));
    worst = std::max(worst, oracle::max_entry_distance(oracle::floor(p), floor(e).block(0)));
    const double gap = distance(pqp.rule(e, Effect::unit(e.algebra())).element(), e.element());
    worst = std::max(worst, std::abs(gap - oracle::to_double(oracle::pqp_unit_gap(p))));
    for (std::size_t j = 0; j < effects.size(); j += 4) {
      const Mat2& q = effects[j];
      const Effect got = seq_product(e, Effect(q.to_cmatrix()));
      worst = std::max(worst, oracle::max_entry_distance(oracle::seq_product(p, q), got.block(0)));
    }
  }
  v.require(worst <= 1e-10, "worst deviation " + fmt(worst));
  v.note << (v.note.tellp() > 0 ? "; " : "") << effects.size() << " effects, worst " << fmt(worst);
  return v;
}

Verdict uniqueness() {
  Verdict v;
  require_property(v, "axioms", "uniqueness_demo", 500);
  for (const auto& r : run_property("axioms", "counterexamples_fail_only_their_axiom", config(500)))
    if (!r.passed)
      for (const auto& [name, entry] : r.details.items())
        v.require(!r.witness.contains(name), name + " pattern " + entry["statuses"].dump() + " on " + Json(r.shape).dump());
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"1 standard product passes Ax.1-Ax.4", standard_axioms},
      {"2 ax2-sign witness", ax2_sign},
      {"3 ax1-pqp gap and remaining axioms", ax1_pqp},
      {"4 ax4-phase identity and frozen witness", ax4_phase},
      {"5 universal properties", universal},
      {"6 inequalities and characterizations", inequalities},
      {"7 exact-rational oracle", oracle_equivalence},
      {"8 uniqueness demo and counterexample patterns", uniqueness}};

  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v.passed = false;
      v.note << "exception: " << e.what();
    }
    if (!v.passed) ++failures;
    std::cout << (v.passed ? "PASS " : "FAIL ") << name;
    if (v.note.tellp() > 0) std::cout << " (" << v.note.str() << ')';
    std::cout << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
