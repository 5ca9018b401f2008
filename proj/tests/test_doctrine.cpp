#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "dctk/constructions.hpp"
#include "dctk/doctrine.hpp"
#include "helpers.hpp"
#include "mutations.hpp"

using namespace dctk;

TEST_CASE("every fixture passes every declared layer") {
  for (const auto& p : all_fixtures()) {
    p->require_coherent();
    StructureReport r = check_structure(*p);
    CHECK_MESSAGE(r.ok(), r.summary());
  }
}

TEST_CASE("the chain fixture is Heyting but not Boolean") {
  auto p = chain3();
  CHECK(p->layers.count(Layer::Heyting) == 1);
  CHECK(p->layers.count(Layer::Boolean) == 0);
  CHECK_FALSE(check_structure(*p, Layer::Boolean).ok());
}

TEST_CASE("every shipped mutation is killed by its layer suite") {
  for (const auto& m : shipped_mutations()) {
    CAPTURE(m.name);
    CHECK_FALSE(check_structure(*m.doctrine, m.layer).ok());
  }
}

TEST_CASE("coherence audit catches missing witnesses") {
  auto p = copy_of(*chain3());
  p->reind.erase("u");
  CHECK_THROWS_AS(p->require_coherent(), StructuralError);

  auto q = copy_of(*chain3());
  q->delta.erase("A");  // (A, A) has a chosen product, so delta is owed
  CHECK_THROWS_AS(q->require_coherent(), StructuralError);

  auto r = copy_of(*chain3());
  r->ops.erase("A");
  CHECK_THROWS_AS(r->require_coherent(), StructuralError);
}

TEST_CASE("substituting equals along the diagonal is sound") {
  // gamma restricted to the diagonal agrees with gamma, modulo equality:
  // reindexing along <pr1, pr1> then meeting with delta is exactly
  // gamma meet delta.
  for (const auto& p : all_fixtures()) {
    if (!p->layers.count(Layer::Elementary)) continue;
    for (const auto& a : p->base.objects()) {
      if (!p->base.has_product(a, a)) continue;
      const auto& pr = p->base.product(a, a);
      const std::string diag_l = p->base.tuple(pr.pr1, pr.pr1);
      const LatticeOps& ops = p->ops_of(pr.obj);
      const FinPoset& f = p->fiber_of(pr.obj);
      const std::string& d = p->delta_of(a);
      for (const auto& g : f.elements()) {
        const std::string lhs = ops.meet_of(p->reindex(diag_l, g), d);
        CHECK(f.le(lhs, g));                     // substitution soundness
        CHECK(lhs == ops.meet_of(g, d));         // and its converse
      }
    }
  }
}

TEST_CASE("identity and composite morphisms pass all checks") {
  auto p = chain3();
  DoctrineMorphism id = identity_morphism(p);
  CHECK(check_morphism(id).ok());
  DoctrineMorphism idid = compose_morphisms(id, id);
  CHECK(check_morphism(idid).ok());
  CHECK(idid.obj_map == id.obj_map);
  CHECK(idid.comp == id.comp);
}

TEST_CASE("morphism defects are reported") {
  auto p = chain3();
  SUBCASE("non-monotone fiber component") {
    DoctrineMorphism m = identity_morphism(p);
    m.comp["1"]["1"] = "0";
    m.comp["1"]["0"] = "1";
    CHECK_FALSE(check_morphism(m).ok());
  }
  SUBCASE("top not preserved") {
    DoctrineMorphism m = identity_morphism(p);
    m.comp["A"]["1"] = "half";
    CHECK_FALSE(check_morphism(m).ok());
  }
  SUBCASE("functor law broken") {
    DoctrineMorphism m = identity_morphism(subsets_small());
    // well-typed, but the identity of B now maps to the swap
    m.mor_map[m.src->base.identity("{0,1}")] = "{0,1}=>{0,1}#2";
    CHECK_FALSE(check_morphism(m).ok());
  }
}

TEST_CASE("2-cells check naturality and the fiber inequality") {
  auto p = chain3();
  TwoCell t;
  t.f = identity_morphism(p);
  t.g = identity_morphism(p);
  for (const auto& o : p->base.objects()) t.theta[o] = p->base.identity(o);
  CHECK(check_2cell(t).ok());

  SUBCASE("ill-typed component") {
    t.theta["1"] = "u";
    CHECK_FALSE(check_2cell(t).ok());
  }
  SUBCASE("fiber inequality fails") {
    for (auto& [e, v] : t.g.comp["A"]) v = "0";
    CHECK_FALSE(check_2cell(t).ok());
  }
}

TEST_CASE("witness search on the subsets fixtures") {
  for (const auto& p : {subsets_small(), subsets_tiny(), singletons3()}) {
    RichReport r = check_rich(*p);
    CHECK(r.rich());
    CHECK(r.violations.empty());  // every witness inequality is an equality
  }
}

TEST_CASE("an empty carrier defeats the witness search") {
  auto p = gen_subset_doctrine({{"*"}, {"0", "1"}, {}}, true);
  RichReport r = check_rich(*p);
  CHECK_FALSE(r.rich());
  bool empty_fails = false;
  for (const auto& e : r.failures())
    if (e.obj == "{}") empty_fails = true;
  CHECK(empty_fails);
}

TEST_CASE("consistency statuses and the bounded cross-check") {
  for (const auto& p : all_fixtures()) {
    ConsistencyReport r = consistency_status(*p);
    CHECK(r.status == ConsistencyStatus::TwoValued);
    CHECK(r.lemma_violations.empty());
  }
  auto dead = add_axiom(subsets_tiny(), "{}");
  ConsistencyReport r = consistency_status(*dead.doctrine);
  CHECK(r.status == ConsistencyStatus::Inconsistent);
  CHECK(r.lemma_violations.empty());
}

TEST_CASE("choice arrows exist for subset quantifiers") {
  for (const auto& p : all_fixtures()) {
    StructureReport r = check_epsilon_operator(*p);
    CHECK_MESSAGE(r.ok(), r.summary());
  }
}

TEST_CASE("structure reports cap and count suppressed counterexamples") {
  auto p = copy_of(*subsets_small());
  // wreck every reindexing table of one morphism class to overflow the cap
  for (auto& [m, tab] : p->reind)
    for (auto& [e, v] : tab) v = p->fiber_of(p->base.dom(m)).elements().back();
  StructureReport r = check_structure(*p, Layer::Primary);
  CHECK_FALSE(r.ok());
  size_t listed = 0;
  for (const auto& [layer, msgs] : r.failures) listed += msgs.size();
  size_t suppressed = 0;
  for (const auto& [layer, n] : r.suppressed) suppressed += n;
  CHECK(listed > 0);
  CHECK(suppressed > 0);
}
