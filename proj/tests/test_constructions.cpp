#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>

#include "doctest.h"
#include "dctk/constructions.hpp"
#include "helpers.hpp"
#include "dctk/model.hpp"

using namespace dctk;

namespace {

bool same_tables(const DoctrineMorphism& a, const DoctrineMorphism& b) {
  return a.obj_map == b.obj_map && a.mor_map == b.mor_map && a.comp == b.comp;
}

// All assignments of fiber components with the object and morphism maps of
// `shape` held fixed; used to verify mediator uniqueness exhaustively.
std::vector<DoctrineMorphism> all_fiber_components(const DoctrineMorphism& shape) {
  std::vector<DoctrineMorphism> out{shape};
  for (const auto& a : shape.src->base.objects()) {
    const auto& src_elems = shape.src->fiber_of(a).elements();
    const auto& dst_elems =
        shape.dst->fiber_of(shape.on_obj(a)).elements();
    std::vector<DoctrineMorphism> next;
    for (const auto& base : out)
      for (size_t pick = 0;; ++pick) {
        // interpret pick as a function src_elems -> dst_elems, base-|dst|
        size_t rest = pick;
        DoctrineMorphism m = base;
        auto& tab = m.comp[a];
        bool done = false;
        for (const auto& e : src_elems) {
          tab[e] = dst_elems[rest % dst_elems.size()];
          rest /= dst_elems.size();
        }
        if (rest > 0) done = true;
        if (done) break;
        next.push_back(std::move(m));
      }
    out = std::move(next);
  }
  return out;
}

}  // namespace

TEST_CASE("restriction is the identity when nothing drops") {
  auto p = subsets_small();
  std::set<std::string> all(p->base.objects().begin(),
                            p->base.objects().end());
  CHECK(restrict_doctrine(p, all).get() == p.get());

  auto cut = restrict_doctrine(p, {"{*}", "{0,1}"});
  CHECK(cut.get() != p.get());
  cut->require_coherent();
  CHECK(cut->base.object_count() == 2);
  CHECK_FALSE(cut->base.has_product("{0,1}", "{0,1}"));  // the square is gone
  CHECK(check_structure(*cut).ok());
}

TEST_CASE("constant addition produces a checked morphism") {
  SUBCASE("two-carrier subsets fixture drops the square") {
    auto cx = add_constant(subsets_small(), "{0,1}");
    CHECK(cx.dropped_objects ==
          std::vector<std::string>{"{(0,0),(0,1),(1,0),(1,1)}"});
    CHECK(cx.morphism.src.get() != subsets_small().get());
    CHECK(cx.doctrine->base.objects() ==
          std::vector<std::string>{"{*}", "{0,1}"});
    CHECK(cx.kleisli.distinguished_constant_arrow == "k({*}){0,1}=>{0,1}#1");
    cx.doctrine->require_coherent();
    CHECK(check_morphism(cx.morphism).ok());
    CHECK(check_structure(*cx.doctrine, Layer::Primary).ok());
    CHECK(check_structure(*cx.doctrine, Layer::Elementary).ok());
  }
  SUBCASE("chain fixture keeps its whole base") {
    auto cx = add_constant(chain3(), "A");
    CHECK(cx.dropped_objects.empty());
    CHECK(cx.morphism.src.get() == chain3().get());
    CHECK(check_morphism(cx.morphism).ok());
    CHECK(check_structure(*cx.doctrine).ok());
  }
  SUBCASE("three-singleton fixture keeps its whole base") {
    auto cx = add_constant(singletons3(), "{a}");
    CHECK(cx.dropped_objects.empty());
    CHECK(check_morphism(cx.morphism).ok());
    CHECK(check_structure(*cx.doctrine).ok());
  }
}

TEST_CASE("the constant mediator is correct and unique") {
  auto cx = add_constant(singletons3(), "{a}");
  DoctrineMorphism target = identity_morphism(singletons3());
  const std::string c = "{*}=>{a}#0";
  DoctrineMorphism h = mediate_constant(cx, target, c);
  CHECK(check_morphism(h).ok());
  CHECK(h.on_mor(cx.kleisli.distinguished_constant_arrow) == c);
  CHECK(same_tables(compose_morphisms(h, cx.morphism), target));

  // uniqueness: with the base maps fixed, no other fiber assignment both
  // factors the target and passes the morphism checks
  size_t solutions = 0;
  for (const auto& cand : all_fiber_components(h)) {
    if (compose_morphisms(cand, cx.morphism).comp != target.comp) continue;
    if (!check_morphism(cand).ok()) continue;
    ++solutions;
    CHECK(cand.comp == h.comp);
  }
  CHECK(solutions == 1);
}

TEST_CASE("axiom addition cuts fibers to the downset of the axiom") {
  auto ax = add_axiom(chain3(), "half");
  CHECK(ax.axiom == "half");
  ax.doctrine->require_coherent();
  CHECK(ax.doctrine->fiber_of("1").elements() ==
        std::vector<std::string>{"0", "half"});
  CHECK(*ax.doctrine->ops_of("1").top == "half");
  CHECK(check_morphism(ax.morphism).ok());
  CHECK(check_structure(*ax.doctrine).ok());
}

TEST_CASE("the axiom mediator is correct and unique") {
  auto ax = add_axiom(chain3(), "half");
  // quotienting by the filter generated by the axiom satisfies it
  auto q = quotient_by_filter(chain3(), {"half", "1"});
  DoctrineMorphism g = mediate_axiom(ax, q.morphism);
  CHECK(check_morphism(g).ok());
  CHECK(same_tables(compose_morphisms(g, ax.morphism), q.morphism));

  size_t solutions = 0;
  for (const auto& cand : all_fiber_components(g)) {
    if (compose_morphisms(cand, ax.morphism).comp != q.morphism.comp)
      continue;
    if (!check_morphism(cand).ok()) continue;
    ++solutions;
    CHECK(cand.comp == g.comp);
  }
  CHECK(solutions == 1);

  // a target that does not satisfy the axiom is rejected
  CHECK_THROWS_AS(mediate_axiom(ax, identity_morphism(chain3())),
                  PreconditionError);
}

TEST_CASE("adding the trivial axiom changes nothing observable") {
  auto p = chain3();
  auto ax = add_axiom(p, "1");  // top of the terminal fiber
  CHECK(ax.doctrine->fiber_of("A").elements() ==
        p->fiber_of("A").elements());
  CHECK(ax.doctrine->reind == p->reind);
  CHECK(ax.doctrine->delta == p->delta);
  auto inv = invert_morphism(ax.morphism);
  REQUIRE(inv.has_value());
  CHECK(check_morphism(*inv).ok());
}

TEST_CASE("witness property of a single step on the subsets fixture") {
  for (const std::string& b : {"{*}", "{0,1}"}) {
    for (const auto& phi : subsets_small()->fiber_of(b).elements()) {
      CAPTURE(b);
      CAPTURE(phi);
      auto hs = henkin_step(subsets_small(), b, phi);
      CHECK(hs.entry.inequality_holds);
      CHECK(hs.entry.equality_holds);  // subsets already have witnesses
      CHECK(hs.entry.exists_image == hs.entry.witnessed_image);
      CHECK(check_morphism(hs.morphism).ok());
    }
  }
}

TEST_CASE("saturation over the three-singleton fixture") {
  auto s = henkin_saturate(singletons3(), std::nullopt, 100);
  CHECK(s.trace.steps.size() == 6);  // one step per (object, element)
  CHECK_FALSE(s.trace.truncated);
  CHECK(s.trace.skipped.empty());
  for (const auto& e : s.trace.steps) CHECK(e.equality_holds);
  CHECK(check_morphism(s.morphism).ok());
  CHECK(check_rich(*s.doctrine).rich());
  CHECK(check_structure(*s.doctrine, Layer::Primary).ok());

  SUBCASE("the budget truncates deterministically") {
    auto t = henkin_saturate(singletons3(), std::nullopt, 2);
    CHECK(t.trace.steps.size() == 2);
    CHECK(t.trace.truncated);
    CHECK(t.trace.skipped.size() == 4);
    CHECK(check_morphism(t.morphism).ok());
  }
  SUBCASE("bad targets are rejected") {
    std::vector<std::pair<std::string, std::string>> bad{{"{a}", "nope"}};
    CHECK_THROWS_AS(henkin_saturate(singletons3(), bad, 10),
                    PreconditionError);
  }
  SUBCASE("saturation refuses bases that lose objects") {
    // the square of the two-carrier fixture has no products, so the first
    // step would silently shrink the base
    CHECK_THROWS_AS(henkin_saturate(subsets_small(), std::nullopt, 10),
                    PreconditionError);
  }
}

namespace {

FiniteDirectedDiagram henkin_chain() {
  static auto hs = henkin_step(singletons3(), "{a}",
                               *singletons3()->ops_of("{a}").top);
  FiniteDirectedDiagram d;
  d.index = {"0", "1"};
  d.leq = {{"0", "1"}};
  d.node["0"] = singletons3();
  d.node["1"] = hs.doctrine;
  d.edge[{"0", "1"}] = hs.morphism;
  return d;
}

}  // namespace

TEST_CASE("diagram audits report shape defects") {
  FiniteDirectedDiagram d = henkin_chain();
  CHECK(d.violations().empty());
  CHECK(d.max_index() == "1");

  SUBCASE("missing edge") {
    d.edge.clear();
    CHECK_FALSE(d.violations().empty());
    CHECK_THROWS_AS(directed_colimit(d), PreconditionError);
  }
  SUBCASE("wrong endpoints") {
    d.edge[{"0", "1"}].src = d.node.at("1");
    CHECK_FALSE(d.violations().empty());
  }
  SUBCASE("no upper bound") {
    d.leq.clear();  // 0 and 1 become incomparable
    auto v = d.violations();
    bool undirected = false;
    for (const auto& msg : v)
      if (msg.find("no upper bound") != std::string::npos) undirected = true;
    CHECK(undirected);
    CHECK_THROWS_AS(d.max_index(), PreconditionError);
  }
}

TEST_CASE("three-node diagrams must commute") {
  auto p = chain3();
  auto ax = add_axiom(p, "half");
  FiniteDirectedDiagram d;
  d.index = {"0", "1", "2"};
  d.leq = {{"0", "1"}, {"1", "2"}, {"0", "2"}};
  d.node["0"] = p;
  d.node["1"] = p;
  d.node["2"] = ax.doctrine;
  d.edge[{"0", "1"}] = identity_morphism(p);
  d.edge[{"1", "2"}] = ax.morphism;
  d.edge[{"0", "2"}] = ax.morphism;
  CHECK(d.violations().empty());

  SUBCASE("a corrupted long edge is flagged") {
    d.edge[{"0", "2"}].comp["A"]["0"] = "half";
    auto v = d.violations();
    bool noncommuting = false;
    for (const auto& msg : v)
      if (msg.find("do not compose") != std::string::npos) noncommuting = true;
    CHECK(noncommuting);
  }
  SUBCASE("its colimit is the axiom node") {
    ColimitResult col = directed_colimit(d);
    CHECK(col.max_index == "2");
    for (const auto& [i, leg] : col.cocone) CHECK(check_morphism(leg).ok());
    auto inv = invert_morphism(col.cocone.at("2"));
    REQUIRE(inv.has_value());
    CHECK(check_morphism(*inv).ok());
  }
}

TEST_CASE("colimit of a single witness step") {
  FiniteDirectedDiagram d = henkin_chain();
  ColimitResult col = directed_colimit(d);
  CHECK(col.max_index == "1");
  // every class is represented at index 0: the step is bijective on objects
  CHECK(col.doctrine->base.objects() ==
        std::vector<std::string>{"[0.{*}]", "[0.{a}]", "[0.{b}]"});
  for (const auto& [i, leg] : col.cocone) CHECK(check_morphism(leg).ok());
  CHECK(check_structure(*col.doctrine).ok());

  // cocone property: legs agree along the edge
  CHECK(same_tables(
      compose_morphisms(col.cocone.at("1"), d.edge.at({"0", "1"})),
      col.cocone.at("0")));

  // the maximum leg is an isomorphism
  auto inv = invert_morphism(col.cocone.at("1"));
  REQUIRE(inv.has_value());
  CHECK(check_morphism(*inv).ok());

  SUBCASE("mediator to another cocone") {
    std::map<std::string, DoctrineMorphism> to1;
    to1["0"] = d.edge.at({"0", "1"});
    to1["1"] = identity_morphism(d.node.at("1"));
    DoctrineMorphism med = colimit_mediator(d, col, to1);
    CHECK(check_morphism(med).ok());
    for (const auto& i : d.index)
      CHECK(compose_morphisms(med, col.cocone.at(i)).comp ==
            to1.at(i).comp);
  }
  SUBCASE("non-commuting cocones are rejected") {
    std::map<std::string, DoctrineMorphism> bad;
    bad["0"] = d.edge.at({"0", "1"});
    bad["1"] = identity_morphism(d.node.at("1"));
    bad["0"].comp.begin()->second.begin()->second =
        bad["0"].comp.begin()->second.rbegin()->second;
    CHECK_THROWS_AS(colimit_mediator(d, col, bad), PreconditionError);
  }
  SUBCASE("missing legs are rejected") {
    std::map<std::string, DoctrineMorphism> partial;
    partial["1"] = identity_morphism(d.node.at("1"));
    CHECK_THROWS_AS(colimit_mediator(d, col, partial), PreconditionError);
  }
}

TEST_CASE("single-node diagrams are isomorphic to their node") {
  for (const auto& p : all_fixtures()) {
    FiniteDirectedDiagram d;
    d.index = {"0"};
    d.node["0"] = p;
    CHECK(d.violations().empty());
    ColimitResult col = directed_colimit(d);
    const DoctrineMorphism& leg = col.cocone.at("0");
    CHECK(check_morphism(leg).ok());
    auto inv = invert_morphism(leg);
    REQUIRE(inv.has_value());
    CHECK(check_morphism(*inv).ok());
  }
}

TEST_CASE("double-negation-closed fragment of the chain is two-valued") {
  auto fr = double_negation_fragment(chain3());
  fr.doctrine->require_coherent();
  for (const std::string& o : {"1", "A"})
    CHECK(fr.doctrine->fiber_of(o).elements() ==
          std::vector<std::string>{"0", "1"});
  CHECK(fr.doctrine->layers.count(Layer::Boolean) == 1);
  CHECK(check_structure(*fr.doctrine).ok());
  CHECK(check_morphism(fr.morphism).ok());
  // the fragment map collapses half, so it cannot be inverted
  CHECK_FALSE(invert_morphism(fr.morphism).has_value());
}

TEST_CASE("the fragment of a two-valued doctrine changes nothing") {
  auto fr = double_negation_fragment(subsets_small());
  auto inv = invert_morphism(fr.morphism);
  REQUIRE(inv.has_value());
  CHECK(check_morphism(fr.morphism).ok());
  CHECK(check_morphism(*inv).ok());
}

TEST_CASE("invert_morphism rejects non-bijective tables") {
  auto q = quotient_by_filter(chain3(), {"half", "1"});
  CHECK_FALSE(invert_morphism(q.morphism).has_value());
  auto id = identity_morphism(chain3());
  auto inv = invert_morphism(id);
  REQUIRE(inv.has_value());
  CHECK(same_tables(*inv, id));
}
