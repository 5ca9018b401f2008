#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <string>

#include "doctest.h"
#include "dctk/io.hpp"
#include "helpers.hpp"

using namespace dctk;

namespace {

const char* kMinimalDoc = R"({
  "category": {
    "objects": ["X"],
    "morphisms": {"i": {"dom": "X", "cod": "X"}},
    "compose": [["i", "i", "i"]],
    "identities": {"X": "i"},
    "terminal": "X",
    "bang": {"X": "i"},
    "products": []
  },
  "fibers": {"X": {"elements": ["f", "t"], "leq": [["f","f"],["f","t"],["t","t"]]}},
  "reindex": {"i": {"f": "f", "t": "t"}},
  "structure": {
    "layers": ["primary"],
    "ops": {"X": "derive"},
    "delta": {},
    "exists": [],
    "forall": []
  }
})";

std::string patched(std::string doc, const std::string& from,
                    const std::string& to) {
  doc.replace(doc.find(from), from.size(), to);
  return doc;
}

}  // namespace

TEST_CASE("serialization round-trips every fixture byte for byte") {
  for (const auto& p : all_fixtures()) {
    const std::string s = serialize_doctrine(*p);
    CHECK(s == serialize_doctrine(*p));  // byte-stable
    auto q = parse_doctrine(s);
    q->require_coherent();
    CHECK(serialize_doctrine(*q) == s);
    CHECK(q->base.objects() == p->base.objects());
    CHECK(q->reind == p->reind);
    CHECK(q->delta == p->delta);
    CHECK(q->layers == p->layers);
  }
}

TEST_CASE("a minimal document parses and derives its lattice tables") {
  auto p = parse_doctrine(kMinimalDoc);
  p->require_coherent();
  CHECK(p->base.objects() == std::vector<std::string>{"X"});
  CHECK(*p->ops_of("X").top == "t");
  CHECK(p->ops_of("X").meet_of("f", "t") == "f");
  CHECK(check_structure(*p).ok());
  // the parser checks references, not laws: serialization is total anyway
  CHECK(serialize_doctrine(*parse_doctrine(serialize_doctrine(*p))) ==
        serialize_doctrine(*p));
}

TEST_CASE("syntax errors carry line and column") {
  try {
    parse_doctrine("{\n  \"category\": }");
    FAIL("no exception");
  } catch (const StructuralError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("column") != std::string::npos);
  }
}

TEST_CASE("dangling references are named in the error") {
  SUBCASE("unknown object in a morphism") {
    try {
      parse_doctrine(patched(kMinimalDoc, "\"cod\": \"X\"", "\"cod\": \"Y\""));
      FAIL("no exception");
    } catch (const StructuralError& e) {
      CHECK(std::string(e.what()).find("Y") != std::string::npos);
    }
  }
  SUBCASE("unknown element in a reindex table") {
    CHECK_THROWS_AS(
        parse_doctrine(patched(kMinimalDoc, "\"f\": \"f\"", "\"f\": \"ghost\"")),
        StructuralError);
  }
  SUBCASE("unknown layer name") {
    CHECK_THROWS_AS(
        parse_doctrine(patched(kMinimalDoc, "\"primary\"", "\"modal\"")),
        StructuralError);
  }
  SUBCASE("missing required key") {
    CHECK_THROWS_AS(
        parse_doctrine(patched(kMinimalDoc, "\"terminal\"", "\"termina1\"")),
        StructuralError);
  }
}

TEST_CASE("derive fails loudly on fibers without the structure") {
  // an antichain has no top, so the primary layer cannot be derived
  const std::string doc = patched(
      kMinimalDoc, R"("leq": [["f","f"],["f","t"],["t","t"]])",
      R"("leq": [["f","f"],["t","t"]])");
  try {
    parse_doctrine(doc);
    FAIL("no exception");
  } catch (const StructuralError& e) {
    CHECK(std::string(e.what()).find("derive") != std::string::npos);
  }
}

TEST_CASE("subset doctrine generation normalizes carriers") {
  auto p = gen_subset_doctrine({{"*"}, {"b", "a", "a"}});
  CHECK(p->base.has_object("{a,b}"));
  CHECK(p->base.terminal() == "{*}");
  CHECK_THROWS_AS(gen_subset_doctrine({{"*"}, {}}), PreconditionError);
  // the debug escape hatch admits the empty carrier
  auto q = gen_subset_doctrine({{"*"}, {}}, true);
  CHECK(q->base.has_object("{}"));
  CHECK(q->fiber_of("{}").size() == 1);
}

TEST_CASE("product closure stops at four-element products") {
  const auto& base = subsets_small()->base;
  // the square of the two-element carrier exists...
  CHECK(base.has_object("{(0,0),(0,1),(1,0),(1,1)}"));
  // ...but nothing bigger was generated, and it has no products of its own
  CHECK(base.object_count() == 3);
  CHECK_FALSE(base.has_product("{(0,0),(0,1),(1,0),(1,1)}", "{0,1}"));
}

TEST_CASE("adding the trivial axiom is the identity on documents") {
  auto p = chain3();
  auto ax = add_axiom(p, "1");
  CHECK(serialize_doctrine(*ax.doctrine) == serialize_doctrine(*p));
}

TEST_CASE("diagram documents round-trip") {
  auto p = chain3();
  auto ax = add_axiom(p, "half");
  FiniteDirectedDiagram d;
  d.index = {"0", "1"};
  d.leq = {{"0", "1"}};
  d.node["0"] = p;
  d.node["1"] = ax.doctrine;
  d.edge[{"0", "1"}] = ax.morphism;
  REQUIRE(d.violations().empty());

  const std::string s = serialize_diagram(d);
  CHECK(s == serialize_diagram(d));
  FiniteDirectedDiagram e = parse_diagram(s);
  CHECK(e.violations().empty());
  CHECK(serialize_diagram(e) == s);
  CHECK(e.index == d.index);
  CHECK(e.edge.at({"0", "1"}).comp == d.edge.at({"0", "1"}).comp);

  SUBCASE("edge keys must name two nodes") {
    CHECK_THROWS_AS(parse_diagram(patched(s, "\"0 1\"", "\"0x1\"")),
                    StructuralError);
  }
}

TEST_CASE("input digests are stable") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("abc") == 0xe71fa2190541574bULL);
}
