#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <set>

#include "doctest.h"
#include "dctk/order.hpp"
#include "helpers.hpp"

using namespace dctk;

namespace {

FinPoset chain() {
  return FinPoset({"0", "half", "1"},
                  {{"0", "half"}, {"half", "1"}, {"0", "1"}});
}

FinPoset diamond() {
  return FinPoset({"bot", "a", "b", "top"},
                  {{"bot", "a"},
                   {"bot", "b"},
                   {"bot", "top"},
                   {"a", "top"},
                   {"b", "top"}});
}

// Independent filter oracle: raw subset scan checking the axioms directly.
std::set<std::set<std::string>> filter_oracle(const FinPoset& p,
                                              const LatticeOps& ops) {
  std::set<std::set<std::string>> out;
  const int n = p.size();
  for (int mask = 0; mask < (1 << n); ++mask) {
    std::set<std::string> f;
    for (int i = 0; i < n; ++i)
      if (mask & (1 << i)) f.insert(p.at(i));
    if (!f.count(*ops.top)) continue;
    bool good = true;
    for (const auto& x : f)
      for (const auto& y : f)
        if (!f.count(ops.meet_of(x, y))) good = false;
    for (const auto& x : f)
      for (const auto& y : p.elements())
        if (p.le(x, y) && !f.count(y)) good = false;
    if (good) out.insert(f);
  }
  return out;
}

}  // namespace

TEST_CASE("poset law violations are reported, not repaired") {
  FinPoset open({"0", "half", "1"}, {{"0", "half"}, {"half", "1"}});
  CHECK_FALSE(open.violations().empty());  // transitivity missing
  CHECK(chain().violations().empty());
  FinPoset cyc({"a", "b"}, {{"a", "b"}, {"b", "a"}});
  CHECK_FALSE(cyc.violations().empty());  // antisymmetry
}

TEST_CASE("monotone map violations") {
  MonotoneMap m;
  m.source = chain();
  m.target = chain();
  m.table = {{"0", "1"}, {"half", "0"}, {"1", "half"}};
  CHECK_FALSE(m.violations().empty());
  m.table = {{"0", "0"}, {"half", "half"}, {"1", "1"}};
  CHECK(m.violations().empty());
  CHECK(m("half") == "half");
}

TEST_CASE("derived lattice structure on the chain") {
  FinPoset p = chain();
  LatticeOps ops = derive_lattice_ops(p);
  REQUIRE(ops.top);
  REQUIRE(ops.bottom);
  CHECK(*ops.top == "1");
  CHECK(*ops.bottom == "0");
  CHECK(ops.has_meet);
  CHECK(ops.has_join);
  CHECK(ops.has_imp);
  CHECK(ops.meet_of("half", "1") == "half");
  CHECK(ops.join_of("half", "0") == "half");
  CHECK(ops.imp_of("half", "0") == "0");
  CHECK(ops.imp_of("0", "half") == "1");
  CHECK(ops.neg("half") == "0");
  CHECK(ops.neg("0") == "1");
  CHECK(ops.neg("1") == "0");
  CHECK(ops.violations(p).empty());
}

TEST_CASE("a two-element antichain derives no lattice structure") {
  FinPoset p({"a", "b"}, {});
  LatticeOps ops = derive_lattice_ops(p);
  CHECK_FALSE(ops.top.has_value());
  CHECK_FALSE(ops.has_meet);
}

TEST_CASE("corrupted tables fail the lattice audit") {
  FinPoset p = chain();
  LatticeOps ops = derive_lattice_ops(p);
  ops.meet[{"half", "1"}] = "1";  // not a lower bound
  CHECK_FALSE(ops.violations(p).empty());
}

TEST_CASE("filter enumeration matches the subset-scan oracle") {
  for (auto [p, expected_total, expected_ultra] :
       {std::tuple{chain(), 3, 1}, std::tuple{diamond(), 4, 2}}) {
    LatticeOps ops = derive_lattice_ops(p);
    std::vector<Filter> fs = enumerate_filters(p, ops);
    auto oracle = filter_oracle(p, ops);
    CHECK(fs.size() == oracle.size());
    CHECK(static_cast<int>(fs.size()) == expected_total);
    int ultra = 0;
    for (const auto& f : fs) {
      CHECK(oracle.count(f.members) == 1);
      CHECK(f.ultra == f.maximal);
      if (f.ultra) ++ultra;
    }
    CHECK(ultra == expected_ultra);
  }
}

TEST_CASE("the chain has exactly one ultrafilter") {
  FinPoset p = chain();
  LatticeOps ops = derive_lattice_ops(p);
  std::vector<std::set<std::string>> ultras;
  for (const auto& f : enumerate_filters(p, ops))
    if (f.ultra) ultras.push_back(f.members);
  REQUIRE(ultras.size() == 1);
  CHECK(ultras[0] == std::set<std::string>{"half", "1"});
}

TEST_CASE("greedy ultrafilter extension") {
  FinPoset p = chain();
  LatticeOps ops = derive_lattice_ops(p);
  Filter seed;
  seed.members = {"1"};
  seed.proper = true;
  Filter u = extend_to_ultrafilter(p, ops, seed);
  CHECK(u.proper);
  CHECK(u.ultra);
  CHECK(u.members == std::set<std::string>{"half", "1"});

  FinPoset d = diamond();
  LatticeOps dops = derive_lattice_ops(d);
  seed.members = {"top"};
  Filter du = extend_to_ultrafilter(d, dops, seed);
  CHECK(du.ultra);
  // id-order scan adjoins "a" first
  CHECK(du.members == std::set<std::string>{"a", "top"});
}

TEST_CASE("generated filter is the meet-then-up closure") {
  FinPoset d = diamond();
  LatticeOps ops = derive_lattice_ops(d);
  Filter f = generated_filter(d, ops, {"a", "b"});
  CHECK(f.members == std::set<std::string>{"a", "b", "bot", "top"});
  CHECK_FALSE(classify_filter(d, ops, f.members).proper);
  Filter g = generated_filter(d, ops, {"a"});
  CHECK(g.members == std::set<std::string>{"a", "top"});
  Filter c = classify_filter(d, ops, g.members);
  CHECK(c.proper);
  CHECK(c.ultra);
  CHECK(c.maximal);
}

TEST_CASE("poset reflection collapses mutually related elements") {
  PosetReflection r = poset_reflection(
      {"a", "b", "c"},
      {{"a", "b"}, {"b", "a"}, {"a", "c"}, {"b", "c"}});
  CHECK(r.quotient.size() == 2);
  CHECK(r.quotient.contains("a"));  // least member represents its class
  CHECK(r.quotient.contains("c"));
  CHECK(r.map("b") == "a");
  CHECK(r.quotient.le("a", "c"));
  CHECK_FALSE(r.quotient.le("c", "a"));
  CHECK(r.quotient.violations().empty());

  CHECK_THROWS_AS(
      poset_reflection({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}}),
      PreconditionError);
}

TEST_CASE("fixture fibers classify filters consistently") {
  for (const auto& p : all_fixtures()) {
    for (const auto& obj : p->base.objects()) {
      const FinPoset& f = p->fiber_of(obj);
      if (f.size() > 16) continue;
      const LatticeOps& ops = p->ops_of(obj);
      if (!ops.top || !ops.bottom || !ops.has_meet || !ops.has_imp) continue;
      for (const auto& fl : enumerate_filters(f, ops))
        CHECK(fl.ultra == fl.maximal);
    }
  }
}
