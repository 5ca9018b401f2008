#include "dctk/doctrine.hpp"

#include <algorithm>
#include <sstream>

namespace dctk {

namespace {
constexpr size_t kFailureCap = 100;
}

const std::vector<Layer> kAllLayers = {
    Layer::Primary, Layer::Elementary, Layer::Existential, Layer::Universal,
    Layer::Implicational, Layer::Bounded, Layer::Joins, Layer::Heyting,
    Layer::Boolean,
};

const char* to_string(Layer l) {
  switch (l) {
    case Layer::Primary: return "primary";
    case Layer::Elementary: return "elementary";
    case Layer::Existential: return "existential";
    case Layer::Universal: return "universal";
    case Layer::Implicational: return "implicational";
    case Layer::Bounded: return "bounded";
    case Layer::Joins: return "joins";
    case Layer::Heyting: return "heyting";
    case Layer::Boolean: return "boolean";
  }
  return "?";
}

std::optional<Layer> layer_from_string(const std::string& s) {
  for (Layer l : kAllLayers)
    if (s == to_string(l)) return l;
  return std::nullopt;
}

const char* to_string(ConsistencyStatus s) {
  switch (s) {
    case ConsistencyStatus::Inconsistent: return "inconsistent";
    case ConsistencyStatus::Consistent: return "consistent";
    case ConsistencyStatus::TwoValued: return "two_valued";
  }
  return "?";
}

const FinPoset& Doctrine::fiber_of(const std::string& obj) const {
  auto it = fiber.find(obj);
  if (it == fiber.end()) throw StructuralError("no fiber over " + obj);
  return it->second;
}

const LatticeOps& Doctrine::ops_of(const std::string& obj) const {
  auto it = ops.find(obj);
  if (it == ops.end()) throw StructuralError("no lattice ops over " + obj);
  return it->second;
}

const std::string& Doctrine::reindex(const std::string& mor,
                                     const std::string& elem) const {
  auto it = reind.find(mor);
  if (it == reind.end()) throw StructuralError("no reindexing along " + mor);
  auto jt = it->second.find(elem);
  if (jt == it->second.end())
    throw StructuralError("reindexing along " + mor + " has no entry for " +
                          elem);
  return jt->second;
}

const std::string& Doctrine::exists_of(const std::string& c,
                                       const std::string& b,
                                       const std::string& elem) const {
  auto it = exists_.find({c, b});
  if (it == exists_.end())
    throw StructuralError("no existential table at (" + c + ", " + b + ")");
  auto jt = it->second.find(elem);
  if (jt == it->second.end())
    throw StructuralError("existential table at (" + c + ", " + b +
                          ") has no entry for " + elem);
  return jt->second;
}

const std::string& Doctrine::forall_of(const std::string& c,
                                       const std::string& b,
                                       const std::string& elem) const {
  auto it = forall_.find({c, b});
  if (it == forall_.end())
    throw StructuralError("no universal table at (" + c + ", " + b + ")");
  auto jt = it->second.find(elem);
  if (jt == it->second.end())
    throw StructuralError("universal table at (" + c + ", " + b +
                          ") has no entry for " + elem);
  return jt->second;
}

const std::string& Doctrine::delta_of(const std::string& obj) const {
  auto it = delta.find(obj);
  if (it == delta.end()) throw StructuralError("no delta for " + obj);
  return it->second;
}

void Doctrine::require_coherent() const {
  if (!base.finalized()) throw StructuralError("base category not finalized");
  for (const auto& a : base.objects()) {
    fiber_of(a);
    ops_of(a);
  }
  for (const auto& m : base.morphisms()) {
    auto it = reind.find(m);
    if (it == reind.end()) throw StructuralError("no reindexing along " + m);
    const FinPoset& from = fiber_of(base.cod(m));
    const FinPoset& to = fiber_of(base.dom(m));
    for (const auto& e : from.elements()) {
      auto jt = it->second.find(e);
      if (jt == it->second.end())
        throw StructuralError("reindexing along " + m + " misses " + e);
      if (!to.contains(jt->second))
        throw StructuralError("reindexing along " + m + " sends " + e +
                              " outside the fiber");
    }
  }
  auto need = [&](bool cond, const std::string& what) {
    if (!cond) throw StructuralError("declared layer needs " + what);
  };
  bool heyting = layers.count(Layer::Heyting) || layers.count(Layer::Boolean);
  for (const auto& a : base.objects()) {
    const LatticeOps& o = ops_of(a);
    if (layers.count(Layer::Primary) || heyting)
      need(o.top && o.has_meet, "top and meet over " + a);
    if (layers.count(Layer::Bounded) || heyting)
      need(o.top.has_value() && o.bottom.has_value(),
           "top and bottom over " + a);
    if (layers.count(Layer::Implicational) || heyting)
      need(o.has_imp && o.has_meet, "implication over " + a);
    if (layers.count(Layer::Joins) || heyting) need(o.has_join, "join over " + a);
  }
  if (layers.count(Layer::Elementary)) {
    for (const auto& a : base.objects()) {
      if (!base.has_product(a, a)) continue;
      const auto& d = delta_of(a);
      if (!fiber_of(base.product(a, a).obj).contains(d))
        throw StructuralError("delta of " + a + " is not in fiber(" + a +
                              " x " + a + ")");
    }
  }
  auto check_quant = [&](const auto& table, const char* name) {
    for (const auto& [key, p] : base.products()) {
      if (!table.count(key))
        throw StructuralError(std::string("declared layer needs a ") + name +
                              " table at (" + key.first + ", " + key.second +
                              ")");
      const FinPoset& from = fiber_of(p.obj);
      const FinPoset& to = fiber_of(key.first);
      const auto& t = table.at(key);
      for (const auto& e : from.elements()) {
        auto jt = t.find(e);
        if (jt == t.end() || !to.contains(jt->second))
          throw StructuralError(std::string(name) + " table at (" + key.first +
                                ", " + key.second +
                                ") is not total into fiber(" + key.first +
                                ")");
      }
    }
  };
  if (layers.count(Layer::Existential)) check_quant(exists_, "existential");
  if (layers.count(Layer::Universal)) check_quant(forall_, "universal");
}

void StructureReport::add(const std::string& layer, const std::string& msg) {
  auto& v = failures[layer];
  if (v.size() < kFailureCap)
    v.push_back(msg);
  else
    ++suppressed[layer];
}

void StructureReport::merge(const StructureReport& other) {
  for (const auto& [l, msgs] : other.failures)
    for (const auto& m : msgs) add(l, m);
  for (const auto& [l, n] : other.suppressed) suppressed[l] += n;
}

std::string StructureReport::summary() const {
  if (ok()) return "ok";
  std::ostringstream os;
  bool first = true;
  for (const auto& [l, msgs] : failures) {
    if (!first) os << "; ";
    first = false;
    os << l << ": " << msgs.size() << " counterexample(s)";
  }
  return os.str();
}

namespace {

// Shared helpers for the layer checkers.

std::string dot(const Doctrine& p, const std::string& g,
                const std::string& f) {
  return p.base.compose(g, f);
}

void check_functorial(const Doctrine& p, StructureReport& rep) {
  const FinCategory& c = p.base;
  for (const auto& a : c.objects()) {
    const std::string& id = c.identity(a);
    for (const auto& e : p.fiber_of(a).elements())
      if (p.reindex(id, e) != e)
        rep.add("functorial", "reindexing along identity of " + a +
                                  " moves " + e);
  }
  // Monotonicity of every reindexing.
  for (const auto& m : c.morphisms()) {
    const FinPoset& from = p.fiber_of(c.cod(m));
    const FinPoset& to = p.fiber_of(c.dom(m));
    for (const auto& x : from.elements())
      for (const auto& y : from.elements())
        if (from.le(x, y) && !to.le(p.reindex(m, x), p.reindex(m, y)))
          rep.add("functorial", "reindexing along " + m +
                                    " is not monotone at (" + x + ", " + y +
                                    ")");
  }
  // Contravariant composition law over all composable pairs.
  const int mc = c.morphism_count();
  for (int f = 0; f < mc; ++f) {
    const std::string& fid = c.morphism_at(f);
    for (int g : c.morphisms_from(c.cod_at(f))) {
      int gf = c.compose_at(g, f);
      if (gf < 0) continue;  // reported by validate_category
      const std::string& gid = c.morphism_at(g);
      const std::string& gfid = c.morphism_at(gf);
      for (const auto& e : p.fiber_of(c.object_at(c.cod_at(g))).elements())
        if (p.reindex(gfid, e) != p.reindex(fid, p.reindex(gid, e)))
          rep.add("functorial", "reindexing composition law fails on (" + gid +
                                    ", " + fid + ") at " + e);
    }
  }
}

void check_primary(const Doctrine& p, StructureReport& rep) {
  for (const auto& a : p.base.objects()) {
    const FinPoset& f = p.fiber_of(a);
    const LatticeOps& o = p.ops_of(a);
    if (!o.top || !o.has_meet)
      throw StructuralError("primary layer needs top and meet over " + a);
    for (const auto& x : f.elements()) {
      if (!f.le(x, *o.top))
        rep.add("primary", "top of " + a + " is not above " + x);
      for (const auto& y : f.elements()) {
        const std::string& m = o.meet_of(x, y);
        bool glb = f.le(m, x) && f.le(m, y);
        for (const auto& z : f.elements())
          if (f.le(z, x) && f.le(z, y) && !f.le(z, m)) glb = false;
        if (!glb)
          rep.add("primary",
                  "meet(" + x + ", " + y + ") over " + a + " is not the glb");
      }
    }
  }
  for (const auto& m : p.base.morphisms()) {
    const std::string &a = p.base.dom(m), &b = p.base.cod(m);
    const LatticeOps &oa = p.ops_of(a), &ob = p.ops_of(b);
    if (p.reindex(m, *ob.top) != *oa.top)
      rep.add("primary", "reindexing along " + m + " does not preserve top");
    for (const auto& x : p.fiber_of(b).elements())
      for (const auto& y : p.fiber_of(b).elements())
        if (p.reindex(m, ob.meet_of(x, y)) !=
            oa.meet_of(p.reindex(m, x), p.reindex(m, y)))
          rep.add("primary", "reindexing along " + m +
                                 " does not preserve meet(" + x + ", " + y +
                                 ")");
  }
}

void check_elementary(const Doctrine& p, StructureReport& rep) {
  const FinCategory& c = p.base;
  for (const auto& a : c.objects()) {
    if (!c.has_product(a, a)) continue;
    const auto& pr = c.product(a, a);
    const std::string& d = p.delta_of(a);
    const FinPoset& fp = p.fiber_of(pr.obj);
    const LatticeOps& op = p.ops_of(pr.obj);
    const std::string diag = c.tuple(c.identity(a), c.identity(a));
    // (1) top <= P(diag)(delta)
    if (!p.fiber_of(a).le(*p.ops_of(a).top, p.reindex(diag, d)))
      rep.add("elementary", "condition 1 fails at " + a);
    // (2) P(pr1)x /\ delta <= P(pr2)x for every fiber element of A
    for (const auto& x : p.fiber_of(a).elements())
      if (!fp.le(op.meet_of(p.reindex(pr.pr1, x), d), p.reindex(pr.pr2, x)))
        rep.add("elementary", "condition 2 fails at " + a + " on " + x);
    // Derived instance: P(<pr1,pr1>)(g) /\ delta <= g for every g
    const std::string pp = c.tuple(pr.pr1, pr.pr1);
    for (const auto& g : fp.elements())
      if (!fp.le(op.meet_of(p.reindex(pp, g), d), g))
        rep.add("elementary",
                "derived substitution instance fails at " + a + " on " + g);
  }
  // (3) and its converse, where all four chosen products exist.
  for (const auto& a : c.objects()) {
    if (!c.has_product(a, a)) continue;
    for (const auto& b : c.objects()) {
      if (!c.has_product(b, b) || !c.has_product(a, b)) continue;
      const auto& pab = c.product(a, b);
      if (!c.has_product(pab.obj, pab.obj)) continue;
      const auto& q = c.product(pab.obj, pab.obj);
      const std::string t13 =
          c.tuple(dot(p, pab.pr1, q.pr1), dot(p, pab.pr1, q.pr2));
      const std::string t24 =
          c.tuple(dot(p, pab.pr2, q.pr1), dot(p, pab.pr2, q.pr2));
      const LatticeOps& oq = p.ops_of(q.obj);
      const std::string box = oq.meet_of(p.reindex(t13, p.delta_of(a)),
                                         p.reindex(t24, p.delta_of(b)));
      const std::string& dab = p.delta_of(pab.obj);
      const FinPoset& fq = p.fiber_of(q.obj);
      if (!fq.le(box, dab))
        rep.add("elementary",
                "condition 3 fails at (" + a + ", " + b + ")");
      if (!fq.le(dab, box))
        rep.add("elementary",
                "converse of condition 3 fails at (" + a + ", " + b + ")");
    }
  }
}

void check_quantifier(const Doctrine& p, bool existential,
                      StructureReport& rep) {
  const FinCategory& c = p.base;
  const auto& tables = existential ? p.exists_ : p.forall_;
  const char* layer = existential ? "existential" : "universal";
  for (const auto& [key, table] : tables) {
    const auto& [cc, bb] = key;
    if (!c.has_product(cc, bb))
      throw StructuralError(std::string(layer) + " table at (" + cc + ", " +
                            bb + ") has no chosen product");
    const auto& pr = c.product(cc, bb);
    const FinPoset& fp = p.fiber_of(pr.obj);
    const FinPoset& fc = p.fiber_of(cc);
    auto q = [&](const std::string& e) -> const std::string& {
      return existential ? p.exists_of(cc, bb, e) : p.forall_of(cc, bb, e);
    };
    const std::string tag = "(" + cc + ", " + bb + ")";
    // Monotone table.
    for (const auto& x : fp.elements())
      for (const auto& y : fp.elements())
        if (fp.le(x, y) && !fc.le(q(x), q(y)))
          rep.add(layer, tag + ": table not monotone at (" + x + ", " + y + ")");
    // Adjunction, in equivalence and unit/counit form.
    for (const auto& x : fp.elements()) {
      for (const auto& g : fc.elements()) {
        bool lhs = existential ? fc.le(q(x), g) : fc.le(g, q(x));
        bool rhs = existential ? fp.le(x, p.reindex(pr.pr1, g))
                               : fp.le(p.reindex(pr.pr1, g), x);
        if (lhs != rhs)
          rep.add(layer,
                  tag + ": adjunction fails at (" + x + ", " + g + ")");
      }
      if (existential) {
        if (!fp.le(x, p.reindex(pr.pr1, q(x))))
          rep.add(layer, tag + ": unit fails at " + x);
      } else {
        if (!fp.le(p.reindex(pr.pr1, q(x)), x))
          rep.add(layer, tag + ": counit fails at " + x);
      }
    }
    for (const auto& g : fc.elements()) {
      if (existential) {
        if (!fc.le(q(p.reindex(pr.pr1, g)), g))
          rep.add(layer, tag + ": counit fails at " + g);
      } else {
        if (!fc.le(g, q(p.reindex(pr.pr1, g))))
          rep.add(layer, tag + ": unit fails at " + g);
      }
    }
    // Frobenius reciprocity (existential only).
    if (existential) {
      const LatticeOps& op = p.ops_of(pr.obj);
      const LatticeOps& oc = p.ops_of(cc);
      if (op.has_meet && oc.has_meet)
        for (const auto& x : fp.elements())
          for (const auto& g : fc.elements())
            if (q(op.meet_of(x, p.reindex(pr.pr1, g))) !=
                oc.meet_of(q(x), g))
              rep.add(layer, tag + ": Frobenius fails at (" + x + ", " + g +
                                 ")");
    }
    // Beck-Chevalley against every f: C -> C' with a table at (C', B).
    for (const auto& [key2, table2] : tables) {
      if (key2.second != bb) continue;
      const auto& c2 = key2.first;
      const auto& pr2 = c.product(c2, bb);
      for (const auto& f : c.hom_set(cc, c2)) {
        const std::string fxid =
            c.tuple(dot(p, f, pr.pr1), pr.pr2);  // C x B -> C' x B
        for (const auto& x : p.fiber_of(pr2.obj).elements()) {
          const std::string& lhs = q(p.reindex(fxid, x));
          const std::string& rhs =
              p.reindex(f, existential ? p.exists_of(c2, bb, x)
                                       : p.forall_of(c2, bb, x));
          if (lhs != rhs)
            rep.add(layer, tag + ": Beck-Chevalley fails along " + f +
                               " at " + x);
        }
      }
    }
  }
}

void check_implicational(const Doctrine& p, StructureReport& rep) {
  for (const auto& a : p.base.objects()) {
    const FinPoset& f = p.fiber_of(a);
    const LatticeOps& o = p.ops_of(a);
    if (!o.has_imp || !o.has_meet)
      throw StructuralError("implicational layer needs imp and meet over " +
                            a);
    for (const auto& x : f.elements())
      for (const auto& y : f.elements())
        for (const auto& z : f.elements())
          if (f.le(z, o.imp_of(x, y)) != f.le(o.meet_of(z, x), y))
            rep.add("implicational", "residual law fails over " + a +
                                         " at (" + z + ", " + x + ", " + y +
                                         ")");
  }
  for (const auto& m : p.base.morphisms()) {
    const LatticeOps& oa = p.ops_of(p.base.dom(m));
    const LatticeOps& ob = p.ops_of(p.base.cod(m));
    for (const auto& x : p.fiber_of(p.base.cod(m)).elements())
      for (const auto& y : p.fiber_of(p.base.cod(m)).elements())
        if (p.reindex(m, ob.imp_of(x, y)) !=
            oa.imp_of(p.reindex(m, x), p.reindex(m, y)))
          rep.add("implicational", "reindexing along " + m +
                                       " does not preserve imp(" + x + ", " +
                                       y + ")");
  }
}

void check_bounded(const Doctrine& p, StructureReport& rep) {
  for (const auto& a : p.base.objects()) {
    const FinPoset& f = p.fiber_of(a);
    const LatticeOps& o = p.ops_of(a);
    if (!o.top || !o.bottom)
      throw StructuralError("bounded layer needs top and bottom over " + a);
    for (const auto& x : f.elements()) {
      if (!f.le(x, *o.top))
        rep.add("bounded", "top of " + a + " is not above " + x);
      if (!f.le(*o.bottom, x))
        rep.add("bounded", "bottom of " + a + " is not below " + x);
    }
  }
  for (const auto& m : p.base.morphisms()) {
    const LatticeOps& oa = p.ops_of(p.base.dom(m));
    const LatticeOps& ob = p.ops_of(p.base.cod(m));
    if (p.reindex(m, *ob.top) != *oa.top)
      rep.add("bounded", "reindexing along " + m + " does not preserve top");
    if (p.reindex(m, *ob.bottom) != *oa.bottom)
      rep.add("bounded",
              "reindexing along " + m + " does not preserve bottom");
  }
}

void check_joins(const Doctrine& p, StructureReport& rep) {
  for (const auto& a : p.base.objects()) {
    const FinPoset& f = p.fiber_of(a);
    const LatticeOps& o = p.ops_of(a);
    if (!o.has_join)
      throw StructuralError("joins layer needs join over " + a);
    for (const auto& x : f.elements())
      for (const auto& y : f.elements()) {
        const std::string& j = o.join_of(x, y);
        bool lub = f.le(x, j) && f.le(y, j);
        for (const auto& z : f.elements())
          if (f.le(x, z) && f.le(y, z) && !f.le(j, z)) lub = false;
        if (!lub)
          rep.add("joins",
                  "join(" + x + ", " + y + ") over " + a + " is not the lub");
      }
  }
  for (const auto& m : p.base.morphisms()) {
    const LatticeOps& oa = p.ops_of(p.base.dom(m));
    const LatticeOps& ob = p.ops_of(p.base.cod(m));
    for (const auto& x : p.fiber_of(p.base.cod(m)).elements())
      for (const auto& y : p.fiber_of(p.base.cod(m)).elements())
        if (p.reindex(m, ob.join_of(x, y)) !=
            oa.join_of(p.reindex(m, x), p.reindex(m, y)))
          rep.add("joins", "reindexing along " + m +
                               " does not preserve join(" + x + ", " + y +
                               ")");
  }
}

void check_boolean(const Doctrine& p, StructureReport& rep) {
  for (const auto& a : p.base.objects()) {
    const FinPoset& f = p.fiber_of(a);
    const LatticeOps& o = p.ops_of(a);
    if (!o.has_imp || !o.bottom)
      throw StructuralError("boolean layer needs imp and bottom over " + a);
    for (const auto& x : f.elements())
      if (o.neg(o.neg(x)) != x)
        rep.add("boolean",
                "double negation is not the identity over " + a + " at " + x);
  }
}

}  // namespace

StructureReport check_structure(const Doctrine& p, Layer layer) {
  p.require_coherent();
  StructureReport rep;
  check_functorial(p, rep);
  switch (layer) {
    case Layer::Primary: check_primary(p, rep); break;
    case Layer::Elementary: check_elementary(p, rep); break;
    case Layer::Existential: check_quantifier(p, true, rep); break;
    case Layer::Universal: check_quantifier(p, false, rep); break;
    case Layer::Implicational: check_implicational(p, rep); break;
    case Layer::Bounded: check_bounded(p, rep); break;
    case Layer::Joins: check_joins(p, rep); break;
    case Layer::Heyting:
      check_primary(p, rep);
      check_bounded(p, rep);
      check_joins(p, rep);
      check_implicational(p, rep);
      break;
    case Layer::Boolean:
      check_primary(p, rep);
      check_bounded(p, rep);
      check_joins(p, rep);
      check_implicational(p, rep);
      check_boolean(p, rep);
      break;
  }
  return rep;
}

StructureReport check_structure(const Doctrine& p) {
  p.require_coherent();
  StructureReport rep;
  check_functorial(p, rep);
  for (Layer l : kAllLayers) {
    if (!p.layers.count(l)) continue;
    StructureReport one = check_structure(p, l);
    one.failures.erase("functorial");  // already included once
    rep.merge(one);
  }
  return rep;
}

const std::string& DoctrineMorphism::on_obj(const std::string& a) const {
  auto it = obj_map.find(a);
  if (it == obj_map.end()) throw StructuralError("no image for object " + a);
  return it->second;
}

const std::string& DoctrineMorphism::on_mor(const std::string& f) const {
  auto it = mor_map.find(f);
  if (it == mor_map.end())
    throw StructuralError("no image for morphism " + f);
  return it->second;
}

const std::string& DoctrineMorphism::on_elem(const std::string& obj,
                                             const std::string& elem) const {
  auto it = comp.find(obj);
  if (it == comp.end())
    throw StructuralError("no fiber component at " + obj);
  auto jt = it->second.find(elem);
  if (jt == it->second.end())
    throw StructuralError("fiber component at " + obj + " misses " + elem);
  return jt->second;
}

DoctrineMorphism identity_morphism(std::shared_ptr<const Doctrine> p) {
  DoctrineMorphism m;
  m.src = m.dst = p;
  for (const auto& a : p->base.objects()) {
    m.obj_map[a] = a;
    auto& t = m.comp[a];
    for (const auto& e : p->fiber_of(a).elements()) t[e] = e;
  }
  for (const auto& f : p->base.morphisms()) m.mor_map[f] = f;
  m.preserved = p->layers;
  return m;
}

DoctrineMorphism compose_morphisms(const DoctrineMorphism& g,
                                   const DoctrineMorphism& f) {
  if (f.dst.get() != g.src.get())
    throw PreconditionError("compose_morphisms: endpoints do not match");
  DoctrineMorphism m;
  m.src = f.src;
  m.dst = g.dst;
  for (const auto& [a, fa] : f.obj_map) m.obj_map[a] = g.on_obj(fa);
  for (const auto& [h, fh] : f.mor_map) m.mor_map[h] = g.on_mor(fh);
  for (const auto& [a, t] : f.comp) {
    auto& out = m.comp[a];
    for (const auto& [e, fe] : t) out[e] = g.on_elem(f.on_obj(a), fe);
  }
  for (Layer l : f.preserved)
    if (g.preserved.count(l)) m.preserved.insert(l);
  return m;
}

namespace {

// Finds the inverse of an iso in the destination category, if any.
std::optional<std::string> find_inverse(const FinCategory& c,
                                        const std::string& m) {
  const std::string &a = c.dom(m), &b = c.cod(m);
  for (const auto& n : c.hom_set(b, a))
    if (c.compose(n, m) == c.identity(a) && c.compose(m, n) == c.identity(b))
      return n;
  return std::nullopt;
}

// The comparison arrow F(A x B) -> F A x' F B given by the destination's
// tupling of the images of the chosen projections.  Empty optional when the
// destination lacks a chosen product at (F A, F B) or tupling fails.
std::optional<std::string> product_comparison(const DoctrineMorphism& m,
                                              const std::string& a,
                                              const std::string& b) {
  const auto& pr = m.src->base.product(a, b);
  const FinCategory& d = m.dst->base;
  if (!d.has_product(m.on_obj(a), m.on_obj(b))) return std::nullopt;
  try {
    return d.tuple(m.on_mor(pr.pr1), m.on_mor(pr.pr2));
  } catch (const PreconditionError&) {
    return std::nullopt;
  }
}

void check_morphism_base(const DoctrineMorphism& m, StructureReport& rep) {
  const FinCategory& s = m.src->base;
  const FinCategory& d = m.dst->base;
  for (const auto& a : s.objects())
    if (!d.has_object(m.on_obj(a)))
      rep.add("functor", "image of object " + a + " is unknown");
  for (const auto& f : s.morphisms()) {
    const std::string& ff = m.on_mor(f);
    if (!d.has_morphism(ff)) {
      rep.add("functor", "image of morphism " + f + " is unknown");
      continue;
    }
    if (d.dom(ff) != m.on_obj(s.dom(f)) || d.cod(ff) != m.on_obj(s.cod(f)))
      rep.add("functor", "image of " + f + " is ill-typed");
  }
  for (const auto& a : s.objects())
    if (m.on_mor(s.identity(a)) != d.identity(m.on_obj(a)))
      rep.add("functor", "identity of " + a + " is not preserved");
  const int mc = s.morphism_count();
  for (int f = 0; f < mc; ++f)
    for (int g : s.morphisms_from(s.cod_at(f))) {
      int gf = s.compose_at(g, f);
      if (gf < 0) continue;
      if (m.on_mor(s.morphism_at(gf)) !=
          d.compose(m.on_mor(s.morphism_at(g)), m.on_mor(s.morphism_at(f))))
        rep.add("functor", "composition not preserved on (" +
                               s.morphism_at(g) + ", " + s.morphism_at(f) +
                               ")");
    }
  // Terminal preservation: the image of t must be terminal in dst.
  const std::string& ft = m.on_obj(s.terminal());
  for (const auto& a : d.objects())
    if (d.hom_set(a, ft).size() != 1) {
      rep.add("functor", "image of the terminal is not terminal (seen from " +
                             a + ")");
      break;
    }
  // Product preservation up to iso: the image cone must be a product cone.
  for (const auto& [key, pr] : s.products()) {
    const std::string tag =
        "product (" + key.first + ", " + key.second + ")";
    auto mu = product_comparison(m, key.first, key.second);
    if (mu) {
      if (!find_inverse(d, *mu))
        rep.add("functor", tag + ": comparison arrow is not invertible");
      continue;
    }
    // No chosen product on the image pair: check the universal property of
    // the image cone directly.
    const std::string fp = m.on_obj(pr.obj);
    const std::string p1 = m.on_mor(pr.pr1), p2 = m.on_mor(pr.pr2);
    for (const auto& cobj : d.objects()) {
      std::map<std::pair<std::string, std::string>, int> seen;
      for (const auto& h : d.hom_set(cobj, fp))
        ++seen[{d.compose(p1, h), d.compose(p2, h)}];
      for (const auto& f : d.hom_set(cobj, m.on_obj(key.first)))
        for (const auto& g : d.hom_set(cobj, m.on_obj(key.second))) {
          auto it = seen.find({f, g});
          if (it == seen.end() || it->second != 1)
            rep.add("functor", tag + ": image cone fails the universal "
                                     "property from " +
                                   cobj);
        }
    }
  }
}

void check_morphism_naturality(const DoctrineMorphism& m,
                               StructureReport& rep) {
  const FinCategory& s = m.src->base;
  for (const auto& a : s.objects()) {
    const FinPoset& fs = m.src->fiber_of(a);
    const FinPoset& fd = m.dst->fiber_of(m.on_obj(a));
    for (const auto& e : fs.elements())
      if (!fd.contains(m.on_elem(a, e)))
        rep.add("naturality",
                "component at " + a + " sends " + e + " outside the fiber");
    for (const auto& x : fs.elements())
      for (const auto& y : fs.elements())
        if (fs.le(x, y) && !fd.le(m.on_elem(a, x), m.on_elem(a, y)))
          rep.add("naturality", "component at " + a +
                                    " is not monotone at (" + x + ", " + y +
                                    ")");
  }
  for (const auto& f : s.morphisms()) {
    const std::string &a = s.dom(f), &b = s.cod(f);
    for (const auto& e : m.src->fiber_of(b).elements())
      if (m.on_elem(a, m.src->reindex(f, e)) !=
          m.dst->reindex(m.on_mor(f), m.on_elem(b, e)))
        rep.add("naturality",
                "square fails along " + f + " at " + e);
  }
}

void check_morphism_layer(const DoctrineMorphism& m, Layer layer,
                          StructureReport& rep) {
  const Doctrine& p = *m.src;
  const Doctrine& r = *m.dst;
  switch (layer) {
    case Layer::Primary:
      for (const auto& a : p.base.objects()) {
        const LatticeOps& os = p.ops_of(a);
        const LatticeOps& od = r.ops_of(m.on_obj(a));
        if (m.on_elem(a, *os.top) != *od.top)
          rep.add("primary", "top not preserved at " + a);
        for (const auto& x : p.fiber_of(a).elements())
          for (const auto& y : p.fiber_of(a).elements())
            if (m.on_elem(a, os.meet_of(x, y)) !=
                od.meet_of(m.on_elem(a, x), m.on_elem(a, y)))
              rep.add("primary", "meet not preserved at " + a + " on (" + x +
                                     ", " + y + ")");
      }
      break;
    case Layer::Bounded:
      for (const auto& a : p.base.objects()) {
        if (m.on_elem(a, *p.ops_of(a).top) != *r.ops_of(m.on_obj(a)).top)
          rep.add("bounded", "top not preserved at " + a);
        if (m.on_elem(a, *p.ops_of(a).bottom) !=
            *r.ops_of(m.on_obj(a)).bottom)
          rep.add("bounded", "bottom not preserved at " + a);
      }
      break;
    case Layer::Implicational:
      for (const auto& a : p.base.objects()) {
        const LatticeOps& os = p.ops_of(a);
        const LatticeOps& od = r.ops_of(m.on_obj(a));
        for (const auto& x : p.fiber_of(a).elements())
          for (const auto& y : p.fiber_of(a).elements())
            if (m.on_elem(a, os.imp_of(x, y)) !=
                od.imp_of(m.on_elem(a, x), m.on_elem(a, y)))
              rep.add("implicational", "imp not preserved at " + a + " on (" +
                                           x + ", " + y + ")");
      }
      break;
    case Layer::Joins:
      for (const auto& a : p.base.objects()) {
        const LatticeOps& os = p.ops_of(a);
        const LatticeOps& od = r.ops_of(m.on_obj(a));
        for (const auto& x : p.fiber_of(a).elements())
          for (const auto& y : p.fiber_of(a).elements())
            if (m.on_elem(a, os.join_of(x, y)) !=
                od.join_of(m.on_elem(a, x), m.on_elem(a, y)))
              rep.add("joins", "join not preserved at " + a + " on (" + x +
                                   ", " + y + ")");
      }
      break;
    case Layer::Elementary:
      for (const auto& a : p.base.objects()) {
        if (!p.base.has_product(a, a) || !p.delta.count(a)) continue;
        const auto& pr = p.base.product(a, a);
        auto mu = product_comparison(m, a, a);
        if (!mu) {
          rep.add("elementary",
                  "no comparison arrow for the image of (" + a + ", " + a +
                      ")");
          continue;
        }
        if (!r.delta.count(m.on_obj(a))) {
          rep.add("elementary", "destination has no delta at the image of " +
                                    a);
          continue;
        }
        if (m.on_elem(pr.obj, p.delta_of(a)) !=
            r.reindex(*mu, r.delta_of(m.on_obj(a))))
          rep.add("elementary", "delta not preserved at " + a);
      }
      break;
    case Layer::Existential:
    case Layer::Universal: {
      bool ex = layer == Layer::Existential;
      const auto& tables = ex ? p.exists_ : p.forall_;
      const char* tagl = ex ? "existential" : "universal";
      for (const auto& [key, table] : tables) {
        const auto& pr = p.base.product(key.first, key.second);
        const std::string fc = m.on_obj(key.first), fb = m.on_obj(key.second);
        auto mu = product_comparison(m, key.first, key.second);
        if (!mu) {
          rep.add(tagl, std::string("no comparison arrow for the image of (") +
                            key.first + ", " + key.second + ")");
          continue;
        }
        auto nu = find_inverse(r.base, *mu);
        if (!nu) {
          rep.add(tagl, std::string("comparison arrow not invertible at (") +
                            key.first + ", " + key.second + ")");
          continue;
        }
        const auto& dtab = ex ? r.exists_ : r.forall_;
        if (!dtab.count({fc, fb})) {
          rep.add(tagl, std::string("destination lacks a table at (") + fc +
                            ", " + fb + ")");
          continue;
        }
        for (const auto& x : p.fiber_of(pr.obj).elements()) {
          const std::string moved = r.reindex(*nu, m.on_elem(pr.obj, x));
          const std::string& lhs =
              m.on_elem(key.first, ex ? p.exists_of(key.first, key.second, x)
                                      : p.forall_of(key.first, key.second, x));
          const std::string& rhs = ex ? r.exists_of(fc, fb, moved)
                                      : r.forall_of(fc, fb, moved);
          if (lhs != rhs)
            rep.add(tagl, std::string("quantifier not preserved at (") +
                              key.first + ", " + key.second + ") on " + x);
        }
      }
      break;
    }
    case Layer::Heyting:
      check_morphism_layer(m, Layer::Primary, rep);
      check_morphism_layer(m, Layer::Bounded, rep);
      check_morphism_layer(m, Layer::Joins, rep);
      check_morphism_layer(m, Layer::Implicational, rep);
      break;
    case Layer::Boolean:
      check_morphism_layer(m, Layer::Heyting, rep);
      break;
  }
}

}  // namespace

StructureReport check_morphism(const DoctrineMorphism& m,
                               const std::set<Layer>& layers) {
  if (!m.src || !m.dst) throw StructuralError("morphism without endpoints");
  StructureReport rep;
  check_morphism_base(m, rep);
  if (!rep.ok()) return rep;  // later checks assume a functor
  check_morphism_naturality(m, rep);
  for (Layer l : layers) check_morphism_layer(m, l, rep);
  return rep;
}

StructureReport check_morphism(const DoctrineMorphism& m) {
  return check_morphism(m, m.preserved);
}

StructureReport check_2cell(const TwoCell& t) {
  if (t.f.src.get() != t.g.src.get() || t.f.dst.get() != t.g.dst.get())
    throw PreconditionError("2-cell endpoints do not match");
  StructureReport rep;
  const Doctrine& r = *t.f.dst;
  const FinCategory& s = t.f.src->base;
  for (const auto& a : s.objects()) {
    auto it = t.theta.find(a);
    if (it == t.theta.end()) {
      rep.add("2cell", "no component at " + a);
      continue;
    }
    if (!r.base.has_morphism(it->second) ||
        r.base.dom(it->second) != t.f.on_obj(a) ||
        r.base.cod(it->second) != t.g.on_obj(a))
      rep.add("2cell", "component at " + a + " is ill-typed");
  }
  if (!rep.ok()) return rep;
  for (const auto& h : s.morphisms()) {
    const std::string &a = s.dom(h), &b = s.cod(h);
    if (r.base.compose(t.theta.at(b), t.f.on_mor(h)) !=
        r.base.compose(t.g.on_mor(h), t.theta.at(a)))
      rep.add("2cell", "naturality square fails along " + h);
  }
  for (const auto& a : s.objects()) {
    const FinPoset& fd = r.fiber_of(t.f.on_obj(a));
    for (const auto& x : t.f.src->fiber_of(a).elements())
      if (!fd.le(t.f.on_elem(a, x),
                 r.reindex(t.theta.at(a), t.g.on_elem(a, x))))
        rep.add("2cell", "fiber inequality fails at " + a + " on " + x);
  }
  return rep;
}

bool RichReport::rich() const {
  for (const auto& e : entries)
    if (!e.witness) return false;
  return true;
}

std::vector<RichReport::Entry> RichReport::failures() const {
  std::vector<Entry> out;
  for (const auto& e : entries)
    if (!e.witness) out.push_back(e);
  return out;
}

RichReport check_rich(const Doctrine& p) {
  RichReport rep;
  const FinCategory& c = p.base;
  const std::string& t = c.terminal();
  for (const auto& a : c.objects()) {
    if (!c.has_product(t, a))
      throw StructuralError("check_rich needs a chosen product (" + t + ", " +
                            a + ")");
    const auto& pr = c.product(t, a);
    const FinPoset& ft = p.fiber_of(t);
    for (const auto& s : p.fiber_of(a).elements()) {
      RichReport::Entry e;
      e.obj = a;
      e.elem = s;
      const std::string& ex = p.exists_of(t, a, p.reindex(pr.pr2, s));
      for (const auto& d : c.hom_set(t, a)) {
        const std::string& ds = p.reindex(d, s);
        if (ft.le(ex, ds)) {
          e.witness = d;
          e.equality = (ex == ds);
          if (!e.equality)
            rep.violations.push_back("inequality strict at (" + a + ", " + s +
                                     ") with witness " + d);
          break;
        }
      }
      rep.entries.push_back(std::move(e));
    }
  }
  return rep;
}

ConsistencyReport consistency_status(const Doctrine& p) {
  ConsistencyReport rep;
  const FinPoset& f = p.fiber_of(p.base.terminal());
  bool consistent = false, two_valued = false;
  for (const auto& a : f.elements())
    for (const auto& b : f.elements()) {
      if (f.le(a, b)) continue;
      consistent = true;
      bool dom = true;
      for (const auto& c : f.elements())
        if (!f.le(a, c) && !f.le(b, c)) dom = false;
      if (dom) two_valued = true;
    }
  rep.status = two_valued ? ConsistencyStatus::TwoValued
               : consistent ? ConsistencyStatus::Consistent
                            : ConsistencyStatus::Inconsistent;
  const LatticeOps& o = p.ops_of(p.base.terminal());
  if (o.top && o.bottom) {
    bool nontrivial = f.size() > 1;
    bool top_not_below_bottom = !f.le(*o.top, *o.bottom);
    if (nontrivial != consistent)
      rep.lemma_violations.push_back(
          "non-singleton fiber does not match consistency");
    if (top_not_below_bottom != consistent)
      rep.lemma_violations.push_back(
          "top below bottom does not match consistency");
    if (two_valued != consistent)
      rep.lemma_violations.push_back(
          "two-valuedness does not match consistency");
  }
  return rep;
}

StructureReport check_epsilon_operator(const Doctrine& p) {
  StructureReport rep;
  const FinCategory& c = p.base;
  bool eps_at_t = true;
  for (const auto& [key, table] : p.exists_) {
    const auto& [b, a] = key;
    const auto& pr = c.product(b, a);
    for (const auto& x : p.fiber_of(pr.obj).elements()) {
      const std::string& ex = p.exists_of(b, a, x);
      bool found = false;
      for (const auto& e : c.hom_set(b, a)) {
        const std::string graph = c.tuple(c.identity(b), e);  // B -> B x A
        if (p.reindex(graph, x) == ex) {
          found = true;
          break;
        }
      }
      if (!found) {
        rep.add("epsilon", "no choice arrow at (" + b + ", " + a + ") for " +
                               x);
        if (b == c.terminal()) eps_at_t = false;
      }
    }
  }
  bool rich = check_rich(p).rich();
  if (rich != eps_at_t)
    rep.add("epsilon",
            "richness does not match the choice condition at the terminal");
  return rep;
}

}  // namespace dctk
