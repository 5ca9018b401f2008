#include "dctk/constructions.hpp"

#include <algorithm>

namespace dctk {

namespace {

// Sub-poset on the elements satisfying keep, with ids and order unchanged.
FinPoset subposet(const FinPoset& p, const std::vector<std::string>& keep) {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& a : keep)
    for (const auto& b : keep)
      if (p.le(a, b)) pairs.push_back({a, b});
  return FinPoset(keep, pairs);
}

}  // namespace

std::shared_ptr<const Doctrine> restrict_doctrine(
    std::shared_ptr<const Doctrine> p, const std::set<std::string>& keep) {
  bool all = true;
  for (const auto& o : p->base.objects())
    if (!keep.count(o)) all = false;
  if (all) return p;
  if (!keep.count(p->base.terminal()))
    throw PreconditionError("restriction would drop the terminal");

  auto r = std::make_shared<Doctrine>();
  const FinCategory& c = p->base;
  FinCategory& rc = r->base;
  std::set<std::string> kmor;
  for (const auto& o : c.objects())
    if (keep.count(o)) rc.add_object(o);
  for (const auto& m : c.morphisms())
    if (keep.count(c.dom(m)) && keep.count(c.cod(m))) {
      rc.add_morphism(m, c.dom(m), c.cod(m));
      kmor.insert(m);
    }
  for (const auto& t : c.compose_triples())
    if (kmor.count(t[0]) && kmor.count(t[1])) rc.set_compose(t[0], t[1], t[2]);
  for (const auto& [o, m] : c.identity_table())
    if (keep.count(o)) rc.set_identity(o, m);
  rc.set_terminal(c.terminal());
  for (const auto& [o, m] : c.bang_table())
    if (keep.count(o)) rc.set_bang(o, m);
  for (const auto& [key, pr] : c.products())
    if (keep.count(key.first) && keep.count(key.second) && keep.count(pr.obj))
      rc.set_product(key.first, key.second, pr);
  rc.finalize();

  for (const auto& o : rc.objects()) {
    r->fiber[o] = p->fiber_of(o);
    r->ops[o] = p->ops_of(o);
  }
  for (const auto& m : rc.morphisms()) r->reind[m] = p->reind.at(m);
  for (const auto& [o, d] : p->delta)
    if (rc.has_object(o) && rc.has_product(o, o)) r->delta[o] = d;
  for (const auto& [key, t] : p->exists_)
    if (rc.has_product(key.first, key.second)) r->exists_[key] = t;
  for (const auto& [key, t] : p->forall_)
    if (rc.has_product(key.first, key.second)) r->forall_[key] = t;
  r->layers = p->layers;
  return r;
}

ConstantResult add_constant(std::shared_ptr<const Doctrine> p,
                            const std::string& sort) {
  const FinCategory& c = p->base;
  if (!c.has_object(sort)) throw PreconditionError("unknown sort " + sort);
  ConstantResult out;
  out.kleisli = kleisli_reader(c, sort);
  const FinCategory& kc = out.kleisli.category;

  std::set<std::string> kept(kc.objects().begin(), kc.objects().end());
  for (const auto& o : c.objects())
    if (!kept.count(o)) out.dropped_objects.push_back(o);

  auto px = std::make_shared<Doctrine>();
  px->base = kc;
  px->layers = p->layers;
  auto xa_of = [&](const std::string& a) -> const std::string& {
    return c.product(sort, a).obj;
  };
  for (const auto& a : kc.objects()) {
    px->fiber[a] = p->fiber_of(xa_of(a));
    px->ops[a] = p->ops_of(xa_of(a));
  }
  // Reindexing along an arrow backed by f is reindexing along <pr1, f>.
  for (const auto& km : kc.morphisms()) {
    const std::string& a = kc.dom(km);
    const std::string& fh = out.kleisli.base_arrow.at(km);
    const std::string graph = c.tuple(c.product(sort, a).pr1, fh);
    auto& table = px->reind[km];
    for (const auto& e : p->fiber_of(xa_of(kc.cod(km))).elements())
      table[e] = p->reindex(graph, e);
  }
  // Fibered equality transports along the projection dropping the sort.
  if (p->layers.count(Layer::Elementary))
    for (const auto& a : kc.objects()) {
      if (!kc.has_product(a, a)) continue;
      const std::string& paa = kc.product(a, a).obj;
      px->delta[a] = p->reindex(c.product(sort, paa).pr2, p->delta_of(a));
    }
  // Quantifiers transport along the associator (sort x c) x b ~ sort x (c x b).
  auto transport_quant = [&](bool ex) {
    for (const auto& [key, kp] : kc.products()) {
      const auto& [cc, bb] = key;
      const std::string& xc = xa_of(cc);
      if (!c.has_product(xc, bb))
        throw PreconditionError(
            "add_constant: quantifier transport needs a chosen product (" +
            xc + ", " + bb + ")");
      const auto& q = c.product(xc, bb);
      const auto& pxc = c.product(sort, cc);
      const std::string inner =
          c.tuple(c.compose(pxc.pr2, q.pr1), q.pr2);  // -> c x b
      const std::string assoc =
          c.tuple(c.compose(pxc.pr1, q.pr1), inner);  // -> sort x (c x b)
      auto& table = ex ? px->exists_[key] : px->forall_[key];
      for (const auto& e : p->fiber_of(xa_of(kp.obj)).elements()) {
        const std::string& moved = p->reindex(assoc, e);
        table[e] = ex ? p->exists_of(xc, bb, moved) : p->forall_of(xc, bb, moved);
      }
    }
  };
  if (p->layers.count(Layer::Existential)) transport_quant(true);
  if (p->layers.count(Layer::Universal)) transport_quant(false);

  out.doctrine = px;
  DoctrineMorphism& m = out.morphism;
  m.src = restrict_doctrine(p, kept);
  m.dst = px;
  for (const auto& a : kc.objects()) {
    m.obj_map[a] = a;
    const std::string& pr2 = c.product(sort, a).pr2;
    auto& t = m.comp[a];
    for (const auto& e : p->fiber_of(a).elements()) t[e] = p->reindex(pr2, e);
  }
  for (const auto& f : m.src->base.morphisms())
    m.mor_map[f] = kleisli_arrow_id(
        c.dom(f), c.compose(f, c.product(sort, c.dom(f)).pr2));
  m.preserved = p->layers;
  return out;
}

AxiomResult add_axiom(std::shared_ptr<const Doctrine> p,
                      const std::string& phi) {
  const FinCategory& c = p->base;
  const std::string& t = c.terminal();
  if (!p->fiber_of(t).contains(phi))
    throw PreconditionError("axiom " + phi +
                            " is not an element of the terminal fiber");
  if (!p->layers.count(Layer::Primary) &&
      !(p->layers.count(Layer::Heyting) || p->layers.count(Layer::Boolean)))
    throw PreconditionError("add_axiom needs a primary doctrine");

  std::map<std::string, std::string> tee;  // per object: P(!)phi
  for (const auto& a : c.objects()) tee[a] = p->reindex(c.bang(a), phi);

  auto q = std::make_shared<Doctrine>();
  q->base = c;
  q->layers = p->layers;
  for (const auto& a : c.objects()) {
    const FinPoset& f = p->fiber_of(a);
    const LatticeOps& o = p->ops_of(a);
    std::vector<std::string> keep;
    for (const auto& e : f.elements())
      if (f.le(e, tee[a])) keep.push_back(e);
    q->fiber[a] = subposet(f, keep);
    LatticeOps no;
    no.top = tee[a];
    if (o.bottom) no.bottom = o.bottom;
    no.has_meet = o.has_meet;
    no.has_join = o.has_join;
    no.has_imp = o.has_imp;
    for (const auto& x : keep)
      for (const auto& y : keep) {
        if (o.has_meet) no.meet[{x, y}] = o.meet_of(x, y);
        if (o.has_join) no.join[{x, y}] = o.join_of(x, y);
        if (o.has_imp)
          no.imp[{x, y}] = o.meet_of(o.imp_of(x, y), tee[a]);
      }
    q->ops[a] = std::move(no);
  }
  for (const auto& m : c.morphisms()) {
    auto& table = q->reind[m];
    for (const auto& e : q->fiber_of(c.cod(m)).elements())
      table[e] = p->reindex(m, e);
  }
  if (p->layers.count(Layer::Elementary))
    for (const auto& [a, d] : p->delta) {
      const std::string& paa = c.product(a, a).obj;
      q->delta[a] = p->ops_of(paa).meet_of(d, tee[paa]);
    }
  for (const auto& [key, table] : p->exists_) {
    auto& nt = q->exists_[key];
    const std::string& pobj = c.product(key.first, key.second).obj;
    for (const auto& e : q->fiber_of(pobj).elements()) nt[e] = table.at(e);
  }
  for (const auto& [key, table] : p->forall_) {
    auto& nt = q->forall_[key];
    const std::string& pobj = c.product(key.first, key.second).obj;
    for (const auto& e : q->fiber_of(pobj).elements())
      nt[e] = p->ops_of(key.first).meet_of(table.at(e), tee[key.first]);
  }

  AxiomResult out;
  out.doctrine = q;
  out.axiom = phi;
  DoctrineMorphism& m = out.morphism;
  m.src = p;
  m.dst = q;
  for (const auto& a : c.objects()) {
    m.obj_map[a] = a;
    auto& tab = m.comp[a];
    const LatticeOps& o = p->ops_of(a);
    for (const auto& e : p->fiber_of(a).elements())
      tab[e] = o.meet_of(tee[a], e);
  }
  for (const auto& f : c.morphisms()) m.mor_map[f] = f;
  m.preserved = p->layers;
  return out;
}

namespace {

// The unique arrow h: G a -> G(sort x a) whose projections are c . bang and
// the identity; exists because the target functor preserves products.
std::string constant_graph(const DoctrineMorphism& target,
                           const FinCategory& src_base,
                           const std::string& sort, const std::string& a,
                           const std::string& c) {
  const FinCategory& d = target.dst->base;
  const auto& pr = src_base.product(sort, a);
  const std::string& ga = target.on_obj(a);
  const std::string want1 = d.compose(c, d.bang(ga));
  const std::string& want2 = d.identity(ga);
  std::string found;
  for (const auto& h : d.hom_set(ga, target.on_obj(pr.obj))) {
    if (d.compose(target.on_mor(pr.pr1), h) == want1 &&
        d.compose(target.on_mor(pr.pr2), h) == want2) {
      if (!found.empty())
        throw PreconditionError(
            "target does not preserve the product (" + sort + ", " + a + ")");
      found = h;
    }
  }
  if (found.empty())
    throw PreconditionError("no graph arrow for the constant at " + a);
  return found;
}

}  // namespace

DoctrineMorphism mediate_constant(const ConstantResult& cx,
                                  const DoctrineMorphism& target,
                                  const std::string& c) {
  const std::string& sort = cx.kleisli.sort;
  const Doctrine& r = *target.dst;
  if (!r.base.has_morphism(c) ||
      r.base.dom(c) != r.base.terminal() ||
      r.base.cod(c) != target.on_obj(sort))
    throw PreconditionError("constant interpretation has wrong endpoints");
  const FinCategory& sb = target.src->base;

  DoctrineMorphism m;
  m.src = cx.doctrine;
  m.dst = target.dst;
  for (const auto& a : cx.doctrine->base.objects()) {
    const std::string w = constant_graph(target, sb, sort, a, c);
    m.obj_map[a] = target.on_obj(a);
    auto& tab = m.comp[a];
    const std::string& xa = sb.product(sort, a).obj;
    for (const auto& e : cx.doctrine->fiber_of(a).elements())
      tab[e] = r.reindex(w, target.on_elem(xa, e));
    for (const auto& km : cx.doctrine->base.morphisms()) {
      if (cx.doctrine->base.dom(km) != a) continue;
      const std::string& fh = cx.kleisli.base_arrow.at(km);
      m.mor_map[km] = r.base.compose(target.on_mor(fh), w);
    }
  }
  for (Layer l : cx.doctrine->layers)
    if (target.preserved.count(l)) m.preserved.insert(l);
  return m;
}

DoctrineMorphism mediate_axiom(const AxiomResult& ax,
                               const DoctrineMorphism& target) {
  if (target.src.get() != ax.morphism.src.get())
    throw PreconditionError("target is not a morphism out of the source");
  const Doctrine& r = *target.dst;
  const std::string& t = target.src->base.terminal();
  const std::string& gt = target.on_obj(t);
  const std::string& image = target.on_elem(t, ax.axiom);
  if (!r.fiber_of(gt).le(*r.ops_of(gt).top, image))
    throw PreconditionError("axiom not satisfied in target");

  DoctrineMorphism m;
  m.src = ax.doctrine;
  m.dst = target.dst;
  m.obj_map = target.obj_map;
  m.mor_map = target.mor_map;
  for (const auto& a : ax.doctrine->base.objects()) {
    auto& tab = m.comp[a];
    for (const auto& e : ax.doctrine->fiber_of(a).elements())
      tab[e] = target.on_elem(a, e);
  }
  for (Layer l : ax.doctrine->layers)
    if (target.preserved.count(l)) m.preserved.insert(l);
  return m;
}

HenkinStepResult henkin_step(std::shared_ptr<const Doctrine> p,
                             const std::string& b, const std::string& phi,
                             int label) {
  if (!p->layers.count(Layer::Existential))
    throw PreconditionError("henkin_step needs an existential doctrine");
  bool has_imp = p->layers.count(Layer::Implicational) ||
                 p->layers.count(Layer::Heyting) ||
                 p->layers.count(Layer::Boolean);
  if (!has_imp)
    throw PreconditionError("henkin_step needs an implicational doctrine");
  const FinCategory& c = p->base;
  const std::string& t = c.terminal();
  if (!c.has_object(b)) throw PreconditionError("unknown sort " + b);
  if (!p->fiber_of(b).contains(phi))
    throw PreconditionError(phi + " is not an element of the fiber over " + b);

  // exists phi over the terminal, then psi = P(!)(exists phi) -> phi.
  const auto& prtb = c.product(t, b);
  const std::string& ex =
      p->exists_of(t, b, p->reindex(prtb.pr2, phi));
  const std::string psi0 =
      p->ops_of(b).imp_of(p->reindex(c.bang(b), ex), phi);

  ConstantResult cres = add_constant(p, b);
  // psi read in the new terminal fiber P(b x t).
  const std::string psi = p->reindex(c.product(b, t).pr1, psi0);
  AxiomResult ares = add_axiom(cres.doctrine, psi);

  HenkinStepResult out;
  out.doctrine = ares.doctrine;
  out.morphism = compose_morphisms(ares.morphism, cres.morphism);
  HenkinStep& e = out.entry;
  e.sort = b;
  e.formula = phi;
  e.label = {b, label};
  e.axiom = psi;
  e.constant_arrow = cres.kleisli.distinguished_constant_arrow;
  e.formula_image = out.morphism.on_elem(b, phi);

  const Doctrine& pp = *out.doctrine;
  if (!pp.base.has_product(t, b))
    throw PreconditionError(
        "henkin_step: the new base lost the chosen product (t, " + b + ")");
  const auto& npr = pp.base.product(t, b);
  e.exists_image = pp.exists_of(t, b, pp.reindex(npr.pr2, e.formula_image));
  e.witnessed_image = pp.reindex(e.constant_arrow, e.formula_image);
  const FinPoset& ft = pp.fiber_of(t);
  e.inequality_holds = ft.le(e.exists_image, e.witnessed_image);
  e.equality_holds = e.exists_image == e.witnessed_image;
  return out;
}

SaturationResult henkin_saturate(
    std::shared_ptr<const Doctrine> p,
    const std::optional<std::vector<std::pair<std::string, std::string>>>&
        targets,
    size_t budget) {
  std::vector<std::pair<std::string, std::string>> todo;
  if (targets) {
    todo = *targets;
    for (const auto& [b, phi] : todo)
      if (!p->base.has_object(b) || !p->fiber_of(b).contains(phi))
        throw PreconditionError("bad saturation target (" + b + ", " + phi +
                                ")");
  } else {
    for (const auto& b : p->base.objects())
      for (const auto& e : p->fiber_of(b).elements()) todo.push_back({b, e});
  }

  SaturationResult out;
  out.doctrine = p;
  out.morphism = identity_morphism(p);
  std::map<std::string, int> counter;
  for (size_t i = 0; i < todo.size(); ++i) {
    if (out.trace.steps.size() >= budget) {
      out.trace.truncated = true;
      for (size_t j = i; j < todo.size(); ++j)
        out.trace.skipped.push_back(todo[j]);
      break;
    }
    const auto& [b, phi] = todo[i];
    const std::string image = out.morphism.on_elem(b, phi);
    HenkinStepResult step =
        henkin_step(out.doctrine, b, image, counter[b]++);
    if (step.morphism.src.get() != out.doctrine.get())
      throw PreconditionError(
          "henkin_saturate: the step at (" + b +
          ") would drop base objects; saturation needs a base closed under "
          "products with every sort");
    step.entry.formula = phi;  // report targets in the caller's terms
    out.trace.steps.push_back(step.entry);
    out.morphism = compose_morphisms(step.morphism, out.morphism);
    out.doctrine = step.doctrine;
  }
  return out;
}

std::vector<std::string> FiniteDirectedDiagram::violations() const {
  std::vector<std::string> out;
  std::set<std::string> idx(index.begin(), index.end());
  if (idx.size() != index.size()) out.push_back("duplicate index ids");
  std::map<std::pair<std::string, std::string>, bool> rel;
  for (const auto& i : idx)
    for (const auto& j : idx) rel[{i, j}] = (i == j);
  for (const auto& [i, j] : leq) {
    if (!idx.count(i) || !idx.count(j)) {
      out.push_back("order pair (" + i + ", " + j + ") off the index");
      continue;
    }
    rel[{i, j}] = true;
  }
  if (!out.empty()) return out;
  for (const auto& i : idx)
    for (const auto& j : idx)
      if (rel[{i, j}])
        for (const auto& k : idx)
          if (rel[{j, k}] && !rel[{i, k}])
            out.push_back("index relation not transitive at (" + i + ", " + j +
                          ", " + k + ")");
  for (const auto& i : idx)
    for (const auto& j : idx) {
      bool ub = false;
      for (const auto& k : idx)
        if (rel[{i, k}] && rel[{j, k}]) ub = true;
      if (!ub)
        out.push_back("no upper bound for (" + i + ", " + j + ")");
    }
  for (const auto& i : idx) {
    if (!node.count(i)) {
      out.push_back("no doctrine at index " + i);
      continue;
    }
    for (const auto& j : idx) {
      if (i == j || !rel[{i, j}]) continue;
      auto it = edge.find({i, j});
      if (it == edge.end()) {
        out.push_back("no edge for " + i + " <= " + j);
        continue;
      }
      if (it->second.src.get() != node.at(i).get() ||
          it->second.dst.get() != node.at(j).get())
        out.push_back("edge " + i + " <= " + j + " has wrong endpoints");
    }
  }
  if (!out.empty()) return out;
  auto arrow = [&](const std::string& i,
                   const std::string& j) -> DoctrineMorphism {
    if (i == j) return identity_morphism(node.at(i));
    return edge.at({i, j});
  };
  auto same_tables = [](const DoctrineMorphism& a, const DoctrineMorphism& b) {
    return a.obj_map == b.obj_map && a.mor_map == b.mor_map &&
           a.comp == b.comp;
  };
  for (const auto& i : idx)
    for (const auto& j : idx) {
      if (!rel[{i, j}]) continue;
      for (const auto& k : idx) {
        if (!rel[{j, k}]) continue;
        if (!same_tables(compose_morphisms(arrow(j, k), arrow(i, j)),
                         arrow(i, k)))
          out.push_back("edges do not compose along " + i + " <= " + j +
                        " <= " + k);
      }
    }
  return out;
}

std::string FiniteDirectedDiagram::max_index() const {
  std::vector<std::string> idx = index;
  std::sort(idx.begin(), idx.end());
  std::map<std::pair<std::string, std::string>, bool> rel;
  for (const auto& i : idx)
    for (const auto& j : idx) rel[{i, j}] = (i == j);
  for (const auto& [i, j] : leq) rel[{i, j}] = true;
  for (const auto& k : idx) {
    bool top = true;
    for (const auto& i : idx)
      if (!rel[{i, k}]) top = false;
    if (top) return k;
  }
  throw PreconditionError("directed diagram has no maximum index");
}

ColimitResult directed_colimit(const FiniteDirectedDiagram& d) {
  {
    auto v = d.violations();
    if (!v.empty())
      throw PreconditionError("invalid diagram: " + v.front());
  }
  ColimitResult out;
  const std::string km = d.max_index();
  out.max_index = km;
  std::vector<std::string> idx = d.index;
  std::sort(idx.begin(), idx.end());

  auto push = [&](const std::string& i) -> DoctrineMorphism {
    if (i == km) return identity_morphism(d.node.at(km));
    return d.edge.at({i, km});
  };

  // Group node data by its push to the maximum index; the class
  // representative is the least (index, id) member.
  const Doctrine& top = *d.node.at(km);
  std::map<std::string, std::pair<std::string, std::string>> obj_rep;
  std::map<std::string, std::pair<std::string, std::string>> mor_rep;
  std::map<std::pair<std::string, std::string>,
           std::tuple<std::string, std::string, std::string>>
      elem_rep;  // (km obj, km elem) -> (index, object, elem)
  for (const auto& i : idx) {
    DoctrineMorphism f = push(i);
    const Doctrine& n = *d.node.at(i);
    for (const auto& a : n.base.objects()) {
      const std::string& key = f.on_obj(a);
      if (!obj_rep.count(key)) obj_rep[key] = {i, a};
      for (const auto& e : n.fiber_of(a).elements()) {
        std::pair<std::string, std::string> ekey = {key, f.on_elem(a, e)};
        if (!elem_rep.count(ekey)) elem_rep[ekey] = {i, a, e};
      }
    }
    for (const auto& m : n.base.morphisms()) {
      const std::string& key = f.on_mor(m);
      if (!mor_rep.count(key)) mor_rep[key] = {i, m};
    }
  }
  auto obj_label = [&](const std::string& o) {
    const auto& r = obj_rep.at(o);
    return "[" + r.first + "." + r.second + "]";
  };
  auto mor_label = [&](const std::string& m) {
    const auto& r = mor_rep.at(m);
    return "[" + r.first + "." + r.second + "]";
  };
  auto elem_label = [&](const std::string& o, const std::string& e) {
    const auto& r = elem_rep.at({o, e});
    return "[" + std::get<0>(r) + "." + std::get<1>(r) + "." + std::get<2>(r) +
           "]";
  };
  for (const auto& [o, r] : obj_rep) out.object_class[o] = obj_label(o);
  for (const auto& [m, r] : mor_rep) out.morphism_class[m] = mor_label(m);
  for (const auto& [k, r] : elem_rep)
    out.element_class[k] = elem_label(k.first, k.second);

  // The colimit doctrine is the maximum node under the class labelling.
  auto col = std::make_shared<Doctrine>();
  FinCategory& cc = col->base;
  const FinCategory& tc = top.base;
  for (const auto& o : tc.objects()) cc.add_object(obj_label(o));
  for (const auto& m : tc.morphisms())
    cc.add_morphism(mor_label(m), obj_label(tc.dom(m)), obj_label(tc.cod(m)));
  for (const auto& t : tc.compose_triples())
    cc.set_compose(mor_label(t[0]), mor_label(t[1]), mor_label(t[2]));
  for (const auto& [o, m] : tc.identity_table())
    cc.set_identity(obj_label(o), mor_label(m));
  cc.set_terminal(obj_label(tc.terminal()));
  for (const auto& [o, m] : tc.bang_table())
    cc.set_bang(obj_label(o), mor_label(m));
  for (const auto& [key, pr] : tc.products())
    cc.set_product(obj_label(key.first), obj_label(key.second),
                   {obj_label(pr.obj), mor_label(pr.pr1), mor_label(pr.pr2)});
  cc.finalize();

  col->layers = top.layers;
  for (const auto& [i, n] : d.node)
    for (Layer l : kAllLayers)
      if (col->layers.count(l) && !n->layers.count(l)) col->layers.erase(l);
  for (const auto& [key, e] : d.edge)
    for (Layer l : kAllLayers)
      if (col->layers.count(l) && !e.preserved.count(l)) col->layers.erase(l);

  for (const auto& o : tc.objects()) {
    const FinPoset& f = top.fiber_of(o);
    std::vector<std::string> elems;
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& a : f.elements()) {
      elems.push_back(elem_label(o, a));
      for (const auto& b : f.elements())
        if (f.le(a, b)) pairs.push_back({elem_label(o, a), elem_label(o, b)});
    }
    col->fiber[obj_label(o)] = FinPoset(elems, pairs);
    const LatticeOps& oo = top.ops_of(o);
    LatticeOps no;
    if (oo.top) no.top = elem_label(o, *oo.top);
    if (oo.bottom) no.bottom = elem_label(o, *oo.bottom);
    no.has_meet = oo.has_meet;
    no.has_join = oo.has_join;
    no.has_imp = oo.has_imp;
    for (const auto& [k, v] : oo.meet)
      no.meet[{elem_label(o, k.first), elem_label(o, k.second)}] =
          elem_label(o, v);
    for (const auto& [k, v] : oo.join)
      no.join[{elem_label(o, k.first), elem_label(o, k.second)}] =
          elem_label(o, v);
    for (const auto& [k, v] : oo.imp)
      no.imp[{elem_label(o, k.first), elem_label(o, k.second)}] =
          elem_label(o, v);
    col->ops[obj_label(o)] = std::move(no);
  }
  for (const auto& m : tc.morphisms()) {
    auto& tab = col->reind[mor_label(m)];
    const std::string &a = tc.dom(m), &b = tc.cod(m);
    for (const auto& e : top.fiber_of(b).elements())
      tab[elem_label(b, e)] = elem_label(a, top.reindex(m, e));
  }
  for (const auto& [o, dl] : top.delta)
    col->delta[obj_label(o)] = elem_label(tc.product(o, o).obj, dl);
  for (const auto& [key, tab] : top.exists_) {
    auto& nt = col->exists_[{obj_label(key.first), obj_label(key.second)}];
    const std::string& pobj = tc.product(key.first, key.second).obj;
    for (const auto& [e, v] : tab)
      nt[elem_label(pobj, e)] = elem_label(key.first, v);
  }
  for (const auto& [key, tab] : top.forall_) {
    auto& nt = col->forall_[{obj_label(key.first), obj_label(key.second)}];
    const std::string& pobj = tc.product(key.first, key.second).obj;
    for (const auto& [e, v] : tab)
      nt[elem_label(pobj, e)] = elem_label(key.first, v);
  }
  out.doctrine = col;

  for (const auto& i : idx) {
    DoctrineMorphism f = push(i);
    DoctrineMorphism leg;
    leg.src = d.node.at(i);
    leg.dst = col;
    for (const auto& a : leg.src->base.objects()) {
      leg.obj_map[a] = obj_label(f.on_obj(a));
      auto& tab = leg.comp[a];
      for (const auto& e : leg.src->fiber_of(a).elements())
        tab[e] = elem_label(f.on_obj(a), f.on_elem(a, e));
    }
    for (const auto& m : leg.src->base.morphisms())
      leg.mor_map[m] = mor_label(f.on_mor(m));
    leg.preserved = col->layers;
    out.cocone[i] = std::move(leg);
  }
  return out;
}

DoctrineMorphism colimit_mediator(
    const FiniteDirectedDiagram& d, const ColimitResult& col,
    const std::map<std::string, DoctrineMorphism>& cocone_to_r) {
  for (const auto& i : d.index)
    if (!cocone_to_r.count(i))
      throw PreconditionError("cocone is missing the leg at " + i);
  const DoctrineMorphism& gm = cocone_to_r.at(col.max_index);
  for (const auto& [i, leg] : cocone_to_r) {
    if (leg.src.get() != d.node.at(i).get() || leg.dst.get() != gm.dst.get())
      throw PreconditionError("cocone leg at " + i + " has wrong endpoints");
  }
  for (const auto& [key, e] : d.edge) {
    DoctrineMorphism through =
        compose_morphisms(cocone_to_r.at(key.second), e);
    const DoctrineMorphism& direct = cocone_to_r.at(key.first);
    if (through.obj_map != direct.obj_map ||
        through.mor_map != direct.mor_map || through.comp != direct.comp)
      throw PreconditionError("cocone does not commute over " + key.first +
                              " <= " + key.second);
  }

  // Classes are named after representatives; evaluate at the maximum node.
  std::map<std::string, std::string> obj_inv, mor_inv;
  for (const auto& [o, l] : col.object_class) obj_inv[l] = o;
  for (const auto& [m, l] : col.morphism_class) mor_inv[l] = m;
  std::map<std::string, std::pair<std::string, std::string>> elem_inv;
  for (const auto& [k, l] : col.element_class) elem_inv[l] = k;

  DoctrineMorphism m;
  m.src = col.doctrine;
  m.dst = gm.dst;
  for (const auto& a : col.doctrine->base.objects()) {
    const std::string& o = obj_inv.at(a);
    m.obj_map[a] = gm.on_obj(o);
    auto& tab = m.comp[a];
    for (const auto& e : col.doctrine->fiber_of(a).elements())
      tab[e] = gm.on_elem(o, elem_inv.at(e).second);
  }
  for (const auto& f : col.doctrine->base.morphisms())
    m.mor_map[f] = gm.on_mor(mor_inv.at(f));
  for (Layer l : col.doctrine->layers)
    if (gm.preserved.count(l)) m.preserved.insert(l);
  return m;
}

std::optional<DoctrineMorphism> invert_morphism(const DoctrineMorphism& m) {
  DoctrineMorphism inv;
  inv.src = m.dst;
  inv.dst = m.src;
  inv.preserved = m.preserved;
  for (const auto& [a, fa] : m.obj_map) {
    if (inv.obj_map.count(fa)) return std::nullopt;
    inv.obj_map[fa] = a;
  }
  for (const auto& o : m.dst->base.objects())
    if (!inv.obj_map.count(o)) return std::nullopt;
  for (const auto& [f, gf] : m.mor_map) {
    if (inv.mor_map.count(gf)) return std::nullopt;
    inv.mor_map[gf] = f;
  }
  for (const auto& f : m.dst->base.morphisms())
    if (!inv.mor_map.count(f)) return std::nullopt;
  for (const auto& [a, tab] : m.comp) {
    auto& itab = inv.comp[m.on_obj(a)];
    for (const auto& [e, v] : tab) {
      if (itab.count(v)) return std::nullopt;
      itab[v] = e;
    }
  }
  for (const auto& o : m.dst->base.objects()) {
    auto it = inv.comp.find(o);
    if (it == inv.comp.end()) return std::nullopt;
    for (const auto& e : m.dst->fiber_of(o).elements())
      if (!it->second.count(e)) return std::nullopt;
  }
  return inv;
}

FragmentResult double_negation_fragment(std::shared_ptr<const Doctrine> p) {
  for (const auto& a : p->base.objects()) {
    const LatticeOps& o = p->ops_of(a);
    if (!o.top || !o.bottom || !o.has_meet || !o.has_imp)
      throw PreconditionError(
          "double_negation_fragment needs a bounded implicational doctrine");
  }
  auto nn = [&](const std::string& a, const std::string& e) {
    const LatticeOps& o = p->ops_of(a);
    return o.neg(o.neg(e));
  };

  auto q = std::make_shared<Doctrine>();
  q->base = p->base;
  std::map<std::string, std::vector<std::string>> closed;
  for (const auto& a : p->base.objects()) {
    const FinPoset& f = p->fiber_of(a);
    const LatticeOps& o = p->ops_of(a);
    auto& keep = closed[a];
    for (const auto& e : f.elements())
      if (nn(a, e) == e) keep.push_back(e);
    q->fiber[a] = subposet(f, keep);
    LatticeOps no;
    no.top = o.top;
    no.bottom = o.bottom;
    no.has_meet = no.has_imp = no.has_join = true;
    for (const auto& x : keep)
      for (const auto& y : keep) {
        no.meet[{x, y}] = o.meet_of(x, y);
        no.imp[{x, y}] = o.imp_of(x, y);
        no.join[{x, y}] = o.neg(o.meet_of(o.neg(x), o.neg(y)));
      }
    q->ops[a] = std::move(no);
  }
  for (const auto& m : p->base.morphisms()) {
    auto& tab = q->reind[m];
    for (const auto& e : closed[p->base.cod(m)]) tab[e] = p->reindex(m, e);
  }
  q->layers = {Layer::Primary, Layer::Bounded, Layer::Implicational,
               Layer::Joins, Layer::Heyting, Layer::Boolean};
  if (p->layers.count(Layer::Elementary)) {
    q->layers.insert(Layer::Elementary);
    for (const auto& [a, dl] : p->delta)
      q->delta[a] = nn(p->base.product(a, a).obj, dl);
  }
  if (p->layers.count(Layer::Existential)) {
    q->layers.insert(Layer::Existential);
    for (const auto& [key, tab] : p->exists_) {
      auto& nt = q->exists_[key];
      for (const auto& e : closed[p->base.product(key.first, key.second).obj])
        nt[e] = nn(key.first, tab.at(e));
    }
  }

  FragmentResult out;
  out.doctrine = q;
  DoctrineMorphism& m = out.morphism;
  m.src = p;
  m.dst = q;
  for (const auto& a : p->base.objects()) {
    m.obj_map[a] = a;
    auto& tab = m.comp[a];
    for (const auto& e : p->fiber_of(a).elements()) tab[e] = nn(a, e);
  }
  for (const auto& f : p->base.morphisms()) m.mor_map[f] = f;
  m.preserved = {Layer::Primary, Layer::Bounded, Layer::Implicational};
  if (p->layers.count(Layer::Joins)) m.preserved.insert(Layer::Joins);
  if (p->layers.count(Layer::Heyting)) m.preserved.insert(Layer::Heyting);
  if (p->layers.count(Layer::Elementary)) m.preserved.insert(Layer::Elementary);
  if (p->layers.count(Layer::Existential))
    m.preserved.insert(Layer::Existential);
  return out;
}

}  // namespace dctk
