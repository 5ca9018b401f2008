#include "dctk/model.hpp"

#include <algorithm>

namespace dctk {

std::string subset_element_name(std::vector<std::string> members) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  std::string out = "{";
  for (size_t i = 0; i < members.size(); ++i) {
    if (i) out += ",";
    out += members[i];
  }
  return out + "}";
}

namespace {

const auto& set_name = subset_element_name;

void check_filter(const Doctrine& p, const std::set<std::string>& nabla) {
  const std::string& t = p.base.terminal();
  const FinPoset& f = p.fiber_of(t);
  const LatticeOps& o = p.ops_of(t);
  if (!o.top || !o.has_meet)
    throw PreconditionError("the terminal fiber has no top or meet");
  for (const auto& e : nabla)
    if (!f.contains(e))
      throw PreconditionError(e + " is not an element of the terminal fiber");
  if (!nabla.count(*o.top))
    throw PreconditionError("the filter does not contain top");
  for (const auto& a : nabla) {
    for (const auto& b : nabla)
      if (!nabla.count(o.meet_of(a, b)))
        throw PreconditionError("the filter is not closed under meets");
    for (const auto& b : f.elements())
      if (f.le(a, b) && !nabla.count(b))
        throw PreconditionError("the filter is not upward closed");
  }
}

}  // namespace

QuotientResult quotient_by_filter(std::shared_ptr<const Doctrine> p,
                                  const std::set<std::string>& nabla) {
  check_filter(*p, nabla);
  const FinCategory& c = p->base;

  QuotientResult out;
  out.filter = nabla;
  auto q = std::make_shared<Doctrine>();
  q->base = c;
  q->layers = p->layers;

  std::map<std::string, MonotoneMap> cls;  // per object, element -> class rep
  for (const auto& a : c.objects()) {
    const FinPoset& f = p->fiber_of(a);
    const LatticeOps& o = p->ops_of(a);
    std::vector<std::pair<std::string, std::string>> rel;
    for (const auto& x : f.elements())
      for (const auto& y : f.elements()) {
        bool below = false;
        for (const auto& th : nabla)
          if (f.le(o.meet_of(p->reindex(c.bang(a), th), x), y)) below = true;
        if (below) rel.push_back({x, y});
      }
    PosetReflection r = poset_reflection(f.elements(), rel);
    q->fiber[a] = r.quotient;
    cls[a] = std::move(r.map);
    LatticeOps no;
    if (o.top) no.top = cls[a](*o.top);
    if (o.bottom) no.bottom = cls[a](*o.bottom);
    no.has_meet = o.has_meet;
    no.has_join = o.has_join;
    no.has_imp = o.has_imp;
    for (const auto& x : q->fiber[a].elements())
      for (const auto& y : q->fiber[a].elements()) {
        if (o.has_meet) no.meet[{x, y}] = cls[a](o.meet_of(x, y));
        if (o.has_join) no.join[{x, y}] = cls[a](o.join_of(x, y));
        if (o.has_imp) no.imp[{x, y}] = cls[a](o.imp_of(x, y));
      }
    q->ops[a] = std::move(no);
  }
  for (const auto& m : c.morphisms()) {
    auto& tab = q->reind[m];
    const std::string &a = c.dom(m), &b = c.cod(m);
    for (const auto& e : q->fiber_of(b).elements())
      tab[e] = cls[a](p->reindex(m, e));
  }
  for (const auto& [a, d] : p->delta)
    q->delta[a] = cls[c.product(a, a).obj](d);
  for (const auto& [key, tab] : p->exists_) {
    auto& nt = q->exists_[key];
    const std::string& pobj = c.product(key.first, key.second).obj;
    for (const auto& e : q->fiber_of(pobj).elements())
      nt[e] = cls[key.first](tab.at(e));
  }
  for (const auto& [key, tab] : p->forall_) {
    auto& nt = q->forall_[key];
    const std::string& pobj = c.product(key.first, key.second).obj;
    for (const auto& e : q->fiber_of(pobj).elements())
      nt[e] = cls[key.first](tab.at(e));
  }
  out.doctrine = q;

  DoctrineMorphism& m = out.morphism;
  m.src = p;
  m.dst = q;
  for (const auto& a : c.objects()) {
    m.obj_map[a] = a;
    auto& tab = m.comp[a];
    for (const auto& e : p->fiber_of(a).elements()) tab[e] = cls[a](e);
  }
  for (const auto& f : c.morphisms()) m.mor_map[f] = f;
  m.preserved = p->layers;
  return out;
}

DoctrineMorphism mediate_quotient(const QuotientResult& q,
                                  const DoctrineMorphism& target) {
  if (target.src.get() != q.morphism.src.get())
    throw PreconditionError("target is not a morphism out of the source");
  const Doctrine& r = *target.dst;
  const std::string& t = target.src->base.terminal();
  const std::string& gt = target.on_obj(t);
  for (const auto& th : q.filter)
    if (!r.fiber_of(gt).le(*r.ops_of(gt).top, target.on_elem(t, th)))
      throw PreconditionError("target does not satisfy the filter");

  DoctrineMorphism m;
  m.src = q.doctrine;
  m.dst = target.dst;
  m.obj_map = target.obj_map;
  m.mor_map = target.mor_map;
  for (const auto& a : q.doctrine->base.objects()) {
    auto& tab = m.comp[a];
    for (const auto& e : q.doctrine->fiber_of(a).elements())
      tab[e] = target.on_elem(a, e);
  }
  for (Layer l : q.doctrine->layers)
    if (target.preserved.count(l)) m.preserved.insert(l);
  return m;
}

std::shared_ptr<const Doctrine> subsets_companion(
    const FinCategory& c,
    const std::map<std::string, std::vector<std::string>>& carrier,
    const std::function<std::string(const std::string&, const std::string&)>&
        act) {
  auto s = std::make_shared<Doctrine>();
  s->base = c;
  s->layers.insert(kAllLayers.begin(), kAllLayers.end());

  std::map<std::string, std::vector<std::vector<std::string>>> subsets;
  for (const auto& x : c.objects()) {
    const auto& pts = carrier.at(x);
    if (pts.size() > 10)
      throw PreconditionError("carrier over " + x + " is too large");
    auto& subs = subsets[x];
    for (size_t mask = 0; mask < (size_t{1} << pts.size()); ++mask) {
      std::vector<std::string> members;
      for (size_t i = 0; i < pts.size(); ++i)
        if (mask & (size_t{1} << i)) members.push_back(pts[i]);
      subs.push_back(std::move(members));
    }
    std::vector<std::string> names;
    std::vector<std::pair<std::string, std::string>> le;
    for (const auto& a : subs) {
      names.push_back(set_name(a));
      for (const auto& b : subs)
        if (std::includes(b.begin(), b.end(), a.begin(), a.end()))
          le.push_back({set_name(a), set_name(b)});
    }
    s->fiber[x] = FinPoset(names, le);
    LatticeOps o;
    o.top = set_name(pts);
    o.bottom = set_name({});
    o.has_meet = o.has_join = o.has_imp = true;
    for (const auto& a : subs)
      for (const auto& b : subs) {
        std::vector<std::string> mt, jn, im;
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                              std::back_inserter(mt));
        std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                       std::back_inserter(jn));
        for (const auto& p : pts)
          if (!std::binary_search(a.begin(), a.end(), p) ||
              std::binary_search(b.begin(), b.end(), p))
            im.push_back(p);
        o.meet[{set_name(a), set_name(b)}] = set_name(mt);
        o.join[{set_name(a), set_name(b)}] = set_name(jn);
        o.imp[{set_name(a), set_name(b)}] = set_name(im);
      }
    s->ops[x] = std::move(o);
  }
  for (const auto& f : c.morphisms()) {
    const std::string &a = c.dom(f), &b = c.cod(f);
    std::map<std::string, std::string> image;  // carrier(a) point -> carrier(b)
    for (const auto& p : carrier.at(a)) image[p] = act(f, p);
    auto& tab = s->reind[f];
    for (const auto& sub : subsets[b]) {
      std::vector<std::string> pre;
      for (const auto& p : carrier.at(a))
        if (std::binary_search(sub.begin(), sub.end(), image[p]))
          pre.push_back(p);
      tab[set_name(sub)] = set_name(pre);
    }
  }
  for (const auto& [key, pr] : c.products()) {
    std::map<std::string, std::string> left, right;
    for (const auto& p : carrier.at(pr.obj)) {
      left[p] = act(pr.pr1, p);
      right[p] = act(pr.pr2, p);
    }
    if (key.first == key.second) {
      std::vector<std::string> diag;
      for (const auto& p : carrier.at(pr.obj))
        if (left[p] == right[p]) diag.push_back(p);
      s->delta[key.first] = set_name(diag);
    }
    auto& ex = s->exists_[key];
    auto& fa = s->forall_[key];
    for (const auto& sub : subsets[pr.obj]) {
      std::vector<std::string> img, all;
      for (const auto& a : carrier.at(key.first)) {
        bool some = false, every = true;
        for (const auto& p : carrier.at(pr.obj))
          if (left[p] == a) {
            if (std::binary_search(sub.begin(), sub.end(), p))
              some = true;
            else
              every = false;
          }
        if (some) img.push_back(a);
        if (every) all.push_back(a);
      }
      ex[set_name(sub)] = set_name(img);
      fa[set_name(sub)] = set_name(all);
    }
  }
  return s;
}

namespace {

SubsetModel evaluate(std::shared_ptr<const Doctrine> p,
                     const std::set<std::string>& nabla,
                     std::map<std::string, std::vector<std::string>> carrier,
                     std::shared_ptr<const Doctrine> companion,
                     const std::map<std::string, std::string>& point_arrow) {
  SubsetModel out;
  out.doctrine = companion;
  out.carrier = std::move(carrier);
  DoctrineMorphism& m = out.morphism;
  m.src = p;
  m.dst = companion;
  for (const auto& x : p->base.objects()) {
    m.obj_map[x] = x;
    auto& tab = m.comp[x];
    for (const auto& e : p->fiber_of(x).elements()) {
      std::vector<std::string> sat;
      for (const auto& pt : out.carrier.at(x))
        if (nabla.count(p->reindex(point_arrow.at(pt), e))) sat.push_back(pt);
      tab[e] = set_name(sat);
    }
  }
  for (const auto& f : p->base.morphisms()) m.mor_map[f] = f;
  m.preserved = p->layers;
  return out;
}

}  // namespace

SubsetModel extract_model(std::shared_ptr<const Doctrine> p,
                          const std::set<std::string>& nabla) {
  check_filter(*p, nabla);
  const FinCategory& c = p->base;
  std::map<std::string, std::vector<std::string>> carrier;
  std::map<std::string, std::string> point_arrow;
  for (const auto& x : c.objects()) {
    carrier[x] = c.hom_set(c.terminal(), x);
    for (const auto& a : carrier[x]) point_arrow[a] = a;
  }
  auto companion = subsets_companion(
      c, carrier,
      [&](const std::string& f, const std::string& pt) {
        return c.compose(f, pt);
      });
  return evaluate(p, nabla, carrier, companion, point_arrow);
}

SubsetModel extract_model_elementary(std::shared_ptr<const Doctrine> p,
                                     const std::set<std::string>& nabla) {
  check_filter(*p, nabla);
  if (!p->layers.count(Layer::Elementary))
    throw PreconditionError("extract_model_elementary needs fibered equality");
  const FinCategory& c = p->base;
  const std::string& t = c.terminal();

  // Partition each carrier by provable equality mod the filter.
  std::map<std::string, std::map<std::string, std::string>> cls;
  std::map<std::string, std::vector<std::string>> carrier;
  for (const auto& x : c.objects()) {
    std::vector<std::string> pts = c.hom_set(t, x);
    auto related = [&](const std::string& a, const std::string& b) {
      if (!c.has_product(x, x)) return a == b;
      return nabla.count(p->reindex(c.tuple(a, b), p->delta_of(x))) > 0;
    };
    for (const auto& a : pts)
      for (const auto& b : pts) {
        if (related(a, b) != related(b, a))
          throw PreconditionError("equality mod the filter is not symmetric");
        for (const auto& d : pts)
          if (related(a, b) && related(b, d) && !related(a, d))
            throw PreconditionError(
                "equality mod the filter is not transitive");
      }
    auto& cx = cls[x];
    for (const auto& a : pts) {
      for (const auto& b : pts)
        if (related(a, b) && (!cx.count(a) || b < cx[a])) cx[a] = b;
      if (!related(a, a))
        throw PreconditionError("equality mod the filter is not reflexive");
      if (cx[a] == a) carrier[x].push_back(a);
    }
  }
  auto companion = subsets_companion(
      c, carrier,
      [&](const std::string& f, const std::string& pt) {
        return cls.at(c.cod(f)).at(c.compose(f, pt));
      });
  std::map<std::string, std::string> point_arrow;
  for (const auto& [x, reps] : carrier)
    for (const auto& r : reps) point_arrow[r] = r;
  return evaluate(p, nabla, carrier, companion, point_arrow);
}

PipelineResult henkin_model_pipeline(std::shared_ptr<const Doctrine> p,
                                     size_t budget) {
  PipelineResult out;
  out.initial = consistency_status(*p);
  if (out.initial.status == ConsistencyStatus::Inconsistent)
    throw PreconditionError("inconsistent doctrine: no model exists");

  out.saturation = henkin_saturate(p, std::nullopt, budget);
  std::shared_ptr<const Doctrine> s = out.saturation.doctrine;
  out.saturated = consistency_status(*s);
  if (out.saturated.status == ConsistencyStatus::Inconsistent)
    throw PreconditionError("saturation produced an inconsistent doctrine");

  out.rich = check_rich(*s);

  const std::string& t = s->base.terminal();
  Filter seed;
  seed.members = {*s->ops_of(t).top};
  seed.proper = true;
  out.ultrafilter =
      extend_to_ultrafilter(s->fiber_of(t), s->ops_of(t), seed);

  out.quotient = quotient_by_filter(s, out.ultrafilter.members);
  const Doctrine& q = *out.quotient.doctrine;
  out.model =
      extract_model(out.quotient.doctrine,
                    {*q.ops_of(q.base.terminal()).top});
  out.composite = compose_morphisms(
      out.model.morphism,
      compose_morphisms(out.quotient.morphism, out.saturation.morphism));
  return out;
}

}  // namespace dctk
