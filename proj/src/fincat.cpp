#include "dctk/fincat.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace dctk {

namespace {

// Violation lists are capped so a single broken table cannot flood a report.
constexpr size_t kViolationCap = 50;

void report(std::vector<std::string>& out, size_t& dropped,
            const std::string& msg) {
  if (out.size() < kViolationCap)
    out.push_back(msg);
  else
    ++dropped;
}

}  // namespace

void FinCategory::add_object(const std::string& id) {
  if (finalized_) throw StructuralError("category is finalized");
  if (id.empty()) throw StructuralError("empty object id");
  if (std::find(objects_.begin(), objects_.end(), id) != objects_.end())
    throw StructuralError("duplicate object id: " + id);
  objects_.push_back(id);
}

void FinCategory::add_morphism(const std::string& id, const std::string& dom,
                               const std::string& cod) {
  if (finalized_) throw StructuralError("category is finalized");
  if (id.empty()) throw StructuralError("empty morphism id");
  if (mor_decl_.count(id)) throw StructuralError("duplicate morphism id: " + id);
  mor_decl_[id] = {dom, cod};
  mor_ids_.push_back(id);
}

void FinCategory::set_compose(const std::string& g, const std::string& f,
                              const std::string& gf) {
  if (finalized_) throw StructuralError("category is finalized");
  compose_decl_.push_back({g, f, gf});
}

void FinCategory::set_identity(const std::string& obj, const std::string& m) {
  if (finalized_) throw StructuralError("category is finalized");
  identity_by_obj_[obj] = m;
}

void FinCategory::set_terminal(const std::string& obj) {
  if (finalized_) throw StructuralError("category is finalized");
  terminal_ = obj;
}

void FinCategory::set_bang(const std::string& obj, const std::string& m) {
  if (finalized_) throw StructuralError("category is finalized");
  bang_by_obj_[obj] = m;
}

void FinCategory::set_product(const std::string& a, const std::string& b,
                              const Product& p) {
  if (finalized_) throw StructuralError("category is finalized");
  products_[{a, b}] = p;
}

void FinCategory::finalize() {
  if (finalized_) return;
  std::sort(objects_.begin(), objects_.end());
  std::sort(mor_ids_.begin(), mor_ids_.end());
  for (size_t i = 0; i < objects_.size(); ++i)
    obj_idx_[objects_[i]] = static_cast<int>(i);
  for (size_t i = 0; i < mor_ids_.size(); ++i)
    mor_idx_[mor_ids_[i]] = static_cast<int>(i);

  const size_t m = mor_ids_.size();
  dom_.resize(m);
  cod_.resize(m);
  out_.assign(objects_.size(), {});
  in_.assign(objects_.size(), {});
  for (size_t i = 0; i < m; ++i) {
    const auto& d = mor_decl_.at(mor_ids_[i]);
    auto di = obj_idx_.find(d.first), ci = obj_idx_.find(d.second);
    if (di == obj_idx_.end())
      throw StructuralError("morphism " + mor_ids_[i] + ": unknown dom " +
                            d.first);
    if (ci == obj_idx_.end())
      throw StructuralError("morphism " + mor_ids_[i] + ": unknown cod " +
                            d.second);
    dom_[i] = di->second;
    cod_[i] = ci->second;
    out_[di->second].push_back(static_cast<int>(i));
    in_[ci->second].push_back(static_cast<int>(i));
  }

  compose_idx_.assign(m * m, -1);
  for (const auto& t : compose_decl_) {
    auto gi = mor_idx_.find(t[0]), fi = mor_idx_.find(t[1]),
         ri = mor_idx_.find(t[2]);
    if (gi == mor_idx_.end() || fi == mor_idx_.end() || ri == mor_idx_.end())
      throw StructuralError("compose entry references unknown morphism: (" +
                            t[0] + ", " + t[1] + ") -> " + t[2]);
    if (cod_[fi->second] != dom_[gi->second])
      throw StructuralError("compose entry for non-composable pair: (" + t[0] +
                            ", " + t[1] + ")");
    if (dom_[ri->second] != dom_[fi->second] ||
        cod_[ri->second] != cod_[gi->second])
      throw StructuralError("compose entry result ill-typed: (" + t[0] + ", " +
                            t[1] + ") -> " + t[2]);
    int32_t& slot = compose_idx_[gi->second * m + fi->second];
    if (slot != -1 && slot != ri->second)
      throw StructuralError("conflicting compose entries for (" + t[0] + ", " +
                            t[1] + ")");
    slot = static_cast<int32_t>(ri->second);
  }

  identity_idx_.assign(objects_.size(), -1);
  for (const auto& [obj, mid] : identity_by_obj_) {
    if (!obj_idx_.count(obj))
      throw StructuralError("identity entry for unknown object " + obj);
    auto mi = mor_idx_.find(mid);
    if (mi == mor_idx_.end())
      throw StructuralError("identity of " + obj + " references unknown morphism " + mid);
    identity_idx_[obj_idx_[obj]] = mi->second;
  }
  for (size_t i = 0; i < objects_.size(); ++i)
    if (identity_idx_[i] == -1)
      throw StructuralError("missing identity for object " + objects_[i]);

  if (terminal_.empty()) throw StructuralError("no terminal object declared");
  if (!obj_idx_.count(terminal_))
    throw StructuralError("terminal references unknown object " + terminal_);

  bang_idx_.assign(objects_.size(), -1);
  for (const auto& [obj, mid] : bang_by_obj_) {
    if (!obj_idx_.count(obj))
      throw StructuralError("bang entry for unknown object " + obj);
    auto mi = mor_idx_.find(mid);
    if (mi == mor_idx_.end())
      throw StructuralError("bang of " + obj + " references unknown morphism " + mid);
    bang_idx_[obj_idx_[obj]] = mi->second;
  }
  for (size_t i = 0; i < objects_.size(); ++i)
    if (bang_idx_[i] == -1)
      throw StructuralError("missing bang for object " + objects_[i]);

  for (const auto& [key, p] : products_) {
    if (!obj_idx_.count(key.first) || !obj_idx_.count(key.second) ||
        !obj_idx_.count(p.obj))
      throw StructuralError("product entry (" + key.first + ", " + key.second +
                            ") references an unknown object");
    if (!mor_idx_.count(p.pr1) || !mor_idx_.count(p.pr2))
      throw StructuralError("product entry (" + key.first + ", " + key.second +
                            ") references an unknown projection");
  }

  finalized_ = true;
}

void FinCategory::require_finalized() const {
  if (!finalized_) throw StructuralError("category is not finalized");
}

bool FinCategory::has_object(const std::string& id) const {
  require_finalized();
  return obj_idx_.count(id) > 0;
}

bool FinCategory::has_morphism(const std::string& id) const {
  require_finalized();
  return mor_idx_.count(id) > 0;
}

int FinCategory::object_index(const std::string& id) const {
  require_finalized();
  auto it = obj_idx_.find(id);
  if (it == obj_idx_.end()) throw StructuralError("unknown object " + id);
  return it->second;
}

int FinCategory::morphism_index(const std::string& id) const {
  require_finalized();
  auto it = mor_idx_.find(id);
  if (it == mor_idx_.end()) throw StructuralError("unknown morphism " + id);
  return it->second;
}

const std::string& FinCategory::dom(const std::string& m) const {
  return objects_[dom_[morphism_index(m)]];
}

const std::string& FinCategory::cod(const std::string& m) const {
  return objects_[cod_[morphism_index(m)]];
}

const std::string& FinCategory::compose(const std::string& g,
                                        const std::string& f) const {
  int r = compose_at(morphism_index(g), morphism_index(f));
  if (r < 0)
    throw StructuralError("compose undefined for (" + g + ", " + f + ")");
  return mor_ids_[r];
}

std::optional<std::string> FinCategory::try_compose(
    const std::string& g, const std::string& f) const {
  int r = compose_at(morphism_index(g), morphism_index(f));
  if (r < 0) return std::nullopt;
  return mor_ids_[r];
}

const std::string& FinCategory::identity(const std::string& obj) const {
  return mor_ids_[identity_idx_[object_index(obj)]];
}

const std::string& FinCategory::bang(const std::string& obj) const {
  return mor_ids_[bang_idx_[object_index(obj)]];
}

bool FinCategory::has_product(const std::string& a,
                              const std::string& b) const {
  return products_.count({a, b}) > 0;
}

const FinCategory::Product& FinCategory::product(const std::string& a,
                                                 const std::string& b) const {
  auto it = products_.find({a, b});
  if (it == products_.end())
    throw PreconditionError("no chosen product for (" + a + ", " + b + ")");
  return it->second;
}

std::vector<std::string> FinCategory::hom_set(const std::string& a,
                                              const std::string& b) const {
  int ai = object_index(a), bi = object_index(b);
  std::vector<std::string> out;
  for (int m : out_[ai])
    if (cod_[m] == bi) out.push_back(mor_ids_[m]);
  return out;  // out_ holds sorted indices over sorted ids
}

std::string FinCategory::tuple(const std::string& f,
                               const std::string& g) const {
  int fi = morphism_index(f), gi = morphism_index(g);
  if (dom_[fi] != dom_[gi])
    throw PreconditionError("tuple: domains differ for (" + f + ", " + g + ")");
  const Product& p = product(objects_[cod_[fi]], objects_[cod_[gi]]);
  int p1 = morphism_index(p.pr1), p2 = morphism_index(p.pr2);
  int pobj = object_index(p.obj);
  std::string found;
  for (int h : out_[dom_[fi]]) {
    if (cod_[h] != pobj) continue;
    if (compose_at(p1, h) == fi && compose_at(p2, h) == gi) {
      if (!found.empty())
        throw PreconditionError("tuple: mediator not unique for (" + f + ", " +
                                g + ")");
      found = mor_ids_[h];
    }
  }
  if (found.empty())
    throw PreconditionError("tuple: no mediator for (" + f + ", " + g + ")");
  return found;
}

ValidationReport FinCategory::validate() const {
  require_finalized();
  ValidationReport rep;
  size_t dropped = 0;
  const size_t m = mor_ids_.size();

  // Totality of composition.
  for (size_t f = 0; f < m; ++f)
    for (int g : out_[cod_[f]])
      if (compose_at(g, static_cast<int>(f)) < 0)
        report(rep.violations, dropped,
               "compose missing for composable pair (" + mor_ids_[g] + ", " +
                   mor_ids_[f] + ")");

  // Identity laws.
  for (size_t i = 0; i < objects_.size(); ++i) {
    int id = identity_idx_[i];
    if (dom_[id] != static_cast<int>(i) || cod_[id] != static_cast<int>(i))
      report(rep.violations, dropped,
             "identity of " + objects_[i] + " is not an endomorphism");
  }
  for (size_t f = 0; f < m; ++f) {
    int idd = identity_idx_[dom_[f]], idc = identity_idx_[cod_[f]];
    if (compose_at(static_cast<int>(f), idd) != static_cast<int>(f))
      report(rep.violations, dropped,
             "right identity law fails for " + mor_ids_[f]);
    if (compose_at(idc, static_cast<int>(f)) != static_cast<int>(f))
      report(rep.violations, dropped,
             "left identity law fails for " + mor_ids_[f]);
  }

  // Associativity over all composable triples.
  {
    size_t bad = 0;
    for (size_t f = 0; f < m && bad < kViolationCap; ++f)
      for (int g : out_[cod_[f]]) {
        int gf = compose_at(g, static_cast<int>(f));
        if (gf < 0) continue;
        for (int h : out_[cod_[g]]) {
          int hg = compose_at(h, g);
          if (hg < 0) continue;
          if (compose_at(h, gf) != compose_at(hg, static_cast<int>(f))) {
            report(rep.violations, dropped,
                   "associativity fails on (" + mor_ids_[h] + ", " +
                       mor_ids_[g] + ", " + mor_ids_[f] + ")");
            if (++bad >= kViolationCap) break;
          }
        }
        if (bad >= kViolationCap) break;
      }
  }

  // Terminal object: exactly one arrow from each object, and bang is it.
  for (size_t i = 0; i < objects_.size(); ++i) {
    auto hs = hom_set(objects_[i], terminal_);
    if (hs.size() != 1)
      report(rep.violations, dropped,
             "hom(" + objects_[i] + ", " + terminal_ + ") has " +
                 std::to_string(hs.size()) + " arrows, expected 1");
    else if (hs[0] != bang(objects_[i]))
      report(rep.violations, dropped,
             "bang of " + objects_[i] + " is not the arrow to the terminal");
  }

  // Chosen products: projections well-typed, pairing exists uniquely.
  for (const auto& [key, p] : products_) {
    const std::string tag = "product (" + key.first + ", " + key.second + ")";
    if (dom(p.pr1) != p.obj || cod(p.pr1) != key.first ||
        dom(p.pr2) != p.obj || cod(p.pr2) != key.second) {
      report(rep.violations, dropped, tag + ": projections ill-typed");
      continue;
    }
    int p1 = morphism_index(p.pr1), p2 = morphism_index(p.pr2);
    int pobj = object_index(p.obj);
    for (size_t c = 0; c < objects_.size(); ++c) {
      // Count mediators per (pr1 . h, pr2 . h) pair.
      std::map<std::pair<int, int>, int> seen;
      for (int h : out_[c]) {
        if (cod_[h] != pobj) continue;
        int a = compose_at(p1, h), b = compose_at(p2, h);
        if (a < 0 || b < 0) continue;  // reported by totality check
        ++seen[{a, b}];
      }
      for (int f : out_[c]) {
        if (cod_[f] != object_index(key.first)) continue;
        for (int g : out_[c]) {
          if (cod_[g] != object_index(key.second)) continue;
          auto it = seen.find({f, g});
          int n = it == seen.end() ? 0 : it->second;
          if (n != 1)
            report(rep.violations, dropped,
                   tag + ": " + std::to_string(n) + " mediators for (" +
                       mor_ids_[f] + ", " + mor_ids_[g] + ")");
        }
      }
    }
  }

  if (dropped > 0)
    rep.violations.push_back("... and " + std::to_string(dropped) +
                             " further violations suppressed");
  return rep;
}

std::vector<std::array<std::string, 3>> FinCategory::compose_triples() const {
  require_finalized();
  std::vector<std::array<std::string, 3>> out;
  const size_t m = mor_ids_.size();
  for (size_t g = 0; g < m; ++g)
    for (size_t f = 0; f < m; ++f) {
      int r = compose_idx_[g * m + f];
      if (r >= 0) out.push_back({mor_ids_[g], mor_ids_[f], mor_ids_[r]});
    }
  return out;
}

std::string kleisli_arrow_id(const std::string& kdom,
                             const std::string& base_morphism) {
  return "k(" + kdom + ")" + base_morphism;
}

KleisliPresentation kleisli_reader(const FinCategory& base,
                                   const std::string& sort) {
  if (!base.finalized()) throw StructuralError("base category not finalized");
  if (!base.has_object(sort)) throw StructuralError("unknown sort " + sort);
  if (!base.has_product(sort, base.terminal()))
    throw PreconditionError("kleisli_reader: no chosen product (" + sort +
                            ", " + base.terminal() + ")");
  if (!base.has_product(sort, sort))
    throw PreconditionError("kleisli_reader: no chosen product (" + sort +
                            ", " + sort + ")");

  // Objects a with a chosen product (sort, a); others are dropped.
  std::vector<std::string> kept;
  for (const auto& a : base.objects())
    if (base.has_product(sort, a)) kept.push_back(a);

  KleisliPresentation k;
  k.sort = sort;
  FinCategory& c = k.category;
  for (const auto& a : kept) c.add_object(a);

  // Arrows a ~> b per base arrow sort x a -> b, named after their backing.
  std::map<std::pair<std::string, std::string>, std::string> back_of;
  for (const auto& a : kept) {
    const auto& pa = base.product(sort, a);
    for (const auto& b : kept)
      for (const auto& f : base.hom_set(pa.obj, b)) {
        std::string id = kleisli_arrow_id(a, f);
        c.add_morphism(id, a, b);
        k.base_arrow[id] = f;
        back_of[{a, f}] = id;
      }
  }

  // Identity on a is the second projection sort x a -> a; bang is the base
  // bang of sort x a.
  for (const auto& a : kept) {
    const auto& pa = base.product(sort, a);
    c.set_identity(a, back_of.at({a, pa.pr2}));
    c.set_bang(a, back_of.at({a, base.bang(pa.obj)}));
  }
  c.set_terminal(base.terminal());

  // g . f has backing g^ . <pr1, f^>.
  for (const auto& a : kept) {
    const auto& pa = base.product(sort, a);
    for (const auto& b : kept) {
      const auto& pb = base.product(sort, b);
      for (const auto& fh : base.hom_set(pa.obj, b)) {
        std::string graph = base.tuple(pa.pr1, fh);  // sort x a -> sort x b
        for (const auto& cobj : kept)
          for (const auto& gh : base.hom_set(pb.obj, cobj)) {
            std::string comp = base.compose(gh, graph);
            c.set_compose(back_of.at({b, gh}), back_of.at({a, fh}),
                          back_of.at({a, comp}));
          }
      }
    }
  }

  // Chosen products: reuse the base product object when it was kept; its
  // projections are the base projections precomposed with pr2.
  for (const auto& a : kept)
    for (const auto& b : kept) {
      if (!base.has_product(a, b)) continue;
      const auto& p = base.product(a, b);
      if (!base.has_product(sort, p.obj)) continue;
      const auto& sp = base.product(sort, p.obj);
      FinCategory::Product kp;
      kp.obj = p.obj;
      kp.pr1 = back_of.at({p.obj, base.compose(p.pr1, sp.pr2)});
      kp.pr2 = back_of.at({p.obj, base.compose(p.pr2, sp.pr2)});
      c.set_product(a, b, kp);
    }

  // The constant t ~> sort is backed by the first projection sort x t ->
  // sort (the identity of sort whenever the chosen product collapses).
  const auto& pt = base.product(sort, base.terminal());
  k.distinguished_constant = pt.pr1;
  k.distinguished_constant_arrow = back_of.at({base.terminal(), pt.pr1});

  c.finalize();
  return k;
}

}  // namespace dctk
