#include "dctk/order.hpp"

#include <algorithm>
#include <cstdint>

namespace dctk {

FinPoset::FinPoset(std::vector<std::string> elements,
                   const std::vector<std::pair<std::string, std::string>>& pairs)
    : elems_(std::move(elements)) {
  std::sort(elems_.begin(), elems_.end());
  elems_.erase(std::unique(elems_.begin(), elems_.end()), elems_.end());
  for (size_t i = 0; i < elems_.size(); ++i)
    idx_[elems_[i]] = static_cast<int>(i);
  le_.assign(elems_.size() * elems_.size(), false);
  for (size_t i = 0; i < elems_.size(); ++i) le_[i * elems_.size() + i] = true;
  for (const auto& [a, b] : pairs) {
    auto ai = idx_.find(a), bi = idx_.find(b);
    if (ai == idx_.end() || bi == idx_.end())
      throw StructuralError("order pair (" + a + ", " + b +
                            ") references an unknown element");
    le_[ai->second * elems_.size() + bi->second] = true;
  }
}

int FinPoset::index(const std::string& id) const {
  auto it = idx_.find(id);
  if (it == idx_.end()) throw StructuralError("unknown element " + id);
  return it->second;
}

bool FinPoset::le(const std::string& a, const std::string& b) const {
  return le_at(index(a), index(b));
}

std::vector<std::string> FinPoset::violations() const {
  std::vector<std::string> out;
  const int n = size();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i != j && le_at(i, j) && le_at(j, i))
        out.push_back("antisymmetry fails on (" + elems_[i] + ", " + elems_[j] +
                      ")");
      if (!le_at(i, j)) continue;
      for (int k = 0; k < n; ++k)
        if (le_at(j, k) && !le_at(i, k))
          out.push_back("transitivity fails on (" + elems_[i] + ", " +
                        elems_[j] + ", " + elems_[k] + ")");
    }
  return out;
}

std::vector<std::string> MonotoneMap::violations() const {
  std::vector<std::string> out;
  for (const auto& a : source.elements())
    if (!table.count(a)) out.push_back("no image for " + a);
  for (const auto& [a, fa] : table) {
    if (!source.contains(a)) out.push_back("spurious entry for " + a);
    if (!target.contains(fa))
      out.push_back("image of " + a + " is unknown element " + fa);
  }
  if (!out.empty()) return out;
  for (const auto& a : source.elements())
    for (const auto& b : source.elements())
      if (source.le(a, b) && !target.le(table.at(a), table.at(b)))
        out.push_back("monotonicity fails on (" + a + ", " + b + ")");
  return out;
}

const std::string& MonotoneMap::operator()(const std::string& a) const {
  auto it = table.find(a);
  if (it == table.end()) throw StructuralError("no image for " + a);
  return it->second;
}

namespace {

const std::string& binop(
    const std::map<std::pair<std::string, std::string>, std::string>& t,
    bool present, const char* name, const std::string& a,
    const std::string& b) {
  if (!present) throw PreconditionError(std::string(name) + " is absent");
  auto it = t.find({a, b});
  if (it == t.end())
    throw StructuralError(std::string(name) + " has no entry for (" + a +
                          ", " + b + ")");
  return it->second;
}

}  // namespace

const std::string& LatticeOps::meet_of(const std::string& a,
                                       const std::string& b) const {
  return binop(meet, has_meet, "meet", a, b);
}
const std::string& LatticeOps::join_of(const std::string& a,
                                       const std::string& b) const {
  return binop(join, has_join, "join", a, b);
}
const std::string& LatticeOps::imp_of(const std::string& a,
                                      const std::string& b) const {
  return binop(imp, has_imp, "imp", a, b);
}
const std::string& LatticeOps::neg(const std::string& a) const {
  if (!bottom) throw PreconditionError("neg needs a bottom element");
  return imp_of(a, *bottom);
}

std::vector<std::string> LatticeOps::violations(const FinPoset& p) const {
  std::vector<std::string> out;
  if (top && (!p.contains(*top) || [&] {
        for (const auto& a : p.elements())
          if (!p.le(a, *top)) return true;
        return false;
      }()))
    out.push_back("top is not the maximum");
  if (bottom && (!p.contains(*bottom) || [&] {
        for (const auto& a : p.elements())
          if (!p.le(*bottom, a)) return true;
        return false;
      }()))
    out.push_back("bottom is not the minimum");
  auto check_bound = [&](bool present, const auto& t, const char* name,
                         bool lower) {
    if (!present) return;
    for (const auto& a : p.elements())
      for (const auto& b : p.elements()) {
        auto it = t.find(std::make_pair(a, b));
        if (it == t.end()) {
          out.push_back(std::string(name) + " missing entry (" + a + ", " + b +
                        ")");
          continue;
        }
        const std::string& v = it->second;
        bool ok = p.contains(v) &&
                  (lower ? p.le(v, a) && p.le(v, b) : p.le(a, v) && p.le(b, v));
        if (ok)
          for (const auto& c : p.elements()) {
            bool bound = lower ? p.le(c, a) && p.le(c, b)
                               : p.le(a, c) && p.le(b, c);
            if (bound && !(lower ? p.le(c, v) : p.le(v, c))) ok = false;
          }
        if (!ok)
          out.push_back(std::string(name) + "(" + a + ", " + b +
                        ") is not the " + (lower ? "glb" : "lub"));
      }
  };
  check_bound(has_meet, meet, "meet", true);
  check_bound(has_join, join, "join", false);
  if (has_imp) {
    if (!has_meet) {
      out.push_back("imp present without meet");
    } else {
      for (const auto& a : p.elements())
        for (const auto& b : p.elements()) {
          auto it = imp.find(std::make_pair(a, b));
          if (it == imp.end() || !p.contains(it->second)) {
            out.push_back("imp missing or unknown entry (" + a + ", " + b +
                          ")");
            continue;
          }
          for (const auto& c : p.elements())
            if (p.le(c, it->second) != p.le(meet_of(c, a), b))
              out.push_back("residual law fails on (" + c + ", " + a + ", " +
                            b + ")");
        }
    }
  }
  return out;
}

LatticeOps derive_lattice_ops(const FinPoset& p) {
  LatticeOps ops;
  const int n = p.size();
  for (int i = 0; i < n; ++i) {
    bool mx = true, mn = true;
    for (int j = 0; j < n; ++j) {
      if (!p.le_at(j, i)) mx = false;
      if (!p.le_at(i, j)) mn = false;
    }
    if (mx) ops.top = p.at(i);
    if (mn) ops.bottom = p.at(i);
  }

  auto bound = [&](int a, int b, bool lower) -> int {
    for (int v = 0; v < n; ++v) {
      bool isb = lower ? p.le_at(v, a) && p.le_at(v, b)
                       : p.le_at(a, v) && p.le_at(b, v);
      if (!isb) continue;
      bool best = true;
      for (int c = 0; c < n; ++c) {
        bool cb = lower ? p.le_at(c, a) && p.le_at(c, b)
                        : p.le_at(a, c) && p.le_at(b, c);
        if (cb && !(lower ? p.le_at(c, v) : p.le_at(v, c))) best = false;
      }
      if (best) return v;
    }
    return -1;
  };

  ops.has_meet = ops.has_join = true;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      int g = bound(a, b, true), l = bound(a, b, false);
      if (g < 0)
        ops.has_meet = false;
      else
        ops.meet[{p.at(a), p.at(b)}] = p.at(g);
      if (l < 0)
        ops.has_join = false;
      else
        ops.join[{p.at(a), p.at(b)}] = p.at(l);
    }
  if (!ops.has_meet) ops.meet.clear();
  if (!ops.has_join) ops.join.clear();

  if (ops.has_meet) {
    ops.has_imp = true;
    for (int a = 0; a < n && ops.has_imp; ++a)
      for (int b = 0; b < n; ++b) {
        // max { c | c /\ a <= b }
        int best = -1;
        for (int c = 0; c < n; ++c) {
          if (!p.le(ops.meet_of(p.at(c), p.at(a)), p.at(b))) continue;
          bool top_of_set = true;
          for (int d = 0; d < n; ++d)
            if (p.le(ops.meet_of(p.at(d), p.at(a)), p.at(b)) &&
                !p.le_at(d, c))
              top_of_set = false;
          if (top_of_set) {
            best = c;
            break;
          }
        }
        if (best < 0) {
          ops.has_imp = false;
          break;
        }
        ops.imp[{p.at(a), p.at(b)}] = p.at(best);
      }
    if (!ops.has_imp) ops.imp.clear();
  }
  return ops;
}

PosetReflection poset_reflection(
    const std::vector<std::string>& elements,
    const std::vector<std::pair<std::string, std::string>>& rel) {
  std::vector<std::string> elems = elements;
  std::sort(elems.begin(), elems.end());
  elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
  const int n = static_cast<int>(elems.size());
  std::map<std::string, int> idx;
  for (int i = 0; i < n; ++i) idx[elems[i]] = i;
  std::vector<bool> r(n * n, false);
  for (int i = 0; i < n; ++i) r[i * n + i] = true;
  for (const auto& [a, b] : rel) {
    auto ai = idx.find(a), bi = idx.find(b);
    if (ai == idx.end() || bi == idx.end())
      throw StructuralError("relation pair (" + a + ", " + b +
                            ") references an unknown element");
    r[ai->second * n + bi->second] = true;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (r[i * n + j])
        for (int k = 0; k < n; ++k)
          if (r[j * n + k] && !r[i * n + k])
            throw PreconditionError("relation is not transitive at (" +
                                    elems[i] + ", " + elems[j] + ", " +
                                    elems[k] + ")");

  // Representative of each class: least member id (elems is sorted).
  std::vector<int> rep(n);
  for (int i = 0; i < n; ++i) {
    rep[i] = i;
    for (int j = 0; j < i; ++j)
      if (r[i * n + j] && r[j * n + i]) {
        rep[i] = rep[j];
        break;
      }
  }

  std::vector<std::string> qelems;
  std::vector<std::pair<std::string, std::string>> qpairs;
  for (int i = 0; i < n; ++i)
    if (rep[i] == i) qelems.push_back(elems[i]);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (r[i * n + j]) qpairs.push_back({elems[rep[i]], elems[rep[j]]});

  PosetReflection out;
  out.quotient = FinPoset(qelems, qpairs);
  out.map.source = FinPoset(elems, rel);
  out.map.target = out.quotient;
  for (int i = 0; i < n; ++i) out.map.table[elems[i]] = elems[rep[i]];
  return out;
}

Filter generated_filter(const FinPoset& p, const LatticeOps& ops,
                        const std::set<std::string>& e) {
  if (!ops.top || !ops.has_meet)
    throw PreconditionError("generated_filter needs top and meet");
  std::set<std::string> meets = e;
  meets.insert(*ops.top);
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<std::string> cur(meets.begin(), meets.end());
    for (const auto& a : cur)
      for (const auto& b : cur)
        if (meets.insert(ops.meet_of(a, b)).second) grew = true;
  }
  Filter f;
  for (const auto& y : p.elements())
    for (const auto& m : meets)
      if (p.le(m, y)) {
        f.members.insert(y);
        break;
      }
  return f;
}

namespace {

bool is_filter(const FinPoset& p, const LatticeOps& ops,
               const std::set<std::string>& m) {
  if (!ops.top || !m.count(*ops.top)) return false;
  for (const auto& a : m) {
    for (const auto& y : p.elements())
      if (p.le(a, y) && !m.count(y)) return false;
    for (const auto& b : m)
      if (!m.count(ops.meet_of(a, b))) return false;
  }
  return true;
}

void require_bounded_implicative(const LatticeOps& ops) {
  if (!ops.top || !ops.bottom || !ops.has_meet || !ops.has_imp)
    throw PreconditionError(
        "operation needs a bounded implicative inf-semilattice");
}

}  // namespace

Filter classify_filter(const FinPoset& p, const LatticeOps& ops,
                       const std::set<std::string>& members) {
  require_bounded_implicative(ops);
  if (!is_filter(p, ops, members))
    throw PreconditionError("member set is not a filter");
  Filter f;
  f.members = members;
  f.proper = members.count(*ops.bottom) == 0;
  f.ultra = f.proper;
  for (const auto& a : p.elements())
    if (!members.count(a) && !members.count(ops.neg(a))) f.ultra = false;
  // Maximal among proper filters: no a outside f generates a proper
  // extension.
  f.maximal = f.proper;
  if (f.proper)
    for (const auto& a : p.elements()) {
      if (members.count(a)) continue;
      std::set<std::string> e = members;
      e.insert(a);
      if (!generated_filter(p, ops, e).members.count(*ops.bottom))
        f.maximal = false;
    }
  return f;
}

Filter extend_to_ultrafilter(const FinPoset& p, const LatticeOps& ops,
                             const Filter& f) {
  require_bounded_implicative(ops);
  if (!is_filter(p, ops, f.members))
    throw PreconditionError("input is not a filter");
  if (f.members.count(*ops.bottom))
    throw PreconditionError("cannot extend an improper filter");
  std::set<std::string> cur = f.members;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& a : p.elements()) {
      if (cur.count(a) || cur.count(ops.neg(a))) continue;
      std::set<std::string> with_a = cur;
      with_a.insert(a);
      Filter g = generated_filter(p, ops, with_a);
      if (!g.members.count(*ops.bottom)) {
        cur = g.members;
      } else {
        std::set<std::string> with_na = cur;
        with_na.insert(ops.neg(a));
        Filter h = generated_filter(p, ops, with_na);
        if (h.members.count(*ops.bottom))
          throw StructuralError(
              "both extensions collapse; lattice laws must be broken at " + a);
        cur = h.members;
      }
      changed = true;
    }
  }
  return classify_filter(p, ops, cur);
}

std::vector<Filter> enumerate_filters(const FinPoset& p,
                                      const LatticeOps& ops) {
  if (p.size() > 16)
    throw PreconditionError("enumerate_filters is guarded to 16 elements");
  if (!ops.top || !ops.has_meet)
    throw PreconditionError("enumerate_filters needs top and meet");
  const int n = p.size();
  bool classifiable = ops.bottom && ops.has_imp;
  std::vector<Filter> out;
  for (uint32_t mask = 0; mask < (1u << n); ++mask) {
    std::set<std::string> m;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) m.insert(p.at(i));
    if (!is_filter(p, ops, m)) continue;
    if (classifiable) {
      out.push_back(classify_filter(p, ops, m));
    } else {
      Filter f;
      f.members = m;
      out.push_back(f);
    }
  }
  return out;
}

}  // namespace dctk
