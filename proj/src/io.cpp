#include "dctk/io.hpp"

#include <algorithm>
#include <sstream>

#include "dctk/model.hpp"
#include "json.hpp"

namespace dctk {

using nlohmann::json;

namespace {

void position_of(const std::string& text, size_t byte, size_t& line,
                 size_t& col) {
  line = 1;
  col = 1;
  for (size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    size_t line, col;
    position_of(text, e.byte, line, col);
    std::ostringstream msg;
    msg << "syntax error at line " << line << ", column " << col << ": "
        << e.what();
    throw StructuralError(msg.str());
  }
}

const json& member(const json& j, const std::string& key,
                   const std::string& where) {
  auto it = j.find(key);
  if (it == j.end())
    throw StructuralError("missing \"" + key + "\" in " + where);
  return *it;
}

void need_fiber_elem(const Doctrine& p, const std::string& obj,
                     const std::string& e, const std::string& where) {
  if (!p.fiber.count(obj))
    throw StructuralError("dangling object reference " + obj + " in " + where);
  if (!p.fiber.at(obj).contains(e))
    throw StructuralError("dangling element reference " + e + " (fiber " +
                          obj + ") in " + where);
}

std::map<std::pair<std::string, std::string>, std::string> pair_table(
    const json& j) {
  std::map<std::pair<std::string, std::string>, std::string> out;
  for (const auto& [a, row] : j.items())
    for (const auto& [b, v] : row.items())
      out[{a, b}] = v.get<std::string>();
  return out;
}

json pair_table_json(
    const std::map<std::pair<std::string, std::string>, std::string>& t) {
  std::map<std::string, std::map<std::string, std::string>> nested;
  for (const auto& [k, v] : t) nested[k.first][k.second] = v;
  return json(nested);
}

std::shared_ptr<const Doctrine> json_to_doctrine(const json& j) {
  auto p = std::make_shared<Doctrine>();
  const json& cat = member(j, "category", "document");
  FinCategory& c = p->base;
  for (const auto& o : member(cat, "objects", "category"))
    c.add_object(o.get<std::string>());
  for (const auto& [id, decl] : member(cat, "morphisms", "category").items())
    c.add_morphism(id, member(decl, "dom", id).get<std::string>(),
                   member(decl, "cod", id).get<std::string>());
  for (const auto& t : member(cat, "compose", "category")) {
    if (!t.is_array() || t.size() != 3)
      throw StructuralError("compose entries must be [g, f, gf] triples");
    c.set_compose(t[0].get<std::string>(), t[1].get<std::string>(),
                  t[2].get<std::string>());
  }
  for (const auto& [o, m] : member(cat, "identities", "category").items())
    c.set_identity(o, m.get<std::string>());
  c.set_terminal(member(cat, "terminal", "category").get<std::string>());
  for (const auto& [o, m] : member(cat, "bang", "category").items())
    c.set_bang(o, m.get<std::string>());
  for (const auto& pr : member(cat, "products", "category"))
    c.set_product(member(pr, "left", "product").get<std::string>(),
                  member(pr, "right", "product").get<std::string>(),
                  {member(pr, "obj", "product").get<std::string>(),
                   member(pr, "pr1", "product").get<std::string>(),
                   member(pr, "pr2", "product").get<std::string>()});
  c.finalize();

  for (const auto& [o, f] : member(j, "fibers", "document").items()) {
    if (!c.has_object(o))
      throw StructuralError("dangling object reference " + o + " in fibers");
    std::vector<std::string> elems;
    for (const auto& e : member(f, "elements", "fiber " + o))
      elems.push_back(e.get<std::string>());
    std::vector<std::pair<std::string, std::string>> leq;
    for (const auto& pr : member(f, "leq", "fiber " + o))
      leq.push_back({pr[0].get<std::string>(), pr[1].get<std::string>()});
    for (const auto& [a, b] : leq) {
      if (std::find(elems.begin(), elems.end(), a) == elems.end() ||
          std::find(elems.begin(), elems.end(), b) == elems.end())
        throw StructuralError("dangling element reference in leq of fiber " +
                              o);
    }
    p->fiber[o] = FinPoset(elems, leq);
  }
  for (const auto& o : c.objects())
    if (!p->fiber.count(o))
      throw StructuralError("no fiber declared over " + o);

  for (const auto& [m, table] : member(j, "reindex", "document").items()) {
    if (!c.has_morphism(m))
      throw StructuralError("dangling morphism reference " + m +
                            " in reindex");
    auto& t = p->reind[m];
    for (const auto& [e, v] : table.items()) {
      need_fiber_elem(*p, c.cod(m), e, "reindex along " + m);
      need_fiber_elem(*p, c.dom(m), v.get<std::string>(),
                      "reindex along " + m);
      t[e] = v.get<std::string>();
    }
  }

  const json& st = member(j, "structure", "document");
  for (const auto& l : member(st, "layers", "structure")) {
    auto layer = layer_from_string(l.get<std::string>());
    if (!layer)
      throw StructuralError("unknown layer " + l.get<std::string>());
    p->layers.insert(*layer);
  }
  bool wants_bottom = p->layers.count(Layer::Bounded) ||
                      p->layers.count(Layer::Heyting) ||
                      p->layers.count(Layer::Boolean);
  bool wants_join = p->layers.count(Layer::Joins) ||
                    p->layers.count(Layer::Heyting) ||
                    p->layers.count(Layer::Boolean);
  bool wants_imp = p->layers.count(Layer::Implicational) ||
                   p->layers.count(Layer::Heyting) ||
                   p->layers.count(Layer::Boolean);
  for (const auto& [o, spec] : member(st, "ops", "structure").items()) {
    if (!c.has_object(o))
      throw StructuralError("dangling object reference " + o + " in ops");
    if (spec.is_string() && spec.get<std::string>() == "derive") {
      LatticeOps d = derive_lattice_ops(p->fiber.at(o));
      if (!d.top || !d.has_meet)
        throw StructuralError("derive: fiber " + o +
                              " has no top or binary meets");
      if (wants_bottom && !d.bottom)
        throw StructuralError("derive: fiber " + o + " has no bottom");
      if (wants_join && !d.has_join)
        throw StructuralError("derive: fiber " + o + " has no binary joins");
      if (wants_imp && !d.has_imp)
        throw StructuralError("derive: fiber " + o + " has no implication");
      p->ops[o] = std::move(d);
      continue;
    }
    LatticeOps ops;
    if (spec.contains("top")) ops.top = spec["top"].get<std::string>();
    if (spec.contains("bottom")) ops.bottom = spec["bottom"].get<std::string>();
    if (spec.contains("meet")) {
      ops.meet = pair_table(spec["meet"]);
      ops.has_meet = true;
    }
    if (spec.contains("join")) {
      ops.join = pair_table(spec["join"]);
      ops.has_join = true;
    }
    if (spec.contains("imp")) {
      ops.imp = pair_table(spec["imp"]);
      ops.has_imp = true;
    }
    if (ops.top) need_fiber_elem(*p, o, *ops.top, "ops of " + o);
    if (ops.bottom) need_fiber_elem(*p, o, *ops.bottom, "ops of " + o);
    for (const auto* table : {&ops.meet, &ops.join, &ops.imp})
      for (const auto& [k, v] : *table) {
        need_fiber_elem(*p, o, k.first, "ops of " + o);
        need_fiber_elem(*p, o, k.second, "ops of " + o);
        need_fiber_elem(*p, o, v, "ops of " + o);
      }
    p->ops[o] = std::move(ops);
  }
  if (st.contains("delta"))
    for (const auto& [o, e] : st["delta"].items()) {
      if (!c.has_object(o) || !c.has_product(o, o))
        throw StructuralError("delta declared at " + o +
                              " which has no chosen square");
      need_fiber_elem(*p, c.product(o, o).obj, e.get<std::string>(),
                      "delta of " + o);
      p->delta[o] = e.get<std::string>();
    }
  auto read_quant = [&](const char* key, bool ex) {
    if (!st.contains(key)) return;
    for (const auto& entry : st[key]) {
      const std::string left = member(entry, "left", key).get<std::string>();
      const std::string right = member(entry, "right", key).get<std::string>();
      if (!c.has_product(left, right))
        throw StructuralError(std::string(key) + " table at (" + left + ", " +
                              right + ") without a chosen product");
      auto& t = ex ? p->exists_[{left, right}] : p->forall_[{left, right}];
      for (const auto& [e, v] : member(entry, "table", key).items()) {
        need_fiber_elem(*p, c.product(left, right).obj, e,
                        std::string(key) + " at (" + left + ", " + right +
                            ")");
        need_fiber_elem(*p, left, v.get<std::string>(),
                        std::string(key) + " at (" + left + ", " + right +
                            ")");
        t[e] = v.get<std::string>();
      }
    }
  };
  read_quant("exists", true);
  read_quant("forall", false);
  return p;
}

json doctrine_to_json(const Doctrine& p) {
  const FinCategory& c = p.base;
  json cat;
  cat["objects"] = c.objects();
  json mors(json::value_t::object);
  for (const auto& m : c.morphisms())
    mors[m] = {{"dom", c.dom(m)}, {"cod", c.cod(m)}};
  cat["morphisms"] = std::move(mors);
  auto triples = c.compose_triples();
  std::sort(triples.begin(), triples.end());
  json comp = json::array();
  for (const auto& t : triples) comp.push_back({t[0], t[1], t[2]});
  cat["compose"] = std::move(comp);
  cat["identities"] = c.identity_table();
  cat["terminal"] = c.terminal();
  cat["bang"] = c.bang_table();
  json prods = json::array();
  for (const auto& [key, pr] : c.products())
    prods.push_back({{"left", key.first},
                     {"right", key.second},
                     {"obj", pr.obj},
                     {"pr1", pr.pr1},
                     {"pr2", pr.pr2}});
  cat["products"] = std::move(prods);

  json fibers(json::value_t::object);
  for (const auto& o : c.objects()) {
    const FinPoset& f = p.fiber_of(o);
    json leq = json::array();
    for (const auto& a : f.elements())
      for (const auto& b : f.elements())
        if (f.le(a, b)) leq.push_back({a, b});
    fibers[o] = {{"elements", f.elements()}, {"leq", std::move(leq)}};
  }

  json reindex(json::value_t::object);
  for (const auto& [m, t] : p.reind) reindex[m] = t;

  json st;
  std::vector<std::string> layers;
  for (Layer l : p.layers) layers.push_back(to_string(l));
  std::sort(layers.begin(), layers.end());
  st["layers"] = std::move(layers);
  json ops(json::value_t::object);
  for (const auto& [o, os] : p.ops) {
    json spec(json::value_t::object);
    if (os.top) spec["top"] = *os.top;
    if (os.bottom) spec["bottom"] = *os.bottom;
    if (os.has_meet) spec["meet"] = pair_table_json(os.meet);
    if (os.has_join) spec["join"] = pair_table_json(os.join);
    if (os.has_imp) spec["imp"] = pair_table_json(os.imp);
    ops[o] = std::move(spec);
  }
  st["ops"] = std::move(ops);
  if (!p.delta.empty()) st["delta"] = p.delta;
  auto quant_json = [](const std::map<std::pair<std::string, std::string>,
                                      std::map<std::string, std::string>>&
                           tables) {
    json arr = json::array();
    for (const auto& [key, t] : tables)
      arr.push_back(
          {{"left", key.first}, {"right", key.second}, {"table", t}});
    return arr;
  };
  if (!p.exists_.empty()) st["exists"] = quant_json(p.exists_);
  if (!p.forall_.empty()) st["forall"] = quant_json(p.forall_);

  json j;
  j["category"] = std::move(cat);
  j["fibers"] = std::move(fibers);
  j["reindex"] = std::move(reindex);
  j["structure"] = std::move(st);
  return j;
}

json morphism_to_json(const DoctrineMorphism& m) {
  json j;
  j["obj"] = m.obj_map;
  j["mor"] = m.mor_map;
  j["comp"] = m.comp;
  std::vector<std::string> pres;
  for (Layer l : m.preserved) pres.push_back(to_string(l));
  std::sort(pres.begin(), pres.end());
  j["preserved"] = std::move(pres);
  return j;
}

DoctrineMorphism json_to_morphism(const json& j,
                                  std::shared_ptr<const Doctrine> src,
                                  std::shared_ptr<const Doctrine> dst) {
  DoctrineMorphism m;
  m.src = std::move(src);
  m.dst = std::move(dst);
  for (const auto& [a, v] : member(j, "obj", "morphism").items())
    m.obj_map[a] = v.get<std::string>();
  for (const auto& [a, v] : member(j, "mor", "morphism").items())
    m.mor_map[a] = v.get<std::string>();
  for (const auto& [a, t] : member(j, "comp", "morphism").items())
    for (const auto& [e, v] : t.items()) m.comp[a][e] = v.get<std::string>();
  if (j.contains("preserved"))
    for (const auto& l : j["preserved"]) {
      auto layer = layer_from_string(l.get<std::string>());
      if (!layer)
        throw StructuralError("unknown layer " + l.get<std::string>());
      m.preserved.insert(*layer);
    }
  return m;
}

std::string dump_normalized(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::shared_ptr<const Doctrine> parse_doctrine(const std::string& text) {
  return json_to_doctrine(parse_json(text));
}

std::string serialize_doctrine(const Doctrine& p) {
  return dump_normalized(doctrine_to_json(p));
}

std::string serialize_morphism(const DoctrineMorphism& m) {
  return dump_normalized(morphism_to_json(m));
}

FiniteDirectedDiagram parse_diagram(const std::string& text) {
  json j = parse_json(text);
  FiniteDirectedDiagram d;
  for (const auto& i : member(j, "index", "diagram"))
    d.index.push_back(i.get<std::string>());
  for (const auto& pr : member(j, "leq", "diagram"))
    d.leq.push_back({pr[0].get<std::string>(), pr[1].get<std::string>()});
  for (const auto& [i, doc] : member(j, "nodes", "diagram").items())
    d.node[i] = json_to_doctrine(doc);
  for (const auto& [key, mj] : member(j, "edges", "diagram").items()) {
    auto sp = key.find(' ');
    if (sp == std::string::npos)
      throw StructuralError("edge key \"" + key + "\" is not \"i j\"");
    const std::string i = key.substr(0, sp), k = key.substr(sp + 1);
    if (!d.node.count(i) || !d.node.count(k))
      throw StructuralError("edge " + key + " references a missing node");
    d.edge[{i, k}] = json_to_morphism(mj, d.node.at(i), d.node.at(k));
  }
  return d;
}

std::string serialize_diagram(const FiniteDirectedDiagram& d) {
  json j;
  j["index"] = d.index;
  json leq = json::array();
  auto pairs = d.leq;
  std::sort(pairs.begin(), pairs.end());
  for (const auto& [a, b] : pairs) leq.push_back({a, b});
  j["leq"] = std::move(leq);
  json nodes(json::value_t::object);
  for (const auto& [i, n] : d.node) nodes[i] = doctrine_to_json(*n);
  j["nodes"] = std::move(nodes);
  json edges(json::value_t::object);
  for (const auto& [key, m] : d.edge)
    edges[key.first + " " + key.second] = morphism_to_json(m);
  j["edges"] = std::move(edges);
  return dump_normalized(j);
}

namespace {

// Lexicographic rank of a function graph: values of the sorted domain read
// as digits base |cod|, first element most significant.
size_t graph_rank(const std::vector<std::string>& dom,
                  const std::map<std::string, size_t>& cod_index,
                  const std::map<std::string, std::string>& graph) {
  size_t k = 0;
  for (const auto& x : dom) k = k * cod_index.size() + cod_index.at(graph.at(x));
  return k;
}

}  // namespace

std::shared_ptr<const Doctrine> gen_subset_doctrine(
    const std::vector<std::vector<std::string>>& carriers,
    bool include_empty) {
  std::map<std::string, std::vector<std::string>> carrier;  // by object name
  auto add_carrier = [&](std::vector<std::string> c) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    if (c.empty() && !include_empty)
      throw PreconditionError(
          "empty carrier: the subsets doctrine lives over nonempty sets");
    std::string name = subset_element_name(c);
    carrier.emplace(name, std::move(c));
    return name;
  };
  for (const auto& c : carriers) add_carrier(c);
  const std::string term = add_carrier({"*"});

  // Close under binary products; singletons collapse onto the other factor
  // and larger products are chosen only up to four elements.
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<std::string> names;
    for (const auto& [n, c] : carrier) names.push_back(n);
    for (const auto& a : names)
      for (const auto& b : names) {
        const auto &ca = carrier.at(a), &cb = carrier.at(b);
        if (ca.size() == 1 || cb.size() == 1) continue;
        if (ca.size() * cb.size() > 4) continue;
        std::vector<std::string> pc;
        for (const auto& x : ca)
          for (const auto& y : cb) pc.push_back("(" + x + "," + y + ")");
        if (carrier.count(subset_element_name(pc)) == 0) {
          add_carrier(pc);
          grew = true;
        }
      }
  }

  auto base = std::make_shared<FinCategory>();
  for (const auto& [n, c] : carrier) base->add_object(n);
  base->set_terminal(term);

  // All functions between all carriers, named by lexicographic rank.
  std::map<std::string, std::map<std::string, std::string>> graph;
  std::map<std::string, std::map<std::string, size_t>> elem_index;
  for (const auto& [n, c] : carrier) {
    auto& idx = elem_index[n];
    for (size_t i = 0; i < c.size(); ++i) idx[c[i]] = i;
  }
  auto fn_id = [&](const std::string& a, const std::string& b, size_t k) {
    return a + "=>" + b + "#" + std::to_string(k);
  };
  for (const auto& [a, ca] : carrier)
    for (const auto& [b, cb] : carrier) {
      if (cb.empty() && !ca.empty()) continue;  // no functions into the void
      size_t count = 1;
      for (size_t i = 0; i < ca.size(); ++i) count *= cb.size();
      std::vector<size_t> digits(ca.size(), 0);
      for (size_t k = 0; k < count; ++k) {
        const std::string id = fn_id(a, b, k);
        base->add_morphism(id, a, b);
        auto& g = graph[id];
        for (size_t i = 0; i < ca.size(); ++i) g[ca[i]] = cb[digits[i]];
        for (size_t i = ca.size(); i-- > 0;) {
          if (++digits[i] < cb.size()) break;
          digits[i] = 0;
        }
      }
    }
  std::map<std::string, std::pair<std::string, std::string>> ends;
  for (const auto& [a, ca] : carrier)
    for (const auto& [b, cb] : carrier) {
      if (cb.empty() && !ca.empty()) continue;
      size_t count = 1;
      for (size_t i = 0; i < ca.size(); ++i) count *= cb.size();
      for (size_t k = 0; k < count; ++k) ends[fn_id(a, b, k)] = {a, b};
    }
  auto id_of_graph = [&](const std::string& a, const std::string& b,
                         const std::map<std::string, std::string>& g) {
    if (carrier.at(a).empty() || carrier.at(b).size() == 1)
      return fn_id(a, b, 0);
    return fn_id(a, b, graph_rank(carrier.at(a), elem_index.at(b), g));
  };
  auto identity_of = [&](const std::string& n) {
    std::map<std::string, std::string> idg;
    for (const auto& x : carrier.at(n)) idg[x] = x;
    return id_of_graph(n, n, idg);
  };
  for (const auto& [g, gg] : graph)
    for (const auto& [f, fg] : graph) {
      const auto& [fa, fb] = ends.at(f);
      if (ends.at(g).first != fb) continue;
      std::map<std::string, std::string> comp;
      for (const auto& [x, y] : fg) comp[x] = gg.at(y);
      base->set_compose(g, f, id_of_graph(fa, ends.at(g).second, comp));
    }
  for (const auto& [n, c] : carrier) {
    base->set_identity(n, identity_of(n));
    std::map<std::string, std::string> bg;
    for (const auto& x : c) bg[x] = "*";
    base->set_bang(n, id_of_graph(n, term, bg));
  }
  for (const auto& [a, ca] : carrier)
    for (const auto& [b, cb] : carrier) {
      if (ca.size() == 1) {
        std::map<std::string, std::string> cg;
        for (const auto& y : cb) cg[y] = ca[0];
        base->set_product(a, b,
                          {b, id_of_graph(b, a, cg), identity_of(b)});
        continue;
      }
      if (cb.size() == 1) {
        std::map<std::string, std::string> cg;
        for (const auto& x : ca) cg[x] = cb[0];
        base->set_product(a, b,
                          {a, identity_of(a), id_of_graph(a, b, cg)});
        continue;
      }
      std::vector<std::string> pc;
      for (const auto& x : ca)
        for (const auto& y : cb) pc.push_back("(" + x + "," + y + ")");
      const std::string pn = subset_element_name(pc);
      if (!carrier.count(pn)) continue;
      std::map<std::string, std::string> g1, g2;
      for (const auto& x : ca)
        for (const auto& y : cb) {
          g1["(" + x + "," + y + ")"] = x;
          g2["(" + x + "," + y + ")"] = y;
        }
      base->set_product(a, b,
                        {pn, id_of_graph(pn, a, g1), id_of_graph(pn, b, g2)});
    }
  base->finalize();

  return subsets_companion(
      *base, carrier, [base, graph = std::move(graph)](
                          const std::string& f, const std::string& pt) {
        return graph.at(f).at(pt);
      });
}

std::shared_ptr<const Doctrine> gen_chain_fixture() {
  auto p = std::make_shared<Doctrine>();
  FinCategory& c = p->base;
  c.add_object("1");
  c.add_object("A");
  c.add_morphism("id_1", "1", "1");
  c.add_morphism("id_A", "A", "A");
  c.add_morphism("u", "1", "A");
  c.add_morphism("v", "A", "1");
  c.set_compose("id_1", "id_1", "id_1");
  c.set_compose("u", "id_1", "u");
  c.set_compose("id_A", "id_A", "id_A");
  c.set_compose("v", "id_A", "v");
  c.set_compose("id_A", "u", "u");
  c.set_compose("v", "u", "id_1");
  c.set_compose("id_1", "v", "v");
  c.set_compose("u", "v", "id_A");
  c.set_identity("1", "id_1");
  c.set_identity("A", "id_A");
  c.set_terminal("1");
  c.set_bang("1", "id_1");
  c.set_bang("A", "v");
  c.set_product("1", "1", {"1", "id_1", "id_1"});
  c.set_product("1", "A", {"A", "v", "id_A"});
  c.set_product("A", "1", {"A", "id_A", "v"});
  c.set_product("A", "A", {"A", "id_A", "id_A"});
  c.finalize();

  FinPoset chain({"0", "half", "1"},
                 {{"0", "half"}, {"half", "1"}, {"0", "1"}});
  LatticeOps ops = derive_lattice_ops(chain);
  for (const auto& o : c.objects()) {
    p->fiber[o] = chain;
    p->ops[o] = ops;
  }
  std::map<std::string, std::string> id_table;
  for (const auto& e : chain.elements()) id_table[e] = e;
  for (const auto& m : c.morphisms()) p->reind[m] = id_table;
  p->delta["1"] = "1";
  p->delta["A"] = "1";
  for (const auto& [key, pr] : c.products()) {
    p->exists_[key] = id_table;
    p->forall_[key] = id_table;
  }
  p->layers = {Layer::Primary,       Layer::Elementary, Layer::Existential,
               Layer::Universal,     Layer::Bounded,    Layer::Joins,
               Layer::Implicational, Layer::Heyting};
  return p;
}

uint64_t fnv1a64(const std::string& bytes) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace dctk
