// Batch driver for the doctrine workbench: check, construct, saturate,
// ultrafilter, quotient, model, colimit.  Exit codes: 0 all checks pass,
// 1 semantic failure, 2 usage or parse error.  Structured reports carry no
// timing and are byte-identical for identical inputs.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "dctk/constructions.hpp"
#include "dctk/doctrine.hpp"
#include "dctk/io.hpp"
#include "dctk/model.hpp"
#include "json.hpp"

using nlohmann::json;

namespace {

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Usage("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string digest(const std::string& content) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(dctk::fnv1a64(content)));
  return std::string("fnv1a:") + buf;
}

struct Report {
  std::string command;
  bool structured = false;
  json inputs = json::object();
  json checks = json::object();
  json data = json::object();
  bool failed = false;

  void input(const std::string& path, const std::string& content) {
    inputs[path] = digest(content);
  }
  void check(const std::string& name, const dctk::StructureReport& r) {
    json c;
    c["status"] = r.ok() ? "pass" : "fail";
    c["failures"] = r.failures;
    checks[name] = std::move(c);
    failed = failed || !r.ok();
  }
  void check_flag(const std::string& name, bool ok,
                  const std::vector<std::string>& notes = {}) {
    json c;
    c["status"] = ok ? "pass" : "fail";
    c["failures"] = json::object();
    if (!notes.empty()) c["failures"]["detail"] = notes;
    checks[name] = std::move(c);
    failed = failed || !ok;
  }
  int finish() const {
    const char* status = failed ? "fail" : "pass";
    if (structured) {
      json j;
      j["checks"] = checks;
      j["command"] = command;
      j["data"] = data;
      j["inputs"] = inputs;
      j["status"] = status;
      std::cout << j.dump(2) << "\n";
    } else {
      std::cout << "command: " << command << "\n";
      for (const auto& [path, d] : inputs.items())
        std::cout << "input: " << path << " " << d.get<std::string>() << "\n";
      for (const auto& [name, c] : checks.items()) {
        std::cout << "check " << name << ": "
                  << c["status"].get<std::string>() << "\n";
        for (const auto& [group, msgs] : c["failures"].items())
          for (const auto& m : msgs)
            std::cout << "  [" << group << "] " << m.get<std::string>()
                      << "\n";
      }
      if (!data.empty()) std::cout << "data: " << data.dump() << "\n";
      std::cout << "status: " << status << "\n";
    }
    return failed ? 1 : 0;
  }
};

void write_out(Report& rep, const std::string& out, const std::string& text) {
  if (out.empty()) return;
  std::ofstream f(out, std::ios::binary);
  if (!f) throw Usage("cannot write " + out);
  f << text;
  rep.data["out"] = out;
  rep.data["out_digest"] = digest(text);
}

std::shared_ptr<const dctk::Doctrine> load(Report& rep,
                                           const std::string& path) {
  const std::string text = read_file(path);
  rep.input(path, text);
  return dctk::parse_doctrine(text);
}

int cmd_check(Report& rep, const std::string& file,
              const std::vector<std::string>& layer_names) {
  auto p = load(rep, file);
  p->require_coherent();
  std::set<dctk::Layer> layers;
  if (layer_names.empty()) {
    layers = p->layers;
  } else {
    for (const auto& n : layer_names) {
      auto l = dctk::layer_from_string(n);
      if (!l) throw Usage("unknown layer " + n);
      layers.insert(*l);
    }
  }
  for (dctk::Layer l : layers)
    rep.check(dctk::to_string(l), dctk::check_structure(*p, l));
  return rep.finish();
}

int cmd_construct(Report& rep, const std::string& file, const std::string& op,
                  const std::vector<std::string>& args,
                  const std::string& out) {
  auto p = load(rep, file);
  auto need_args = [&](size_t n) {
    if (args.size() != n)
      throw Usage(op + " takes " + std::to_string(n) + " argument(s)");
  };
  std::shared_ptr<const dctk::Doctrine> result;
  if (op == "add-constant") {
    need_args(1);
    if (!p->base.has_object(args[0]))
      throw Usage("unknown object " + args[0]);
    dctk::ConstantResult r = dctk::add_constant(p, args[0]);
    result = r.doctrine;
    rep.data["dropped_objects"] = r.dropped_objects;
    rep.data["constant_arrow"] = r.kleisli.distinguished_constant_arrow;
    rep.check("morphism", dctk::check_morphism(r.morphism));
  } else if (op == "add-axiom") {
    need_args(1);
    const std::string& t = p->base.terminal();
    if (!p->fiber_of(t).contains(args[0]))
      throw Usage("unknown terminal-fiber element " + args[0]);
    dctk::AxiomResult r = dctk::add_axiom(p, args[0]);
    result = r.doctrine;
    rep.check("morphism", dctk::check_morphism(r.morphism));
    auto inv = dctk::invert_morphism(r.morphism);
    rep.data["isomorphic_to_input"] =
        inv.has_value() && dctk::check_morphism(*inv).ok();
  } else if (op == "henkin") {
    need_args(2);
    if (!p->base.has_object(args[0]))
      throw Usage("unknown object " + args[0]);
    if (!p->fiber_of(args[0]).contains(args[1]))
      throw Usage("unknown element " + args[1] + " over " + args[0]);
    dctk::HenkinStepResult r = dctk::henkin_step(p, args[0], args[1]);
    result = r.doctrine;
    rep.data["axiom"] = r.entry.axiom;
    rep.data["witness_inequality"] = r.entry.inequality_holds;
    rep.data["witness_equality"] = r.entry.equality_holds;
    rep.check("morphism", dctk::check_morphism(r.morphism));
    rep.check_flag("witness_inequality", r.entry.inequality_holds);
  } else if (op == "notnot") {
    need_args(0);
    dctk::FragmentResult r = dctk::double_negation_fragment(p);
    result = r.doctrine;
    rep.check("morphism", dctk::check_morphism(r.morphism));
    rep.check("boolean",
              dctk::check_structure(*r.doctrine, dctk::Layer::Boolean));
  } else {
    throw Usage("unknown construction " + op);
  }
  write_out(rep, out, dctk::serialize_doctrine(*result));
  return rep.finish();
}

int cmd_saturate(Report& rep, const std::string& file, size_t budget,
                 const std::string& out) {
  auto p = load(rep, file);
  dctk::SaturationResult r = dctk::henkin_saturate(p, std::nullopt, budget);
  json steps = json::array();
  bool all_ineq = true;
  for (const auto& s : r.trace.steps) {
    steps.push_back({{"sort", s.sort},
                     {"formula", s.formula},
                     {"equality", s.equality_holds}});
    all_ineq = all_ineq && s.inequality_holds;
  }
  rep.data["steps"] = std::move(steps);
  rep.data["truncated"] = r.trace.truncated;
  rep.data["skipped"] = r.trace.skipped.size();
  rep.check_flag("witness_inequalities", all_ineq);
  write_out(rep, out, dctk::serialize_doctrine(*r.doctrine));
  return rep.finish();
}

int cmd_ultrafilter(Report& rep, const std::string& file) {
  auto p = load(rep, file);
  const std::string& t = p->base.terminal();
  const dctk::FinPoset& f = p->fiber_of(t);
  const dctk::LatticeOps& ops = p->ops_of(t);
  if (!ops.top || !ops.bottom || !ops.has_meet || !ops.has_imp)
    throw dctk::PreconditionError(
        "ultrafilter needs a bounded implicational terminal fiber");
  if (f.size() <= 16) {
    json all = json::array();
    for (const auto& fl : dctk::enumerate_filters(f, ops)) {
      json one;
      one["members"] = std::vector<std::string>(fl.members.begin(),
                                                fl.members.end());
      one["proper"] = fl.proper;
      one["ultra"] = fl.ultra;
      one["maximal"] = fl.maximal;
      all.push_back(std::move(one));
    }
    rep.data["filters"] = std::move(all);
  }
  dctk::Filter seed;
  seed.members = {*ops.top};
  seed.proper = true;
  dctk::Filter u = dctk::extend_to_ultrafilter(f, ops, seed);
  rep.data["greedy_ultrafilter"] =
      std::vector<std::string>(u.members.begin(), u.members.end());
  rep.check_flag("greedy_ultrafilter_is_ultra", u.proper && u.ultra);
  return rep.finish();
}

int cmd_quotient(Report& rep, const std::string& file,
                 const std::vector<std::string>& gens,
                 const std::string& out) {
  auto p = load(rep, file);
  const std::string& t = p->base.terminal();
  std::set<std::string> seed(gens.begin(), gens.end());
  seed.insert(*p->ops_of(t).top);
  for (const auto& e : seed)
    if (!p->fiber_of(t).contains(e))
      throw Usage("unknown terminal-fiber element " + e);
  dctk::Filter nabla =
      dctk::generated_filter(p->fiber_of(t), p->ops_of(t), seed);
  dctk::QuotientResult q = dctk::quotient_by_filter(p, nabla.members);
  rep.data["filter"] = std::vector<std::string>(nabla.members.begin(),
                                                nabla.members.end());
  rep.data["consistency"] =
      dctk::to_string(dctk::consistency_status(*q.doctrine).status);
  rep.check("morphism", dctk::check_morphism(q.morphism));
  write_out(rep, out, dctk::serialize_doctrine(*q.doctrine));
  return rep.finish();
}

int cmd_model(Report& rep, const std::string& file, size_t budget,
              bool elementary, const std::string& filter_spec,
              const std::string& out) {
  auto p = load(rep, file);
  dctk::SubsetModel model;
  std::shared_ptr<const dctk::Doctrine> source;  // what the model evaluates
  if (filter_spec == "greedy") {
    dctk::PipelineResult r = dctk::henkin_model_pipeline(p, budget);
    rep.data["initial_consistency"] = dctk::to_string(r.initial.status);
    rep.data["saturated_consistency"] = dctk::to_string(r.saturated.status);
    rep.data["saturation_steps"] = r.saturation.trace.steps.size();
    rep.data["saturation_truncated"] = r.saturation.trace.truncated;
    rep.data["rich"] = r.rich.rich();
    rep.data["ultrafilter"] = std::vector<std::string>(
        r.ultrafilter.members.begin(), r.ultrafilter.members.end());
    source = r.quotient.doctrine;
    const auto& qt = *source->ops_of(source->base.terminal()).top;
    model = elementary ? dctk::extract_model_elementary(source, {qt})
                       : dctk::extract_model(source, {qt});
    rep.check("composite_morphism", dctk::check_morphism(r.composite));
  } else {
    std::set<std::string> seed;
    std::stringstream ss(filter_spec);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) seed.insert(item);
    const std::string& t = p->base.terminal();
    for (const auto& e : seed)
      if (!p->fiber_of(t).contains(e))
        throw Usage("unknown terminal-fiber element " + e);
    seed.insert(*p->ops_of(t).top);
    dctk::Filter nabla =
        dctk::generated_filter(p->fiber_of(t), p->ops_of(t), seed);
    source = p;
    model = elementary ? dctk::extract_model_elementary(p, nabla.members)
                       : dctk::extract_model(p, nabla.members);
  }
  rep.data["carriers"] = model.carrier;
  json interp = json::object();
  for (const auto& [obj, table] : model.morphism.comp) interp[obj] = table;
  rep.data["interp"] = std::move(interp);
  rep.check("preservation", dctk::check_morphism(model.morphism));
  if (elementary) {
    bool diag = true;
    for (const auto& [o, d] : source->delta)
      if (model.morphism.on_elem(source->base.product(o, o).obj, d) !=
          model.doctrine->delta_of(o))
        diag = false;
    rep.data["diagonal_preserved"] = diag;
    rep.check_flag("diagonal_preservation", diag);
  }
  write_out(rep, out, dctk::serialize_doctrine(*model.doctrine));
  return rep.finish();
}

int cmd_colimit(Report& rep, const std::string& file, const std::string& out) {
  const std::string text = read_file(file);
  rep.input(file, text);
  dctk::FiniteDirectedDiagram d = dctk::parse_diagram(text);
  dctk::ColimitResult r = dctk::directed_colimit(d);
  rep.data["max_index"] = r.max_index;
  rep.data["object_classes"] = r.object_class.size();
  rep.data["morphism_classes"] = r.morphism_class.size();
  const dctk::DoctrineMorphism& top_leg = r.cocone.at(r.max_index);
  auto inv = dctk::invert_morphism(top_leg);
  rep.check_flag("max_leg_bijective", inv.has_value());
  rep.check("max_leg_morphism", dctk::check_morphism(top_leg));
  if (inv) rep.check("max_leg_inverse", dctk::check_morphism(*inv));
  write_out(rep, out, dctk::serialize_doctrine(*r.doctrine));
  return rep.finish();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finitely presented doctrine workbench"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string format = "text";
  app.add_option("--format", format, "text or structured")
      ->check(CLI::IsMember({"text", "structured"}));

  std::string file, out, op, filter_spec = "greedy";
  std::vector<std::string> layer_names, op_args, filter_gens;
  size_t budget = 32;
  bool elementary = false;

  CLI::App* check = app.add_subcommand("check", "verify structure laws");
  check->add_option("file", file)->required();
  check->add_option("--layers", layer_names)->delimiter(',');

  CLI::App* construct =
      app.add_subcommand("construct", "run a construction and serialize it");
  construct->add_option("file", file)->required();
  construct->add_option("op", op, "add-constant | add-axiom | henkin | notnot")
      ->required();
  construct->add_option("args", op_args, "construction arguments");
  construct->add_option("--out", out);

  CLI::App* saturate = app.add_subcommand("saturate", "one Henkin round");
  saturate->add_option("file", file)->required();
  saturate->add_option("--budget", budget);
  saturate->add_option("--out", out);

  CLI::App* ultra =
      app.add_subcommand("ultrafilter", "filters of the terminal fiber");
  ultra->add_option("file", file)->required();

  CLI::App* quot = app.add_subcommand("quotient", "quotient by a filter");
  quot->add_option("file", file)->required();
  quot->add_option("--filter", filter_gens, "filter generators")
      ->delimiter(',');
  quot->add_option("--out", out);

  CLI::App* model = app.add_subcommand("model", "extract a subsets model");
  model->add_option("file", file)->required();
  model->add_option("--budget", budget);
  model->add_flag("--elementary", elementary);
  model->add_option("--filter", filter_spec,
                    "greedy or comma-separated generators");
  model->add_option("--out", out);

  CLI::App* colim = app.add_subcommand("colimit", "directed colimit");
  colim->add_option("file", file)->required();
  colim->add_option("--out", out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  Report rep;
  rep.structured = (format == "structured");
  try {
    if (check->parsed()) {
      rep.command = "check";
      return cmd_check(rep, file, layer_names);
    }
    if (construct->parsed()) {
      rep.command = "construct";
      return cmd_construct(rep, file, op, op_args, out);
    }
    if (saturate->parsed()) {
      rep.command = "saturate";
      return cmd_saturate(rep, file, budget, out);
    }
    if (ultra->parsed()) {
      rep.command = "ultrafilter";
      return cmd_ultrafilter(rep, file);
    }
    if (quot->parsed()) {
      rep.command = "quotient";
      return cmd_quotient(rep, file, filter_gens, out);
    }
    if (model->parsed()) {
      rep.command = "model";
      return cmd_model(rep, file, budget, elementary, filter_spec, out);
    }
    if (colim->parsed()) {
      rep.command = "colimit";
      return cmd_colimit(rep, file, out);
    }
  } catch (const Usage& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const dctk::StructuralError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const dctk::PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
