#pragma once

#include <memory>
#include <string>
#include <vector>

#include "dctk/doctrine.hpp"
#include "helpers.hpp"

// Single-table corruptions of the two-carrier subsets fixture, each paired
// with the layer whose law suite must report it.
struct Mutation {
  std::string name;
  std::shared_ptr<const dctk::Doctrine> doctrine;
  dctk::Layer layer;
};

inline std::vector<Mutation> shipped_mutations() {
  using dctk::Layer;
  const std::string B = "{0,1}";
  const std::string BB = "{(0,0),(0,1),(1,0),(1,1)}";
  std::vector<Mutation> out;
  auto mutate = [&](const std::string& name, Layer layer, auto&& fn) {
    auto p = copy_of(*subsets_small());
    fn(*p);
    out.push_back({name, p, layer});
  };
  mutate("top_not_greatest", Layer::Primary,
         [&](dctk::Doctrine& p) { p.ops[B].top = "{}"; });
  mutate("meet_not_lower_bound", Layer::Primary,
         [&](dctk::Doctrine& p) { p.ops[B].meet[{"{0}", "{1}"}] = B; });
  mutate("reindex_not_natural", Layer::Primary, [&](dctk::Doctrine& p) {
    // the constant-0 point of B no longer pulls {0} back to the full set
    p.reind["{*}=>" + B + "#0"]["{0}"] = "{}";
  });
  mutate("identity_reindex_moves", Layer::Primary, [&](dctk::Doctrine& p) {
    p.reind[p.base.identity(B)]["{0}"] = "{1}";
  });
  mutate("bottom_not_least", Layer::Bounded,
         [&](dctk::Doctrine& p) { p.ops[B].bottom = "{0}"; });
  mutate("join_not_upper_bound", Layer::Joins,
         [&](dctk::Doctrine& p) { p.ops[B].join[{"{0}", "{1}"}] = "{0}"; });
  mutate("imp_not_residual", Layer::Implicational,
         [&](dctk::Doctrine& p) { p.ops[B].imp[{"{0}", "{}"}] = B; });
  mutate("negation_not_involutive", Layer::Boolean, [&](dctk::Doctrine& p) {
    // collapses neg({0}) onto bottom, so double negation no longer fixes {0}
    p.ops[B].imp[{"{0}", "{}"}] = "{}";
  });
  mutate("equality_corrupted", Layer::Elementary,
         [&](dctk::Doctrine& p) { p.delta[B] = "{}"; });
  mutate("exists_not_adjoint", Layer::Existential, [&](dctk::Doctrine& p) {
    p.exists_[{B, B}]["{(0,1)}"] = B;
  });
  mutate("forall_not_adjoint", Layer::Universal, [&](dctk::Doctrine& p) {
    p.forall_[{B, B}][BB] = "{}";  // the full square no longer maps to top
  });
  return out;
}
