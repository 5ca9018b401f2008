#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dctk/common.hpp"

namespace dctk {

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// A finite category presented by explicit tables, with a chosen terminal
// object and a chosen (possibly partial) table of binary products.
//
// Everything is keyed by opaque string ids.  Build with the add_*/set_*
// calls, then call finalize(); finalize resolves ids to dense indices and
// throws StructuralError on dangling references.  Law checking (identity,
// associativity, universal properties) is done by validate(), which returns
// counterexamples instead of throwing.
class FinCategory {
 public:
  struct Product {
    std::string obj, pr1, pr2;
  };

  void add_object(const std::string& id);
  void add_morphism(const std::string& id, const std::string& dom,
                    const std::string& cod);
  void set_compose(const std::string& g, const std::string& f,
                   const std::string& gf);
  void set_identity(const std::string& obj, const std::string& m);
  void set_terminal(const std::string& obj);
  void set_bang(const std::string& obj, const std::string& m);
  void set_product(const std::string& a, const std::string& b,
                   const Product& p);
  void finalize();
  bool finalized() const { return finalized_; }

  const std::vector<std::string>& objects() const { return objects_; }
  const std::vector<std::string>& morphisms() const { return mor_ids_; }
  bool has_object(const std::string& id) const;
  bool has_morphism(const std::string& id) const;
  const std::string& dom(const std::string& m) const;
  const std::string& cod(const std::string& m) const;

  // g after f; throws StructuralError when the pair is not in the table.
  const std::string& compose(const std::string& g, const std::string& f) const;
  std::optional<std::string> try_compose(const std::string& g,
                                         const std::string& f) const;
  const std::string& identity(const std::string& obj) const;
  const std::string& terminal() const { return terminal_; }
  const std::string& bang(const std::string& obj) const;

  bool has_product(const std::string& a, const std::string& b) const;
  const Product& product(const std::string& a, const std::string& b) const;
  const std::map<std::pair<std::string, std::string>, Product>& products()
      const {
    return products_;
  }

  // Sorted ids of all morphisms a -> b.
  std::vector<std::string> hom_set(const std::string& a,
                                   const std::string& b) const;

  // The unique h with pr1 . h = f and pr2 . h = g into the chosen product
  // of cod(f) and cod(g); found by scanning the hom set.  Throws
  // PreconditionError when the product is absent or h is not unique.
  std::string tuple(const std::string& f, const std::string& g) const;

  ValidationReport validate() const;

  // Raw table access for serialization.
  std::vector<std::array<std::string, 3>> compose_triples() const;
  const std::map<std::string, std::string>& identity_table() const {
    return identity_by_obj_;
  }
  const std::map<std::string, std::string>& bang_table() const {
    return bang_by_obj_;
  }

  // Dense-index views for hot loops.  Valid only after finalize().
  int object_count() const { return static_cast<int>(objects_.size()); }
  int morphism_count() const { return static_cast<int>(mor_ids_.size()); }
  int object_index(const std::string& id) const;
  int morphism_index(const std::string& id) const;
  const std::string& object_at(int i) const { return objects_[i]; }
  const std::string& morphism_at(int i) const { return mor_ids_[i]; }
  int dom_at(int m) const { return dom_[m]; }
  int cod_at(int m) const { return cod_[m]; }
  int compose_at(int g, int f) const {
    return compose_idx_[static_cast<size_t>(g) * mor_ids_.size() + f];
  }
  const std::vector<int>& morphisms_from(int obj) const { return out_[obj]; }
  const std::vector<int>& morphisms_into(int obj) const { return in_[obj]; }

 private:
  void require_finalized() const;

  std::vector<std::string> objects_;  // sorted unique
  std::vector<std::string> mor_ids_;  // sorted unique
  std::map<std::string, std::pair<std::string, std::string>> mor_decl_;
  std::vector<std::array<std::string, 3>> compose_decl_;  // (g, f, gf)
  std::map<std::string, std::string> identity_by_obj_;
  std::map<std::string, std::string> bang_by_obj_;
  std::string terminal_;
  std::map<std::pair<std::string, std::string>, Product> products_;

  bool finalized_ = false;
  std::map<std::string, int> obj_idx_;
  std::map<std::string, int> mor_idx_;
  std::vector<int> dom_, cod_;            // per morphism index
  std::vector<int32_t> compose_idx_;      // g * M + f -> index or -1
  std::vector<int> identity_idx_;         // per object index
  std::vector<int> bang_idx_;             // per object index
  std::vector<std::vector<int>> out_, in_;  // morphisms by dom / cod object
};

// Presentation of the Kleisli category of the reader comonad (sort x -).
// Arrows a ~> b are exactly the base arrows sort x a -> b; only base
// objects a with a chosen product (sort, a) are carried over.
struct KleisliPresentation {
  FinCategory category;
  std::string sort;
  // kleisli morphism id -> backing base morphism id (sort x a -> b)
  std::map<std::string, std::string> base_arrow;
  // base morphism id of the arrow t ~> sort picking out the new constant
  std::string distinguished_constant;
  // kleisli arrow id for the distinguished constant
  std::string distinguished_constant_arrow;
};

// Requires: base finalized, products (sort, t) present.  Objects without a
// chosen product (sort, -) are dropped from the Kleisli category.
KleisliPresentation kleisli_reader(const FinCategory& base,
                                   const std::string& sort);

// Kleisli arrow ids are a fixed function of the arrow's domain and the
// backing base arrow (the same base arrow sort x a -> b can back arrows out
// of different domains when chosen products share their object).
std::string kleisli_arrow_id(const std::string& kdom,
                             const std::string& base_morphism);

}  // namespace dctk
