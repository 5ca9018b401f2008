#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dctk/common.hpp"

namespace dctk {

// Finite partial order on string ids.  le is stored densely over the sorted
// element list; validate() checks reflexivity, antisymmetry, transitivity.
class FinPoset {
 public:
  FinPoset() = default;
  // pairs are (a, b) with a <= b; reflexive pairs may be omitted.
  FinPoset(std::vector<std::string> elements,
           const std::vector<std::pair<std::string, std::string>>& pairs);

  const std::vector<std::string>& elements() const { return elems_; }
  int size() const { return static_cast<int>(elems_.size()); }
  int index(const std::string& id) const;
  bool contains(const std::string& id) const { return idx_.count(id) > 0; }
  const std::string& at(int i) const { return elems_[i]; }
  bool le(const std::string& a, const std::string& b) const;
  bool le_at(int i, int j) const { return le_[i * elems_.size() + j]; }

  std::vector<std::string> violations() const;  // partial-order laws

  bool operator==(const FinPoset& o) const {
    return elems_ == o.elems_ && le_ == o.le_;
  }

 private:
  std::vector<std::string> elems_;
  std::map<std::string, int> idx_;
  std::vector<bool> le_;
};

// Reflexivity and transitivity are NOT assumed closed on input; violations()
// reports them, nothing repairs them.
struct MonotoneMap {
  FinPoset source, target;
  std::map<std::string, std::string> table;

  std::vector<std::string> violations() const;  // totality + monotonicity
  const std::string& operator()(const std::string& a) const;
};

// Optional lattice structure over a poset.  Every present field is expected
// to satisfy its defining property; derive_lattice_ops computes exactly the
// fields whose witnesses exist for all arguments.
struct LatticeOps {
  std::optional<std::string> top, bottom;
  std::map<std::pair<std::string, std::string>, std::string> meet, join, imp;
  bool has_meet = false, has_join = false, has_imp = false;

  const std::string& meet_of(const std::string& a, const std::string& b) const;
  const std::string& join_of(const std::string& a, const std::string& b) const;
  const std::string& imp_of(const std::string& a, const std::string& b) const;
  // not(a) = imp(a, bottom); requires has_imp and bottom
  const std::string& neg(const std::string& a) const;

  std::vector<std::string> violations(const FinPoset& p) const;
};

LatticeOps derive_lattice_ops(const FinPoset& p);

struct Filter {
  std::set<std::string> members;
  bool proper = false, ultra = false, maximal = false;
};

// Quotient of a preorder by mutual relatedness.  rel must contain le pairs
// (reflexive pairs may be omitted); throws PreconditionError when rel is not
// transitive.  Class representative is the least member id.
struct PosetReflection {
  FinPoset quotient;
  MonotoneMap map;  // original preorder elements -> class representatives
};
PosetReflection poset_reflection(
    const std::vector<std::string>& elements,
    const std::vector<std::pair<std::string, std::string>>& rel);

// Least filter containing e.  Requires top and meet.
Filter generated_filter(const FinPoset& p, const LatticeOps& ops,
                        const std::set<std::string>& e);

// Fills in the proper/ultra/maximal flags.  Requires bounded implicative
// ops; f.members must be a filter.
Filter classify_filter(const FinPoset& p, const LatticeOps& ops,
                       const std::set<std::string>& members);

// Greedy deterministic extension: scan elements in id order, adjoin a when
// the generated filter stays proper, else adjoin not(a).  Requires a proper
// input filter over bounded implicative ops.
Filter extend_to_ultrafilter(const FinPoset& p, const LatticeOps& ops,
                             const Filter& f);

// All filters by subset scan; guarded to posets of at most 16 elements.
std::vector<Filter> enumerate_filters(const FinPoset& p,
                                      const LatticeOps& ops);

}  // namespace dctk
