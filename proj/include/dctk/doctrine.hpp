#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dctk/fincat.hpp"
#include "dctk/order.hpp"

namespace dctk {

enum class Layer {
  Primary,
  Elementary,
  Existential,
  Universal,
  Implicational,
  Bounded,
  Joins,
  Heyting,
  Boolean,
};

const char* to_string(Layer l);
std::optional<Layer> layer_from_string(const std::string& s);
extern const std::vector<Layer> kAllLayers;

// A finitely presented doctrine: contravariant functor from `base` into
// finite posets, with whatever structure witnesses its declared layers need
// (top/meet/bottom/join/imp per fiber, fibered equality delta, and
// quantifier tables indexed by the ordered pairs (C, B) that have a chosen
// product C x B).
struct Doctrine {
  FinCategory base;
  std::map<std::string, FinPoset> fiber;                       // per object
  std::map<std::string, std::map<std::string, std::string>> reind;  // per morphism: fiber(cod) -> fiber(dom)
  std::map<std::string, LatticeOps> ops;                       // per object
  std::map<std::string, std::string> delta;  // A -> element of fiber(A x A)
  std::map<std::pair<std::string, std::string>,
           std::map<std::string, std::string>>
      exists_, forall_;  // (C, B) -> table fiber(C x B) -> fiber(C)
  std::set<Layer> layers;

  const FinPoset& fiber_of(const std::string& obj) const;
  const LatticeOps& ops_of(const std::string& obj) const;
  // P(f) applied to an element of fiber(cod f)
  const std::string& reindex(const std::string& mor,
                             const std::string& elem) const;
  const std::string& exists_of(const std::string& c, const std::string& b,
                               const std::string& elem) const;
  const std::string& forall_of(const std::string& c, const std::string& b,
                               const std::string& elem) const;
  const std::string& delta_of(const std::string& obj) const;

  // Shape coherence (totality, well-typedness, witnesses demanded by the
  // declared layers); throws StructuralError on the first defect.
  void require_coherent() const;
};

struct StructureReport {
  std::map<std::string, std::vector<std::string>> failures;  // layer -> list
  std::map<std::string, size_t> suppressed;
  bool ok() const { return failures.empty(); }
  void add(const std::string& layer, const std::string& msg);
  void merge(const StructureReport& other);
  std::string summary() const;
};

// Exhaustive law check for one layer (functoriality is always verified
// first and reported under "functorial").  Checks quantify over the data
// that is present: an object without a chosen (A, A) product has no delta
// obligations, and so on.
StructureReport check_structure(const Doctrine& p, Layer layer);
// All declared layers.
StructureReport check_structure(const Doctrine& p);

struct DoctrineMorphism {
  std::shared_ptr<const Doctrine> src, dst;
  std::map<std::string, std::string> obj_map, mor_map;
  std::map<std::string, std::map<std::string, std::string>> comp;  // per src object
  std::set<Layer> preserved;

  const std::string& on_obj(const std::string& a) const;
  const std::string& on_mor(const std::string& f) const;
  const std::string& on_elem(const std::string& obj,
                             const std::string& elem) const;
};

DoctrineMorphism identity_morphism(std::shared_ptr<const Doctrine> p);
// g after f; requires f.dst == g.src (same object).
DoctrineMorphism compose_morphisms(const DoctrineMorphism& g,
                                   const DoctrineMorphism& f);

// Functor laws, terminal/product preservation (up to iso exhibited by the
// destination's tupling), naturality of the fiber components, and
// preservation of each requested layer's operations.
StructureReport check_morphism(const DoctrineMorphism& m,
                               const std::set<Layer>& layers);
StructureReport check_morphism(const DoctrineMorphism& m);  // m.preserved

struct TwoCell {
  DoctrineMorphism f, g;                       // parallel pair
  std::map<std::string, std::string> theta;    // src object -> dst morphism
};

StructureReport check_2cell(const TwoCell& t);

struct RichReport {
  struct Entry {
    std::string obj, elem;
    std::optional<std::string> witness;  // arrow t -> A, when one exists
    bool equality = false;               // witness inequality was an equality
  };
  std::vector<Entry> entries;
  std::vector<std::string> violations;  // a satisfied inequality was strict
  bool rich() const;
  std::vector<Entry> failures() const;
};

// Requires the existential layer with a quantifier table at (t, A) for
// every object A.
RichReport check_rich(const Doctrine& p);

enum class ConsistencyStatus { Inconsistent, Consistent, TwoValued };
const char* to_string(ConsistencyStatus s);

struct ConsistencyReport {
  ConsistencyStatus status = ConsistencyStatus::Inconsistent;
  // For bounded doctrines the four-way equivalence (non-singleton fiber /
  // top not below bottom / consistent / two-valued) is re-verified here.
  std::vector<std::string> lemma_violations;
};

ConsistencyReport consistency_status(const Doctrine& p);

// For every quantifier table at (B, A) and every element of fiber(B x A),
// search an arrow e: B -> A with exists(alpha) = P(<id, e>)(alpha).  Also
// cross-checks that the instances at B = t succeed exactly when the
// doctrine is rich.
StructureReport check_epsilon_operator(const Doctrine& p);

}  // namespace dctk
