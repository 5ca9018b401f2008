#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dctk/doctrine.hpp"

namespace dctk {

// Restriction of a doctrine to a full subcategory on the given objects.
// Products, deltas and quantifier tables survive only when everything they
// mention is kept.  Returns the input pointer unchanged when nothing drops.
std::shared_ptr<const Doctrine> restrict_doctrine(
    std::shared_ptr<const Doctrine> p, const std::set<std::string>& keep);

struct ConstantResult {
  std::shared_ptr<const Doctrine> doctrine;  // P with a generic constant
  // Morphism into the new doctrine.  Its source is `p` itself, or the
  // restriction of `p` to the objects the Kleisli base keeps.
  DoctrineMorphism morphism;
  KleisliPresentation kleisli;
  std::vector<std::string> dropped_objects;
};

// Kleisli constant addition: base becomes the reader-comonad Kleisli
// category over `sort`, the fiber over a is the old fiber over sort x a,
// and reindexing along an arrow backed by f is reindexing along <pr1, f>.
// Every declared layer transports.
ConstantResult add_constant(std::shared_ptr<const Doctrine> p,
                            const std::string& sort);

struct AxiomResult {
  std::shared_ptr<const Doctrine> doctrine;  // fibers cut to P(!)phi downsets
  DoctrineMorphism morphism;                 // (id, meet with P(!)phi)
  std::string axiom;                         // phi, element of fiber(t)
};

// Axiom addition: same base, fiber over a is the downset of P(!_a)(phi),
// with top P(!)phi, implication and universal quantifier clipped into the
// downset, and delta clipped likewise.
AxiomResult add_axiom(std::shared_ptr<const Doctrine> p,
                      const std::string& phi);

// Mediator of the constant-addition universal property: given a morphism
// target from cx.morphism's source and an interpretation c of the new
// constant (an arrow t -> target(sort) of the destination base), produce
// the unique morphism h with h after cx.morphism == target and
// h(constant) == c.
DoctrineMorphism mediate_constant(const ConstantResult& cx,
                                  const DoctrineMorphism& target,
                                  const std::string& c);

// Mediator of the axiom-addition universal property; requires the target
// to send the axiom to the top of its terminal fiber.
DoctrineMorphism mediate_axiom(const AxiomResult& ax,
                               const DoctrineMorphism& target);

struct HenkinStep {
  std::string sort;                       // B
  std::string formula;                    // phi in the input fiber over B
  std::pair<std::string, int> label;      // fresh constant label (B, k)
  std::string axiom;                      // psi, element of the new fiber(t)
  std::string constant_arrow;             // kleisli arrow t ~> B
  std::string formula_image;              // image of phi in the new fiber(B)
  std::string exists_image;               // exists of the image, fiber(t)
  std::string witnessed_image;            // reindex along the constant
  bool inequality_holds = false;          // exists_image <= witnessed_image
  bool equality_holds = false;
};

struct HenkinStepResult {
  std::shared_ptr<const Doctrine> doctrine;
  DoctrineMorphism morphism;  // composite of the two construction morphisms
  HenkinStep entry;
};

// One Henkin step: add a constant of sort b, then the axiom
// psi = P(pr1)(exists phi) -> phi read in the new terminal fiber.
HenkinStepResult henkin_step(std::shared_ptr<const Doctrine> p,
                             const std::string& b, const std::string& phi,
                             int label = 0);

struct HenkinTrace {
  std::vector<HenkinStep> steps;
  bool truncated = false;
  std::vector<std::pair<std::string, std::string>> skipped;  // unbudgeted
};

struct SaturationResult {
  std::shared_ptr<const Doctrine> doctrine;
  DoctrineMorphism morphism;
  HenkinTrace trace;
};

// Folds henkin_step over the targets in deterministic order (object id,
// then fiber-element id).  Empty optional for targets means one full round
// over every (object, element) of the input.  Stops at `budget` steps with
// the truncation flag set.
SaturationResult henkin_saturate(
    std::shared_ptr<const Doctrine> p,
    const std::optional<std::vector<std::pair<std::string, std::string>>>&
        targets,
    size_t budget);

struct FiniteDirectedDiagram {
  std::vector<std::string> index;  // index ids
  std::vector<std::pair<std::string, std::string>> leq;  // i <= j pairs
  std::map<std::string, std::shared_ptr<const Doctrine>> node;
  // one edge per related ordered pair of distinct indices
  std::map<std::pair<std::string, std::string>, DoctrineMorphism> edge;

  std::vector<std::string> violations() const;  // shape, directedness, edges
  // First index (in sorted order) above every index; finite directedness
  // guarantees one exists.
  std::string max_index() const;
};

struct ColimitResult {
  std::shared_ptr<const Doctrine> doctrine;
  std::map<std::string, DoctrineMorphism> cocone;  // per index
  std::string max_index;
  // relabelings from the maximum node's names to colimit class names
  std::map<std::string, std::string> object_class, morphism_class;
  std::map<std::pair<std::string, std::string>, std::string> element_class;
};

// Colimit over a finite directed preorder: objects, morphisms and fiber
// elements are equalization classes of node data under pushing to common
// upper indices; the structure is read off at an index above all others.
ColimitResult directed_colimit(const FiniteDirectedDiagram& d);

// Mediator to another cocone over the same diagram; cocone_to_r holds one
// morphism per index, all into the same destination.
DoctrineMorphism colimit_mediator(
    const FiniteDirectedDiagram& d, const ColimitResult& col,
    const std::map<std::string, DoctrineMorphism>& cocone_to_r);

// Inverse of a doctrine morphism whose object, morphism and fiber tables
// are all bijections; empty when any table fails to be one.  The inverse
// inherits the preserved-layer claim.
std::optional<DoctrineMorphism> invert_morphism(const DoctrineMorphism& m);

struct FragmentResult {
  std::shared_ptr<const Doctrine> doctrine;
  DoctrineMorphism morphism;  // (identity, double negation)
};

// The Boolean doctrine of double-negation-closed fiber elements.
FragmentResult double_negation_fragment(std::shared_ptr<const Doctrine> p);

}  // namespace dctk
