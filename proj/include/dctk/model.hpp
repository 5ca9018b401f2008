#pragma once

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "dctk/constructions.hpp"
#include "dctk/doctrine.hpp"

namespace dctk {

struct QuotientResult {
  std::shared_ptr<const Doctrine> doctrine;
  DoctrineMorphism morphism;     // identity on the base, class map on fibers
  std::set<std::string> filter;  // the terminal-fiber filter quotiented by
};

// Fiberwise poset reflection of  alpha <= beta mod nabla  (some theta in
// nabla has P(!)(theta) meet alpha below beta).  nabla must be a filter on
// the terminal fiber; an improper filter collapses every fiber to a point.
QuotientResult quotient_by_filter(std::shared_ptr<const Doctrine> p,
                                  const std::set<std::string>& nabla);

// Mediator of the quotient's universal property: any morphism sending every
// member of the filter to the top of its terminal fiber factors through the
// quotient, uniquely since the class maps are surjective.
DoctrineMorphism mediate_quotient(const QuotientResult& q,
                                  const DoctrineMorphism& target);

// Doctrine of subsets over the given carriers: the fiber over X is the
// powerset of carrier[X] (elements named "{a,b}"), reindexing along f is
// preimage under act(f, -): carrier(dom f) -> carrier(cod f), and delta and
// the quantifier tables are computed from the chosen products.  Declares
// every layer.
std::shared_ptr<const Doctrine> subsets_companion(
    const FinCategory& base,
    const std::map<std::string, std::vector<std::string>>& carrier,
    const std::function<std::string(const std::string&, const std::string&)>&
        act);

// "{a,b}" with sorted members.
std::string subset_element_name(std::vector<std::string> members);

struct SubsetModel {
  // Companion doctrine of subsets: same base category, fiber over X is the
  // powerset of carrier(X), reindexing is preimage.
  std::shared_ptr<const Doctrine> doctrine;
  DoctrineMorphism morphism;  // evaluation, phi |-> {c | P(c)(phi) in nabla}
  std::map<std::string, std::vector<std::string>> carrier;
};

// Carrier(X) = arrows t -> X; an element of the fiber over X is
// interpreted as the set of arrows whose reindexing lands in nabla.
SubsetModel extract_model(std::shared_ptr<const Doctrine> p,
                          const std::set<std::string>& nabla);

// Same, but carriers are classes of arrows under  c ~ d  iff
// P(<c, d>)(delta) lies in nabla; requires the elementary layer.  Objects
// without a chosen (X, X) product keep their raw carrier.
SubsetModel extract_model_elementary(std::shared_ptr<const Doctrine> p,
                                     const std::set<std::string>& nabla);

struct PipelineResult {
  ConsistencyReport initial, saturated;
  SaturationResult saturation;
  RichReport rich;
  Filter ultrafilter;       // over the saturated terminal fiber
  QuotientResult quotient;  // of the saturated doctrine by the ultrafilter
  SubsetModel model;        // extracted from the quotient at {top}
  DoctrineMorphism composite;  // input doctrine -> model companion
};

// Consistency gate, one saturation round (budget-capped), consistency
// re-check, richness audit, greedy ultrafilter over {top}, quotient, and
// model extraction.  Throws PreconditionError when the input or the
// saturated doctrine is inconsistent.
PipelineResult henkin_model_pipeline(std::shared_ptr<const Doctrine> p,
                                     size_t budget);

}  // namespace dctk
