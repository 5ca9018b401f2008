#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dctk/constructions.hpp"
#include "dctk/doctrine.hpp"

namespace dctk {

// Parses the JSON doctrine document format.  Lattice tables may be given as
// the string "derive" to be computed as greatest lower bounds etc.; deltas
// and quantifier tables are always explicit.  No laws are checked here.
// Throws StructuralError with line/column on syntax errors, and with the
// offending reference on dangling ids.
std::shared_ptr<const Doctrine> parse_doctrine(const std::string& text);

// Normalized form: sorted keys, two-space indent, explicit lattice tables,
// trailing newline; byte-stable across runs.
std::string serialize_doctrine(const Doctrine& p);

// Document form of a morphism between two doctrines given inline or by
// reference; used by the colimit diagram format.
std::string serialize_morphism(const DoctrineMorphism& m);

// Diagram document: {"index": [...], "leq": [[i, j], ...],
// "nodes": {i: doctrine document}, "edges": {"i j": morphism tables}}.
FiniteDirectedDiagram parse_diagram(const std::string& text);
std::string serialize_diagram(const FiniteDirectedDiagram& d);

// The doctrine of subsets over the listed carriers and their binary
// products (a product is chosen only when some listed or generated object
// carries it; pairs whose product would exceed four elements stay without
// one).  Objects are named by their carrier ("{0,1}"), morphisms are all
// functions ("dom=>cod#k" with k the lexicographic rank), fibers are
// powersets with preimage reindexing, and every layer is tabulated.
// Empty carriers are rejected — the subsets doctrine lives over nonempty
// sets — unless include_empty is set (a debug escape hatch used to exhibit
// failure of richness at an empty carrier).
std::shared_ptr<const Doctrine> gen_subset_doctrine(
    const std::vector<std::vector<std::string>>& carriers,
    bool include_empty = false);

// Two-object base (terminal plus an isomorphic copy) whose fibers are the
// chain 0 < half < 1 with min/max/Heyting structure and identity
// quantifiers; Heyting but not Boolean.
std::shared_ptr<const Doctrine> gen_chain_fixture();

// FNV-1a, for input digests in reports.
uint64_t fnv1a64(const std::string& bytes);

}  // namespace dctk
