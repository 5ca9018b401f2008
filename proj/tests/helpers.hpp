#pragma once

#include <memory>
#include <string>
#include <vector>

#include "dctk/io.hpp"

// Shared fixtures, built once per test binary.
inline std::shared_ptr<const dctk::Doctrine> subsets_small() {
  static auto p = dctk::gen_subset_doctrine({{"*"}, {"0", "1"}});
  return p;
}

inline std::shared_ptr<const dctk::Doctrine> subsets_tiny() {
  static auto p = dctk::gen_subset_doctrine({{"*"}});
  return p;
}

inline std::shared_ptr<const dctk::Doctrine> singletons3() {
  static auto p = dctk::gen_subset_doctrine({{"*"}, {"a"}, {"b"}});
  return p;
}

inline std::shared_ptr<const dctk::Doctrine> chain3() {
  static auto p = dctk::gen_chain_fixture();
  return p;
}

inline std::vector<std::shared_ptr<const dctk::Doctrine>> all_fixtures() {
  return {subsets_small(), subsets_tiny(), singletons3(), chain3()};
}

// Deep copy for mutation tests; Doctrine members are all value types.
inline std::shared_ptr<dctk::Doctrine> copy_of(const dctk::Doctrine& p) {
  return std::make_shared<dctk::Doctrine>(p);
}
