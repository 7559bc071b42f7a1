#pragma once

#include <cstddef>

#include "efq/error.hpp"

namespace efq {

// All search limits in one place. Every refusal names the cap it hit.
struct Caps {
  int max_domain = 6;
  int max_class_size = 24;      // contexts per class, after isomorphism dedup
  int max_budget = 8;
  int max_depth = 4;
  int fresh_pool = 0;           // oracle fresh variables; 0 = derive from the size bound
  int max_type_cells = 16;      // cells per component in a union enumeration
  int max_tuple_universe = 16;  // tuples per component when enumerating sets of tuples
  long long max_oracle_rows = 20000;
  long long max_oracle_entries = 3000000;

  static void check(const char* cap, long long limit, long long actual) {
    if (actual > limit) throw CapExceeded(cap, limit, actual);
  }
};

}  // namespace efq
