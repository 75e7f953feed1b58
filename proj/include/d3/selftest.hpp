#pragma once

// A compact run of every module's invariants at small sizes. The CSV it
// writes depends only on the seed: kernels reduce in a fixed order, so the
// thread count does not change a single byte.

#include <cstdint>
#include <iosfwd>

#include "d3/exec.hpp"

namespace d3::selftest {

struct Outcome {
  int checks = 0;
  int failures = 0;
  bool ok() const { return failures == 0; }
};

// CSV header: module,check,params,value,bound,pass
Outcome run(std::ostream& csv, std::uint64_t seed, const Exec& exec = {});

}  // namespace d3::selftest
