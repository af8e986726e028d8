#pragma once

#include <stdexcept>
#include <string>

namespace urnmix {

// Instance too large for an exact/enumerative code path.
class capacity_error : public std::runtime_error {
 public:
  explicit capacity_error(const std::string& what) : std::runtime_error(what) {}
};

// A requested target (e.g. a TV threshold) is provably unreachable.
class no_convergence_error : public std::runtime_error {
 public:
  explicit no_convergence_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace urnmix
