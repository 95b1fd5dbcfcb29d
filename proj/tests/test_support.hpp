#ifndef WILLMORE_TEST_SUPPORT_HPP
#define WILLMORE_TEST_SUPPORT_HPP

#include <algorithm>
#include <cmath>

#include "willmore/geometry.hpp"
#include "willmore/sampling.hpp"

namespace willmore::testing {

using willmore::Sampler;

inline double max_entry_diff(const SymMat2& a, const SymMat2& b) {
  return std::max({std::fabs(a.a11 - b.a11), std::fabs(a.a12 - b.a12), std::fabs(a.a22 - b.a22)});
}

}  // namespace willmore::testing

#endif
