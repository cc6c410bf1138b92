#pragma once

#include <vector>

#include "cocyclelab/cocycle.hpp"

namespace support {

inline cocyclelab::CocyclePtr make(std::string_view name, std::vector<double> params = {},
                                   const cocyclelab::BaseSystem* base = nullptr) {
  return cocyclelab::builtin(name, params, base);
}

inline cocyclelab::Mat mat2(double a, double b, double c, double d) {
  cocyclelab::Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

inline cocyclelab::CocyclePtr scalar(double a) {
  return cocyclelab::constant_cocycle(cocyclelab::Mat::Constant(1, 1, a), "scalar");
}

}  // namespace support
