#pragma once

#include <doctest.h>

#include <cmath>
#include <random>

#include "hpc/core.hpp"

namespace testutil {

inline double rel_err(hpc::cplx a, hpc::cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

template <class F>
std::string error_text(F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

inline bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace testutil
