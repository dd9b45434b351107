#pragma once
#include <string>
#include "rsoc/config.hpp"

namespace rsoc::testing {

inline ModelSpec model_from(const std::string& model_section, const std::string& rest = "") {
  return parse_config("[model]\n" + model_section + "\n" + rest).model;
}

inline ModelSpec canonical_1d(double h = 0.0625) {
  return model_from("box_side = 8\nstep = " + std::to_string(h) + "\n");
}

inline ModelSpec constant_cost(double c, double alpha, int dim = 1, double h = 0.25) {
  return model_from("dim = " + std::to_string(dim) + "\nbox_side = 4\nstep = " + std::to_string(h) +
                    "\ncost = constant\ncost_value = " + std::to_string(c) + "\nalpha = " + std::to_string(alpha) +
                    "\nkappa = 0.01\n");
}

/// 1-D reflected BM with drift mu and one action.
inline ModelSpec rbm_1d(double mu, double L = 8, double h = 0.0625) {
  return model_from("box_side = " + std::to_string(L) + "\nstep = " + std::to_string(h) +
                    "\nactions = a\ndrift = " + std::to_string(mu) + "\ncost = constant\ncost_value = 0\n");
}

}  // namespace rsoc::testing
