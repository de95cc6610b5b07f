#pragma once
// Self-check machinery behind the `verify` subcommand: backpropagated
// gradients against central finite differences on randomly drawn small
// networks.

#include <cstdint>
#include <string>

#include "hilonet/mlp.hpp"

namespace hilonet {

struct GradCheckReport {
  std::size_t nets_checked = 0;
  std::size_t components_checked = 0;
  double max_rel_error = 0.0;
  std::string worst_case;  // "net <seed> layer <l> weight <i>"
  bool passed = false;
};

// Loss 0.5*||f(x)||^2 on `n_nets` seeded random networks (dims <= 8),
// every parameter compared against a central difference with step h.
// `inject_error` is a fault-injection knob for testing the detector:
// it is added to one analytic gradient component per network.
GradCheckReport gradient_check(std::size_t n_nets, double h, double rel_tol,
                               std::uint64_t seed = 1000, double inject_error = 0.0);

}  // namespace hilonet
