#include "hilonet/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hilonet {

namespace {

double half_sq_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (const double x : v) s += 0.5 * x * x;
  return s;
}

}  // namespace

GradCheckReport gradient_check(std::size_t n_nets, double h, double rel_tol, std::uint64_t seed,
                               double inject_error) {
  GradCheckReport report;
  for (std::size_t k = 0; k < n_nets; ++k) {
    RandomEngine rng(seed + k);
    const std::size_t d_in = 2 + rng.index(4);
    const std::size_t d_hidden = 3 + rng.index(6);
    const std::size_t d_out = 1 + rng.index(3);
    const Activation out_act = k % 3 == 0   ? Activation::tanh
                               : k % 3 == 1 ? Activation::identity
                                            : Activation::sigmoid;
    Mlp net = make_mlp({d_in, d_hidden, d_out}, Activation::relu, out_act, rng);
    std::vector<double> x(d_in);
    for (auto& v : x) v = rng.uniform(-1.0, 1.0);

    const auto y = forward(net, x);
    auto grads = backward(net, x, y);
    if (inject_error != 0.0) grads.weights[0][0] += inject_error;

    for (std::size_t l = 0; l < net.num_layers(); ++l) {
      for (auto [params, analytic, tag] :
           {std::tuple{&net.weights[l], &grads.weights[l], "weight"},
            std::tuple{&net.biases[l], &grads.biases[l], "bias"}}) {
        for (std::size_t i = 0; i < params->size(); ++i) {
          const double saved = (*params)[i];
          (*params)[i] = saved + h;
          const double up = half_sq_norm(forward(net, x));
          (*params)[i] = saved - h;
          const double down = half_sq_norm(forward(net, x));
          (*params)[i] = saved;
          const double fd = (up - down) / (2.0 * h);
          const double got = (*analytic)[i];
          const double rel =
              std::abs(got - fd) / std::max({std::abs(got), std::abs(fd), 1e-3});
          ++report.components_checked;
          if (rel > report.max_rel_error) {
            report.max_rel_error = rel;
            std::ostringstream oss;
            oss << "net " << seed + k << " layer " << l << ' ' << tag << ' ' << i;
            report.worst_case = oss.str();
          }
        }
      }
    }
    ++report.nets_checked;
  }
  report.passed = report.max_rel_error < rel_tol;
  return report;
}

}  // namespace hilonet
