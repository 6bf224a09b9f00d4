#pragma once

#include <functional>

namespace eisenhart {

// Adaptive Simpson with absolute tolerance.  Used for reparametrization
// integrals and the two-point shooting margin; integrands are smooth.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth = 48);

}  // namespace eisenhart
