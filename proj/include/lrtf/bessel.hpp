#pragma once

#include <vector>

namespace lrtf {

// Cylindrical Bessel functions of integer order for positive real arguments.
//
// J_n is evaluated with Miller's downward recurrence normalized by the
// identity J_0(x) + 2*sum_{k>=1} J_{2k}(x) = 1, which is stable for all
// orders. Y_0 and Y_1 use the ascending power series for moderate arguments
// and the large-argument cosine/sine expansions beyond that; higher orders
// follow from the (stable) upward recurrence
// Y_{n+1}(x) = (2n/x) Y_n(x) - Y_{n-1}(x).
//
// Intended range: x in (0, 200], orders up to a few hundred. Out-of-domain
// arguments throw NumericalError.

// J_0(x) .. J_n_max(x); requires x >= 0 and n_max >= 0.
std::vector<double> bessel_j_array(int n_max, double x);

// Y_0(x) .. Y_n_max(x); requires x > 0 and n_max >= 0.
std::vector<double> bessel_y_array(int n_max, double x);

double bessel_j(int n, double x);
double bessel_y(int n, double x);

}  // namespace lrtf
