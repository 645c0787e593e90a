#include "lrtf/bessel.hpp"

#include <cmath>
#include <string>

#include "lrtf/errors.hpp"

namespace lrtf {

namespace {

constexpr long double kPi = 3.14159265358979323846264338327950288L;
constexpr long double kEulerGamma = 0.57721566490153286060651209008240243L;

// Argument below which the ascending series for Y_0/Y_1 is used; above it the
// large-argument expansion has converged well past double precision while the
// series starts losing digits to cancellation.
constexpr long double kSeriesLimit = 17.0L;

void check_argument(int n_max, double x, bool positive_only) {
    if (n_max < 0) throw NumericalError("bessel: order must be nonnegative");
    if (!std::isfinite(x) || x > 200.0 || x < 0.0 || (positive_only && x == 0.0))
        throw NumericalError("bessel: argument " + std::to_string(x) + " outside supported range");
}

// P/Q factors of the large-argument expansion
//   C_nu(x) ~ sqrt(2/(pi x)) [P cos(chi) -/+ Q sin(chi)], chi = x - (2nu+1)pi/4,
// with a_k = prod_{j=1..k} (4nu^2 - (2j-1)^2) / (k! 8^k); summed to the
// smallest term.
void hankel_pq(long double nu, long double x, long double& p, long double& q) {
    const long double mu = 4.0L * nu * nu;
    p = 1.0L;
    q = 0.0L;
    long double term = 1.0L;  // a_k / x^k
    long double prev_mag = 1e400L;
    for (int k = 1; k <= 60; ++k) {
        const long double odd = static_cast<long double>(2 * k - 1);
        term *= (mu - odd * odd) / (8.0L * static_cast<long double>(k) * x);
        const long double mag = std::fabs(term);
        if (mag >= prev_mag) break;  // past the optimal truncation point
        prev_mag = mag;
        const long double signed_term = ((k / 2) % 2 == 0) ? term : -term;
        if (k % 2 == 0)
            p += signed_term;
        else
            q += signed_term;
        if (mag < 1e-22L) break;
    }
}

void y01_asymptotic(long double x, long double& y0, long double& y1) {
    const long double amp = std::sqrt(2.0L / (kPi * x));
    long double p, q;
    hankel_pq(0.0L, x, p, q);
    const long double chi0 = x - 0.25L * kPi;
    y0 = amp * (p * std::sin(chi0) + q * std::cos(chi0));
    hankel_pq(1.0L, x, p, q);
    const long double chi1 = x - 0.75L * kPi;
    y1 = amp * (p * std::sin(chi1) + q * std::cos(chi1));
}

// Ascending series (valid for any x > 0, accurate while cancellation is mild):
//   Y_0 = (2/pi)[(ln(x/2)+gamma) J_0 + sum_{k>=1} (-1)^{k+1} H_k t^k/(k!)^2]
//   Y_1 = (2/pi) ln(x/2) J_1 - 2/(pi x)
//         - (x/(2 pi)) sum_{k>=0} (-1)^k (H_k + H_{k+1} - 2 gamma + 2 gamma) ...
// written below with psi(m+1) = -gamma + H_m, t = x^2/4.
void y01_series(long double x, long double j0, long double j1, long double& y0, long double& y1) {
    const long double t = 0.25L * x * x;
    const long double log_half_x = std::log(0.5L * x);

    long double sum0 = 0.0L;
    long double term = 1.0L;  // t^k/(k!)^2
    long double harmonic = 0.0L;
    for (int k = 1; k <= 200; ++k) {
        term *= t / (static_cast<long double>(k) * static_cast<long double>(k));
        harmonic += 1.0L / static_cast<long double>(k);
        const long double contrib = (k % 2 == 1 ? 1.0L : -1.0L) * harmonic * term;
        sum0 += contrib;
        if (std::fabs(contrib) < 1e-25L * (1.0L + std::fabs(sum0))) break;
    }
    y0 = (2.0L / kPi) * ((log_half_x + kEulerGamma) * j0 + sum0);

    // sum_{k>=0} (-t)^k [psi(k+1) + psi(k+2)] / (k! (k+1)!)
    long double sum1 = 0.0L;
    long double factor = 1.0L;  // t^k / (k! (k+1)!)
    long double psi_a = -kEulerGamma;         // psi(k+1)
    long double psi_b = 1.0L - kEulerGamma;   // psi(k+2)
    for (int k = 0; k <= 200; ++k) {
        if (k > 0) {
            factor *= t / (static_cast<long double>(k) * static_cast<long double>(k + 1));
            psi_a += 1.0L / static_cast<long double>(k);
            psi_b += 1.0L / static_cast<long double>(k + 1);
        }
        const long double contrib = (k % 2 == 0 ? 1.0L : -1.0L) * (psi_a + psi_b) * factor;
        sum1 += contrib;
        if (std::fabs(contrib) < 1e-25L * (1.0L + std::fabs(sum1))) break;
    }
    y1 = (2.0L / kPi) * log_half_x * j1 - 2.0L / (kPi * x) - (0.5L * x / kPi) * sum1;
}

// Downward recurrence in long double; fills j[0..n_max].
void miller_j(int n_max, long double x, std::vector<double>& out) {
    const int turning = static_cast<int>(std::ceil(static_cast<double>(x)));
    // Offset past the turning point: the wanted (decaying) solution must drop
    // by far more than double precision between `start` and `n_max`; the decay
    // rate per order slows as x grows, hence the x-dependent margin.
    const int start = std::max(n_max, turning) + 50 + turning / 4;

    long double next = 0.0L;     // J_{k+1} trial
    long double current = 1e-300L;  // J_k trial
    long double norm = 0.0L;     // accumulates J_0 + 2*sum J_{2m}
    for (int k = start; k >= 0; --k) {
        const long double prev = (2.0L * (k + 1) / x) * current - next;
        next = current;
        current = prev;
        // `current` now holds the trial J_k, `next` holds J_{k+1}.
        if (k <= n_max) out[static_cast<std::size_t>(k)] = static_cast<double>(current);
        if (k % 2 == 0) norm += (k == 0) ? current : 2.0L * current;
        if (std::fabs(current) > 1e250L) {
            current *= 1e-250L;
            next *= 1e-250L;
            norm *= 1e-250L;
            for (int m = std::min(n_max, k); m <= n_max; ++m) out[static_cast<std::size_t>(m)] *= 1e-250;
        }
    }
    const long double scale = 1.0L / norm;
    for (int k = 0; k <= n_max; ++k)
        out[static_cast<std::size_t>(k)] =
            static_cast<double>(static_cast<long double>(out[static_cast<std::size_t>(k)]) * scale);
}

}  // namespace

std::vector<double> bessel_j_array(int n_max, double x) {
    check_argument(n_max, x, /*positive_only=*/false);
    std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
    if (x == 0.0) {
        out[0] = 1.0;
        return out;
    }
    miller_j(n_max, static_cast<long double>(x), out);
    return out;
}

std::vector<double> bessel_y_array(int n_max, double x) {
    check_argument(n_max, x, /*positive_only=*/true);
    const long double lx = static_cast<long double>(x);

    std::vector<double> j = bessel_j_array(std::max(n_max, 1), x);
    long double y0, y1;
    if (lx < kSeriesLimit)
        y01_series(lx, static_cast<long double>(j[0]), static_cast<long double>(j[1]), y0, y1);
    else
        y01_asymptotic(lx, y0, y1);

    std::vector<double> out(static_cast<std::size_t>(n_max) + 1);
    out[0] = static_cast<double>(y0);
    if (n_max >= 1) out[1] = static_cast<double>(y1);
    long double prev = y0, current = y1;
    for (int n = 1; n < n_max; ++n) {
        const long double next = (2.0L * n / lx) * current - prev;
        if (!std::isfinite(static_cast<double>(next)))
            throw NumericalError("bessel: Y_" + std::to_string(n + 1) + "(" + std::to_string(x) + ") overflows");
        prev = current;
        current = next;
        out[static_cast<std::size_t>(n) + 1] = static_cast<double>(next);
    }
    return out;
}

double bessel_j(int n, double x) { return bessel_j_array(n, x)[static_cast<std::size_t>(n)]; }

double bessel_y(int n, double x) { return bessel_y_array(n, x)[static_cast<std::size_t>(n)]; }

}  // namespace lrtf
