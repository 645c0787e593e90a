#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lrtf/dataset.hpp"
#include "lrtf/surrogate.hpp"

namespace lrtf {

// ---------------------------------------------------------------------------
// Parameter boxes

struct BoxVar {
    std::string name;
    std::string unit;
    double lo = 0.0;
    double hi = 1.0;
};

struct ParamBox {
    std::vector<BoxVar> vars;

    std::size_t dim() const { return vars.size(); }
    void validate() const;  // every lo < hi, nonempty
    bool contains(std::span<const double> x) const;
};

// Benchmark boxes used by the bundled configs.
ParamBox microstrip_box();  // W, h (mm); eps_r; L (mm); f (GHz); Z_L (ohm)
ParamBox cylinder_box();    // a (m); f (GHz); phi_s (deg)

// ---------------------------------------------------------------------------
// Microstrip line terminated by a resistive load: quasi-static closed forms.

// Effective permittivity; depends only on the ratio w/h and eps_r.
double microstrip_eps_eff(double w, double h, double eps_r);

// Characteristic impedance in ohms (quasi-static, piecewise in w/h at 1).
double microstrip_z0(double w, double h, double eps_r);

// Reflection coefficient at the input of a line of length l_mm terminated by
// z_load ohms, referenced to 50 ohms.
std::complex<double> microstrip_reflection(double w_mm, double h_mm, double eps_r, double l_mm, double f_ghz,
                                           double z_load);

// Return loss in dB: -20 log10 |Gamma|. Throws NumericalError on a perfect
// match (|Gamma| = 0), which callers treat as "reject and resample".
double microstrip_return_loss(double w_mm, double h_mm, double eps_r, double l_mm, double f_ghz, double z_load);

// Guided wavelength in mm at f_ghz; the return loss is periodic in the line
// length with period half this value.
double microstrip_guided_wavelength_mm(double w_mm, double h_mm, double eps_r, double f_ghz);

// ---------------------------------------------------------------------------
// TM-polarized scattering width of a circular conducting cylinder.

// Series length for a given electrical size.
int cylinder_series_terms(double ka);

// Echo width sigma in meters for radius a_m, frequency f_ghz, observation
// angle phi_deg. Validated for ka in (0.1, 50); outside throws NumericalError.
double cylinder_echo_width(double a_m, double f_ghz, double phi_deg);
double cylinder_echo_width(double a_m, double f_ghz, double phi_deg, int n_terms);

// 10 log10(sigma / 1 m).
double cylinder_rcs_db(double a_m, double f_ghz, double phi_deg);

// ---------------------------------------------------------------------------
// Sampling

using TargetFn = std::function<double(std::span<const double>)>;

// Uniform i.i.d. rows in the box, labelled by `target`. Row i draws from its
// own deterministic substream of `seed`, so the dataset is independent of
// evaluation order. Rows whose target throws NumericalError or produces a
// non-finite value are resampled (bounded attempts).
RawData sample_box(const ParamBox& box, std::size_t count, std::uint64_t seed, const TargetFn& target,
                   const std::string& target_name);

// Full Cartesian grid with sizes[d] levels per dimension (size 1 = midpoint);
// last dimension varies fastest.
RawData grid_box(const ParamBox& box, std::span<const std::size_t> sizes, const TargetFn& target,
                 const std::string& target_name);

// ---------------------------------------------------------------------------
// Frozen random ground-truth functions for self-consistency checks

struct SyntheticGenerator {
    ModelSpec spec;        // class the target provably lives in (see below)
    SurrogateModel model;  // frozen parameters
    ParamBox box;          // sampling domain
    double offset = 0.0;   // constant added to every output

    double operator()(std::span<const double> x) const { return model.forward(x) + offset; }
};

// Draws a frozen random surrogate target of the requested kind on [-1, 1]^n
// and advertises a spec with uniform size `rank` per mode (chain/ring bonds
// all `rank`). Two properties make recovery runs with models of the
// advertised spec well posed:
//   - the outputs are shifted by a calibrated constant so they stay away from
//     zero (relative-error metrics keep finite denominators), and
//   - for the factorized kinds the hidden draw uses rank-1 per mode, because
//     an affine reshift -- which target standardization applies -- costs one
//     spare component per mode. The advertised class therefore contains the
//     standardized target exactly. (The pairwise kind's predictor absorbs
//     affine shifts on its own and is drawn at full rank.)
// Draws whose outputs collapse to a constant are rejected and redrawn from
// the next substream. Requires rank >= 2 for tucker/tt/tr.
SyntheticGenerator synthetic_lowrank(ModelKind kind, std::size_t n, std::size_t rank, std::uint64_t seed,
                                     double omega0 = 2.0);

}  // namespace lrtf
