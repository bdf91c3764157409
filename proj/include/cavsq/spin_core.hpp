#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace cavsq
{

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Rb D2 excited-state decay rate, 2*pi*6.07 MHz. Used when a config omits
/// gamma; every report echoes the value actually used.
inline constexpr double kDefaultGamma = kTwoPi * 6.07e6;

inline constexpr std::size_t kStateVectorDimCap = 4001;
inline constexpr std::size_t kDenseMatrixDimCap = 401;

//---------------------------------------------------------------------------//
/*!
 * Collective spin of N = 2S two-level atoms.
 *
 * Stored as the integer 2S so half-integer spins are exact. The Dicke basis
 * is ordered with m descending: index k holds m = S - k.
 */
class EnsembleSpec
{
  public:
    static EnsembleSpec from_twice_spin(long two_s);
    /// Throws std::invalid_argument unless 2S is a positive integer.
    static EnsembleSpec from_spin(double s);

    long two_s() const { return two_s_; }
    double spin() const { return 0.5 * static_cast<double>(two_s_); }
    long atom_count() const { return two_s_; }
    std::size_t dicke_dim() const { return static_cast<std::size_t>(two_s_) + 1; }

    /// m value stored at Dicke index k.
    double m_at(std::size_t k) const { return spin() - static_cast<double>(k); }

  private:
    explicit EnsembleSpec(long two_s) : two_s_(two_s) {}
    long two_s_;
};

//---------------------------------------------------------------------------//
/*!
 * Cavity/atom coupling constants in angular frequency units (rad/s).
 *
 * g is half the single-photon Rabi frequency, delta carries its sign.
 * The light-shift coupling omega_shift = 2g^2/|delta| and the single-atom
 * cooperativity eta = 4g^2/(kappa*gamma) are fixed at construction.
 */
class CavityAtomParams
{
  public:
    CavityAtomParams(double g, double kappa, double gamma, double delta);

    /// Frequencies given in Hz (cycles/s); 2*pi is applied here.
    static CavityAtomParams from_hz(double g_hz, double kappa_hz,
                                    double gamma_hz, double delta_hz);

    double g() const { return g_; }
    double kappa() const { return kappa_; }
    double gamma() const { return gamma_; }
    double delta() const { return delta_; }
    double omega_shift() const { return omega_shift_; }
    double eta() const { return eta_; }

    /// Differential phase per transmitted photon, 2*Omega/kappa.
    double phase_per_photon() const { return 2.0 * omega_shift_ / kappa_; }

  private:
    double g_;
    double kappa_;
    double gamma_;
    double delta_;
    double omega_shift_;
    double eta_;
};

//---------------------------------------------------------------------------//
/*!
 * Probe pulse on the slope of the cavity resonance.
 *
 * p0 is the number of photons transmitted in time t when S_z = 0; the
 * intracavity photon number at S_z = 0 is |beta|^2 = 2 p0 / (kappa t).
 * Q = S p0 (2 Omega / kappa)^2.
 */
class DrivePulse
{
  public:
    static DrivePulse from_photons(EnsembleSpec const& spec,
                                   CavityAtomParams const& params, double p0,
                                   double pulse_time);
    /// Inverse of from_photons: chooses p0 so that the shearing equals q.
    static DrivePulse from_shearing(EnsembleSpec const& spec,
                                    CavityAtomParams const& params, double q,
                                    double pulse_time);

    double p0() const { return p0_; }
    double pulse_time() const { return pulse_time_; }
    double drive_rate() const { return drive_rate_; }
    double shearing() const { return shearing_; }

  private:
    DrivePulse(double p0, double t, double rate, double q)
        : p0_(p0), pulse_time_(t), drive_rate_(rate), shearing_(q)
    {
    }
    double p0_;
    double pulse_time_;
    double drive_rate_;
    double shearing_;
};

/// Shearing strength from photon number, Q = S p0 (2 Omega/kappa)^2.
double shearing_strength(EnsembleSpec const& spec,
                         CavityAtomParams const& params, double p0);

//---------------------------------------------------------------------------//
//! Normalized pure state in the Dicke basis (m descending).
class DickeState
{
  public:
    explicit DickeState(Eigen::VectorXcd amplitudes);

    Eigen::VectorXcd const& amplitudes() const { return amps_; }
    std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }

  private:
    Eigen::VectorXcd amps_;
};

struct SpinOperators
{
    Eigen::MatrixXcd sz;
    Eigen::MatrixXcd sp;
    Eigen::MatrixXcd sm;
    Eigen::MatrixXcd sx;
    Eigen::MatrixXcd sy;
};

enum class CssAxis
{
    plus_x,
    minus_x
};

/// Coherent spin state along +x or -x, built from log-space binomials.
DickeState make_css(EnsembleSpec const& spec, CssAxis axis = CssAxis::plus_x,
                    std::size_t dim_cap = kStateVectorDimCap);

/// Binomial weights |<m|css>|^2 in Dicke order, normalized to sum 1.
std::vector<double> css_probabilities(EnsembleSpec const& spec);

/// S+|m> = sqrt(S(S+1) - m(m+1)) |m+1>.
double raising_element(double s, double m);

SpinOperators build_operators(EnsembleSpec const& spec,
                              std::size_t dim_cap = kDenseMatrixDimCap);

/// <psi|op|psi>
cplx expectation(DickeState const& state, Eigen::MatrixXcd const& op);

//---------------------------------------------------------------------------//
/*!
 * Transmitted photons over the pulse for a fixed S_z value.
 *
 * Steady-state Lorentzian response of the cavity driven half a linewidth
 * above resonance; the atoms shift the resonance by Omega*S_z. Normalized so
 * that sz_value = 0 gives p0, with slope p0 * 2*Omega/kappa at the origin.
 */
double cavity_field_photon_number(CavityAtomParams const& params,
                                  DrivePulse const& drive, double sz_value);

//---------------------------------------------------------------------------//
struct RegimeThresholds
{
    double max_linearity = 0.1;    // Omega sqrt(S/2) / kappa
    double max_excited_pop = 1e-5;  // epsilon
    double min_kappa_t = 10.0;
    double min_detuning_margin = 10.0;
};

struct RegimeFlag
{
    std::string name;
    double value;
    double threshold;
    bool pass;
};

struct RegimeReport
{
    double ratio_linearity = 0;
    double excited_pop = 0;
    double kappa_t = 0;
    double detuning_margin = 0;
    double intracavity_photons = 0;
    /// kappa*t needed to keep epsilon at the configured ceiling for this Q.
    double kappa_t_required = 0;
    /// Residual of eps*kappa*t against (kappa/g)^2 Q/(8S), relative.
    double identity_residual = 0;
    std::vector<RegimeFlag> flags;

    bool all_pass() const;
};

RegimeReport validate_regime(EnsembleSpec const& spec,
                             CavityAtomParams const& params,
                             DrivePulse const& drive,
                             RegimeThresholds const& thresholds = {});

/// (kappa/g)^2 Q / (8S)
double excited_pop_kappa_t(EnsembleSpec const& spec,
                           CavityAtomParams const& params, double q);

}  // namespace cavsq
