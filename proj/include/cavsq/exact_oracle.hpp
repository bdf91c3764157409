#pragma once

#include "cavsq/spin_core.hpp"

#include <span>

namespace cavsq
{

/// Largest Dicke dimension the O(S) direct sums will accept.
inline constexpr std::size_t kOracleSumDimCap = 2'000'001;

//---------------------------------------------------------------------------//
/*!
 * Density matrix in the S_z eigenbasis (m descending).
 *
 * The public constructor enforces Hermiticity, unit trace and positivity.
 * Outputs of apply_feedback_channel are only guaranteed Hermitian with unit
 * trace: the lowest-order coherence damping is not completely positive.
 */
class DensityMatrix
{
  public:
    explicit DensityMatrix(Eigen::MatrixXcd elements,
                           std::size_t dim_cap = kDenseMatrixDimCap);
    static DensityMatrix from_pure(DickeState const& psi);

    Eigen::MatrixXcd const& elements() const { return rho_; }
    std::size_t dim() const { return static_cast<std::size_t>(rho_.rows()); }

    double hermiticity_error() const;
    double trace_error() const;
    double min_eigenvalue() const;

  private:
    struct Unchecked
    {
    };
    DensityMatrix(Unchecked, Eigen::MatrixXcd elements);

    friend DensityMatrix apply_feedback_channel(DensityMatrix const&,
                                                EnsembleSpec const&, double);

    Eigen::MatrixXcd rho_;
};

//---------------------------------------------------------------------------//
/*!
 * Moments of the sheared spin computed without the closed forms.
 *
 * var_y is the second moment <S~_y^2>; centered_var_y subtracts <S~_y>^2,
 * which is O(1) while var_y is O(S Q^2).
 */
struct OracleMoments
{
    cplx mean_sp{0, 0};
    cplx mean_sp2{0, 0};
    double mean_sz = 0;
    double var_y = 0;
    double centered_var_y = 0;
    double var_z = 0;
    double cov_w = 0;
    double spin = 0;
    double shearing = 0;
};

/*!
 * Sheared moments of the +x coherent state by explicit sums over Dicke
 * amplitudes:
 *   <S~_+>   = <e^{iQ S_z/S} S_+>
 *   <S~_+^2> = e^{-(1+i)Q/S} <e^{2iQ S_z/S} S_+^2>
 * with the S_z exponential to the left. S_+S_- commutes with the probe
 * Hamiltonian and is carried over unchanged.
 */
OracleMoments oracle_moments_sum(EnsembleSpec const& spec, double q,
                                 std::size_t dim_cap = kOracleSumDimCap);

/// Same sums for an arbitrary pure state given by its Dicke amplitudes.
OracleMoments oracle_moments_state(EnsembleSpec const& spec,
                                   std::span<cplx const> amplitudes, double q);

/*!
 * Schroedinger-picture map reproducing the sheared moments on any state.
 *
 * The coherence rho(m, m+n), n > 0, is multiplied by
 *   exp(-n(n-1)(1+i) Q/(2S) + i n Q (m+n)/S),
 * the n < 0 side by the complex conjugate; populations are untouched.
 */
DensityMatrix apply_feedback_channel(DensityMatrix const& rho,
                                     EnsembleSpec const& spec, double q);

/// Moments read off a (channel-evolved) density matrix with dense operators.
OracleMoments density_moments(DensityMatrix const& rho, EnsembleSpec const& spec,
                              double q);

struct BruteForceMinimum
{
    double alpha_min;
    double sigma_min_sq;
};

/// Minimizes <(cos a S_z - sin a S~_y)^2> / (S/2) over a on a 720-point grid
/// with ternary refinement.
BruteForceMinimum brute_force_min_variance(EnsembleSpec const& spec, double q);

/// Normalized rotated second moment at angle alpha from oracle moments.
double oracle_rotated_variance(OracleMoments const& m, double alpha);

}  // namespace cavsq
