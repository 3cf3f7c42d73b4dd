// SPDX-License-Identifier: Apache-2.0
//
// rismm - link-level simulation and optimization for RIS-assisted mmWave downlinks
// ------------------------------------------------------------------------

#ifndef RISMM_RIS_HPP
#define RISMM_RIS_HPP

#include <rismm/arrays.hpp>
#include <rismm/types.hpp>

#include <optional>
#include <span>
#include <vector>

namespace rismm
{
    enum class ReflectionKind
    {
        passive_diagonal, // unit-modulus phase shifts
        active_diagonal,  // phase shift plus amplification, bounded by a power budget
        general,          // full N x N, element (i,j) reflects element j's incident signal from element i
    };

    // RIS configuration Psi. Diagonal kinds store only the diagonal.
    class ReflectionMatrix
    {
    public:
        static constexpr double unit_modulus_tolerance = 1e-12;

        // Passive surface from phase shifts psi_n
        static ReflectionMatrix passive(std::span<const double> phases);
        // Passive surface from unit phasors; throws if any entry is off the unit circle
        static ReflectionMatrix passive_from_phasors(const CVector &diagonal);
        static ReflectionMatrix active(const CVector &diagonal, std::optional<double> power_budget = std::nullopt);
        static ReflectionMatrix general(const CMatrix &full);
        // Passive surface with all phases zero
        static ReflectionMatrix identity(Eigen::Index n);

        ReflectionKind kind() const { return kind_; }
        bool is_diagonal() const { return kind_ != ReflectionKind::general; }
        Eigen::Index size() const { return is_diagonal() ? diag_.size() : full_.rows(); }
        std::optional<double> power_budget() const { return power_budget_; }

        // Diagonal entries; throws for the general kind
        const CVector &diagonal() const;
        // Phase of every diagonal entry
        std::vector<double> phases() const;
        CMatrix to_matrix() const;

        double frobenius_norm2() const;

        // Psi * x
        CMatrix apply(const CMatrix &x) const;
        // x * Psi
        CMatrix apply_right(const CMatrix &x) const;

        // Same kind (and budget) with the diagonal replaced; passive kinds re-check unit modulus
        ReflectionMatrix with_diagonal(const CVector &diagonal) const;

    private:
        ReflectionKind kind_ = ReflectionKind::passive_diagonal;
        CVector diag_;
        CMatrix full_;
        std::optional<double> power_budget_;
    };

    // H = H0 + H2 * Psi * H1
    CMatrix composite_channel(const LinkSet &links, const ReflectionMatrix &psi);

    // psi_i = -phi_r_i - phi_t_i: coherent RIS-only link
    ReflectionMatrix coherent_phases_rpl_only(std::span<const double> h1_row_phases, std::span<const double> h2_phases);

    // psi_i = phi0 - phi_r_i - phi_t_i: RIS link co-phased with the direct link
    ReflectionMatrix coherent_phases_with_dpl(double phi0, std::span<const double> h1_row_phases,
                                              std::span<const double> h2_phases);

    struct BeamCoherentPhases
    {
        ReflectionMatrix psi;
        // sum_n |h2_n| |h1_n^T f|, the coherent reflected amplitude
        double b = 0.0;
        // Elements whose phase was undefined (zero magnitude) and defaulted to 0
        std::vector<Eigen::Index> undefined_elements;
    };

    // Per-element phases co-phasing h2_n and h1_n^T f for a fixed unit-norm beam f
    BeamCoherentPhases coherent_phases_given_beam(const CVector &h2_k, const CMatrix &h1, const CVector &f);

    struct CombineMode
    {
        bool active = false;
        double p_r = 0.0; // target ||Psi||_F^2 in active mode

        static CombineMode passive() { return {}; }
        static CombineMode active_budget(double p_r) { return {true, p_r}; }
    };

    // Element-wise sum of the per-UE diagonals (before normalization)
    CVector phasor_sum(const std::vector<ReflectionMatrix> &per_ue);

    // Magnitude below which a passive phasor sum has no usable phase
    inline constexpr double degenerate_sum_tolerance = 1e-9;

    // Joint surface from per-UE surfaces by summing phasors. Passive mode normalizes each
    // element back to unit modulus; active mode scales uniformly so that ||Psi||_F^2 = P_R.
    ReflectionMatrix combine_psi_average(const std::vector<ReflectionMatrix> &per_ue, const CombineMode &mode);

    // Contiguous blocks of floor(N/K) elements per UE in index order; the remainder goes to the last UE
    std::vector<int> default_partition(Eigen::Index n, int k);

    // Element n takes the value of UE assignment[n]
    ReflectionMatrix combine_psi_partition(const std::vector<ReflectionMatrix> &per_ue,
                                           std::span<const int> assignment);

    // sum_s ||Psi H1 f_s||^2 + ||Psi||_F^2 sigma_r2
    double ris_transmit_power(const ReflectionMatrix &psi, const CMatrix &h1, const CMatrix &f, double sigma_r2);
}

#endif
