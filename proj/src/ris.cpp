// SPDX-License-Identifier: Apache-2.0
//
// rismm - link-level simulation and optimization for RIS-assisted mmWave downlinks
// ------------------------------------------------------------------------

#include <rismm/ris.hpp>

#include <cmath>
#include <string>

namespace rismm
{
    ReflectionMatrix ReflectionMatrix::passive(std::span<const double> phases)
    {
        ReflectionMatrix r;
        r.kind_ = ReflectionKind::passive_diagonal;
        r.diag_.resize(static_cast<Eigen::Index>(phases.size()));
        for (std::size_t n = 0; n < phases.size(); ++n)
            r.diag_[static_cast<Eigen::Index>(n)] = phasor(phases[n]);
        return r;
    }

    ReflectionMatrix ReflectionMatrix::passive_from_phasors(const CVector &diagonal)
    {
        for (Eigen::Index n = 0; n < diagonal.size(); ++n)
            if (std::abs(std::abs(diagonal[n]) - 1.0) > unit_modulus_tolerance)
                throw InvalidArgument("ReflectionMatrix: passive entry " + std::to_string(n) + " is not unit modulus");
        ReflectionMatrix r;
        r.kind_ = ReflectionKind::passive_diagonal;
        r.diag_ = diagonal;
        return r;
    }

    ReflectionMatrix ReflectionMatrix::active(const CVector &diagonal, std::optional<double> power_budget)
    {
        for (Eigen::Index n = 0; n < diagonal.size(); ++n)
            require(std::abs(diagonal[n]) > 0.0, "ReflectionMatrix: active entries must have non-zero modulus");
        if (power_budget)
            require(*power_budget >= 0.0, "ReflectionMatrix: power budget must be non-negative");
        ReflectionMatrix r;
        r.kind_ = ReflectionKind::active_diagonal;
        r.diag_ = diagonal;
        r.power_budget_ = power_budget;
        return r;
    }

    ReflectionMatrix ReflectionMatrix::general(const CMatrix &full)
    {
        require(full.rows() == full.cols(), "ReflectionMatrix: general matrix must be square");
        ReflectionMatrix r;
        r.kind_ = ReflectionKind::general;
        r.full_ = full;
        return r;
    }

    ReflectionMatrix ReflectionMatrix::identity(Eigen::Index n)
    {
        ReflectionMatrix r;
        r.kind_ = ReflectionKind::passive_diagonal;
        r.diag_ = CVector::Ones(n);
        return r;
    }

    const CVector &ReflectionMatrix::diagonal() const
    {
        if (!is_diagonal())
            throw InvalidArgument("ReflectionMatrix: general matrix has no diagonal representation");
        return diag_;
    }

    std::vector<double> ReflectionMatrix::phases() const
    {
        const auto &d = diagonal();
        std::vector<double> out(static_cast<std::size_t>(d.size()));
        for (Eigen::Index n = 0; n < d.size(); ++n)
            out[static_cast<std::size_t>(n)] = std::arg(d[n]);
        return out;
    }

    CMatrix ReflectionMatrix::to_matrix() const
    {
        if (is_diagonal())
            return diag_.asDiagonal();
        return full_;
    }

    double ReflectionMatrix::frobenius_norm2() const
    {
        return is_diagonal() ? diag_.squaredNorm() : full_.squaredNorm();
    }

    CMatrix ReflectionMatrix::apply(const CMatrix &x) const
    {
        require(x.rows() == size(), "ReflectionMatrix::apply: dimension mismatch");
        if (is_diagonal())
            return diag_.asDiagonal() * x;
        return full_ * x;
    }

    CMatrix ReflectionMatrix::apply_right(const CMatrix &x) const
    {
        require(x.cols() == size(), "ReflectionMatrix::apply_right: dimension mismatch");
        if (is_diagonal())
            return x * diag_.asDiagonal();
        return x * full_;
    }

    ReflectionMatrix ReflectionMatrix::with_diagonal(const CVector &diagonal) const
    {
        switch (kind_)
        {
        case ReflectionKind::passive_diagonal:
            return passive_from_phasors(diagonal);
        case ReflectionKind::active_diagonal:
            return active(diagonal, power_budget_);
        case ReflectionKind::general:
            break;
        }
        throw InvalidArgument("ReflectionMatrix::with_diagonal: general matrix has no diagonal");
    }

    CMatrix composite_channel(const LinkSet &links, const ReflectionMatrix &psi)
    {
        require(psi.size() == links.h1.rows() && psi.size() == links.h2.cols(),
                "composite_channel: reflection matrix size does not match the RIS dimension");
        require(links.h0.rows() == links.h2.rows() && links.h0.cols() == links.h1.cols(),
                "composite_channel: H0 must be V x M");
        return links.h0 + psi.apply_right(links.h2) * links.h1;
    }

    ReflectionMatrix coherent_phases_with_dpl(double phi0, std::span<const double> h1_row_phases,
                                              std::span<const double> h2_phases)
    {
        require(h1_row_phases.size() == h2_phases.size(), "coherent_phases: phase vectors differ in length");
        std::vector<double> psi(h1_row_phases.size());
        for (std::size_t i = 0; i < psi.size(); ++i)
            psi[i] = phi0 - h1_row_phases[i] - h2_phases[i];
        return ReflectionMatrix::passive(psi);
    }

    ReflectionMatrix coherent_phases_rpl_only(std::span<const double> h1_row_phases, std::span<const double> h2_phases)
    {
        return coherent_phases_with_dpl(0.0, h1_row_phases, h2_phases);
    }

    BeamCoherentPhases coherent_phases_given_beam(const CVector &h2_k, const CMatrix &h1, const CVector &f)
    {
        const auto n_elems = h1.rows();
        require(h2_k.size() == n_elems, "coherent_phases_given_beam: h2 length must equal RIS elements");
        require(f.size() == h1.cols(), "coherent_phases_given_beam: beam length must equal BS antennas");
        require(std::abs(f.norm() - 1.0) < 1e-9, "coherent_phases_given_beam: beam must have unit norm");

        const CVector g = h1 * f; // h_{1,n}^T f per element
        std::vector<double> psi(static_cast<std::size_t>(n_elems));
        BeamCoherentPhases out{ReflectionMatrix::identity(n_elems), 0.0, {}};
        for (Eigen::Index n = 0; n < n_elems; ++n)
        {
            const double m2 = std::abs(h2_k[n]);
            const double m1 = std::abs(g[n]);
            // the element carries nothing when either side vanishes; park it at phase 0
            if (m2 == 0.0 || m1 == 0.0)
                out.undefined_elements.push_back(n);
            else
                psi[static_cast<std::size_t>(n)] = -std::arg(h2_k[n]) - std::arg(g[n]);
            out.b += m2 * m1;
        }
        out.psi = ReflectionMatrix::passive(psi);
        return out;
    }

    namespace
    {
        void check_diagonal_family(const std::vector<ReflectionMatrix> &per_ue, const char *who)
        {
            require(!per_ue.empty(), std::string(who) + ": at least one UE surface is required");
            const auto n = per_ue.front().size();
            for (const auto &p : per_ue)
            {
                require(p.is_diagonal(), std::string(who) + ": per-UE surfaces must be diagonal");
                require(p.size() == n, std::string(who) + ": per-UE surfaces differ in size");
            }
        }
    }

    CVector phasor_sum(const std::vector<ReflectionMatrix> &per_ue)
    {
        check_diagonal_family(per_ue, "phasor_sum");
        CVector sum = CVector::Zero(per_ue.front().size());
        for (const auto &p : per_ue)
            sum += p.diagonal();
        return sum;
    }

    ReflectionMatrix combine_psi_average(const std::vector<ReflectionMatrix> &per_ue, const CombineMode &mode)
    {
        const CVector sum = phasor_sum(per_ue);

        if (mode.active)
        {
            require(mode.p_r > 0.0, "combine_psi_average: active mode needs a positive RIS power budget");
            const double total = sum.squaredNorm();
            if (!(total > 0.0))
                throw NumericalError("combine_psi_average: phasor sum vanishes on every element");
            return ReflectionMatrix::active(sum * std::sqrt(mode.p_r / total), mode.p_r);
        }

        if (per_ue.size() == 1)
            return per_ue.front();

        CVector out(sum.size());
        for (Eigen::Index n = 0; n < sum.size(); ++n)
        {
            const double mag = std::abs(sum[n]);
            if (mag < degenerate_sum_tolerance)
                throw NumericalError("combine_psi_average: phasors cancel on element " + std::to_string(n) +
                                     "; phase undefined (use partition combining)");
            out[n] = phasor(std::arg(sum[n]));
        }
        return ReflectionMatrix::passive_from_phasors(out);
    }

    std::vector<int> default_partition(Eigen::Index n, int k)
    {
        require(n >= 1 && k >= 1, "default_partition: N and K must be positive");
        const Eigen::Index block = n / k;
        std::vector<int> out(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i)
        {
            const Eigen::Index owner = block > 0 ? std::min<Eigen::Index>(i / block, k - 1) : k - 1;
            out[static_cast<std::size_t>(i)] = static_cast<int>(owner);
        }
        return out;
    }

    ReflectionMatrix combine_psi_partition(const std::vector<ReflectionMatrix> &per_ue,
                                           std::span<const int> assignment)
    {
        check_diagonal_family(per_ue, "combine_psi_partition");
        const auto n = per_ue.front().size();
        require(static_cast<Eigen::Index>(assignment.size()) == n,
                "combine_psi_partition: assignment length must equal RIS elements");

        bool all_passive = true;
        CVector out(n);
        for (Eigen::Index i = 0; i < n; ++i)
        {
            const int k = assignment[static_cast<std::size_t>(i)];
            require(k >= 0 && k < static_cast<int>(per_ue.size()), "combine_psi_partition: invalid UE index");
            const auto &src = per_ue[static_cast<std::size_t>(k)];
            all_passive = all_passive && src.kind() == ReflectionKind::passive_diagonal;
            out[i] = src.diagonal()[i];
        }
        if (all_passive)
            return ReflectionMatrix::passive_from_phasors(out);
        return ReflectionMatrix::active(out, per_ue.front().power_budget());
    }

    double ris_transmit_power(const ReflectionMatrix &psi, const CMatrix &h1, const CMatrix &f, double sigma_r2)
    {
        require(h1.rows() == psi.size(), "ris_transmit_power: H1 rows must equal RIS elements");
        require(f.rows() == h1.cols(), "ris_transmit_power: precoder rows must equal BS antennas");
        require(sigma_r2 >= 0.0, "ris_transmit_power: sigma_r2 must be non-negative");
        return psi.apply(h1 * f).squaredNorm() + psi.frobenius_norm2() * sigma_r2;
    }
}
