// SPDX-License-Identifier: Apache-2.0
//
// rismm - link-level simulation and optimization for RIS-assisted mmWave downlinks
// ------------------------------------------------------------------------

#ifndef RISMM_OPTIMIZER_HPP
#define RISMM_OPTIMIZER_HPP

#include <rismm/metrics.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace rismm
{
    enum class Objective
    {
        sum_rate,
        min_power, // ZF transmit power Tr(beta (H H^H)^{-1}) at fixed beta
        energy_efficiency,
    };

    enum class PowerAllocation
    {
        waterfill,
        uniform,
    };

    std::string_view to_string(Objective o);
    std::optional<Objective> objective_from_string(std::string_view name);
    std::string_view to_string(PowerAllocation a);
    std::optional<PowerAllocation> allocation_from_string(std::string_view name);

    struct OptimizerConfig
    {
        int max_iters = 100;
        double rel_tolerance = 1e-6;
        int phase_grid_points = 64;
        int golden_steps = 24;        // refinement steps around the best grid phase
        int sweeps_per_step = 1;      // coordinate-descent sweeps per Psi-step
        std::uint64_t rng_seed = 0;   // random Psi initialization
        Objective objective = Objective::sum_rate;
        PowerAllocation allocation = PowerAllocation::waterfill;
        bool zf_constraints = true;   // impose zero ISI/MUI in the Psi-step
        int streams_per_ue = 1;
        PowerModelParams power_model; // used by the energy-efficiency objective
        double active_gain = 1.0;     // initial amplitude of active RIS elements
        bool optimize_gain = true;    // active RIS: search a common gain after each phase step
        bool warm_start = true;       // active RIS: start from the passive alternating solution
        bool final_zf = true;         // multi-RIS designs: ZF stage across UEs

        void validate() const;
    };

    struct OptimizationTrace
    {
        std::vector<double> objective; // one entry per completed iteration, index 0 is the initial point
        bool converged = false;
        int iterations = 0;
        std::optional<int> failure_iteration;
        std::string failure;
        std::uint64_t seed = 0;
    };

    struct OptimizationResult
    {
        SystemState state;
        OptimizationTrace trace;
    };

    // W_k as the S leading left singular vectors of H_{k,2}; [1] for single-antenna UEs
    CMatrix design_combiners(const CMatrix &h2, int streams);

    // ZF precoder on the stacked rows w_{k,s}^H H_k of the current state with power allocation.
    // Per-stream noise includes the forwarded RIS noise. With fixed_beta the allocation is skipped.
    // Throws NumericalError when the stacked channel is rank deficient.
    Precoder zf_f_step(const SystemState &state, double p_bs_max, PowerAllocation allocation,
                       const std::optional<RVector> &fixed_beta = std::nullopt);

    // ZF transmit power Tr(beta (H H^H)^{-1}) of the stacked effective channel
    double zf_transmit_power(const SystemState &state, const RVector &beta);

    // Larger is better
    using PsiObjective = std::function<double(const SystemState &)>;

    // Objective value as maximized by the optimizers. min_power is returned negated.
    // With zf_constraints the precoder is re-derived by zf_f_step before scoring;
    // rank failures score -infinity.
    PsiObjective make_objective(const PowerBudget &budget, const OptimizerConfig &config,
                                const std::optional<RVector> &fixed_beta = std::nullopt);

    // Element-wise phase search on RIS `ris`: uniform grid plus golden-section refinement.
    // Element magnitudes are kept, so passive surfaces stay unit modulus. An element only
    // moves when the objective strictly improves.
    ReflectionMatrix phase_coordinate_descent(const SystemState &state, int ris, const PsiObjective &objective,
                                              const OptimizerConfig &config);

    // Alternating F/Psi optimization over one RIS (links[k] for UE k)
    OptimizationResult alternating_optimize(const std::vector<LinkSet> &links, const PowerBudget &budget,
                                            const OptimizerConfig &config);

    enum class CombineMethod
    {
        average,
        partition,
    };

    struct MassiveOptions
    {
        CombineMethod combine = CombineMethod::average;
        bool active = false;               // active RIS: linear combining scaled to the RIS budget
        bool final_zf = false;             // ZF stage across UEs after the per-UE design
        std::vector<int> assignment;       // partition combining; empty means default_partition
    };

    struct MassiveDesign
    {
        SystemState state;
        std::vector<ReflectionMatrix> per_ue_psi;
        RVector rho;            // DPL share per UE
        bool regime_warning = false; // M or N not much larger than K
    };

    // Per-UE DPL/RPL design followed by a joint reflection matrix; single-antenna UEs
    MassiveDesign massive_design(const std::vector<LinkSet> &links, const PowerBudget &budget,
                                 const MassiveOptions &options = {});

    enum class AssociationPolicy
    {
        single_best,
        multi_threshold,
    };

    // kappa(u,k) from the reflected gains ||h_{uk,2}^T Psi_u H_{u1}||; links[k][u]
    Eigen::MatrixXi associate_ues(const std::vector<std::vector<LinkSet>> &links,
                                  const std::vector<ReflectionMatrix> &psi_per_ris, AssociationPolicy policy,
                                  double threshold = 1.0);

    // Per-RIS coherent design for the associated UEs, MRC power split over the DPL and
    // associated RPLs, optional ZF across UEs. Single-antenna UEs.
    SystemState multi_ris_design(const std::vector<std::vector<LinkSet>> &links, const Eigen::MatrixXi &kappa,
                                 const PowerBudget &budget, bool final_zf);

    struct OnOffEvaluation
    {
        SystemState state;
        double ee = 0.0;
        double sum_rate = 0.0;
        bool feasible = false;
    };

    // Designs and scores one RIS on-off pattern; every UE uses every switched-on RIS
    OnOffEvaluation evaluate_onoff_pattern(const std::vector<std::vector<LinkSet>> &links,
                                           const std::vector<bool> &on, const PowerBudget &budget,
                                           const PowerModelParams &params, const std::vector<double> &rate_mins,
                                           double bandwidth_hz, bool final_zf);

    struct OnOffResult
    {
        SystemState state;
        OptimizationTrace trace;
        std::vector<bool> on;
        double ee_all_on = 0.0;
        std::optional<double> ee_all_off; // empty when all-off is infeasible
    };

    // Greedy single-toggle search from all-on, finished by a comparison with all-off.
    // Throws InvalidArgument when the rate targets fail with every RIS on.
    OnOffResult ee_onoff_greedy(const std::vector<std::vector<LinkSet>> &links, const PowerBudget &budget,
                                const PowerModelParams &params, const std::vector<double> &rate_mins,
                                double bandwidth_hz, const OptimizerConfig &config);

    // Best pattern over all 2^U on-off combinations
    struct ExhaustiveOnOff
    {
        std::vector<bool> on;
        double ee = 0.0;
        bool any_feasible = false;
    };
    ExhaustiveOnOff exhaustive_onoff(const std::vector<std::vector<LinkSet>> &links, const PowerBudget &budget,
                                     const PowerModelParams &params, const std::vector<double> &rate_mins,
                                     double bandwidth_hz, bool final_zf);

    // Active-RIS sum-rate design under ZF, BS and RIS power budgets. Steps that would break the
    // RIS budget are rejected; the initial point is projected by uniform gain down-scaling.
    OptimizationResult zf_active_ris_iterate(const std::vector<LinkSet> &links, const PowerBudget &budget,
                                             const OptimizerConfig &config);
}

#endif
