#ifndef CFID_SAMPLER_HPP
#define CFID_SAMPLER_HPP

#include <cstdint>

#include "cfid/conditions.hpp"
#include "cfid/model.hpp"

namespace cfid::scm {

/// Minimum causal-effect gap a witness pair must certify.
inline constexpr double kDefaultWitnessMinGap = 0.05;

/// Draws a valid model of the given family and dims satisfying every
/// condition in `constraints` exactly (up to floating-point roundoff),
/// deterministically in `seed`. Constraints are realized by closed-form
/// construction, never by rejection, so a set the constructors cannot
/// jointly realize raises UnsatisfiableConstraintSetError instead of
/// being silently relaxed.
///
/// Supported sets: any combination of event/whole X_|_Y|Z pins,
/// Y_|_Z|X=i rows, and X_|_Z; plus X_|_Y, Y_|_Z, or a single X_|_Z|Y=k
/// combined with pins (and, for the mixture conditions, rows). The two
/// mixture conditions and the rank-one condition are mutually exclusive.
Model sample_model(Family family, prob::Dims dims,
                   const ident::AssumptionSet& constraints, std::uint64_t seed);

/// Two models of one family that induce the same observed joint but
/// different causal effects P0(Y=1).
struct WitnessPair {
    Model first;    // counterfactuals completed as u = b (and c = d)
    Model second;   // counterfactual outcome rows pushed to an extreme
    double observed_gap;  // max cellwise gap of the observed joints
    double effect_gap;    // |P0(Y=1) difference|
};

/// Builds a witness pair over the observed parameters of `base`
/// (x distribution, Z parameters, full outcome table); its
/// counterfactual parameters are ignored. Throws DegenerateBaseError when
/// no admissible placement of the counterfactual rows reaches `min_gap`.
WitnessPair witness_pair(const Model& base, std::uint64_t seed,
                         double min_gap = kDefaultWitnessMinGap);

/// Same, from a summary: the unobserved observed-side parameters
/// (outcome rows at X>=1 and, for family B, mediator rows at X>=1) are
/// completed deterministically from the seed.
WitnessPair witness_pair(const ObservedSummary& base, std::uint64_t seed,
                         double min_gap = kDefaultWitnessMinGap);

}  // namespace cfid::scm

#endif
