#ifndef CFID_MODEL_HPP
#define CFID_MODEL_HPP

#include <string>
#include <variant>
#include <vector>

#include "cfid/prob.hpp"

namespace cfid::scm {

using prob::CondTable;
using prob::Dims;
using prob::JointTable;
using prob::ProbVector;

/// The two DAG families. In family A the control X and the instrument Z
/// are independent; in family B Z is a mediator with an edge X -> Z, and
/// the post-intervention distribution of Z given X is a free
/// counterfactual parameter.
enum class Family { A, B };

const char* family_name(Family f);

/// Complete counterfactual parameterization of a family-A model:
/// observed joint P(x,y,z) = P(X=x) P(Z=z) P(Y=y|X=x,Z=z) and
/// intervention joint with the outcome table swapped for its
/// counterfactual counterpart, whose X=0 rows are pinned to the observed
/// ones.
class ModelA {
public:
    /// Throws unless: x_dist has K entries, z_dist has N entries,
    /// outcome tables are (K,N)->M, and outcome_cf row (0,j) equals
    /// outcome_obs row (0,j) exactly for every j.
    static ModelA validated(Dims dims, ProbVector x_dist, ProbVector z_dist,
                            CondTable outcome_obs, CondTable outcome_cf);

    Dims dims() const { return dims_; }
    const ProbVector& x_dist() const { return x_dist_; }
    const ProbVector& z_dist() const { return z_dist_; }
    /// P(Y | X=i, Z=j), rows indexed {i, j}.
    const CondTable& outcome_obs() const { return outcome_obs_; }
    /// P0(Y | X=i, Z=j); row (0, j) coincides with outcome_obs.
    const CondTable& outcome_cf() const { return outcome_cf_; }

private:
    ModelA(Dims d, ProbVector a, ProbVector c, CondTable b, CondTable u);
    Dims dims_;
    ProbVector x_dist_;
    ProbVector z_dist_;
    CondTable outcome_obs_;
    CondTable outcome_cf_;
};

/// Family-B model. Carries both the observed mediator table P(Z|X) and
/// the counterfactual one P0(Z|X); the identification formulas never use
/// the observed rows at X>=1, but the observed joint needs them.
class ModelB {
public:
    static ModelB validated(Dims dims, ProbVector x_dist, CondTable z_given_x_obs,
                            CondTable z_given_x_cf, CondTable outcome_obs,
                            CondTable outcome_cf);

    Dims dims() const { return dims_; }
    const ProbVector& x_dist() const { return x_dist_; }
    /// P(Z | X=i), rows indexed {i}.
    const CondTable& z_given_x_obs() const { return z_obs_; }
    /// P0(Z | X=i); row 0 coincides with z_given_x_obs.
    const CondTable& z_given_x_cf() const { return z_cf_; }
    const CondTable& outcome_obs() const { return outcome_obs_; }
    const CondTable& outcome_cf() const { return outcome_cf_; }

private:
    ModelB(Dims d, ProbVector a, CondTable dz, CondTable cz, CondTable b, CondTable u);
    Dims dims_;
    ProbVector x_dist_;
    CondTable z_obs_;
    CondTable z_cf_;
    CondTable outcome_obs_;
    CondTable outcome_cf_;
};

using Model = std::variant<ModelA, ModelB>;

Family family(const Model& m);
Dims dims(const Model& m);

/// The quantities an analyst can estimate without intervening: the X
/// distribution, the Z distribution given X=0 (for family A the plain Z
/// marginal), and the outcome rows at X=0.
struct ObservedSummary {
    Family family;
    Dims dims;
    ProbVector x_dist;
    ProbVector z0;
    std::vector<ProbVector> outcome_x0;  // N rows over Y

    static ObservedSummary validated(Family family, Dims dims, ProbVector x_dist,
                                     ProbVector z0, std::vector<ProbVector> outcome_x0);
};

ObservedSummary observed_summary(const ModelA& m);
ObservedSummary observed_summary(const ModelB& m);
ObservedSummary observed_summary(const Model& m);

/// Joint distribution the model induces on observed data. Does not
/// depend on any counterfactual parameter.
JointTable observed_joint(const ModelA& m);
JointTable observed_joint(const ModelB& m);
JointTable observed_joint(const Model& m);

/// Joint distribution under the intervention fixing X=0: the X marginal
/// (and, in family A, the Z marginal) keep their observed values while
/// the outcome (and, in family B, mediator) tables switch to their
/// counterfactual versions.
JointTable intervention_joint(const ModelA& m);
JointTable intervention_joint(const ModelB& m);
JointTable intervention_joint(const Model& m);

/// Brute-force causal effect P0(Y=y), evaluated directly from the model
/// parameters: family A sums c_j * sum_i a_i u_ij^y, family B sums
/// a_i * sum_j c_ij u_ij^y. Ground truth for branch verification.
double causal_effect_oracle(const ModelA& m, int y);
double causal_effect_oracle(const ModelB& m, int y);
double causal_effect_oracle(const Model& m, int y);

}  // namespace cfid::scm

#endif
