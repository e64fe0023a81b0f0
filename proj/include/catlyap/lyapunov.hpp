#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "catlyap/cocycle.hpp"
#include "catlyap/leaves.hpp"
#include "catlyap/potential.hpp"
#include "catlyap/torus.hpp"

namespace catlyap {

enum class Estimator { vector_iteration, norm_product, leaf_restricted };

std::string_view to_string(Estimator e);

struct LyapunovEstimate {
  double value = 0.0;  // nats per step
  int n = 0;
  int samples = 0;
  double std_error = 0.0;
  Estimator estimator = Estimator::vector_iteration;
  std::vector<double> per_sample;  // log growth / n for each phase, by sample index
};

struct EstimateOptions {
  int n = 1000;
  int samples = 1000;
  std::uint64_t seed = 0;
  CocycleKind kind = CocycleKind::raw;
  /// vector_iteration or norm_product; leaf_restricted is set on output only.
  Estimator estimator = Estimator::vector_iteration;
  /// Steps discarded before accumulating (vector_iteration only).
  int warmup = 0;
};

/// Steps between renormalizations of the iterated vector.
inline constexpr int kRenormalizeEvery = 32;

/// log growth over n steps from phase p: log|A_n e1| or log|A_n|.
double log_growth(const Potential& v, const CocycleParams& params, const HyperbolicToralMap& map,
                  TorusPoint p, const EstimateOptions& opt);

/// Phase-averaged exponent over uniform phases on the torus.
LyapunovEstimate estimate_torus(const Potential& v, const CocycleParams& params,
                                const HyperbolicToralMap& map, const EstimateOptions& opt);

/// As estimate_torus with phases uniform in arclength on the leaf W_z.
LyapunovEstimate estimate_leaf(const Potential& v, const CocycleParams& params,
                               const HyperbolicToralMap& map, double z,
                               const EstimateOptions& opt);

struct SubadditiveTrace {
  std::vector<int> word_lengths;
  std::vector<double> averages;  // (1/n) mean log|A_n|
  std::vector<double> std_errors;
};

/// a_n for every requested word length from one common set of phases.
SubadditiveTrace subadditive_trace(const Potential& v, const CocycleParams& params,
                                   const HyperbolicToralMap& map,
                                   const std::vector<int>& word_lengths, int samples,
                                   std::uint64_t seed, CocycleKind kind = CocycleKind::raw);

struct LowerBoundCertificate {
  double value = 0.0;  // log lambda + (1/n) sum_j integral_j / l_z
  double leaf_length = 0.0;
  int n = 0;
  std::vector<double> integrals;  // integral of log|cos theta_j| over W_z, j < n
};

/// log lambda + (1/n) sum_{j<n} integral_j / leaf_length.
double certificate_from_integrals(double lambda, const std::vector<double>& integrals,
                                  double leaf_length);

/// Lower-bound functional for the reduced cocycle on W_z, by quadrature over
/// the angle orbit.
LowerBoundCertificate lower_bound_certificate(const Potential& v, const CocycleParams& params,
                                              const HyperbolicToralMap& map, double z, int n,
                                              int resolution);

}  // namespace catlyap
