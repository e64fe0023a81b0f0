#include "catlyap/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "catlyap/angle.hpp"
#include "catlyap/errors.hpp"
#include "catlyap/parallel.hpp"

namespace catlyap {

std::string_view to_string(Estimator e) {
  switch (e) {
    case Estimator::vector_iteration:
      return "vector_iteration";
    case Estimator::norm_product:
      return "norm_product";
    case Estimator::leaf_restricted:
      return "leaf_restricted";
  }
  return "unknown";
}

namespace {

void check_options(const EstimateOptions& opt) {
  if (opt.n < 1) throw OutOfRange("word length n must be >= 1");
  if (opt.samples < 1) throw OutOfRange("samples must be >= 1");
  if (opt.warmup < 0) throw OutOfRange("warmup must be >= 0");
  if (opt.estimator == Estimator::leaf_restricted) {
    throw OutOfRange("leaf_restricted is not an iteration scheme");
  }
}

double vector_log_growth(const Potential& v, const CocycleParams& params,
                         const HyperbolicToralMap& map, TorusPoint p, const EstimateOptions& opt) {
  Vec2 x{1.0, 0.0};
  auto advance = [&](CompensatedSum* acc, int steps) {
    for (int i = 0; i < steps; ++i) {
      x = cocycle_matrix(opt.kind, v, params, map, p).apply(x);
      p = map.apply(p);
      const double nrm = std::abs(x.x) + std::abs(x.y);
      if ((i + 1) % kRenormalizeEvery == 0 || nrm > 1e150 || nrm < 1e-150) {
        const double len = norm(x);
        if (acc != nullptr) acc->add(std::log(len));
        x = (1.0 / len) * x;
      }
    }
  };
  advance(nullptr, opt.warmup);
  x = (1.0 / norm(x)) * x;
  CompensatedSum acc;
  advance(&acc, opt.n);
  acc.add(std::log(norm(x)));
  return acc.value();
}

}  // namespace

double log_growth(const Potential& v, const CocycleParams& params, const HyperbolicToralMap& map,
                  TorusPoint p, const EstimateOptions& opt) {
  check_options(opt);
  if (opt.estimator == Estimator::norm_product) {
    return transfer(opt.kind, v, params, map, p, opt.n).log_norm();
  }
  return vector_log_growth(v, params, map, p, opt);
}

namespace {

template <class Phase>
LyapunovEstimate run_estimate(const Potential& v, const CocycleParams& params,
                              const HyperbolicToralMap& map, const EstimateOptions& opt,
                              Phase phase) {
  check_options(opt);
  LyapunovEstimate est;
  est.n = opt.n;
  est.samples = opt.samples;
  est.estimator = opt.estimator;
  est.per_sample.assign(static_cast<std::size_t>(opt.samples), 0.0);
  parallel_for(est.per_sample.size(), [&](std::size_t i) {
    auto rng = substream(opt.seed, i);
    const TorusPoint p = phase(rng);
    est.per_sample[i] = log_growth(v, params, map, p, opt) / opt.n;
  });
  const SampleStats st = sample_stats(est.per_sample);
  est.value = st.mean;
  est.std_error = st.std_error;
  return est;
}

}  // namespace

LyapunovEstimate estimate_torus(const Potential& v, const CocycleParams& params,
                                const HyperbolicToralMap& map, const EstimateOptions& opt) {
  return run_estimate(v, params, map, opt, [](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double a = u(rng);
    const double b = u(rng);
    return TorusPoint{a, b};
  });
}

LyapunovEstimate estimate_leaf(const Potential& v, const CocycleParams& params,
                               const HyperbolicToralMap& map, double z,
                               const EstimateOptions& opt) {
  const Leaf leaf = leaf_from_z(map, z);
  LyapunovEstimate est = run_estimate(v, params, map, opt, [&](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, leaf.length);
    double s = u(rng);
    if (s >= leaf.length) s = 0.0;
    return leaf_point(leaf, s);
  });
  est.estimator = Estimator::leaf_restricted;
  return est;
}

SubadditiveTrace subadditive_trace(const Potential& v, const CocycleParams& params,
                                   const HyperbolicToralMap& map,
                                   const std::vector<int>& word_lengths, int samples,
                                   std::uint64_t seed, CocycleKind kind) {
  if (word_lengths.empty()) throw OutOfRange("word_lengths must be nonempty");
  for (std::size_t i = 0; i < word_lengths.size(); ++i) {
    if (word_lengths[i] < 1 || (i > 0 && word_lengths[i] <= word_lengths[i - 1])) {
      throw OutOfRange("word_lengths must be positive and increasing");
    }
  }
  if (samples < 1) throw OutOfRange("samples must be >= 1");
  const std::size_t m = word_lengths.size();
  std::vector<double> logs(static_cast<std::size_t>(samples) * m);
  parallel_for(static_cast<std::size_t>(samples), [&](std::size_t i) {
    auto rng = substream(seed, i);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double a = u(rng);
    const double b = u(rng);
    TorusPoint p{a, b};
    Transfer acc;
    int done = 0;
    for (std::size_t k = 0; k < m; ++k) {
      for (; done < word_lengths[k]; ++done) {
        acc.left_multiply(cocycle_matrix(kind, v, params, map, p));
        p = map.apply(p);
      }
      logs[i * m + k] = acc.log_norm() / word_lengths[k];
    }
  });
  SubadditiveTrace out;
  out.word_lengths = word_lengths;
  std::vector<double> column(static_cast<std::size_t>(samples));
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t i = 0; i < column.size(); ++i) column[i] = logs[i * m + k];
    const SampleStats st = sample_stats(column);
    out.averages.push_back(st.mean);
    out.std_errors.push_back(st.std_error);
  }
  return out;
}

double certificate_from_integrals(double lambda, const std::vector<double>& integrals,
                                  double leaf_length) {
  if (integrals.empty()) throw OutOfRange("certificate needs n >= 1");
  const double mean = pairwise_sum(integrals) / static_cast<double>(integrals.size());
  return std::log(lambda) + mean / leaf_length;
}

LowerBoundCertificate lower_bound_certificate(const Potential& v, const CocycleParams& params,
                                              const HyperbolicToralMap& map, double z, int n,
                                              int resolution) {
  if (n < 1) throw OutOfRange("certificate needs n >= 1");
  const Leaf leaf = leaf_from_z(map, z);
  const LeafAngleField field(AngleKernel{v, params}, map, leaf, n - 1);
  LowerBoundCertificate cert;
  cert.n = n;
  cert.leaf_length = leaf.length;
  cert.integrals.assign(static_cast<std::size_t>(n), 0.0);
  parallel_for(cert.integrals.size(), [&](std::size_t j) {
    cert.integrals[j] = log_cos_integral(field, static_cast<int>(j), resolution);
  });
  cert.value = certificate_from_integrals(params.lambda, cert.integrals, leaf.length);
  return cert;
}

}  // namespace catlyap
