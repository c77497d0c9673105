#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "uda/net.hpp"
#include "uda/rng.hpp"
#include "uda/types.hpp"

namespace uda {

// Raised when an encoder head is exactly the zero vector and cannot be
// projected onto the unit sphere.
class DegenerateEncodingError : public Error {
 public:
  using Error::Error;
};

// Domain-conditioned autoencoder with unit-L2 latent statistics. The encoder
// maps [x | domain one-hot] through one hidden layer to a 2*d_z output split
// into raw mu/sigma heads; the decoder maps [z | domain one-hot] back to d_x.
struct NormVaeParams {
  DenseNet encoder;
  DenseNet decoder;
  int feature_dim = 0;
  int latent_dim = 0;

  bool trained() const { return !encoder.layers.empty() && !decoder.layers.empty(); }
};

struct VaeTrainConfig {
  int epochs = 50;
  int batch_size = 64;
  double learning_rate = 1e-3;
  int latent_dim = 64;
  int hidden_dim = 512;
  double dropout_rate = 0.5;
  std::uint64_t seed = 0;
};

NormVaeParams make_norm_vae(int feature_dim, int latent_dim, int hidden_dim,
                            double dropout_rate, RngStream& init_rng);

struct LatentStats {
  Matrix mu;     // rows on the unit sphere
  Matrix sigma;  // rows nonnegative and on the unit sphere
};

// Per-sample latent draw.
struct LatentCode {
  Vector mu;
  Vector sigma;
  Vector z;
};

// Eval-mode encoding (no dropout): the raw mu head is L2-normalized row-wise
// and the raw sigma head passes through |.| before normalization.
LatentStats encode(const NormVaeParams& params, const Matrix& x, Domain domain);

// z = mu + sigma .* eps with eps drawn i.i.d. standard normal.
Matrix reparameterize(const Matrix& mu, const Matrix& sigma, RngStream& rng);
Matrix reparameterize_with(const Matrix& mu, const Matrix& sigma, const Matrix& eps);

// Eval-mode decoding of latent rows under the given domain condition.
Matrix decode(const NormVaeParams& params, const Matrix& z, Domain domain);

// Indices into the source set and the selected pseudo-labelled set.
struct CrossDomainPair {
  std::size_t source_index = 0;
  std::size_t target_index = 0;
  int label = 0;
};

// For each source sample whose class occurs in selected_target, pairs it with
// a uniformly drawn selected sample of that class; other sources are skipped.
std::vector<CrossDomainPair> pair_samples(const std::vector<FeatureSample>& source_set,
                                          const std::vector<FeatureSample>& selected_target,
                                          RngStream& rng);

struct VaeLossGrads {
  double loss = 0.0;
  // within-domain source, within-domain target, cross target->source,
  // cross source->target; loss is their exact sum (no KL term).
  std::array<double, 4> terms{};
  NetGradients encoder;
  NetGradients decoder;
};

// Four-term reconstruction loss on a batch of same-class pairs. Each input
// sample is encoded under its own domain, sampled once (eps_s/eps_t), and
// decoded under both domain conditions; the four mean squared errors are
// summed. dropout_rng == nullptr disables dropout (used by gradient checks).
VaeLossGrads norm_vae_loss(const NormVaeParams& params, const Matrix& x_source,
                           const Matrix& x_target, const Matrix& eps_s, const Matrix& eps_t,
                           RngStream* dropout_rng);

// Convenience overload over materialized pairs; draws eps from noise_rng.
VaeLossGrads norm_vae_loss(const NormVaeParams& params,
                           const std::vector<FeatureSample>& source_set,
                           const std::vector<FeatureSample>& selected_target,
                           const std::vector<CrossDomainPair>& pairs, RngStream& noise_rng,
                           RngStream* dropout_rng);

// Fresh initialization, then Adam on re-paired shuffled batches. Returns
// nullopt when no class is shared between the two sets (nothing to train on).
std::optional<NormVaeParams> train_norm_vae(const std::vector<FeatureSample>& source_set,
                                            const std::vector<FeatureSample>& selected_target,
                                            const VaeTrainConfig& config,
                                            std::vector<double>* epoch_losses = nullptr);

// decode(reparameterize(encode(x, from)), to): a synthetic sample in
// to_domain carrying the class label of x. Dropout stays off.
FeatureSample generate_cross_domain(const NormVaeParams& params, const FeatureSample& sample,
                                    Domain from_domain, Domain to_domain, RngStream& rng);

}  // namespace uda
