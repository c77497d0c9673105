#include "uda/norm_vae.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <utility>

#include "uda/adam.hpp"
#include "uda/losses.hpp"

namespace uda {

namespace {

Matrix with_domain_code(const Matrix& x, Domain domain) {
  Matrix out(x.rows(), x.cols() + 2);
  out.leftCols(x.cols()) = x;
  out.col(x.cols()).setConstant(domain == Domain::source ? 1.0 : 0.0);
  out.col(x.cols() + 1).setConstant(domain == Domain::target ? 1.0 : 0.0);
  return out;
}

// Row-wise projection onto the unit sphere; norms are kept for the backward
// pass. Rows of exactly zero norm cannot be projected.
Matrix normalize_rows(const Matrix& raw, Vector& norms) {
  norms.resize(raw.rows());
  Matrix out(raw.rows(), raw.cols());
  for (Index r = 0; r < raw.rows(); ++r) {
    const double n = raw.row(r).norm();
    if (n == 0.0) {
      throw DegenerateEncodingError("encoder head is the zero vector; cannot normalize");
    }
    norms(r) = n;
    out.row(r) = raw.row(r) / n;
  }
  return out;
}

// d(u/||u||) applied to upstream: (g - (g . y) y) / ||u||, per row.
Matrix normalize_rows_backward(const Matrix& g, const Matrix& normalized, const Vector& norms) {
  Matrix out(g.rows(), g.cols());
  for (Index r = 0; r < g.rows(); ++r) {
    const double dot = g.row(r).dot(normalized.row(r));
    out.row(r) = (g.row(r) - dot * normalized.row(r)) / norms(r);
  }
  return out;
}

struct EncodeActivations {
  ForwardTape tape;
  Matrix raw_mu, raw_sigma;
  Matrix abs_sigma;
  Matrix mu, sigma;
  Vector mu_norm, sigma_norm;
};

EncodeActivations encode_forward(const NormVaeParams& params, const Matrix& x, Domain domain,
                                 bool train_mode, RngStream* dropout_rng) {
  if (x.cols() != params.feature_dim) {
    throw ShapeError("encode: input dim does not match norm-VAE feature dim");
  }
  EncodeActivations act;
  const Matrix raw = net_forward(params.encoder, with_domain_code(x, domain), train_mode,
                                 dropout_rng, train_mode ? &act.tape : nullptr);
  const int dz = params.latent_dim;
  act.raw_mu = raw.leftCols(dz);
  act.raw_sigma = raw.rightCols(dz);
  act.abs_sigma = act.raw_sigma.cwiseAbs();
  act.mu = normalize_rows(act.raw_mu, act.mu_norm);
  act.sigma = normalize_rows(act.abs_sigma, act.sigma_norm);
  return act;
}

// Gradient w.r.t. the raw encoder output from gradients on (mu, sigma).
Matrix encode_backward_to_raw(const EncodeActivations& act, const Matrix& d_mu,
                              const Matrix& d_sigma) {
  const Matrix d_raw_mu = normalize_rows_backward(d_mu, act.mu, act.mu_norm);
  Matrix d_abs_sigma = normalize_rows_backward(d_sigma, act.sigma, act.sigma_norm);
  // through |.|: sign of the raw head, with sign(0) = 0
  Matrix d_raw_sigma =
      d_abs_sigma.cwiseProduct(act.raw_sigma.unaryExpr([](double v) {
        return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
      }));
  Matrix d_raw(d_raw_mu.rows(), d_raw_mu.cols() + d_raw_sigma.cols());
  d_raw.leftCols(d_raw_mu.cols()) = d_raw_mu;
  d_raw.rightCols(d_raw_sigma.cols()) = d_raw_sigma;
  return d_raw;
}

Matrix draw_noise(Index rows, Index cols, RngStream& rng) {
  Matrix eps(rows, cols);
  for (Index k = 0; k < eps.size(); ++k) eps.data()[k] = rng.normal();
  return eps;
}

}  // namespace

NormVaeParams make_norm_vae(int feature_dim, int latent_dim, int hidden_dim,
                            double dropout_rate, RngStream& init_rng) {
  if (feature_dim <= 0 || latent_dim <= 0 || hidden_dim <= 0) {
    throw UsageError("make_norm_vae: dims must be positive");
  }
  NormVaeParams params;
  params.feature_dim = feature_dim;
  params.latent_dim = latent_dim;
  params.encoder = make_mlp({feature_dim + 2, hidden_dim, 2 * latent_dim}, Activation::relu,
                            Activation::identity, dropout_rate, init_rng);
  params.decoder = make_mlp({latent_dim + 2, hidden_dim, feature_dim}, Activation::relu,
                            Activation::identity, dropout_rate, init_rng);
  return params;
}

LatentStats encode(const NormVaeParams& params, const Matrix& x, Domain domain) {
  EncodeActivations act = encode_forward(params, x, domain, /*train_mode=*/false, nullptr);
  return LatentStats{std::move(act.mu), std::move(act.sigma)};
}

Matrix reparameterize(const Matrix& mu, const Matrix& sigma, RngStream& rng) {
  return reparameterize_with(mu, sigma, draw_noise(mu.rows(), mu.cols(), rng));
}

Matrix reparameterize_with(const Matrix& mu, const Matrix& sigma, const Matrix& eps) {
  if (mu.rows() != sigma.rows() || mu.cols() != sigma.cols() || mu.rows() != eps.rows() ||
      mu.cols() != eps.cols()) {
    throw ShapeError("reparameterize: mu/sigma/eps shapes differ");
  }
  return mu + sigma.cwiseProduct(eps);
}

Matrix decode(const NormVaeParams& params, const Matrix& z, Domain domain) {
  if (z.cols() != params.latent_dim) {
    throw ShapeError("decode: latent dim does not match norm-VAE");
  }
  return net_forward(params.decoder, with_domain_code(z, domain), /*train_mode=*/false);
}

std::vector<CrossDomainPair> pair_samples(const std::vector<FeatureSample>& source_set,
                                          const std::vector<FeatureSample>& selected_target,
                                          RngStream& rng) {
  std::map<int, std::vector<std::size_t>> buckets;
  for (std::size_t i : canonical_order(selected_target)) {
    const FeatureSample& t = selected_target[i];
    if (t.label == kUnlabelled) {
      throw UsageError("pair_samples: selected target sample without pseudo-label");
    }
    buckets[t.label].push_back(i);
  }
  std::vector<CrossDomainPair> pairs;
  for (std::size_t i : canonical_order(source_set)) {
    const FeatureSample& s = source_set[i];
    auto it = buckets.find(s.label);
    if (it == buckets.end()) continue;
    const std::vector<std::size_t>& bucket = it->second;
    const std::size_t pick = static_cast<std::size_t>(rng.below(bucket.size()));
    pairs.push_back(CrossDomainPair{i, bucket[pick], s.label});
  }
  return pairs;
}

VaeLossGrads norm_vae_loss(const NormVaeParams& params, const Matrix& x_source,
                           const Matrix& x_target, const Matrix& eps_s, const Matrix& eps_t,
                           RngStream* dropout_rng) {
  if (x_source.rows() != x_target.rows() || x_source.rows() == 0) {
    throw UsageError("norm_vae_loss: batch must be non-empty source/target pairs");
  }
  if (x_source.cols() != params.feature_dim || x_target.cols() != params.feature_dim) {
    throw ShapeError("norm_vae_loss: feature dim mismatch");
  }

  EncodeActivations enc_s =
      encode_forward(params, x_source, Domain::source, /*train_mode=*/true, dropout_rng);
  EncodeActivations enc_t =
      encode_forward(params, x_target, Domain::target, /*train_mode=*/true, dropout_rng);

  const Matrix z_s = reparameterize_with(enc_s.mu, enc_s.sigma, eps_s);
  const Matrix z_t = reparameterize_with(enc_t.mu, enc_t.sigma, eps_t);

  const int dz = params.latent_dim;
  struct Branch {
    ForwardTape tape;
    Matrix output;
  };
  auto run_decoder = [&](const Matrix& z, Domain d) {
    Branch b;
    b.output = net_forward(params.decoder, with_domain_code(z, d), /*train_mode=*/true,
                           dropout_rng, &b.tape);
    return b;
  };
  Branch dec_ss = run_decoder(z_s, Domain::source);  // x_hat^s
  Branch dec_st = run_decoder(z_s, Domain::target);  // x_hat^st
  Branch dec_tt = run_decoder(z_t, Domain::target);  // x_hat^t
  Branch dec_ts = run_decoder(z_t, Domain::source);  // x_hat^ts

  const LossGrad recon_s = mse_loss(dec_ss.output, x_source);
  const LossGrad recon_t = mse_loss(dec_tt.output, x_target);
  const LossGrad cross_ts = mse_loss(dec_ts.output, x_source);
  const LossGrad cross_st = mse_loss(dec_st.output, x_target);

  VaeLossGrads out;
  out.terms = {recon_s.value, recon_t.value, cross_ts.value, cross_st.value};
  out.loss = recon_s.value + recon_t.value + cross_ts.value + cross_st.value;

  NetGradients g_ss = net_backward(params.decoder, dec_ss.tape, recon_s.grad);
  NetGradients g_st = net_backward(params.decoder, dec_st.tape, cross_st.grad);
  NetGradients g_tt = net_backward(params.decoder, dec_tt.tape, recon_t.grad);
  NetGradients g_ts = net_backward(params.decoder, dec_ts.tape, cross_ts.grad);

  // Latent gradients: both decodes of z feed back; drop the domain-code columns.
  Matrix dz_s = g_ss.input.leftCols(dz) + g_st.input.leftCols(dz);
  Matrix dz_t = g_tt.input.leftCols(dz) + g_ts.input.leftCols(dz);

  out.decoder = std::move(g_ss);
  accumulate(out.decoder, g_st);
  accumulate(out.decoder, g_tt);
  accumulate(out.decoder, g_ts);

  // z = mu + sigma .* eps, so d_mu = dz and d_sigma = dz .* eps
  NetGradients enc_grad_s = net_backward(
      params.encoder, enc_s.tape,
      encode_backward_to_raw(enc_s, dz_s, dz_s.cwiseProduct(eps_s)));
  NetGradients enc_grad_t = net_backward(
      params.encoder, enc_t.tape,
      encode_backward_to_raw(enc_t, dz_t, dz_t.cwiseProduct(eps_t)));
  out.encoder = std::move(enc_grad_s);
  accumulate(out.encoder, enc_grad_t);
  return out;
}

VaeLossGrads norm_vae_loss(const NormVaeParams& params,
                           const std::vector<FeatureSample>& source_set,
                           const std::vector<FeatureSample>& selected_target,
                           const std::vector<CrossDomainPair>& pairs, RngStream& noise_rng,
                           RngStream* dropout_rng) {
  if (pairs.empty()) throw UsageError("norm_vae_loss: empty pair batch");
  const Index n = static_cast<Index>(pairs.size());
  Matrix xs(n, params.feature_dim);
  Matrix xt(n, params.feature_dim);
  for (Index r = 0; r < n; ++r) {
    const CrossDomainPair& p = pairs[static_cast<std::size_t>(r)];
    const FeatureSample& s = source_set.at(p.source_index);
    const FeatureSample& t = selected_target.at(p.target_index);
    if (s.label != t.label || s.label != p.label) {
      throw UsageError("norm_vae_loss: pair classes do not match");
    }
    xs.row(r) = s.features.transpose();
    xt.row(r) = t.features.transpose();
  }
  const Matrix eps_s = draw_noise(n, params.latent_dim, noise_rng);
  const Matrix eps_t = draw_noise(n, params.latent_dim, noise_rng);
  return norm_vae_loss(params, xs, xt, eps_s, eps_t, dropout_rng);
}

std::optional<NormVaeParams> train_norm_vae(const std::vector<FeatureSample>& source_set,
                                            const std::vector<FeatureSample>& selected_target,
                                            const VaeTrainConfig& config,
                                            std::vector<double>* epoch_losses) {
  if (source_set.empty()) throw UsageError("train_norm_vae: empty source set");
  if (config.epochs <= 0 || config.batch_size <= 0 || config.learning_rate <= 0.0) {
    throw UsageError("train_norm_vae: epochs, batch_size and learning_rate must be positive");
  }

  RngStream pairing_rng(config.seed, "vae/pairing");
  RngStream shuffle_rng(config.seed, "vae/shuffle");
  RngStream noise_rng(config.seed, "vae/noise");
  RngStream dropout_rng(config.seed, "vae/dropout");

  // No shared class means no formable pair: signal the caller to skip.
  {
    bool overlap = false;
    for (const FeatureSample& t : selected_target) {
      for (const FeatureSample& s : source_set) {
        if (s.label == t.label) {
          overlap = true;
          break;
        }
      }
      if (overlap) break;
    }
    if (!overlap) return std::nullopt;
  }

  const int d = static_cast<int>(source_set.front().features.size());
  RngStream init_rng(config.seed, "vae/init");
  NormVaeParams params =
      make_norm_vae(d, config.latent_dim, config.hidden_dim, config.dropout_rate, init_rng);

  std::vector<Matrix*> param_refs = trainable_params(params.encoder);
  {
    std::vector<Matrix*> dec_refs = trainable_params(params.decoder);
    param_refs.insert(param_refs.end(), dec_refs.begin(), dec_refs.end());
  }
  AdamState adam = make_adam_state(param_refs, AdamConfig{config.learning_rate});

  if (epoch_losses) epoch_losses->clear();
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::vector<CrossDomainPair> pairs = pair_samples(source_set, selected_target, pairing_rng);
    shuffle_rng.shuffle(pairs);
    double loss_sum = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < pairs.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t stop =
          std::min(pairs.size(), start + static_cast<std::size_t>(config.batch_size));
      const std::vector<CrossDomainPair> batch(pairs.begin() + static_cast<long>(start),
                                               pairs.begin() + static_cast<long>(stop));
      VaeLossGrads lg =
          norm_vae_loss(params, source_set, selected_target, batch, noise_rng, &dropout_rng);
      std::vector<const Matrix*> grad_refs = gradient_refs(lg.encoder);
      {
        std::vector<const Matrix*> dec_refs = gradient_refs(lg.decoder);
        grad_refs.insert(grad_refs.end(), dec_refs.begin(), dec_refs.end());
      }
      adam_step(param_refs, grad_refs, adam);
      loss_sum += lg.loss * static_cast<double>(batch.size());
      seen += batch.size();
    }
    if (epoch_losses) epoch_losses->push_back(loss_sum / static_cast<double>(seen));
  }
  return params;
}

FeatureSample generate_cross_domain(const NormVaeParams& params, const FeatureSample& sample,
                                    Domain from_domain, Domain to_domain, RngStream& rng) {
  if (!params.trained()) throw UsageError("generate_cross_domain: untrained norm-VAE");
  Matrix x = sample.features.transpose();
  const LatentStats stats = encode(params, x, from_domain);
  const Matrix z = reparameterize(stats.mu, stats.sigma, rng);
  const Matrix out = decode(params, z, to_domain);
  FeatureSample synthetic;
  synthetic.id = sample.id;
  synthetic.domain = to_domain;
  synthetic.label = sample.label;
  synthetic.synthetic = true;
  synthetic.features = out.row(0).transpose();
  return synthetic;
}

}  // namespace uda
