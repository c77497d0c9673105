#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "uda/dataio.hpp"
#include "uda/losses.hpp"
#include "uda/norm_vae.hpp"

using namespace uda;

namespace {

// Encoder/decoder with all weights zero, so raw heads and decoder output are
// bias-driven and easy to pin.
NormVaeParams bias_only_vae(int d, int dz, const std::vector<double>& encoder_head_bias,
                            const std::vector<double>& decoder_bias) {
  RngStream init(0, "test/init");
  NormVaeParams p = make_norm_vae(d, dz, 4, 0.0, init);
  for (Layer& l : p.encoder.layers) {
    l.weight.setZero();
    l.bias.setZero();
  }
  for (Layer& l : p.decoder.layers) {
    l.weight.setZero();
    l.bias.setZero();
  }
  for (int j = 0; j < 2 * dz; ++j) {
    p.encoder.layers.back().bias(0, j) = encoder_head_bias[static_cast<std::size_t>(j)];
  }
  for (int j = 0; j < d; ++j) {
    p.decoder.layers.back().bias(0, j) = decoder_bias[static_cast<std::size_t>(j)];
  }
  return p;
}

NormVaeParams random_vae(int d, int dz, int hidden, std::uint64_t seed) {
  RngStream init(seed, "test/init");
  return make_norm_vae(d, dz, hidden, 0.0, init);
}

std::vector<FeatureSample> gaussian_class_set(Domain domain, int classes, int per_class, int d,
                                              double offset, std::uint64_t seed) {
  RngStream rng(seed, domain == Domain::source ? "test/src" : "test/tgt");
  std::vector<FeatureSample> out;
  long id = 0;
  for (int c = 0; c < classes; ++c) {
    for (int i = 0; i < per_class; ++i) {
      FeatureSample s;
      s.id = id++;
      s.domain = domain;
      s.label = c;
      s.features.resize(d);
      for (int j = 0; j < d; ++j) {
        s.features(j) = 2.0 * c + offset + 0.3 * rng.normal();
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace

TEST_CASE("encode projects the raw heads onto the unit sphere") {
  const NormVaeParams p = bias_only_vae(3, 2, {3.0, 4.0, -3.0, 4.0}, {0.0, 0.0, 0.0});
  const LatentStats stats = encode(p, Matrix::Zero(1, 3), Domain::source);
  CHECK(stats.mu(0, 0) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(stats.mu(0, 1) == doctest::Approx(0.8).epsilon(1e-12));
  // sigma head passes through |.| first
  CHECK(stats.sigma(0, 0) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(stats.sigma(0, 1) == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("encode outputs are always unit norm with nonnegative sigma") {
  const NormVaeParams p = random_vae(6, 4, 16, 3);
  RngStream rng(5, "test/inputs");
  for (int i = 0; i < 200; ++i) {
    Matrix x(1, 6);
    for (Index j = 0; j < 6; ++j) x(0, j) = rng.normal() * 3.0;
    const Domain d = (i % 2 == 0) ? Domain::source : Domain::target;
    const LatentStats stats = encode(p, x, d);
    CHECK(std::abs(stats.mu.row(0).norm() - 1.0) <= 1e-9);
    CHECK(std::abs(stats.sigma.row(0).norm() - 1.0) <= 1e-9);
    CHECK(stats.sigma.minCoeff() >= 0.0);
  }
}

TEST_CASE("an exactly-zero head raises a degenerate encoding error") {
  const NormVaeParams p = bias_only_vae(3, 2, {0.0, 0.0, 1.0, 1.0}, {0.0, 0.0, 0.0});
  CHECK_THROWS_AS(encode(p, Matrix::Zero(1, 3), Domain::source), DegenerateEncodingError);
}

TEST_CASE("reparameterize reduces to mu for zero noise or zero sigma") {
  Matrix mu(1, 3), sigma(1, 3);
  mu << 0.6, 0.0, 0.8;
  sigma << 0.5, 0.5, 0.7071;
  CHECK(reparameterize_with(mu, sigma, Matrix::Zero(1, 3)) == mu);
  RngStream rng(1, "test/noise");
  CHECK(reparameterize(mu, Matrix::Zero(1, 3), rng) == mu);
}

TEST_CASE("reparameterized samples average to mu") {
  Matrix mu(1, 2), sigma(1, 2);
  mu << 0.6, 0.8;
  sigma << 0.6, 0.8;
  RngStream rng(2, "test/noise");
  const int n = 100000;
  Matrix sum = Matrix::Zero(1, 2);
  for (int i = 0; i < n; ++i) sum += reparameterize(mu, sigma, rng);
  const Matrix mean = sum / static_cast<double>(n);
  for (Index j = 0; j < 2; ++j) {
    const double se = sigma(0, j) / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(mean(0, j) - mu(0, j)) <= 3.0 * se);
  }
}

TEST_CASE("domain conditioning changes the decoder output") {
  const NormVaeParams p = random_vae(5, 3, 8, 11);
  Matrix z(1, 3);
  z << 0.2, -0.5, 0.8;
  const Matrix a = decode(p, z, Domain::source);
  const Matrix b = decode(p, z, Domain::target);
  CHECK((a - b).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("zero decoder weights reproduce the output bias") {
  const NormVaeParams p = bias_only_vae(3, 2, {1.0, 1.0, 1.0, 1.0}, {0.4, -0.2, 1.5});
  Matrix z(2, 2);
  z << 0.1, 0.9, -3.0, 2.0;
  const Matrix out = decode(p, z, Domain::target);
  for (Index r = 0; r < 2; ++r) {
    CHECK(out(r, 0) == 0.4);
    CHECK(out(r, 1) == -0.2);
    CHECK(out(r, 2) == 1.5);
  }
}

TEST_CASE("a perfect autoencoder on identical pairs has zero loss") {
  Matrix x(1, 3);
  x << 0.4, -0.2, 1.5;
  const NormVaeParams p = bias_only_vae(3, 2, {1.0, 1.0, 1.0, 1.0}, {0.4, -0.2, 1.5});
  RngStream noise(0, "test/noise");
  Matrix eps_s(1, 2), eps_t(1, 2);
  eps_s << 0.3, -0.7;
  eps_t << -1.2, 0.5;
  const VaeLossGrads lg = norm_vae_loss(p, x, x, eps_s, eps_t, nullptr);
  CHECK(lg.loss == 0.0);
}

TEST_CASE("the loss is symmetric under a full role swap in a domain-blind net") {
  NormVaeParams p = random_vae(4, 3, 8, 21);
  // Make the last two input rows (the domain code) identical so that source
  // and target conditions act the same.
  auto blind = [](DenseNet& net, int real_inputs) {
    net.layers[0].weight.row(real_inputs + 1) = net.layers[0].weight.row(real_inputs);
  };
  blind(p.encoder, 4);
  blind(p.decoder, 3);

  RngStream data(31, "test/data");
  Matrix xs(2, 4), xt(2, 4), eps_s(2, 3), eps_t(2, 3);
  for (Index k = 0; k < xs.size(); ++k) xs.data()[k] = data.normal();
  for (Index k = 0; k < xt.size(); ++k) xt.data()[k] = data.normal();
  for (Index k = 0; k < eps_s.size(); ++k) eps_s.data()[k] = data.normal();
  for (Index k = 0; k < eps_t.size(); ++k) eps_t.data()[k] = data.normal();

  const double forward = norm_vae_loss(p, xs, xt, eps_s, eps_t, nullptr).loss;
  const double swapped = norm_vae_loss(p, xt, xs, eps_t, eps_s, nullptr).loss;
  CHECK(forward == doctest::Approx(swapped).epsilon(1e-12));
}

TEST_CASE("the loss is exactly the sum of its four reconstruction terms") {
  const NormVaeParams p = random_vae(4, 3, 8, 41);
  RngStream data(51, "test/data");
  Matrix xs(3, 4), xt(3, 4), eps_s(3, 3), eps_t(3, 3);
  for (Index k = 0; k < xs.size(); ++k) xs.data()[k] = data.normal();
  for (Index k = 0; k < xt.size(); ++k) xt.data()[k] = data.normal();
  for (Index k = 0; k < eps_s.size(); ++k) eps_s.data()[k] = data.normal();
  for (Index k = 0; k < eps_t.size(); ++k) eps_t.data()[k] = data.normal();

  const VaeLossGrads lg = norm_vae_loss(p, xs, xt, eps_s, eps_t, nullptr);
  CHECK(lg.loss == lg.terms[0] + lg.terms[1] + lg.terms[2] + lg.terms[3]);
  for (double t : lg.terms) CHECK(t > 0.0);

  // Recompute every term through the public eval path; no hidden regularizer.
  const LatentStats ss = encode(p, xs, Domain::source);
  const LatentStats tt = encode(p, xt, Domain::target);
  const Matrix zs = reparameterize_with(ss.mu, ss.sigma, eps_s);
  const Matrix zt = reparameterize_with(tt.mu, tt.sigma, eps_t);
  const double t0 = mse_loss(decode(p, zs, Domain::source), xs).value;
  const double t1 = mse_loss(decode(p, zt, Domain::target), xt).value;
  const double t2 = mse_loss(decode(p, zt, Domain::source), xs).value;
  const double t3 = mse_loss(decode(p, zs, Domain::target), xt).value;
  CHECK(lg.terms[0] == doctest::Approx(t0).epsilon(1e-12));
  CHECK(lg.terms[1] == doctest::Approx(t1).epsilon(1e-12));
  CHECK(lg.terms[2] == doctest::Approx(t2).epsilon(1e-12));
  CHECK(lg.terms[3] == doctest::Approx(t3).epsilon(1e-12));
}

TEST_CASE("full loss gradients match central finite differences") {
  NormVaeParams p = random_vae(4, 3, 8, 61);
  RngStream data(71, "test/data");
  Matrix xs(2, 4), xt(2, 4), eps_s(2, 3), eps_t(2, 3);
  for (Index k = 0; k < xs.size(); ++k) xs.data()[k] = data.normal();
  for (Index k = 0; k < xt.size(); ++k) xt.data()[k] = data.normal();
  for (Index k = 0; k < eps_s.size(); ++k) eps_s.data()[k] = data.normal();
  for (Index k = 0; k < eps_t.size(); ++k) eps_t.data()[k] = data.normal();

  const VaeLossGrads analytic = norm_vae_loss(p, xs, xt, eps_s, eps_t, nullptr);
  std::vector<Matrix*> params = trainable_params(p.encoder);
  {
    const std::vector<Matrix*> dec = trainable_params(p.decoder);
    params.insert(params.end(), dec.begin(), dec.end());
  }
  auto loss = [&]() { return norm_vae_loss(p, xs, xt, eps_s, eps_t, nullptr).loss; };
  const std::vector<Matrix> numeric = testing::finite_difference_gradients(params, loss);

  std::vector<const Matrix*> analytic_refs = gradient_refs(analytic.encoder);
  {
    const std::vector<const Matrix*> dec = gradient_refs(analytic.decoder);
    analytic_refs.insert(analytic_refs.end(), dec.begin(), dec.end());
  }
  CHECK(testing::max_relative_error(analytic_refs, numeric) < 1e-6);
}

TEST_CASE("pair_samples pairs within classes and skips uncovered sources") {
  const std::vector<FeatureSample> source =
      gaussian_class_set(Domain::source, 3, 5, 4, 0.0, 1);
  RngStream rng(0, "test/pairing");

  SUBCASE("empty selection yields no pairs") {
    CHECK(pair_samples(source, {}, rng).empty());
  }

  SUBCASE("a single selected sample serves all its class") {
    std::vector<FeatureSample> selected =
        gaussian_class_set(Domain::target, 3, 1, 4, 1.0, 2);
    selected.erase(selected.begin());      // drop class 0
    selected.erase(selected.begin() + 1);  // drop class 2, keep class 1 only
    const auto pairs = pair_samples(source, selected, rng);
    REQUIRE(pairs.size() == 5);  // the five class-1 source samples
    for (const CrossDomainPair& pr : pairs) {
      CHECK(pr.label == 1);
      CHECK(pr.target_index == 0);
    }
  }

  SUBCASE("pair histogram equals the pairable source histogram") {
    const std::vector<FeatureSample> selected =
        gaussian_class_set(Domain::target, 2, 3, 4, 1.0, 3);  // classes 0 and 1 only
    const auto pairs = pair_samples(source, selected, rng);
    std::vector<int> hist(3, 0);
    for (const CrossDomainPair& pr : pairs) hist[static_cast<std::size_t>(pr.label)] += 1;
    CHECK(hist[0] == 5);
    CHECK(hist[1] == 5);
    CHECK(hist[2] == 0);
  }
}

TEST_CASE("training is deterministic, skips gracefully, and reduces the loss") {
  const std::vector<FeatureSample> source =
      gaussian_class_set(Domain::source, 2, 12, 6, 0.0, 7);
  const std::vector<FeatureSample> selected =
      gaussian_class_set(Domain::target, 2, 6, 6, 1.5, 8);

  VaeTrainConfig cfg;
  cfg.epochs = 50;
  cfg.batch_size = 8;
  cfg.latent_dim = 4;
  cfg.hidden_dim = 16;
  cfg.seed = 0;

  std::vector<double> losses;
  const auto vae = train_norm_vae(source, selected, cfg, &losses);
  REQUIRE(vae.has_value());
  REQUIRE(losses.size() == 50);
  CHECK(losses[49] < losses[0]);

  const auto again = train_norm_vae(source, selected, cfg);
  REQUIRE(again.has_value());
  for (std::size_t i = 0; i < vae->encoder.layers.size(); ++i) {
    CHECK(vae->encoder.layers[i].weight == again->encoder.layers[i].weight);
    CHECK(vae->encoder.layers[i].bias == again->encoder.layers[i].bias);
  }
  for (std::size_t i = 0; i < vae->decoder.layers.size(); ++i) {
    CHECK(vae->decoder.layers[i].weight == again->decoder.layers[i].weight);
  }

  CHECK_FALSE(train_norm_vae(source, {}, cfg).has_value());

  // disjoint label spaces cannot form pairs either
  std::vector<FeatureSample> alien = selected;
  for (FeatureSample& s : alien) s.label += 10;
  CHECK_FALSE(train_norm_vae(source, alien, cfg).has_value());
}

TEST_CASE("generation is deterministic and same-domain generation reconstructs") {
  const std::vector<FeatureSample> source =
      gaussian_class_set(Domain::source, 2, 12, 6, 0.0, 9);
  const std::vector<FeatureSample> selected =
      gaussian_class_set(Domain::target, 2, 6, 6, 1.0, 10);
  VaeTrainConfig cfg;
  cfg.epochs = 20;
  cfg.batch_size = 8;
  cfg.latent_dim = 4;
  cfg.hidden_dim = 16;
  const auto vae = train_norm_vae(source, selected, cfg);
  REQUIRE(vae.has_value());

  RngStream g1(3, "gen"), g2(3, "gen");
  const FeatureSample a = generate_cross_domain(*vae, source[0], Domain::source,
                                                Domain::target, g1);
  const FeatureSample b = generate_cross_domain(*vae, source[0], Domain::source,
                                                Domain::target, g2);
  CHECK(a.features == b.features);
  CHECK(a.domain == Domain::target);
  CHECK(a.label == source[0].label);
  CHECK(a.synthetic);

  // from == to is the plain sampled reconstruction
  RngStream g3(4, "gen"), g4(4, "gen");
  const FeatureSample recon = generate_cross_domain(*vae, source[0], Domain::source,
                                                    Domain::source, g3);
  const LatentStats stats = encode(*vae, source[0].features.transpose(), Domain::source);
  const Matrix z = reparameterize(stats.mu, stats.sigma, g4);
  const Matrix manual = decode(*vae, z, Domain::source);
  CHECK(recon.features.transpose() == manual.row(0));

  CHECK_THROWS_AS(
      generate_cross_domain(NormVaeParams{}, source[0], Domain::source, Domain::target, g1),
      UsageError);
}

TEST_CASE("trained mu embeddings reconstruct held-out sources within half the norm") {
  BenchmarkSpec spec;
  spec.class_count = 3;
  spec.dim = 8;
  spec.source_per_class = {30};
  spec.target_per_class = {30};
  spec.centroid_scale = 3.0;
  spec.spread = 0.4;
  spec.shift_translation = 1.0;
  spec.seed = 0;
  Benchmark bench = generate_benchmark(spec);

  // hold out the last 5 source samples of each class
  std::vector<FeatureSample> train_source, held_out;
  for (const FeatureSample& s : bench.source.samples) {
    if (s.id % 30 < 25) {
      train_source.push_back(s);
    } else {
      held_out.push_back(s);
    }
  }
  std::vector<FeatureSample> selected;  // stand-in for S_k carrying correct labels
  for (std::size_t i = 0; i < bench.target.samples.size(); i += 3) {
    FeatureSample t = bench.target.samples[i];
    t.label = bench.target_truth[i];
    selected.push_back(std::move(t));
  }

  VaeTrainConfig cfg;
  cfg.epochs = 200;
  cfg.batch_size = 16;
  cfg.latent_dim = 8;
  cfg.hidden_dim = 64;
  cfg.learning_rate = 3e-3;
  cfg.seed = 0;
  const auto vae = train_norm_vae(train_source, selected, cfg);
  REQUIRE(vae.has_value());

  for (const FeatureSample& s : held_out) {
    const LatentStats stats = encode(*vae, s.features.transpose(), Domain::source);
    const Matrix xhat = decode(*vae, stats.mu, Domain::source);
    const double rel = (xhat.row(0).transpose() - s.features).norm() / s.features.norm();
    CHECK(rel < 0.5);
  }
}
