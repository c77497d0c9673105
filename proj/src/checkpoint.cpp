#include "uda/checkpoint.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

namespace uda {

namespace {

using nlohmann::json;

constexpr int kVersion = 1;

json net_to_json(const DenseNet& net) {
  json layers = json::array();
  for (const Layer& l : net.layers) {
    json jl;
    jl["in"] = l.weight.rows();
    jl["out"] = l.weight.cols();
    jl["activation"] = l.activation == Activation::relu ? "relu" : "identity";
    jl["weight"] = std::vector<double>(l.weight.data(), l.weight.data() + l.weight.size());
    jl["bias"] = std::vector<double>(l.bias.data(), l.bias.data() + l.bias.size());
    layers.push_back(std::move(jl));
  }
  return json{{"dropout_rate", net.dropout_rate}, {"layers", std::move(layers)}};
}

DenseNet net_from_json(const json& j) {
  DenseNet net;
  net.dropout_rate = j.at("dropout_rate").get<double>();
  for (const json& jl : j.at("layers")) {
    Layer l;
    const Index in = jl.at("in").get<Index>();
    const Index out = jl.at("out").get<Index>();
    const std::vector<double> w = jl.at("weight").get<std::vector<double>>();
    const std::vector<double> b = jl.at("bias").get<std::vector<double>>();
    if (static_cast<Index>(w.size()) != in * out || static_cast<Index>(b.size()) != out) {
      throw Error("checkpoint: layer payload size does not match dims");
    }
    l.weight.resize(in, out);
    std::copy(w.begin(), w.end(), l.weight.data());
    l.bias.resize(1, out);
    std::copy(b.begin(), b.end(), l.bias.data());
    const std::string act = jl.at("activation").get<std::string>();
    if (act == "relu") {
      l.activation = Activation::relu;
    } else if (act == "identity") {
      l.activation = Activation::identity;
    } else {
      throw Error("checkpoint: unknown activation '" + act + "'");
    }
    net.layers.push_back(std::move(l));
  }
  validate_net(net);
  return net;
}

json read_checkpoint(const std::filesystem::path& path, const std::string& kind) {
  std::ifstream in(path);
  if (!in) throw Error("checkpoint: cannot open " + path.string());
  json j;
  in >> j;
  if (j.value("format", "") != "uda-checkpoint" || j.value("version", 0) != kVersion) {
    throw Error("checkpoint: unsupported format/version in " + path.string());
  }
  if (j.value("kind", "") != kind) {
    throw Error("checkpoint: expected kind '" + kind + "' in " + path.string());
  }
  return j;
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("checkpoint: cannot open " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace

void save_classifier_checkpoint(const std::filesystem::path& path,
                                const ClassifierParams& params) {
  json j{{"format", "uda-checkpoint"},
         {"version", kVersion},
         {"kind", "classifier"},
         {"class_count", params.class_count},
         {"feature_dim", params.feature_dim},
         {"net", net_to_json(params.net)}};
  write_json(path, j);
}

ClassifierParams load_classifier_checkpoint(const std::filesystem::path& path) {
  const json j = read_checkpoint(path, "classifier");
  ClassifierParams params;
  params.class_count = j.at("class_count").get<int>();
  params.feature_dim = j.at("feature_dim").get<int>();
  params.net = net_from_json(j.at("net"));
  return params;
}

void save_norm_vae_checkpoint(const std::filesystem::path& path, const NormVaeParams& params) {
  json j{{"format", "uda-checkpoint"},
         {"version", kVersion},
         {"kind", "norm_vae"},
         {"feature_dim", params.feature_dim},
         {"latent_dim", params.latent_dim},
         {"encoder", net_to_json(params.encoder)},
         {"decoder", net_to_json(params.decoder)}};
  write_json(path, j);
}

NormVaeParams load_norm_vae_checkpoint(const std::filesystem::path& path) {
  const json j = read_checkpoint(path, "norm_vae");
  NormVaeParams params;
  params.feature_dim = j.at("feature_dim").get<int>();
  params.latent_dim = j.at("latent_dim").get<int>();
  params.encoder = net_from_json(j.at("encoder"));
  params.decoder = net_from_json(j.at("decoder"));
  return params;
}

}  // namespace uda
