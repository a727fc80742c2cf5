#include "topofuse/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "topofuse/error.hpp"

namespace topofuse {

namespace {

constexpr std::array<char, 8> kMagic{'T', 'O', 'P', 'O', 'F', 'C', 'K', 'P'};

template <typename U>
void put_le(std::ostream& out, U value) {
  std::array<char, sizeof(U)> bytes;
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

template <typename U>
U get_le(std::istream& in, const std::filesystem::path& path) {
  std::array<unsigned char, sizeof(U)> bytes;
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw Error("truncated checkpoint: " + path.string());
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(bytes[i]) << (8 * i);
  return value;
}

void put_doubles(std::ostream& out, std::span<const double> values) {
  for (const double v : values) put_le(out, std::bit_cast<std::uint64_t>(v));
}

void get_doubles(std::istream& in, std::span<double> values, const std::filesystem::path& path) {
  for (double& v : values) v = std::bit_cast<double>(get_le<std::uint64_t>(in, path));
}

nlohmann::json layer_shapes(const Mlp& net) {
  auto shapes = nlohmann::json::array();
  for (const auto& s : net.specs()) {
    shapes.push_back({{"in", s.in},
                      {"out", s.out},
                      {"activation", s.activation == Activation::Relu ? "relu" : "identity"},
                      {"dropout", s.dropout}});
  }
  return shapes;
}

std::vector<LayerSpec> specs_from_json(const nlohmann::json& shapes) {
  std::vector<LayerSpec> specs;
  for (const auto& s : shapes) {
    const std::string act = s.at("activation").get<std::string>();
    if (act != "relu" && act != "identity") throw Error("unknown activation in checkpoint: " + act);
    specs.push_back({s.at("in").get<std::size_t>(), s.at("out").get<std::size_t>(),
                     act == "relu" ? Activation::Relu : Activation::Identity, s.at("dropout").get<double>()});
  }
  return specs;
}

}  // namespace

nlohmann::json to_json(const ClassifierConfig& cfg) {
  return {{"mode", to_string(cfg.kind)},
          {"input_dim", cfg.input_dim},
          {"trunk_widths", cfg.trunk_widths},
          {"embedding_dim", cfg.embedding_dim},
          {"fusion_widths", cfg.fusion_widths},
          {"num_classes", cfg.num_classes},
          {"dropout", cfg.dropout}};
}

ClassifierConfig classifier_config_from_json(const nlohmann::json& j) {
  ClassifierConfig cfg;
  cfg.kind = parse_model_kind(j.at("mode").get<std::string>());
  cfg.input_dim = j.at("input_dim").get<std::size_t>();
  cfg.trunk_widths = j.at("trunk_widths").get<std::vector<std::size_t>>();
  cfg.embedding_dim = j.at("embedding_dim").get<std::size_t>();
  cfg.fusion_widths = j.at("fusion_widths").get<std::vector<std::size_t>>();
  cfg.num_classes = j.at("num_classes").get<std::size_t>();
  cfg.dropout = j.at("dropout").get<double>();
  return cfg;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  const Classifier& m = ckpt.model;
  const AdamConfig& a = ckpt.optimizer.config;
  const nlohmann::json header = {
      {"format", "topofuse-checkpoint"},
      {"classifier", to_json(m.config())},
      {"trunk_layers", layer_shapes(m.trunk())},
      {"head_layers", layer_shapes(m.head())},
      {"epoch", ckpt.epoch},
      {"class_names", ckpt.class_names},
      {"adam",
       {{"learning_rate", a.learning_rate},
        {"beta1", a.beta1},
        {"beta2", a.beta2},
        {"epsilon", a.epsilon},
        {"step", ckpt.optimizer.step}}},
      {"run_config", ckpt.run_config},
  };
  const std::string text = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint64_t>(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const Mlp* net : {&m.trunk(), &m.head()})
    for (const auto s : parameter_spans(net->layers())) put_doubles(out, s);
  for (const auto& v : ckpt.optimizer.first_moment) put_doubles(out, v);
  for (const auto& v : ckpt.optimizer.second_moment) put_doubles(out, v);
  if (!out) throw Error("write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + path.string());
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw Error("not a topofuse checkpoint: " + path.string());
  const auto version = get_le<std::uint32_t>(in, path);
  if (version != kCheckpointVersion) {
    throw Error("unsupported checkpoint version " + std::to_string(version) + " in " + path.string());
  }
  const auto length = get_le<std::uint64_t>(in, path);
  std::string text(length, '\0');
  in.read(text.data(), static_cast<std::streamsize>(length));
  if (!in) throw Error("truncated checkpoint header: " + path.string());

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error("corrupt checkpoint header in " + path.string() + ": " + e.what());
  }
  try {
    const ClassifierConfig cfg = classifier_config_from_json(header.at("classifier"));
    Mlp trunk(specs_from_json(header.at("trunk_layers")));
    Mlp head(specs_from_json(header.at("head_layers")));
    Classifier model(cfg, std::move(trunk), std::move(head));
    for (const auto s : model.parameters()) get_doubles(in, s, path);

    const auto& adam = header.at("adam");
    AdamConfig ac{adam.at("learning_rate").get<double>(), adam.at("beta1").get<double>(),
                  adam.at("beta2").get<double>(), adam.at("epsilon").get<double>()};
    AdamState state = AdamState::for_shapes(model.parameter_sizes(), ac);
    state.step = adam.at("step").get<std::uint64_t>();
    for (auto& v : state.first_moment) get_doubles(in, v, path);
    for (auto& v : state.second_moment) get_doubles(in, v, path);
    if (in.peek() != std::char_traits<char>::eof()) throw Error("trailing bytes in checkpoint " + path.string());

    return Checkpoint{std::move(model), std::move(state), header.at("epoch").get<std::size_t>(),
                      header.at("class_names").get<std::vector<std::string>>(), header.at("run_config")};
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed checkpoint header in " + path.string() + ": " + e.what());
  }
}

}  // namespace topofuse
