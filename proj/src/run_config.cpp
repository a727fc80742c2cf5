#include "topofuse/run_config.hpp"

#include <charconv>

#include "CLI11.hpp"
#include "topofuse/error.hpp"

namespace topofuse {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\"'");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\"'");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (const char c : s) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else if (c != '[' && c != ']') {
      cur += c;
    }
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw Error("invalid value '" + raw + "' for " + key);
  }
  return out;
}

std::vector<std::size_t> parse_widths(const std::string& key, const std::string& raw) {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(raw)) {
    const auto w = parse_number<std::size_t>(key, item);
    if (w == 0) throw Error(key + " entries must be positive");
    out.push_back(w);
  }
  if (out.empty()) throw Error(key + " must list at least one width");
  return out;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key == "data.root") dataset_root = trim(value);
  else if (key == "data.side") image_side = parse_number<std::size_t>(key, value);
  else if (key == "data.classes") class_names = split_list(value);
  else if (key == "data.num_classes") num_classes = parse_number<std::size_t>(key, value);
  else if (key == "features.bins") bins.count = parse_number<std::size_t>(key, value);
  else if (key == "features.lo") bins.lo = parse_number<double>(key, value);
  else if (key == "features.hi") bins.hi = parse_number<double>(key, value);
  else if (key == "split.test_fraction") split.test_fraction = parse_number<double>(key, value);
  else if (key == "split.validation_fraction") split.validation_fraction = parse_number<double>(key, value);
  else if (key == "split.seed") split.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "model.trunk_widths") trunk_widths = parse_widths(key, value);
  else if (key == "model.fusion_widths") fusion_widths = parse_widths(key, value);
  else if (key == "model.embedding_dim") embedding_dim = parse_number<std::size_t>(key, value);
  else if (key == "model.dropout") dropout = parse_number<double>(key, value);
  else if (key == "train.batch_size") train.batch_size = parse_number<std::size_t>(key, value);
  else if (key == "train.epochs") train.epochs = parse_number<std::size_t>(key, value);
  else if (key == "train.seed") train.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "train.learning_rate") train.adam.learning_rate = parse_number<double>(key, value);
  else if (key == "train.embeddings") embeddings_path = trim(value);
  else if (key == "synth.per_class") synth.per_class = parse_number<std::size_t>(key, value);
  else if (key == "synth.side") synth.side = parse_number<std::size_t>(key, value);
  else if (key == "synth.seed") synth.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "synth.noise") synth.noise = parse_number<int>(key, value);
  else if (key == "synth.embedding_noise") synth.embedding_noise = parse_number<double>(key, value);
  else throw Error("unknown configuration key: " + key);
}

ClassifierConfig RunConfig::classifier(ModelKind kind) const {
  ClassifierConfig c;
  c.kind = kind;
  c.input_dim = 2 * bins.count;
  c.trunk_widths = trunk_widths;
  c.embedding_dim = embedding_dim;
  c.fusion_widths = fusion_widths;
  c.num_classes = num_classes;
  c.dropout = dropout;
  return c;
}

ScanOptions RunConfig::scan_options() const {
  ScanOptions o;
  o.side = image_side;
  o.expected_classes = class_names;
  o.num_classes = num_classes;
  return o;
}

nlohmann::json RunConfig::to_json() const {
  return {
      {"data", {{"root", dataset_root}, {"side", image_side}, {"classes", class_names}, {"num_classes", num_classes}}},
      {"features", {{"bins", bins.count}, {"lo", bins.lo}, {"hi", bins.hi}}},
      {"split",
       {{"test_fraction", split.test_fraction}, {"validation_fraction", split.validation_fraction}, {"seed", split.seed}}},
      {"model",
       {{"trunk_widths", trunk_widths},
        {"fusion_widths", fusion_widths},
        {"embedding_dim", embedding_dim},
        {"dropout", dropout}}},
      {"train",
       {{"batch_size", train.batch_size},
        {"epochs", train.epochs},
        {"seed", train.seed},
        {"learning_rate", train.adam.learning_rate},
        {"beta1", train.adam.beta1},
        {"beta2", train.adam.beta2},
        {"epsilon", train.adam.epsilon},
        {"embeddings", embeddings_path}}},
      {"synth",
       {{"per_class", synth.per_class},
        {"side", synth.side},
        {"seed", synth.seed},
        {"noise", synth.noise},
        {"embedding_noise", synth.embedding_noise}}},
  };
}

RunConfig load_run_config(const std::filesystem::path& file, const std::vector<std::string>& overrides) {
  RunConfig cfg;
  if (!file.empty()) {
    std::vector<CLI::ConfigItem> items;
    try {
      items = CLI::ConfigINI().from_file(file.string());
    } catch (const CLI::Error& e) {
      throw Error("cannot read config " + file.string() + ": " + e.what());
    }
    for (const auto& item : items) {
      if (item.name == "++" || item.name == "--") continue;  // section markers
      std::string value;
      for (std::size_t i = 0; i < item.inputs.size(); ++i) value += (i ? "," : "") + item.inputs[i];
      cfg.set(item.fullname(), value);
    }
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw Error("override must look like section.key=value: " + o);
    cfg.set(trim(o.substr(0, eq)), o.substr(eq + 1));
  }
  cfg.bins.validate();
  return cfg;
}

}  // namespace topofuse
