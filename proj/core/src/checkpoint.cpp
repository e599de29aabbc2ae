#include "tacsim/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tacsim/error.hpp"

namespace tacsim {

using ojson = nlohmann::ordered_json;

std::string checkpoint_to_json(const MlpModel& model) {
  ojson doc;
  doc["version"] = kCheckpointVersion;
  doc["task"] = model.task ? ojson(std::string(to_string(*model.task))) : ojson(nullptr);
  doc["rep_kind"] = model.rep_kind ? ojson(std::string(to_string(*model.rep_kind))) : ojson(nullptr);
  doc["layer_widths"] = model.arch.widths();
  ojson head = ojson::array();
  for (const HeadSegment& s : model.arch.head)
    head.push_back({{"activation", std::string(to_string(s.activation))}, {"width", s.width}});
  doc["head"] = std::move(head);
  ojson layers = ojson::array();
  for (const DenseLayer& l : model.layers) {
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(l.weights.size()));
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) w.push_back(l.weights(r, c));
    layers.push_back({{"weights", std::move(w)},
                      {"bias", std::vector<double>(l.bias.data(), l.bias.data() + l.bias.size())}});
  }
  doc["layers"] = std::move(layers);
  auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  doc["input_mean"] = vec(model.input_mean);
  doc["input_scale"] = vec(model.input_scale);
  return doc.dump();
}

MlpModel checkpoint_from_json(const std::string& text) {
  MlpModel model;
  try {
    const ojson doc = ojson::parse(text);
    const int version = doc.at("version").get<int>();
    if (version != kCheckpointVersion)
      fail(ErrorKind::Schema, "checkpoint: unsupported version " + std::to_string(version));
    if (!doc.at("task").is_null()) model.task = parse_task(doc["task"].get<std::string>());
    if (!doc.at("rep_kind").is_null())
      model.rep_kind = parse_rep_kind(doc["rep_kind"].get<std::string>());
    const auto widths = doc.at("layer_widths").get<std::vector<int>>();
    if (widths.size() < 2) fail(ErrorKind::Schema, "checkpoint: need at least two layer widths");
    model.arch.input_width = widths.front();
    model.arch.hidden.assign(widths.begin() + 1, widths.end() - 1);
    for (const auto& s : doc.at("head"))
      model.arch.head.push_back({parse_activation(s.at("activation").get<std::string>()),
                                 s.at("width").get<int>()});
    if (model.arch.output_width() != widths.back())
      fail(ErrorKind::Schema, "checkpoint: head widths do not sum to the output width");
    const ojson& layers = doc.at("layers");
    if (layers.size() != widths.size() - 1)
      fail(ErrorKind::Schema, "checkpoint: layer count does not match layer_widths");
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
      const auto w = layers[l].at("weights").get<std::vector<double>>();
      const auto b = layers[l].at("bias").get<std::vector<double>>();
      const int rows = widths[l + 1];
      const int cols = widths[l];
      if (w.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) ||
          b.size() != static_cast<std::size_t>(rows))
        fail(ErrorKind::Schema, "checkpoint: layer " + std::to_string(l) + " has the wrong shape");
      DenseLayer layer{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)};
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
          layer.weights(r, c) = w[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) +
                                  static_cast<std::size_t>(c)];
      for (int r = 0; r < rows; ++r) layer.bias(r) = b[static_cast<std::size_t>(r)];
      model.layers.push_back(std::move(layer));
    }
    const auto mean = doc.at("input_mean").get<std::vector<double>>();
    const auto scale = doc.at("input_scale").get<std::vector<double>>();
    if (mean.size() != scale.size() ||
        (!mean.empty() && mean.size() != static_cast<std::size_t>(widths.front())))
      fail(ErrorKind::Schema, "checkpoint: input standardisation has the wrong width");
    model.input_mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
    model.input_scale = Eigen::Map<const Eigen::VectorXd>(scale.data(), static_cast<Eigen::Index>(scale.size()));
  } catch (const ojson::exception& e) {
    fail(ErrorKind::Schema, std::string("checkpoint: ") + e.what());
  }
  return model;
}

void save_checkpoint(const MlpModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  out << checkpoint_to_json(model) << '\n';
  if (!out) fail(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

MlpModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open checkpoint '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return checkpoint_from_json(text.str());
}

}  // namespace tacsim
