#include "tacsim/dataset.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "tacsim/error.hpp"

namespace tacsim {

using ojson = nlohmann::ordered_json;

std::string sample_to_json_line(const Sample& s) {
  ojson doc;
  doc["task"] = std::string(to_string(s.task));
  doc["episode"] = s.episode;
  doc["step"] = s.step;
  doc["rep_kind"] = std::string(to_string(s.rep_kind));
  doc["rep"] = s.rep;
  doc["label"] = s.label;
  doc["params"] = {{"f_push", s.params.f_push},
                   {"f_pull", s.params.f_pull},
                   {"damping", s.params.damping}};
  doc["seed"] = s.seed;
  return doc.dump();
}

Sample sample_from_json_line(const std::string& line) {
  Sample s;
  try {
    const ojson doc = ojson::parse(line);
    s.task = parse_task(doc.at("task").get<std::string>());
    s.episode = doc.at("episode").get<long>();
    s.step = doc.at("step").get<int>();
    s.rep_kind = parse_rep_kind(doc.at("rep_kind").get<std::string>());
    s.rep = doc.at("rep").get<std::vector<double>>();
    s.label = doc.at("label").get<std::vector<double>>();
    const ojson& p = doc.at("params");
    s.params.f_push = p.at("f_push").get<double>();
    s.params.f_pull = p.at("f_pull").get<double>();
    s.params.damping = p.at("damping").get<double>();
    s.seed = doc.at("seed").get<std::uint64_t>();
  } catch (const ojson::exception& e) {
    fail(ErrorKind::Schema, std::string("dataset line: ") + e.what());
  } catch (const Error& e) {
    fail(ErrorKind::Schema, std::string("dataset line: ") + e.what());
  }
  return s;
}

void validate_sample(const Sample& s, std::size_t pin_count) {
  const std::size_t want_rep = rep_length(s.rep_kind, pin_count);
  if (s.rep.size() != want_rep)
    fail(ErrorKind::Schema, "sample " + std::to_string(s.episode) + ": rep length " +
                                std::to_string(s.rep.size()) + " != " + std::to_string(want_rep));
  if (s.label.size() != label_width(s.task))
    fail(ErrorKind::Schema, "sample " + std::to_string(s.episode) + ": label width " +
                                std::to_string(s.label.size()) + " != " +
                                std::to_string(label_width(s.task)));
  for (double v : s.rep)
    if (!std::isfinite(v)) fail(ErrorKind::Schema, "sample: non-finite representation value");
  for (double v : s.label)
    if (!std::isfinite(v)) fail(ErrorKind::Schema, "sample: non-finite label value");
  if (s.rep_kind == RepKind::Threshold)
    for (double v : s.rep)
      if (v != 0.0 && v != 1.0) fail(ErrorKind::Schema, "sample: threshold values must be 0 or 1");
}

void write_dataset(const std::filesystem::path& path, std::span<const Sample> samples) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  for (const Sample& s : samples) out << sample_to_json_line(s) << '\n';
  if (!out) fail(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

std::vector<Sample> read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open dataset '" + path.string() + "'");
  std::vector<Sample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(sample_from_json_line(line));
    } catch (const Error& e) {
      fail(ErrorKind::Schema, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace tacsim
