#include "qaml/report.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qaml/errors.hpp"

namespace qaml {

json record_to_json(const PredictionRecord& r) {
  json j;
  j["probabilities"] = vector_to_json(r.probabilities);
  if (!r.shot_counts.empty()) j["shot_counts"] = r.shot_counts;
  j["predicted"] = r.predicted;
  j["truth"] = r.truth;
  j["p_a"] = r.p_a;
  j["p_b"] = r.p_b;
  if (r.has_certificate) {
    j["certified"] = r.certified;
    j["r_f"] = r.r_f;
    j["r_dp"] = r.r_dp;
  }
  return j;
}

PredictionRecord record_from_json(const json& j) {
  PredictionRecord r;
  try {
    r.probabilities = vector_from_json(j.at("probabilities"));
    if (j.contains("shot_counts")) {
      r.shot_counts = j["shot_counts"].get<std::vector<long>>();
    }
    r.predicted = j.at("predicted").get<int>();
    r.truth = j.at("truth").get<int>();
    r.p_a = j.at("p_a").get<double>();
    r.p_b = j.at("p_b").get<double>();
    if (j.contains("certified")) {
      r.has_certificate = true;
      r.certified = j["certified"].get<bool>();
      r.r_f = j.value("r_f", 0.0);
      r.r_dp = j.value("r_dp", 0.0);
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("prediction record: ") + e.what());
  }
  return r;
}

void write_records_jsonl(const std::vector<PredictionRecord>& records,
                         const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw FormatError("cannot open for writing: " + path);
  for (const PredictionRecord& r : records) {
    f << record_to_json(r).dump() << "\n";
  }
  if (!f) throw FormatError("write failed: " + path);
}

std::vector<PredictionRecord> read_records_jsonl(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw FormatError("cannot open: " + path);
  std::vector<PredictionRecord> records;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError("jsonl parse failure in " + path + ": " + e.what());
    }
    records.push_back(record_from_json(j));
  }
  return records;
}

double accuracy_of(const std::vector<PredictionRecord>& records) {
  if (records.empty()) return 0.0;
  long correct = 0;
  for (const PredictionRecord& r : records) {
    if (r.correct()) ++correct;
  }
  return double(correct) / double(records.size());
}

void ensure_dir(const std::string& path) {
  std::filesystem::create_directories(path);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw FormatError("cannot open for writing: " + path);
  f << content;
  if (!f) throw FormatError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw FormatError("cannot open: " + path);
  std::ostringstream out;
  out << f.rdbuf();
  return out.str();
}

void write_timing_sidecar(const std::string& dir, const std::string& command,
                          double seconds) {
  json j;
  j["command"] = command;
  j["seconds"] = seconds;
  save_json_file(j, dir + "/timing.json");
}

}  // namespace qaml
