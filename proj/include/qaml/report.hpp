#pragma once

#include <string>
#include <vector>

#include "qaml/records.hpp"
#include "qaml/serde.hpp"

namespace qaml {

// Report files are deterministic for a fixed config and seed: JSON objects
// serialize with sorted keys and shortest round-trip numbers, so reruns are
// byte-identical. Wall-clock timings go to a separate sidecar file that is
// excluded from that guarantee.

json record_to_json(const PredictionRecord& r);
PredictionRecord record_from_json(const json& j);  // FormatError

// One compact JSON object per line.
void write_records_jsonl(const std::vector<PredictionRecord>& records,
                         const std::string& path);
std::vector<PredictionRecord> read_records_jsonl(const std::string& path);

double accuracy_of(const std::vector<PredictionRecord>& records);

void ensure_dir(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);  // FormatError

void write_timing_sidecar(const std::string& dir, const std::string& command,
                          double seconds);

}  // namespace qaml
