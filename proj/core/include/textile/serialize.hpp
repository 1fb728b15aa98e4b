#ifndef TEXTILE_SERIALIZE_HPP
#define TEXTILE_SERIALIZE_HPP

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "textile/reconstruct.hpp"
#include "textile/segmenter.hpp"
#include "textile/synthgen.hpp"
#include "textile/validate.hpp"

namespace textile {

inline constexpr int kSchemaVersion = 1;

// Parsers take the source name used in ParseError messages.
std::string model_to_json(const TextileModel& model);
TextileModel model_from_json(const std::string& text, const std::string& source = "<model>");
void save_model(const TextileModel& model, const std::filesystem::path& path);
TextileModel load_model(const std::filesystem::path& path);

// JSON lines. Each set starts with a {"header": ...} record carrying the
// slice range and skip log; detection records follow. Files without
// header records (external detectors) are accepted: sets are formed per
// axis over the observed slice range.
std::string detections_to_jsonl(std::span<const DetectionSet> sets);
std::vector<DetectionSet> detections_from_jsonl(const std::string& text,
                                                const std::string& source = "<detections>");

std::string yarns_to_json(std::span<const ReconstructedYarn> yarns);
std::vector<ReconstructedYarn> yarns_from_json(const std::string& text,
                                               const std::string& source = "<yarns>");

struct ValidationReport {
    PathReport paths;
    VfReport vf;
};

std::string report_to_json(const ValidationReport& report);
ValidationReport report_from_json(const std::string& text, const std::string& source = "<report>");

// Aligned text tables and the histogram as CSV (bin_left,bin_right,count).
std::string path_table(const PathReport& report);
std::string vf_table(const VfReport& report);
std::string histogram_csv(const VfReport& report);

}  // namespace textile

#endif  // TEXTILE_SERIALIZE_HPP
