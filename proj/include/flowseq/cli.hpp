#pragma once

#include "flowseq/io.hpp"
#include "flowseq/pipeline.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace flowseq::cli {

/// Process exit codes.
enum ExitCode : int {
    kOk = 0,
    kInputError = 2,
    kBuildError = 3,
};

/// Pipeline parameters read from a `--config` JSON file:
/// {"flow": {...}, "segmentation": {...}, "k", "tau", "ridge", "seed"}.
/// Missing keys keep their defaults.
PipelineConfig config_from_json(const json& j);
json config_to_json(const PipelineConfig& config);

/// One manifest record: {"name", "files": [...], "important": [...]}.
/// A file is either a path to a .flows file or {"pgm": [frame paths], "dt": seconds}.
struct ManifestRecord {
    std::string name;
    std::vector<json> files;
    std::set<int> important;
};

/// Paths inside the manifest are resolved against `base_dir`.
std::vector<ManifestRecord> manifest_from_json(const json& j);
FlowSequence load_sequence(const json& file, const std::filesystem::path& base_dir, const FlowParams& params);

/// Runs the `flowseq` command line. Machine-readable output goes to `out`,
/// diagnostics and the human-readable evaluation table to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace flowseq::cli
