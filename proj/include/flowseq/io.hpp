#pragma once

// JSON file formats and PGM input.
//
// Numbers are written in the shortest decimal form that parses back to the
// identical double, so every load(save(x)) reproduces x bit for bit.
// Loaders throw IoError when a file cannot be read and CorruptData when its
// contents do not parse or violate an invariant.

#include "flowseq/dictionary.hpp"
#include "flowseq/eigenspace.hpp"
#include "flowseq/flow.hpp"
#include "flowseq/matcher.hpp"
#include "flowseq/segmentation.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace flowseq {

using json = nlohmann::json;

// .flows: {"width", "height", "dt", "frames": [{"cells": [[x, y, vx, vy], ...]}], "metadata"?}
json flows_to_json(const FlowSequence& seq);
FlowSequence flows_from_json(const json& j);
void write_flows(const FlowSequence& seq, const std::filesystem::path& path);
FlowSequence read_flows(const std::filesystem::path& path);

// .pas: {"width", "height", "dt", "actions": [{"label", "frame_span": [a, b], "cells": [...]}]}
json pas_to_json(const PartialActionSequence& seq);
PartialActionSequence pas_from_json(const json& j);
void write_pas(const PartialActionSequence& seq, const std::filesystem::path& path);
PartialActionSequence read_pas(const std::filesystem::path& path);

// .eig: {"k", "mean", "eigenvalues", "basis": [column, ...]}
json eigenspace_to_json(const EigenspaceModel& model);
EigenspaceModel eigenspace_from_json(const json& j);
void write_eigenspace(const EigenspaceModel& model, const std::filesystem::path& path);
EigenspaceModel read_eigenspace(const std::filesystem::path& path);

// .gdict: {"tau", "eigenspace": {...}, "segmentation": {...},
//          "entries": [{"name", "important": [...], "clusters": [{"mean", "cov"}]}]}
json dictionary_to_json(const GestureDictionary& dict);
GestureDictionary dictionary_from_json(const json& j);
void save_dictionary(const GestureDictionary& dict, const std::filesystem::path& path);
GestureDictionary load_dictionary(const std::filesystem::path& path);

json segmentation_to_json(const SegmentationParams& p);
SegmentationParams segmentation_from_json(const json& j, SegmentationParams defaults = {});

// {"name", "similarity", "lcs_length", "pairs", "cost", "important_ok"}
json match_to_json(const std::string& name, const MatchResult& result);

// {"width", "height", "frames", "dt", "noise", "seed",
//  "blobs": [{"start": [x, y], "velocities": [[vx, vy], ...], "radius", "first_frame", "last_frame"}]}
json synth_spec_to_json(const SyntheticGestureSpec& spec);
SyntheticGestureSpec synth_spec_from_json(const json& j);

/// Reads a binary (P5) or ASCII (P2) greymap, scaling intensities to [0, 1].
GrayFrame read_pgm(const std::filesystem::path& path);
/// Writes a binary P5 greymap with maxval 255.
void write_pgm(const GrayFrame& frame, const std::filesystem::path& path);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const json& j, const std::filesystem::path& path);

} // namespace flowseq
