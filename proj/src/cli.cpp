#include "flowseq/cli.hpp"

#include "flowseq/error.hpp"

#include <CLI11.hpp>

#include <iomanip>
#include <ostream>

namespace flowseq::cli {

namespace fs = std::filesystem;

PipelineConfig config_from_json(const json& j) {
    PipelineConfig c;
    try {
        if (j.contains("flow")) {
            const auto& f = j["flow"];
            c.flow.block_radius = f.value("block_radius", c.flow.block_radius);
            c.flow.search_radius = f.value("search_radius", c.flow.search_radius);
            c.flow.min_texture = f.value("min_texture", c.flow.min_texture);
            c.flow.magnitude_floor = f.value("magnitude_floor", c.flow.magnitude_floor);
        }
        if (j.contains("segmentation")) c.segmentation = segmentation_from_json(j["segmentation"]);
        c.k = j.value("k", c.k);
        c.tau = j.value("tau", c.tau);
        if (j.contains("ridge") && !j["ridge"].is_null()) c.ridge = j["ridge"].get<double>();
        c.seed = j.value("seed", c.seed);
    } catch (const json::exception& e) {
        throw CorruptData(std::string("config: ") + e.what());
    }
    try {
        c.flow.validate();
    } catch (const InvalidInput& e) {
        throw CorruptData(std::string("config: ") + e.what());
    }
    if (c.k < 1) throw CorruptData("config: k must be >= 1");
    if (!(c.tau > 0.0)) throw CorruptData("config: tau must be positive");
    if (c.ridge && !(*c.ridge >= 0.0)) throw CorruptData("config: ridge must be >= 0");
    return c;
}

json config_to_json(const PipelineConfig& c) {
    return json{{"flow",
                 {{"block_radius", c.flow.block_radius},
                  {"search_radius", c.flow.search_radius},
                  {"min_texture", c.flow.min_texture},
                  {"magnitude_floor", c.flow.magnitude_floor}}},
                {"segmentation", segmentation_to_json(c.segmentation)},
                {"k", c.k},
                {"tau", c.tau},
                {"ridge", c.ridge ? json(*c.ridge) : json(nullptr)},
                {"seed", c.seed}};
}

std::vector<ManifestRecord> manifest_from_json(const json& j) {
    if (!j.is_array()) throw CorruptData("manifest: expected a JSON list of records");
    std::vector<ManifestRecord> out;
    try {
        for (const auto& r : j) {
            ManifestRecord rec;
            rec.name = r.at("name").get<std::string>();
            for (const auto& f : r.at("files")) rec.files.push_back(f);
            if (r.contains("important")) {
                for (const auto& i : r["important"]) rec.important.insert(i.get<int>());
            }
            out.push_back(std::move(rec));
        }
    } catch (const json::exception& e) {
        throw CorruptData(std::string("manifest: ") + e.what());
    }
    return out;
}

FlowSequence load_sequence(const json& file, const fs::path& base_dir, const FlowParams& params) {
    const auto resolve = [&](const std::string& p) {
        const fs::path path(p);
        return path.is_absolute() ? path : base_dir / path;
    };
    if (file.is_string()) return read_flows(resolve(file.get<std::string>()));
    if (file.is_object() && file.contains("pgm")) {
        std::vector<GrayFrame> frames;
        try {
            for (const auto& p : file.at("pgm")) frames.push_back(read_pgm(resolve(p.get<std::string>())));
            return flow_from_frames(frames, file.value("dt", 1.0), params);
        } catch (const json::exception& e) {
            throw CorruptData(std::string("manifest file entry: ") + e.what());
        }
    }
    throw CorruptData("manifest file entry must be a .flows path or {\"pgm\": [...], \"dt\": ...}");
}

namespace {

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    bool no_focus = false;
    std::string out_path;
    std::string input;
    std::string second;
};

PipelineConfig load_config(const Options& o) {
    PipelineConfig c = o.config_path.empty() ? PipelineConfig{} : config_from_json(read_json_file(o.config_path));
    if (o.seed) c.seed = *o.seed;
    return c;
}

void emit(const json& j, const Options& o, std::ostream& out) {
    out << j.dump(2) << '\n';
    if (!o.out_path.empty()) write_json_file(j, o.out_path);
}

int cmd_synth(const Options& o, std::ostream&, std::ostream& err) {
    if (o.out_path.empty()) {
        err << "synth: --out is required\n";
        return kInputError;
    }
    SyntheticGestureSpec spec = synth_spec_from_json(read_json_file(o.input));
    if (o.seed) spec.seed = *o.seed;
    write_flows(synthesize(spec), o.out_path);
    return kOk;
}

int cmd_build_dict(const Options& o, std::ostream& out, std::ostream& err) {
    if (o.out_path.empty()) {
        err << "build-dict: --out is required\n";
        return kInputError;
    }
    const PipelineConfig config = load_config(o);
    const fs::path manifest_path(o.input);
    const auto records = manifest_from_json(read_json_file(manifest_path));
    if (records.empty()) {
        err << "build-dict: manifest lists no gestures\n";
        return kInputError;
    }
    std::vector<TrainingGesture> gestures;
    for (const auto& r : records) {
        TrainingGesture g{r.name, {}, r.important};
        for (const auto& f : r.files) g.repetitions.push_back(load_sequence(f, manifest_path.parent_path(), config.flow));
        gestures.push_back(std::move(g));
    }
    const GestureDictionary dict = build_dictionary(gestures, config);
    save_dictionary(dict, o.out_path);

    json summary{{"dictionary", o.out_path}, {"k", dict.eigenspace.k()}, {"tau", dict.tau}, {"entries", json::array()}};
    for (const auto& e : dict.entries) {
        summary["entries"].push_back(
            json{{"name", e.name}, {"clusters", e.clusters.size()}, {"important", e.important}});
    }
    out << summary.dump(2) << '\n';
    return kOk;
}

int cmd_recognize(const Options& o, std::ostream& out, std::ostream& err) {
    const GestureDictionary dict = load_dictionary(o.input);
    SegmentationParams seg = dict.segmentation;
    if (!o.config_path.empty()) {
        const json cfg = read_json_file(o.config_path);
        if (cfg.contains("segmentation")) seg = segmentation_from_json(cfg["segmentation"]);
    }
    const FlowSequence query = read_flows(o.second);
    if (query.frames.empty()) {
        err << "recognize: query has no frames\n";
        return kInputError;
    }
    const auto features = extract_features(dict.eigenspace, query, seg);
    if (features.empty()) {
        err << "recognize: query yields no partial actions\n";
        return kInputError;
    }
    const auto ranked = recognize(dict, features, RecognizeOptions{!o.no_focus});
    json results = json::array();
    for (const auto& r : ranked) results.push_back(match_to_json(r.name, r.result));
    emit(json{{"focus", !o.no_focus}, {"partial_actions", features.size()}, {"ranking", std::move(results)}}, o, out);
    return kOk;
}

void print_table(const EvaluationReport& report, std::ostream& err) {
    err << std::left << std::setw(20) << "gesture" << std::right << std::setw(8) << "n" << std::setw(12) << "focused"
        << std::setw(12) << "unfocused" << '\n';
    err << std::fixed << std::setprecision(1);
    for (const auto& [name, s] : report.per_gesture) {
        err << std::left << std::setw(20) << name << std::right << std::setw(8) << s.total << std::setw(11)
            << 100.0 * s.focused_rate() << '%' << std::setw(11) << 100.0 * s.unfocused_rate() << "%\n";
    }
    err << std::left << std::setw(20) << "average" << std::right << std::setw(8) << report.total() << std::setw(11)
        << 100.0 * report.average_focused() << '%' << std::setw(11) << 100.0 * report.average_unfocused() << "%\n";
    err.unsetf(std::ios::floatfield);
}

int cmd_eval(const Options& o, std::ostream& out, std::ostream& err) {
    const GestureDictionary dict = load_dictionary(o.input);
    const PipelineConfig config = load_config(o);
    const fs::path manifest_path(o.second);
    const auto records = manifest_from_json(read_json_file(manifest_path));
    std::vector<LabeledSequence> tests;
    for (const auto& r : records) {
        for (const auto& f : r.files) {
            tests.push_back(LabeledSequence{r.name, load_sequence(f, manifest_path.parent_path(), config.flow)});
        }
    }
    const EvaluationReport report = evaluate(dict, tests);
    print_table(report, err);

    json rows = json::array();
    for (const auto& [name, s] : report.per_gesture) {
        rows.push_back(json{{"name", name},
                            {"total", s.total},
                            {"focused", s.focused_rate()},
                            {"unfocused", s.unfocused_rate()}});
    }
    emit(json{{"gestures", std::move(rows)},
              {"average", {{"focused", report.average_focused()}, {"unfocused", report.average_unfocused()}}},
              {"total", report.total()},
              {"correct", {{"focused", report.correct_focused()}, {"unfocused", report.correct_unfocused()}}}},
         o, out);
    return kOk;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Gesture recognition from optical flow with important partial actions", "flowseq"};
    app.require_subcommand(1);
    Options o;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "Pipeline configuration (JSON)");
        sub->add_option("--out", o.out_path, "Output path");
    };

    auto* synth = app.add_subcommand("synth", "Render a synthetic gesture spec into a .flows file");
    synth->add_option("spec", o.input, "Synthetic gesture spec (JSON)")->required();
    synth->add_option("--seed", o.seed, "Override the noise seed");
    add_common(synth);

    auto* build = app.add_subcommand("build-dict", "Build a gesture dictionary from a training manifest");
    build->add_option("manifest", o.input, "Training manifest (JSON)")->required();
    build->add_option("--seed", o.seed, "Random seed");
    add_common(build);

    auto* recog = app.add_subcommand("recognize", "Rank dictionary gestures against a query sequence");
    recog->add_option("dictionary", o.input, "Gesture dictionary (.gdict)")->required();
    recog->add_option("query", o.second, "Query flow sequence (.flows)")->required();
    recog->add_flag("--no-focus", o.no_focus, "Ignore important partial action flags");
    add_common(recog);

    auto* eval = app.add_subcommand("eval", "Top-1 accuracy with and without focusing");
    eval->add_option("dictionary", o.input, "Gesture dictionary (.gdict)")->required();
    eval->add_option("manifest", o.second, "Labeled test manifest (JSON)")->required();
    eval->add_option("--seed", o.seed, "Random seed");
    add_common(eval);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kInputError;
    }

    try {
        if (*synth) return cmd_synth(o, out, err);
        if (*build) return cmd_build_dict(o, out, err);
        if (*recog) return cmd_recognize(o, out, err);
        if (*eval) return cmd_eval(o, out, err);
    } catch (const BuildError& e) {
        err << "flowseq: " << e.what() << '\n';
        return kBuildError;
    } catch (const Error& e) {
        err << "flowseq: " << e.what() << '\n';
        return kInputError;
    }
    return kInputError;
}

} // namespace flowseq::cli
