#include "flowseq/io.hpp"

#include "flowseq/error.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace flowseq {

namespace fs = std::filesystem;

namespace {

template <class F>
auto parse_guard(const char* what, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const json::exception& e) {
        throw CorruptData(std::string(what) + ": " + e.what());
    } catch (const InvalidInput& e) {
        throw CorruptData(std::string(what) + ": " + e.what());
    } catch (const DegenerateData& e) {
        throw CorruptData(std::string(what) + ": " + e.what());
    }
}

json cells_to_json(const FlowField& f) {
    json cells = json::array();
    for (int y = 0; y < f.height(); ++y) {
        for (int x = 0; x < f.width(); ++x) {
            if (f.present(x, y)) {
                const Vec2& v = f.at(x, y);
                cells.push_back(json::array({x, y, v.x, v.y}));
            }
        }
    }
    return cells;
}

FlowField cells_from_json(const json& cells, int width, int height) {
    FlowField f(width, height);
    for (const auto& c : cells) {
        if (!c.is_array() || c.size() != 4) throw CorruptData("cell must be [x, y, vx, vy]");
        const int x = c[0].get<int>();
        const int y = c[1].get<int>();
        if (!f.in_bounds(x, y)) {
            throw CorruptData("cell (" + std::to_string(x) + ", " + std::to_string(y) + ") outside the frame");
        }
        if (f.present(x, y)) {
            throw CorruptData("duplicate cell (" + std::to_string(x) + ", " + std::to_string(y) + ")");
        }
        f.set(x, y, Vec2{c[2].get<double>(), c[3].get<double>()});
    }
    return f;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
    if (!j.is_array()) throw CorruptData("expected a numeric array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    return v;
}

json vec2_to_json(const Vec2& v) { return json::array({v.x, v.y}); }

Vec2 vec2_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) throw CorruptData("expected [x, y]");
    return Vec2{j[0].get<double>(), j[1].get<double>()};
}

std::string superposition_name(Superposition s) {
    switch (s) {
    case Superposition::EarliestWins: return "earliest";
    case Superposition::LatestWins: return "latest";
    case Superposition::Average: return "average";
    }
    return "earliest";
}

Superposition superposition_from_name(const std::string& s) {
    if (s == "earliest") return Superposition::EarliestWins;
    if (s == "latest") return Superposition::LatestWins;
    if (s == "average") return Superposition::Average;
    throw CorruptData("unknown superposition mode '" + s + "'");
}

} // namespace

json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw CorruptData(path.string() + ": " + e.what());
    }
}

void write_json_file(const json& j, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump() << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

json flows_to_json(const FlowSequence& seq) {
    json j;
    j["width"] = seq.width();
    j["height"] = seq.height();
    j["dt"] = seq.dt;
    json frames = json::array();
    for (const auto& f : seq.frames) frames.push_back(json{{"cells", cells_to_json(f)}});
    j["frames"] = std::move(frames);
    if (!seq.metadata.empty()) j["metadata"] = seq.metadata;
    return j;
}

FlowSequence flows_from_json(const json& j) {
    return parse_guard("flow sequence", [&] {
        FlowSequence seq;
        const int w = j.at("width").get<int>();
        const int h = j.at("height").get<int>();
        if (w < 0 || h < 0) throw CorruptData("negative frame size");
        seq.dt = j.at("dt").get<double>();
        for (const auto& f : j.at("frames")) seq.frames.push_back(cells_from_json(f.at("cells"), w, h));
        if (j.contains("metadata")) seq.metadata = j["metadata"].get<std::map<std::string, std::string>>();
        seq.validate();
        return seq;
    });
}

void write_flows(const FlowSequence& seq, const fs::path& path) { write_json_file(flows_to_json(seq), path); }

FlowSequence read_flows(const fs::path& path) {
    const json j = read_json_file(path);
    try {
        return flows_from_json(j);
    } catch (const CorruptData& e) {
        throw CorruptData(path.string() + ": " + e.what());
    }
}

json pas_to_json(const PartialActionSequence& seq) {
    json j;
    j["dt"] = seq.dt;
    j["width"] = seq.empty() ? 0 : seq.actions.front().image.width();
    j["height"] = seq.empty() ? 0 : seq.actions.front().image.height();
    json actions = json::array();
    for (const auto& a : seq.actions) {
        actions.push_back(json{{"label", a.label},
                               {"frame_span", json::array({a.frame_span.first, a.frame_span.second})},
                               {"cells", cells_to_json(a.image)}});
    }
    j["actions"] = std::move(actions);
    return j;
}

PartialActionSequence pas_from_json(const json& j) {
    return parse_guard("partial action sequence", [&] {
        PartialActionSequence seq;
        seq.dt = j.at("dt").get<double>();
        const int w = j.at("width").get<int>();
        const int h = j.at("height").get<int>();
        int previous = 0;
        for (const auto& a : j.at("actions")) {
            PartialActionImage img;
            img.label = a.at("label").get<int>();
            if (img.label <= previous) throw CorruptData("actions must be ordered by ascending label");
            previous = img.label;
            const auto& span = a.at("frame_span");
            img.frame_span = {span.at(0).get<int>(), span.at(1).get<int>()};
            if (img.frame_span.first < 0 || img.frame_span.second < img.frame_span.first) {
                throw CorruptData("invalid frame_span");
            }
            img.image = cells_from_json(a.at("cells"), w, h);
            if (img.image.present_count() == 0) throw CorruptData("partial action without cells");
            seq.actions.push_back(std::move(img));
        }
        return seq;
    });
}

void write_pas(const PartialActionSequence& seq, const fs::path& path) { write_json_file(pas_to_json(seq), path); }

PartialActionSequence read_pas(const fs::path& path) { return pas_from_json(read_json_file(path)); }

json eigenspace_to_json(const EigenspaceModel& model) {
    json basis = json::array();
    for (int c = 0; c < model.k(); ++c) basis.push_back(vector_to_json(model.basis().col(c)));
    return json{{"k", model.k()},
                {"mean", vector_to_json(model.mean())},
                {"eigenvalues", vector_to_json(model.eigenvalues())},
                {"basis", std::move(basis)}};
}

EigenspaceModel eigenspace_from_json(const json& j) {
    return parse_guard("eigenspace", [&] {
        const int k = j.at("k").get<int>();
        Eigen::VectorXd mean = vector_from_json(j.at("mean"));
        Eigen::VectorXd values = vector_from_json(j.at("eigenvalues"));
        const auto& cols = j.at("basis");
        if (k < 1 || static_cast<int>(cols.size()) != k || values.size() != k) {
            throw CorruptData("k does not match basis/eigenvalue counts");
        }
        Eigen::MatrixXd basis(mean.size(), k);
        for (int c = 0; c < k; ++c) {
            Eigen::VectorXd col = vector_from_json(cols[static_cast<std::size_t>(c)]);
            if (col.size() != mean.size()) throw CorruptData("basis column length differs from mean length");
            basis.col(c) = col;
        }
        return EigenspaceModel(std::move(mean), std::move(basis), std::move(values));
    });
}

void write_eigenspace(const EigenspaceModel& model, const fs::path& path) {
    write_json_file(eigenspace_to_json(model), path);
}

EigenspaceModel read_eigenspace(const fs::path& path) { return eigenspace_from_json(read_json_file(path)); }

json segmentation_to_json(const SegmentationParams& p) {
    return json{{"angle_threshold", p.angle_threshold},
                {"min_frames", p.min_frames},
                {"superposition", superposition_name(p.superposition)}};
}

SegmentationParams segmentation_from_json(const json& j, SegmentationParams p) {
    return parse_guard("segmentation", [&] {
        if (j.contains("angle_threshold")) p.angle_threshold = j["angle_threshold"].get<double>();
        if (j.contains("min_frames")) p.min_frames = j["min_frames"].get<int>();
        if (j.contains("superposition")) p.superposition = superposition_from_name(j["superposition"].get<std::string>());
        p.validate();
        return p;
    });
}

json dictionary_to_json(const GestureDictionary& dict) {
    json entries = json::array();
    for (const auto& e : dict.entries) {
        json clusters = json::array();
        for (const auto& c : e.clusters) {
            json cov = json::array();
            for (Eigen::Index r = 0; r < c.covariance().rows(); ++r) {
                cov.push_back(vector_to_json(c.covariance().row(r).transpose()));
            }
            clusters.push_back(json{{"mean", vector_to_json(c.mean())}, {"cov", std::move(cov)}});
        }
        entries.push_back(json{{"name", e.name}, {"important", e.important}, {"clusters", std::move(clusters)}});
    }
    return json{{"tau", dict.tau},
                {"eigenspace", eigenspace_to_json(dict.eigenspace)},
                {"segmentation", segmentation_to_json(dict.segmentation)},
                {"entries", std::move(entries)}};
}

GestureDictionary dictionary_from_json(const json& j) {
    GestureDictionary dict = parse_guard("dictionary", [&] {
        GestureDictionary d;
        d.tau = j.at("tau").get<double>();
        d.eigenspace = eigenspace_from_json(j.at("eigenspace"));
        if (j.contains("segmentation")) d.segmentation = segmentation_from_json(j["segmentation"]);
        for (const auto& je : j.at("entries")) {
            GestureEntry e;
            e.name = je.at("name").get<std::string>();
            for (const auto& i : je.at("important")) e.important.insert(i.get<int>());
            for (const auto& jc : je.at("clusters")) {
                Eigen::VectorXd mean = vector_from_json(jc.at("mean"));
                const auto& rows = jc.at("cov");
                Eigen::MatrixXd cov(static_cast<Eigen::Index>(rows.size()), mean.size());
                for (std::size_t r = 0; r < rows.size(); ++r) {
                    Eigen::VectorXd row = vector_from_json(rows[r]);
                    if (row.size() != mean.size()) throw CorruptData("covariance row length differs from mean");
                    cov.row(static_cast<Eigen::Index>(r)) = row.transpose();
                }
                e.clusters.emplace_back(std::move(mean), std::move(cov));
            }
            d.entries.push_back(std::move(e));
        }
        return d;
    });
    dict.validate();
    return dict;
}

void save_dictionary(const GestureDictionary& dict, const fs::path& path) {
    dict.validate();
    write_json_file(dictionary_to_json(dict), path);
}

GestureDictionary load_dictionary(const fs::path& path) {
    const json j = read_json_file(path);
    try {
        return dictionary_from_json(j);
    } catch (const CorruptData& e) {
        throw CorruptData(path.string() + ": " + e.what());
    }
}

json match_to_json(const std::string& name, const MatchResult& r) {
    json pairs = json::array();
    for (const auto& [i, j] : r.matched_pairs) pairs.push_back(json::array({i, j}));
    return json{{"name", name},
                {"similarity", r.similarity},
                {"lcs_length", r.lcs_length},
                {"pairs", std::move(pairs)},
                {"cost", r.total_cost},
                {"important_ok", r.importance_satisfied}};
}

json synth_spec_to_json(const SyntheticGestureSpec& spec) {
    json blobs = json::array();
    for (const auto& b : spec.blobs) {
        json vel = json::array();
        for (const auto& v : b.velocities) vel.push_back(vec2_to_json(v));
        blobs.push_back(json{{"start", vec2_to_json(b.start)},
                             {"velocities", std::move(vel)},
                             {"radius", b.radius},
                             {"first_frame", b.first_frame},
                             {"last_frame", b.last_frame}});
    }
    return json{{"width", spec.width}, {"height", spec.height}, {"frames", spec.frame_count},
                {"dt", spec.dt},       {"noise", spec.noise},   {"seed", spec.seed},
                {"blobs", std::move(blobs)}};
}

SyntheticGestureSpec synth_spec_from_json(const json& j) {
    return parse_guard("synthetic gesture spec", [&] {
        SyntheticGestureSpec spec;
        spec.width = j.value("width", spec.width);
        spec.height = j.value("height", spec.height);
        spec.frame_count = j.at("frames").get<int>();
        spec.dt = j.value("dt", spec.dt);
        spec.noise = j.value("noise", spec.noise);
        spec.seed = j.value("seed", spec.seed);
        for (const auto& jb : j.value("blobs", json::array())) {
            BlobTrack b;
            b.start = vec2_from_json(jb.at("start"));
            for (const auto& v : jb.at("velocities")) b.velocities.push_back(vec2_from_json(v));
            b.radius = jb.at("radius").get<double>();
            b.first_frame = jb.at("first_frame").get<int>();
            b.last_frame = jb.at("last_frame").get<int>();
            spec.blobs.push_back(std::move(b));
        }
        spec.validate();
        return spec;
    });
}

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) break;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    return tok;
}

int pgm_int(std::istream& in) {
    const std::string tok = pgm_token(in);
    try {
        std::size_t used = 0;
        const int v = std::stoi(tok, &used);
        if (used != tok.size()) throw CorruptData("bad PGM header token '" + tok + "'");
        return v;
    } catch (const std::logic_error&) {
        throw CorruptData("bad PGM header token '" + tok + "'");
    }
}

} // namespace

GrayFrame read_pgm(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    const std::string magic = pgm_token(in);
    if (magic != "P2" && magic != "P5") throw CorruptData(path.string() + ": not a P2/P5 greymap");
    const int w = pgm_int(in);
    const int h = pgm_int(in);
    const int maxval = pgm_int(in);
    if (w < 1 || h < 1 || maxval < 1 || maxval > 65535) {
        throw CorruptData(path.string() + ": invalid PGM header");
    }
    std::vector<double> data(static_cast<std::size_t>(w) * h);
    if (magic == "P2") {
        for (auto& v : data) {
            const int raw = pgm_int(in);
            if (raw < 0 || raw > maxval) throw CorruptData(path.string() + ": sample out of range");
            v = static_cast<double>(raw) / maxval;
        }
    } else {
        const bool wide = maxval > 255;
        for (auto& v : data) {
            int raw = in.get();
            if (wide) raw = (raw << 8) | in.get();
            if (!in) throw CorruptData(path.string() + ": truncated PGM data");
            if (raw > maxval) throw CorruptData(path.string() + ": sample out of range");
            v = static_cast<double>(raw) / maxval;
        }
    }
    return GrayFrame(w, h, std::move(data));
}

void write_pgm(const GrayFrame& frame, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "P5\n" << frame.width() << ' ' << frame.height() << "\n255\n";
    for (double v : frame.data()) out.put(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
    if (!out) throw IoError("write failed for " + path.string());
}

} // namespace flowseq
