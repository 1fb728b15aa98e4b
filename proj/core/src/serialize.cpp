#include "textile/serialize.hpp"

#include <cstdarg>
#include <cstdio>
#include <map>
#include <sstream>

#include "json_field.hpp"
#include "textile/error.hpp"
#include "textile/io.hpp"

namespace textile {

using detail::Field;
using detail::json;
using detail::parse_document;

namespace {

void check_schema(const Field& root) {
    const auto v = root["schema"].integer();
    if (v != kSchemaVersion) {
        root["schema"].fail("unsupported schema " + std::to_string(v));
    }
}

json vec(const Vec3& p) { return json::array({p.x(), p.y(), p.z()}); }
json vec(const Vec2& p) { return json::array({p.x(), p.y()}); }

json curve_json(const BSplineCurve& c) {
    json controls = json::array();
    for (const auto& p : c.control_points()) controls.push_back(vec(p));
    return {{"degree", c.degree()}, {"knots", c.knots()}, {"controls", controls}};
}

BSplineCurve curve_from(const Field& f) {
    const int degree = static_cast<int>(f["degree"].integer());
    std::vector<double> knots;
    const Field k = f["knots"];
    for (std::size_t i = 0; i < k.size(); ++i) knots.push_back(k.item(i).number());
    std::vector<Vec3> controls;
    const Field c = f["controls"];
    for (std::size_t i = 0; i < c.size(); ++i) controls.push_back(c.item(i).vec3());
    return f.convert([&] { return BSplineCurve(degree, std::move(controls), std::move(knots)); });
}

json section_json(const CrossSection& s) {
    json contour = json::array();
    for (const auto& p : s.contour) contour.push_back(vec(p));
    return {{"station", s.station}, {"center", vec(s.center)}, {"contour", contour}};
}

CrossSection section_from(const Field& f) {
    CrossSection s;
    s.station = f["station"].number();
    s.center = f["center"].vec3();
    const Field c = f["contour"];
    if (c.size() != kContourPoints) c.fail("expected 10 keypoints");
    for (int i = 0; i < kContourPoints; ++i) s.contour[i] = c.item(static_cast<std::size_t>(i)).vec3();
    return s;
}

Family family_from(const Field& f) {
    const std::string name = f.string();
    return f.convert([&] { return family_from_string(name); });
}

}  // namespace

std::string model_to_json(const TextileModel& model) {
    const WeaveSpec& w = model.weave;
    json weave = {{"n_warp_columns", w.n_warp_columns},
                  {"n_weft_columns", w.n_weft_columns},
                  {"warp_sequence", w.warp_sequence},
                  {"weft_sequence", w.weft_sequence},
                  {"yarn_spacing", vec(w.yarn_spacing)},
                  {"crimp_amplitude", w.crimp_amplitude},
                  {"ellipse_a", w.ellipse_a},
                  {"ellipse_b", w.ellipse_b},
                  {"seed", w.seed}};
    json yarns = json::array();
    for (const auto& y : model.yarns) {
        json sections = json::array();
        for (const auto& s : y.sections) sections.push_back(section_json(s));
        yarns.push_back({{"id", y.id},
                         {"family", to_string(y.family)},
                         {"path", curve_json(y.path)},
                         {"sections", sections}});
    }
    json doc = {{"schema", kSchemaVersion},
                {"unit_um", model.unit_um},
                {"thickness", model.thickness},
                {"bbox", {{"min", vec(model.bbox.min)}, {"max", vec(model.bbox.max)}}},
                {"weave", weave},
                {"fibers", {{"fiber_radius", model.fibers.fiber_radius},
                            {"fibers_per_yarn", model.fibers.fibers_per_yarn}}},
                {"yarns", yarns}};
    return doc.dump(1) + "\n";
}

TextileModel model_from_json(const std::string& text, const std::string& source) {
    const json doc = parse_document(text, source);
    const Field root(doc, source, "");
    check_schema(root);
    TextileModel m;
    m.unit_um = root["unit_um"].number();
    m.thickness = root["thickness"].number();
    m.bbox.min = root["bbox"]["min"].vec3();
    m.bbox.max = root["bbox"]["max"].vec3();

    const Field w = root["weave"];
    m.weave.n_warp_columns = static_cast<int>(w["n_warp_columns"].integer());
    m.weave.n_weft_columns = static_cast<int>(w["n_weft_columns"].integer());
    m.weave.warp_sequence.clear();
    m.weave.weft_sequence.clear();
    for (std::size_t i = 0; i < w["warp_sequence"].size(); ++i) {
        m.weave.warp_sequence.push_back(static_cast<int>(w["warp_sequence"].item(i).integer()));
    }
    for (std::size_t i = 0; i < w["weft_sequence"].size(); ++i) {
        m.weave.weft_sequence.push_back(static_cast<int>(w["weft_sequence"].item(i).integer()));
    }
    m.weave.yarn_spacing = w["yarn_spacing"].vec3();
    m.weave.crimp_amplitude = w["crimp_amplitude"].number();
    m.weave.ellipse_a = w["ellipse_a"].number();
    m.weave.ellipse_b = w["ellipse_b"].number();
    m.weave.seed = w["seed"].unsigned_integer();

    m.fibers.fiber_radius = root["fibers"]["fiber_radius"].number();
    m.fibers.fibers_per_yarn = static_cast<int>(root["fibers"]["fibers_per_yarn"].integer());

    const Field yarns = root["yarns"];
    for (std::size_t i = 0; i < yarns.size(); ++i) {
        const Field y = yarns.item(i);
        YarnModel yarn;
        yarn.id = static_cast<int>(y["id"].integer());
        yarn.family = family_from(y["family"]);
        yarn.path = curve_from(y["path"]);
        const Field secs = y["sections"];
        for (std::size_t s = 0; s < secs.size(); ++s) yarn.sections.push_back(section_from(secs.item(s)));
        m.yarns.push_back(std::move(yarn));
    }
    return m;
}

void save_model(const TextileModel& model, const std::filesystem::path& path) {
    write_file_atomic(path, model_to_json(model));
}

TextileModel load_model(const std::filesystem::path& path) {
    return model_from_json(read_file(path), path.string());
}

std::string detections_to_jsonl(std::span<const DetectionSet> sets) {
    std::string out;
    for (const auto& set : sets) {
        json skipped = json::array();
        for (const auto& s : set.skipped) skipped.push_back({s.slice_index, s.label, s.pixel_area});
        json header = {{"axis", to_string(set.axis)},
                       {"index_origin", set.index_origin},
                       {"slice_count", set.slice_count()},
                       {"width", set.width},
                       {"height", set.height},
                       {"provenance", to_string(set.provenance)},
                       {"skipped", skipped}};
        out += json{{"header", header}}.dump() + "\n";
        for (const auto& slice : set.slices) {
            for (const auto& d : slice) {
                json contour = json::array();
                for (const auto& p : d.contour) contour.push_back(vec(p));
                json rec = {{"axis", to_string(d.axis)},
                            {"slice_index", d.slice_index},
                            {"contour", contour},
                            {"center", vec(d.center)},
                            {"confidence", d.confidence}};
                if (d.true_label) rec["true_label"] = *d.true_label;
                out += rec.dump() + "\n";
            }
        }
    }
    return out;
}

std::vector<DetectionSet> detections_from_jsonl(const std::string& text, const std::string& source) {
    std::vector<DetectionSet> sets;
    std::map<SliceAxis, std::vector<SectionDetection>> loose;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    DetectionSet* current = nullptr;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const json doc = parse_document(line, source + ":" + std::to_string(line_no));
        const std::string where = source + ":" + std::to_string(line_no);
        const Field rec(doc, where, "");
        if (rec.has("header")) {
            const Field h = rec["header"];
            DetectionSet set;
            const std::string axis = h["axis"].string();
            set.axis = h["axis"].convert([&] { return slice_axis_from_string(axis); });
            set.index_origin = static_cast<int>(h["index_origin"].integer());
            const auto count = h["slice_count"].integer();
            if (count < 0) h["slice_count"].fail("must be >= 0");
            set.slices.resize(static_cast<std::size_t>(count));
            set.width = static_cast<int>(h["width"].integer());
            set.height = static_cast<int>(h["height"].integer());
            const std::string prov = h["provenance"].string();
            set.provenance = h["provenance"].convert([&] { return provenance_from_string(prov); });
            const Field sk = h["skipped"];
            for (std::size_t i = 0; i < sk.size(); ++i) {
                set.skipped.push_back({static_cast<int>(sk.item(i).item(0).integer()),
                                       static_cast<int>(sk.item(i).item(1).integer()),
                                       static_cast<int>(sk.item(i).item(2).integer())});
            }
            sets.push_back(std::move(set));
            current = &sets.back();
            continue;
        }
        SectionDetection d;
        const std::string axis = rec["axis"].string();
        d.axis = rec["axis"].convert([&] { return slice_axis_from_string(axis); });
        d.slice_index = static_cast<int>(rec["slice_index"].integer());
        const Field c = rec["contour"];
        if (c.size() != kContourPoints) c.fail("expected 10 keypoints");
        for (int i = 0; i < kContourPoints; ++i) d.contour[i] = c.item(static_cast<std::size_t>(i)).vec2();
        d.center = rec["center"].vec2();
        d.confidence = rec["confidence"].number();
        if (!(d.confidence >= 0.0 && d.confidence <= 1.0)) rec["confidence"].fail("outside [0, 1]");
        if (rec.has("true_label")) d.true_label = static_cast<int>(rec["true_label"].integer());
        rec["contour"].convert([&] {
            validate_detection(d);
            return 0;
        });

        if (current) {
            if (d.axis != current->axis) rec["axis"].fail("does not match the preceding header");
            const int k = d.slice_index - current->index_origin;
            if (k < 0 || k >= current->slice_count()) rec["slice_index"].fail("outside the header range");
            current->slices[static_cast<std::size_t>(k)].push_back(d);
        } else {
            loose[d.axis].push_back(d);
        }
    }
    for (auto& [axis, dets] : loose) {
        DetectionSet set;
        set.axis = axis;
        set.provenance = Provenance::External;
        int lo = dets.front().slice_index, hi = lo;
        for (const auto& d : dets) {
            lo = std::min(lo, d.slice_index);
            hi = std::max(hi, d.slice_index);
        }
        set.index_origin = lo;
        set.slices.resize(static_cast<std::size_t>(hi - lo + 1));
        for (auto& d : dets) set.slices[static_cast<std::size_t>(d.slice_index - lo)].push_back(d);
        sets.push_back(std::move(set));
    }
    return sets;
}

std::string yarns_to_json(std::span<const ReconstructedYarn> yarns) {
    json list = json::array();
    for (const auto& y : yarns) {
        json sections = json::array();
        for (const auto& s : y.sections) sections.push_back(section_json(s));
        json completed = json::array();
        for (bool c : y.completed) completed.push_back(c);
        json item = {{"id", y.id},
                     {"family", to_string(y.family)},
                     {"path", curve_json(y.path)},
                     {"sections", sections},
                     {"completed", completed}};
        if (y.true_label) item["true_label"] = *y.true_label;
        list.push_back(item);
    }
    return json{{"schema", kSchemaVersion}, {"yarns", list}}.dump(1) + "\n";
}

std::vector<ReconstructedYarn> yarns_from_json(const std::string& text, const std::string& source) {
    const json doc = parse_document(text, source);
    const Field root(doc, source, "");
    check_schema(root);
    std::vector<ReconstructedYarn> out;
    const Field yarns = root["yarns"];
    for (std::size_t i = 0; i < yarns.size(); ++i) {
        const Field y = yarns.item(i);
        ReconstructedYarn r;
        r.id = static_cast<int>(y["id"].integer());
        r.family = family_from(y["family"]);
        r.path = curve_from(y["path"]);
        const Field secs = y["sections"];
        for (std::size_t s = 0; s < secs.size(); ++s) r.sections.push_back(section_from(secs.item(s)));
        const Field done = y["completed"];
        if (done.size() != r.sections.size()) done.fail("length differs from sections");
        for (std::size_t s = 0; s < done.size(); ++s) r.completed.push_back(done.item(s).boolean());
        if (y.has("true_label")) r.true_label = static_cast<int>(y["true_label"].integer());
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

json hausdorff_json(const HausdorffResult& h) {
    return {{"a_to_b", h.a_to_b}, {"b_to_a", h.b_to_a}, {"symmetric", h.symmetric}};
}

HausdorffResult hausdorff_from(const Field& f) {
    return {f["a_to_b"].number(), f["b_to_a"].number(), f["symmetric"].number()};
}

std::vector<int> int_list(const Field& f) {
    std::vector<int> out;
    for (std::size_t i = 0; i < f.size(); ++i) out.push_back(static_cast<int>(f.item(i).integer()));
    return out;
}

}  // namespace

std::string report_to_json(const ValidationReport& report) {
    const PathReport& p = report.paths;
    json pairs = json::array();
    for (const auto& pair : p.pairs) {
        pairs.push_back({{"gt_id", pair.gt_id},
                         {"rec_id", pair.rec_id},
                         {"family", to_string(pair.family)},
                         {"voxels", hausdorff_json(pair.voxels)},
                         {"um", hausdorff_json(pair.um)}});
    }
    json paths = {{"voxel_size_um", p.voxel_size_um},
                  {"total_cost", p.total_cost},
                  {"max_symmetric", p.max_symmetric()},
                  {"family_count_mismatch", p.family_count_mismatch},
                  {"unmatched_gt", p.unmatched_gt},
                  {"unmatched_rec", p.unmatched_rec},
                  {"pairs", pairs}};

    const VfReport& v = report.vf;
    json yarns = json::array();
    for (const auto& y : v.yarns) {
        yarns.push_back({{"yarn_id", y.yarn_id}, {"sections", y.sections}, {"mean", y.mean},
                         {"min", y.min}, {"max", y.max}});
    }
    json sections = json::array();
    for (const auto& s : v.sections) {
        sections.push_back({{"yarn_id", s.yarn_id}, {"section", s.section}, {"vf", s.value.vf},
                            {"raw", s.value.raw}, {"capped", s.value.capped},
                            {"over_hex", s.value.over_hex}});
    }
    json vf = {{"mean", v.mean},
               {"count_capped", v.count_capped},
               {"count_over_hex", v.count_over_hex},
               {"hexagonal_limit", kHexagonalPackingLimit},
               {"histogram", v.histogram},
               {"yarns", yarns},
               {"sections", sections}};
    return json{{"schema", kSchemaVersion}, {"paths", paths}, {"vf", vf}}.dump(1) + "\n";
}

ValidationReport report_from_json(const std::string& text, const std::string& source) {
    const json doc = parse_document(text, source);
    const Field root(doc, source, "");
    check_schema(root);
    ValidationReport r;
    const Field p = root["paths"];
    r.paths.voxel_size_um = p["voxel_size_um"].number();
    r.paths.total_cost = p["total_cost"].number();
    r.paths.family_count_mismatch = p["family_count_mismatch"].boolean();
    r.paths.unmatched_gt = int_list(p["unmatched_gt"]);
    r.paths.unmatched_rec = int_list(p["unmatched_rec"]);
    const Field pairs = p["pairs"];
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        PathPair pair;
        pair.gt_id = static_cast<int>(pairs.item(i)["gt_id"].integer());
        pair.rec_id = static_cast<int>(pairs.item(i)["rec_id"].integer());
        pair.family = family_from(pairs.item(i)["family"]);
        pair.voxels = hausdorff_from(pairs.item(i)["voxels"]);
        pair.um = hausdorff_from(pairs.item(i)["um"]);
        r.paths.pairs.push_back(pair);
    }
    const Field v = root["vf"];
    r.vf.mean = v["mean"].number();
    r.vf.count_capped = static_cast<int>(v["count_capped"].integer());
    r.vf.count_over_hex = static_cast<int>(v["count_over_hex"].integer());
    const Field hist = v["histogram"];
    for (std::size_t i = 0; i < hist.size(); ++i) r.vf.histogram.push_back(hist.item(i).integer());
    const Field yarns = v["yarns"];
    for (std::size_t i = 0; i < yarns.size(); ++i) {
        r.vf.yarns.push_back({static_cast<int>(yarns.item(i)["yarn_id"].integer()),
                              static_cast<int>(yarns.item(i)["sections"].integer()),
                              yarns.item(i)["mean"].number(), yarns.item(i)["min"].number(),
                              yarns.item(i)["max"].number()});
    }
    const Field secs = v["sections"];
    for (std::size_t i = 0; i < secs.size(); ++i) {
        SectionVf s;
        s.yarn_id = static_cast<int>(secs.item(i)["yarn_id"].integer());
        s.section = static_cast<int>(secs.item(i)["section"].integer());
        s.value.vf = secs.item(i)["vf"].number();
        s.value.raw = secs.item(i)["raw"].number();
        s.value.capped = secs.item(i)["capped"].boolean();
        s.value.over_hex = secs.item(i)["over_hex"].boolean();
        r.vf.sections.push_back(s);
    }
    return r;
}

namespace {

std::string fmt(const char* pattern, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* pattern, ...) {
    char buf[256];
    va_list args;
    va_start(args, pattern);
    std::vsnprintf(buf, sizeof buf, pattern, args);
    va_end(args);
    return buf;
}

}  // namespace

std::string path_table(const PathReport& report) {
    std::string out = fmt("%6s %6s %6s %10s %10s %10s %12s\n", "gt_id", "rec_id", "family",
                          "gt->rec", "rec->gt", "sym_vox", "sym_um");
    for (const auto& p : report.pairs) {
        out += fmt("%6d %6d %6s %10.4f %10.4f %10.4f %12.3f\n", p.gt_id, p.rec_id,
                   to_string(p.family), p.voxels.a_to_b, p.voxels.b_to_a, p.voxels.symmetric,
                   p.um.symmetric);
    }
    out += fmt("matched %zu, unmatched gt %zu, unmatched rec %zu, total cost %.4f voxels\n",
               report.pairs.size(), report.unmatched_gt.size(), report.unmatched_rec.size(),
               report.total_cost);
    return out;
}

std::string vf_table(const VfReport& report) {
    std::string out = fmt("%7s %8s %8s %8s %8s\n", "yarn_id", "sections", "mean", "min", "max");
    for (const auto& y : report.yarns) {
        out += fmt("%7d %8d %8.4f %8.4f %8.4f\n", y.yarn_id, y.sections, y.mean, y.min, y.max);
    }
    out += fmt("mean %.4f, capped %d, over hexagonal limit %d\n", report.mean, report.count_capped,
               report.count_over_hex);
    return out;
}

std::string histogram_csv(const VfReport& report) {
    std::string out = "bin_left,bin_right,count\n";
    const std::size_t n = report.histogram.size();
    for (std::size_t i = 0; i < n; ++i) {
        out += fmt("%.6g,%.6g,%lld\n", static_cast<double>(i) / n, static_cast<double>(i + 1) / n,
                   static_cast<long long>(report.histogram[i]));
    }
    return out;
}

}  // namespace textile
