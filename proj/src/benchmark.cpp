#include "harmonidiff/benchmark.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>

#include "harmonidiff/errors.hpp"
#include "harmonidiff/image_io.hpp"

namespace harmonidiff {

namespace {

using json = nlohmann::json;

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

std::string sanitize_id(const std::string& id) {
    std::string out;
    for (char c : id) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '-' || c == '_';
        out += ok ? c : '_';
    }
    return out.empty() ? "task" : out;
}

}  // namespace

std::string method_name(Method m) {
    switch (m) {
        case Method::CopyPaste: return "copy_paste";
        case Method::Poisson: return "poisson";
        case Method::HarmoniDiff: return "harmonidiff";
    }
    return "unknown";
}

std::optional<Method> method_from_name(const std::string& name) {
    if (name == "copy_paste") return Method::CopyPaste;
    if (name == "poisson") return Method::Poisson;
    if (name == "harmonidiff") return Method::HarmoniDiff;
    return std::nullopt;
}

BenchReport run_benchmark(const Manifest& manifest, const std::vector<Method>& methods,
                          const BenchContext& ctx) {
    if (methods.empty()) throw ContractError("run_benchmark: no methods requested");
    if (!ctx.out_dir.empty()) std::filesystem::create_directories(ctx.out_dir);

    BenchReport report;
    std::vector<std::vector<double>> target_feats;
    std::vector<std::vector<std::vector<double>>> composite_feats(methods.size());

    for (const ManifestEntry& entry : manifest.entries) {
        CompositionTask task;
        std::string load_failure;
        try {
            task = load_task(entry, manifest.base_dir);
            target_feats.push_back(image_features(task.target));
        } catch (const Error& e) {
            load_failure = e.what();
        }
        for (std::size_t mi = 0; mi < methods.size(); ++mi) {
            const Method method = methods[mi];
            BenchRow row;
            row.task_id = entry.id;
            row.method = method;
            if (!load_failure.empty()) {
                row.reason = load_failure;
                report.rows.push_back(std::move(row));
                continue;
            }
            const auto t0 = std::chrono::steady_clock::now();
            try {
                ImageGrid composite;
                RegionMask omega;
                if (method == Method::CopyPaste) {
                    BaselineResult r = copy_paste(task);
                    composite = std::move(r.image);
                    omega = std::move(r.omega);
                } else if (method == Method::Poisson) {
                    BaselineResult r = poisson_blend(task, ctx.poisson);
                    composite = std::move(r.image);
                    omega = std::move(r.omega);
                } else {
                    CandidateSet cands = compose(task, ctx.engine);
                    const int best = select_best(cands);
                    composite = cands.entries[best].image;
                    omega = std::move(cands.omega_pixel);
                    row.selected_depth = cands.entries[best].depth;
                }
                row.bgd = bgd_abs(composite, omega, ctx.bgd_width);
                row.harmony = harmony_score(ctx.scorer, composite, omega);
                row.ok = true;
                composite_feats[mi].push_back(image_features(composite));
                if (!ctx.out_dir.empty()) {
                    const std::string name =
                        sanitize_id(entry.id) + "_" + method_name(method) + ".png";
                    save_image((std::filesystem::path(ctx.out_dir) / name).string(), composite);
                }
            } catch (const Error& e) {
                row.ok = false;
                row.reason = e.what();
            }
            row.runtime_ms = std::chrono::duration<double, std::milli>(
                                 std::chrono::steady_clock::now() - t0)
                                 .count();
            report.rows.push_back(std::move(row));
        }
    }

    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        BenchAggregate agg;
        agg.method = methods[mi];
        double bgd_sum = 0.0, harmony_sum = 0.0;
        for (const BenchRow& row : report.rows) {
            if (row.method != methods[mi]) continue;
            if (row.ok) {
                ++agg.succeeded;
                bgd_sum += row.bgd;
                harmony_sum += row.harmony;
            } else {
                ++agg.failed;
            }
        }
        if (agg.succeeded > 0) {
            agg.mean_bgd = bgd_sum / agg.succeeded;
            agg.mean_harmony = harmony_sum / agg.succeeded;
        }
        if (composite_feats[mi].size() >= 2 && target_feats.size() >= 2) {
            agg.frechet =
                frechet_distance(feature_stats(composite_feats[mi]), feature_stats(target_feats));
            agg.has_frechet = true;
        }
        report.aggregates.push_back(agg);
    }
    return report;
}

void write_report_csv(const std::string& path, const BenchReport& report) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "row_type,task_id,method,status,bgd,harmony_score,selected_depth,frechet,reason\n";
    for (const BenchRow& row : report.rows) {
        out << "task," << csv_escape(row.task_id) << "," << method_name(row.method) << ","
            << (row.ok ? "ok" : "failed") << ",";
        if (row.ok) out << fmt6(row.bgd);
        out << ",";
        if (row.ok) out << fmt6(row.harmony);
        out << ",";
        if (row.ok && row.selected_depth >= 0) out << row.selected_depth;
        out << ",,";  // frechet lives on aggregate rows
        out << csv_escape(row.reason) << "\n";
    }
    for (const BenchAggregate& agg : report.aggregates) {
        out << "aggregate,," << method_name(agg.method) << ","
            << agg.succeeded << "/" << (agg.succeeded + agg.failed) << ",";
        if (agg.succeeded > 0) out << fmt6(agg.mean_bgd);
        out << ",";
        if (agg.succeeded > 0) out << fmt6(agg.mean_harmony);
        out << ",,";
        if (agg.has_frechet) out << fmt6(agg.frechet);
        out << ",\n";
    }
    if (!out) throw IoError("write failed for " + path);
}

void write_report_json(const std::string& path, const BenchReport& report) {
    json rows = json::array();
    for (const BenchRow& row : report.rows) {
        json r;
        r["task_id"] = row.task_id;
        r["method"] = method_name(row.method);
        r["status"] = row.ok ? "ok" : "failed";
        r["runtime_ms"] = row.runtime_ms;
        if (row.ok) {
            r["bgd"] = row.bgd;
            r["harmony_score"] = row.harmony;
            if (row.selected_depth >= 0) r["selected_depth"] = row.selected_depth;
        } else {
            r["reason"] = row.reason;
        }
        rows.push_back(std::move(r));
    }
    json aggs = json::array();
    for (const BenchAggregate& agg : report.aggregates) {
        json a;
        a["method"] = method_name(agg.method);
        a["succeeded"] = agg.succeeded;
        a["failed"] = agg.failed;
        if (agg.succeeded > 0) {
            a["mean_bgd"] = agg.mean_bgd;
            a["mean_harmony_score"] = agg.mean_harmony;
        }
        if (agg.has_frechet) a["frechet"] = agg.frechet;
        aggs.push_back(std::move(a));
    }
    json j;
    j["rows"] = std::move(rows);
    j["aggregates"] = std::move(aggs);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed for " + path);
}

}  // namespace harmonidiff
