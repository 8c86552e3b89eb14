#include "harmonidiff/manifest.hpp"

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "harmonidiff/errors.hpp"
#include "harmonidiff/image_io.hpp"

namespace harmonidiff {

namespace {

using json = nlohmann::json;

int line_of_byte(const std::string& text, std::size_t byte) {
    int line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') ++line;
    }
    return line;
}

std::string resolve(const std::string& base_dir, const std::string& path) {
    if (path.empty()) return path;
    std::filesystem::path p(path);
    if (p.is_absolute() || base_dir.empty()) return path;
    return (std::filesystem::path(base_dir) / p).string();
}

}  // namespace

Manifest parse_manifest(const std::string& text, const std::string& origin,
                        const std::string& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("malformed JSON in " + origin + " at line " +
                         std::to_string(line_of_byte(text, e.byte)) + ": " + e.what());
    }
    if (!j.is_array()) throw ValidationError(origin + ": manifest must be a JSON array of tasks");
    Manifest manifest;
    manifest.base_dir = base_dir;
    const std::set<std::string> known = {"id",        "source",       "target",
                                         "mask",      "paste_x",      "paste_y",
                                         "source_gsd", "target_gsd",  "source_label",
                                         "target_country"};
    int idx = 0;
    for (const json& e : j) {
        const std::string where = origin + " entry " + std::to_string(idx);
        if (!e.is_object()) throw ValidationError(where + ": must be an object");
        for (const auto& [key, value] : e.items()) {
            (void)value;
            if (known.find(key) == known.end()) {
                throw ValidationError(where + ": unknown key '" + key + "'");
            }
        }
        ManifestEntry entry;
        try {
            entry.id = e.value("id", "task" + std::to_string(idx));
            entry.source_path = e.at("source").get<std::string>();
            entry.target_path = e.at("target").get<std::string>();
            entry.mask_path = e.value("mask", "");
            entry.paste_x = e.at("paste_x").get<int>();
            entry.paste_y = e.at("paste_y").get<int>();
            entry.source_gsd = e.value("source_gsd", 1.0);
            entry.target_gsd = e.value("target_gsd", 1.0);
            entry.source_label = e.value("source_label", "");
            entry.target_country = e.value("target_country", "");
        } catch (const json::exception& ex) {
            throw ValidationError(where + ": " + ex.what());
        }
        if (entry.id.empty()) throw ValidationError(where + ": id must be non-empty");
        if (entry.source_path.empty() || entry.target_path.empty()) {
            throw ValidationError(where + ": source and target paths must be non-empty");
        }
        if (entry.paste_x < 0 || entry.paste_y < 0) {
            throw ValidationError(where + ": paste origin must be non-negative");
        }
        if (!(entry.source_gsd > 0.0) || !(entry.target_gsd > 0.0)) {
            throw ValidationError(where + ": ground sample distances must be > 0");
        }
        manifest.entries.push_back(std::move(entry));
        ++idx;
    }
    return manifest;
}

Manifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_manifest(buf.str(), path,
                          std::filesystem::path(path).parent_path().string());
}

CompositionTask load_task(const ManifestEntry& entry, const std::string& base_dir) {
    CompositionTask task;
    task.source = load_image(resolve(base_dir, entry.source_path));
    task.target = load_image(resolve(base_dir, entry.target_path));
    if (!entry.mask_path.empty()) {
        task.source_mask = load_mask(resolve(base_dir, entry.mask_path));
        if (task.source_mask.width() != task.source.width() ||
            task.source_mask.height() != task.source.height()) {
            throw ValidationError("task " + entry.id + ": mask dims " +
                                  std::to_string(task.source_mask.width()) + "x" +
                                  std::to_string(task.source_mask.height()) +
                                  " do not match the source image");
        }
    }
    task.paste_x = entry.paste_x;
    task.paste_y = entry.paste_y;
    task.source_gsd = entry.source_gsd;
    task.target_gsd = entry.target_gsd;
    task.source_label = entry.source_label;
    task.target_country = entry.target_country;
    return task;
}

}  // namespace harmonidiff
