#pragma once

#include <string>
#include <vector>

#include "harmonidiff/harmonize.hpp"

namespace harmonidiff {

struct ManifestEntry {
    std::string id;
    std::string source_path;
    std::string target_path;
    std::string mask_path;  // optional
    int paste_x = 0;
    int paste_y = 0;
    double source_gsd = 1.0;
    double target_gsd = 1.0;
    std::string source_label;
    std::string target_country;
};

struct Manifest {
    std::string base_dir;  // directory the manifest file lives in
    std::vector<ManifestEntry> entries;
};

// JSON array of task objects. Relative image paths resolve against the
// manifest's directory. Malformed JSON raises ParseError with a line number;
// structurally valid entries with bad values raise ValidationError naming
// the entry.
Manifest load_manifest(const std::string& path);
Manifest parse_manifest(const std::string& text, const std::string& origin,
                        const std::string& base_dir);

// Loads the images (and mask when present) behind an entry.
CompositionTask load_task(const ManifestEntry& entry, const std::string& base_dir);

}  // namespace harmonidiff
