#pragma once

#include <string>

#include "harmonidiff/harmonize.hpp"

namespace harmonidiff {

// Tiles the candidates into a near-square grid (cols = ceil(sqrt(n)), row
// major) and writes the image plus a sidecar JSON at <image_path>.json with
// per-tile depth, score and the selected flag (set on exactly one tile).
void write_contact_sheet(const std::string& image_path, const CandidateSet& candidates,
                         int selected);

}  // namespace harmonidiff
