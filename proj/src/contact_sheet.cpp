#include "harmonidiff/contact_sheet.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

#include "harmonidiff/errors.hpp"
#include "harmonidiff/image_io.hpp"

namespace harmonidiff {

void write_contact_sheet(const std::string& image_path, const CandidateSet& candidates,
                         int selected) {
    const int n = static_cast<int>(candidates.entries.size());
    if (n < 1) throw ContractError("contact sheet: no candidates");
    if (selected < 0 || selected >= n) {
        throw ContractError("contact sheet: selected index out of range");
    }
    const ImageGrid& first = candidates.entries.front().image;
    for (const Candidate& c : candidates.entries) {
        if (c.image.width() != first.width() || c.image.height() != first.height() ||
            c.image.channels() != first.channels()) {
            throw ContractError("contact sheet: candidate images differ in shape");
        }
    }
    const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
    const int rows = (n + cols - 1) / cols;
    const int tw = first.width();
    const int th = first.height();
    ImageGrid sheet(cols * tw, rows * th, first.channels(), 0.0);
    nlohmann::json tiles = nlohmann::json::array();
    for (int i = 0; i < n; ++i) {
        const int row = i / cols;
        const int col = i % cols;
        const ImageGrid& tile = candidates.entries[i].image;
        for (int c = 0; c < tile.channels(); ++c)
            for (int y = 0; y < th; ++y)
                for (int x = 0; x < tw; ++x)
                    sheet.at(c, row * th + y, col * tw + x) = tile.at(c, y, x);
        nlohmann::json t;
        t["index"] = i;
        t["row"] = row;
        t["col"] = col;
        t["depth"] = candidates.entries[i].depth;
        t["score"] = candidates.entries[i].score;
        t["selected"] = (i == selected);
        tiles.push_back(std::move(t));
    }
    save_image(image_path, sheet);
    nlohmann::json j;
    j["grid"] = {{"rows", rows}, {"cols", cols}, {"tile_width", tw}, {"tile_height", th}};
    j["tiles"] = std::move(tiles);
    std::ofstream out(image_path + ".json");
    if (!out) throw IoError("cannot open " + image_path + ".json for writing");
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed for " + image_path + ".json");
}

}  // namespace harmonidiff
