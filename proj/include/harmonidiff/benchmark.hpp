#pragma once

#include <optional>
#include <string>
#include <vector>

#include "harmonidiff/baselines.hpp"
#include "harmonidiff/config.hpp"
#include "harmonidiff/manifest.hpp"
#include "harmonidiff/metrics.hpp"

namespace harmonidiff {

enum class Method { CopyPaste, Poisson, HarmoniDiff };

std::string method_name(Method m);
std::optional<Method> method_from_name(const std::string& name);

struct BenchRow {
    std::string task_id;
    Method method = Method::CopyPaste;
    bool ok = false;
    std::string reason;       // failure description when !ok
    double bgd = 0.0;
    double harmony = 0.0;
    int selected_depth = -1;  // harmonidiff only
    double runtime_ms = 0.0;  // JSON report only; the CSV stays byte-stable
};

struct BenchAggregate {
    Method method = Method::CopyPaste;
    int succeeded = 0;
    int failed = 0;
    double mean_bgd = 0.0;
    double mean_harmony = 0.0;
    bool has_frechet = false;
    double frechet = 0.0;  // composite population vs manifest targets
};

struct BenchReport {
    std::vector<BenchRow> rows;              // manifest order, then method order
    std::vector<BenchAggregate> aggregates;  // method order
};

struct BenchContext {
    HarmonizeEngine engine;  // score_fn already wired to the scorer below
    PoissonConfig poisson;
    int bgd_width = 3;
    HarmonyScorer scorer;
    std::string out_dir;  // composites land here as <id>_<method>.png
};

// Runs every requested method on every manifest entry; failures become rows
// with a reason instead of aborting the run.
BenchReport run_benchmark(const Manifest& manifest, const std::vector<Method>& methods,
                          const BenchContext& ctx);

void write_report_csv(const std::string& path, const BenchReport& report);
void write_report_json(const std::string& path, const BenchReport& report);

}  // namespace harmonidiff
