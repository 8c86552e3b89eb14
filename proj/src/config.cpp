#include "harmonidiff/config.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "harmonidiff/errors.hpp"

namespace harmonidiff {

namespace {

using json = nlohmann::json;

// nlohmann reports byte offsets; humans want lines.
int line_of_byte(const std::string& text, std::size_t byte) {
    int line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') ++line;
    }
    return line;
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (known.find(key) == known.end()) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
    }
}

template <typename T>
T get_field(const json& obj, const char* key, T fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("field '") + key + "' in " + where + " has the wrong type");
    }
}

}  // namespace

PipelineConfig default_config() { return PipelineConfig{}; }

PipelineConfig parse_config(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("malformed JSON in " + origin + " at line " +
                         std::to_string(line_of_byte(text, e.byte)) + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError(origin + ": top level must be a JSON object");
    reject_unknown_keys(j,
                        {"schedule", "codec", "predictor", "harmonize", "poisson", "metrics",
                         "scorer_path", "seed"},
                        origin);
    PipelineConfig cfg;

    if (j.contains("schedule")) {
        const json& s = j["schedule"];
        if (!s.is_object()) throw ConfigError("'schedule' must be an object in " + origin);
        reject_unknown_keys(s, {"train_steps", "inference_steps", "beta_start", "beta_end"},
                            origin + " schedule");
        cfg.train_steps = get_field(s, "train_steps", cfg.train_steps, "schedule");
        cfg.inference_steps = get_field(s, "inference_steps", cfg.inference_steps, "schedule");
        cfg.beta_start = get_field(s, "beta_start", cfg.beta_start, "schedule");
        cfg.beta_end = get_field(s, "beta_end", cfg.beta_end, "schedule");
    }
    if (j.contains("codec")) {
        const json& s = j["codec"];
        if (!s.is_object()) throw ConfigError("'codec' must be an object in " + origin);
        reject_unknown_keys(s, {"type", "factor"}, origin + " codec");
        cfg.codec_type = get_field<std::string>(s, "type", cfg.codec_type, "codec");
        cfg.codec_factor = get_field(s, "factor", cfg.codec_factor, "codec");
    }
    if (j.contains("predictor")) {
        const json& s = j["predictor"];
        if (!s.is_object()) throw ConfigError("'predictor' must be an object in " + origin);
        reject_unknown_keys(s, {"type", "mean", "variance"}, origin + " predictor");
        cfg.predictor_type = get_field<std::string>(s, "type", cfg.predictor_type, "predictor");
        cfg.predictor_mean = get_field(s, "mean", cfg.predictor_mean, "predictor");
        cfg.predictor_variance = get_field(s, "variance", cfg.predictor_variance, "predictor");
    }
    if (j.contains("harmonize")) {
        const json& s = j["harmonize"];
        if (!s.is_object()) throw ConfigError("'harmonize' must be an object in " + origin);
        reject_unknown_keys(s,
                            {"harmonious_depths", "preservation_depth", "edge_width_fraction",
                             "cfg_scale", "condition_inversion", "worker_threads"},
                            origin + " harmonize");
        cfg.harmonize.harmonious_depths = get_field(s, "harmonious_depths",
                                                    cfg.harmonize.harmonious_depths, "harmonize");
        cfg.harmonize.preservation_depth =
            get_field(s, "preservation_depth", cfg.harmonize.preservation_depth, "harmonize");
        cfg.harmonize.edge_width_fraction =
            get_field(s, "edge_width_fraction", cfg.harmonize.edge_width_fraction, "harmonize");
        cfg.harmonize.cfg_scale = get_field(s, "cfg_scale", cfg.harmonize.cfg_scale, "harmonize");
        cfg.harmonize.condition_inversion =
            get_field(s, "condition_inversion", cfg.harmonize.condition_inversion, "harmonize");
        cfg.harmonize.worker_threads =
            get_field(s, "worker_threads", cfg.harmonize.worker_threads, "harmonize");
    }
    if (j.contains("poisson")) {
        const json& s = j["poisson"];
        if (!s.is_object()) throw ConfigError("'poisson' must be an object in " + origin);
        reject_unknown_keys(s, {"solver", "tolerance", "max_iterations"}, origin + " poisson");
        const std::string solver =
            get_field<std::string>(s, "solver", "conjugate_gradient", "poisson");
        if (solver == "conjugate_gradient" || solver == "cg") {
            cfg.poisson.solver = PoissonSolver::ConjugateGradient;
        } else if (solver == "jacobi") {
            cfg.poisson.solver = PoissonSolver::Jacobi;
        } else if (solver == "gauss_seidel") {
            cfg.poisson.solver = PoissonSolver::GaussSeidel;
        } else {
            throw ConfigError("unknown poisson solver '" + solver + "' in " + origin);
        }
        cfg.poisson.tolerance = get_field(s, "tolerance", cfg.poisson.tolerance, "poisson");
        cfg.poisson.max_iterations =
            get_field(s, "max_iterations", cfg.poisson.max_iterations, "poisson");
    }
    if (j.contains("metrics")) {
        const json& s = j["metrics"];
        if (!s.is_object()) throw ConfigError("'metrics' must be an object in " + origin);
        reject_unknown_keys(s, {"bgd_width"}, origin + " metrics");
        cfg.bgd_width = get_field(s, "bgd_width", cfg.bgd_width, "metrics");
    }
    cfg.scorer_path = get_field<std::string>(j, "scorer_path", cfg.scorer_path, origin);
    cfg.seed = get_field<std::uint64_t>(j, "seed", cfg.seed, origin);

    // Range validation; build_engine re-checks the structural pieces.
    if (cfg.train_steps < 1) throw ConfigError("schedule.train_steps must be >= 1");
    if (cfg.inference_steps < 1 || cfg.inference_steps > cfg.train_steps) {
        throw ConfigError("schedule.inference_steps must lie in [1, train_steps]");
    }
    if (!(cfg.beta_start > 0.0) || !(cfg.beta_end < 1.0) || !(cfg.beta_start <= cfg.beta_end)) {
        throw ConfigError("schedule betas must satisfy 0 < beta_start <= beta_end < 1");
    }
    if (cfg.codec_type != "identity" && cfg.codec_type != "patch_average") {
        throw ConfigError("codec.type must be 'identity' or 'patch_average'");
    }
    if (cfg.codec_factor < 1) throw ConfigError("codec.factor must be >= 1");
    if (cfg.predictor_type != "zero" && cfg.predictor_type != "analytic_gaussian") {
        throw ConfigError("predictor.type must be 'zero' or 'analytic_gaussian'");
    }
    if (cfg.predictor_type == "analytic_gaussian" && !(cfg.predictor_variance > 0.0)) {
        throw ConfigError("predictor.variance must be > 0");
    }
    if (cfg.bgd_width < 1) throw ConfigError("metrics.bgd_width must be >= 1");
    if (!(cfg.poisson.tolerance > 0.0)) throw ConfigError("poisson.tolerance must be > 0");
    if (cfg.poisson.max_iterations < 1) throw ConfigError("poisson.max_iterations must be >= 1");
    try {
        build_engine(cfg);
    } catch (const ContractError& e) {
        throw ConfigError(std::string("invalid configuration: ") + e.what());
    }
    return cfg;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

HarmonizeEngine build_engine(const PipelineConfig& cfg) {
    HarmonizeEngine engine;
    engine.schedule =
        build_schedule(cfg.train_steps, cfg.inference_steps, cfg.beta_start, cfg.beta_end);
    if (cfg.codec_type == "identity") {
        engine.codec = std::make_shared<IdentityCodec>();
    } else {
        engine.codec = std::make_shared<PatchAverageCodec>(cfg.codec_factor);
    }
    if (cfg.predictor_type == "zero") {
        engine.predictor = std::make_shared<ZeroPredictor>();
    } else {
        engine.predictor = std::make_shared<AnalyticGaussianPredictor>(
            engine.schedule, cfg.predictor_mean, cfg.predictor_variance);
    }
    engine.params = cfg.harmonize;
    validate_engine(engine);
    return engine;
}

}  // namespace harmonidiff
