#include "fracsens/config.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace fracsens::config {

namespace {

using nlohmann::json;

std::string child(const std::string& ptr, std::string_view key) {
    std::string escaped;
    for (char c : key) {
        if (c == '~') escaped += "~0";
        else if (c == '/') escaped += "~1";
        else escaped += c;
    }
    return ptr + "/" + escaped;
}

void only_keys(const json& obj, const std::string& ptr, std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) throw ConfigError(ptr, "expected an object");
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (auto a : allowed) known = known || key == a;
        if (!known) throw ConfigError(child(ptr, key), "unknown key");
    }
}

const json& require(const json& obj, const std::string& ptr, std::string_view key) {
    const auto it = obj.find(std::string(key));
    if (it == obj.end()) throw ConfigError(child(ptr, key), "missing required key");
    return *it;
}

double number(const json& v, const std::string& ptr) {
    if (!v.is_number()) throw ConfigError(ptr, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(ptr, "expected a finite number");
    return d;
}

std::string string(const json& v, const std::string& ptr) {
    if (!v.is_string()) throw ConfigError(ptr, "expected a string");
    return v.get<std::string>();
}

std::vector<double> numbers(const json& v, const std::string& ptr) {
    if (!v.is_array()) throw ConfigError(ptr, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], ptr + "/" + std::to_string(i)));
    return out;
}

PiecewiseLinear piecewise(const json& v, const std::string& ptr) {
    only_keys(v, ptr, {"breaks", "values", "left", "right"});
    const auto breaks = numbers(require(v, ptr, "breaks"), child(ptr, "breaks"));
    if (breaks.size() < 2) throw ConfigError(child(ptr, "breaks"), "need at least two break points");
    for (std::size_t i = 1; i < breaks.size(); ++i)
        if (!(breaks[i] > breaks[i - 1]))
            throw ConfigError(child(ptr, "breaks") + "/" + std::to_string(i), "break points must increase");
    const bool has_values = v.contains("values");
    const bool has_lr = v.contains("left") || v.contains("right");
    if (has_values == has_lr) throw ConfigError(ptr, "give either values or left and right");
    const std::size_t cells = breaks.size() - 1;
    if (has_values) {
        const auto vals = numbers(v["values"], child(ptr, "values"));
        if (vals.size() != cells) throw ConfigError(child(ptr, "values"), "need one value per cell");
        return PiecewiseLinear::piecewise_constant(breaks, vals);
    }
    auto left = numbers(require(v, ptr, "left"), child(ptr, "left"));
    auto right = numbers(require(v, ptr, "right"), child(ptr, "right"));
    if (left.size() != cells) throw ConfigError(child(ptr, "left"), "need one value per cell");
    if (right.size() != cells) throw ConfigError(child(ptr, "right"), "need one value per cell");
    return PiecewiseLinear(breaks, std::move(left), std::move(right));
}

json parse_json(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("malformed JSON: ") + e.what());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

void validate_N(std::size_t N) {
    if (N < 64 || N > 65536 || (N & (N - 1)) != 0)
        throw ConfigError("/mesh/N", "N must be a power of two between 64 and 65536");
}

ProblemConfig parse_problem(std::string_view json_text) {
    const json root = parse_json(json_text);
    only_keys(root, "", {"name", "description", "alpha", "T", "f", "growth_gamma", "history", "exact_solution",
                         "mesh", "corrector", "seed", "output"});
    ProblemConfig cfg;
    if (root.contains("name")) cfg.name = string(root["name"], "/name");
    if (root.contains("description")) string(root["description"], "/description");
    cfg.alpha = number(require(root, "", "alpha"), "/alpha");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw ConfigError("/alpha", "alpha must lie in (0, 1)");
    cfg.T = number(require(root, "", "T"), "/T");
    cfg.f = string(require(root, "", "f"), "/f");
    try {
        (void)ScalarField::from_expression(cfg.f);
    } catch (const SyntaxError& e) {
        throw ConfigError("/f", e.what());
    }
    cfg.growth_gamma = root.contains("growth_gamma") ? number(root["growth_gamma"], "/growth_gamma") : 0.0;
    if (!(cfg.growth_gamma >= 0.0)) throw ConfigError("/growth_gamma", "must be nonnegative");

    const json& hist = require(root, "", "history");
    only_keys(hist, "/history", {"t", "w0", "lw"});
    cfg.t = number(require(hist, "/history", "t"), "/history/t");
    cfg.w0 = hist.contains("w0") ? number(hist["w0"], "/history/w0") : 0.0;
    if (!(cfg.t >= 0.0)) throw ConfigError("/history/t", "must be nonnegative");
    if (!(cfg.T > cfg.t)) throw ConfigError("/T", "T must exceed the history time t");
    if (hist.contains("lw")) {
        cfg.lw = piecewise(hist["lw"], "/history/lw");
        if (cfg.lw.lower() != 0.0 || std::abs(cfg.lw.upper() - cfg.t) > 1e-12 * std::max(1.0, cfg.t))
            throw ConfigError("/history/lw/breaks", "lw must cover exactly [0, t]");
    } else if (cfg.t > 0.0) {
        throw ConfigError("/history/lw", "missing required key for t > 0");
    }
    if (cfg.t == 0.0 && !cfg.lw.empty()) throw ConfigError("/history/lw", "must be absent when t = 0");

    if (root.contains("exact_solution")) {
        cfg.exact_solution = string(root["exact_solution"], "/exact_solution");
        try {
            (void)expr::parse(*cfg.exact_solution, {"tau"});
        } catch (const SyntaxError& e) {
            throw ConfigError("/exact_solution", e.what());
        }
    }

    if (root.contains("mesh")) {
        const json& m = root["mesh"];
        only_keys(m, "/mesh", {"N", "kind", "grading"});
        if (m.contains("N")) {
            if (!m["N"].is_number_integer() || m["N"].get<long long>() < 0)
                throw ConfigError("/mesh/N", "expected a positive integer");
            cfg.N = m["N"].get<std::size_t>();
        }
        if (m.contains("kind")) {
            const auto kind = string(m["kind"], "/mesh/kind");
            if (kind == "uniform") cfg.mesh_kind = MeshKind::Uniform;
            else if (kind == "graded") cfg.mesh_kind = MeshKind::Graded;
            else throw ConfigError("/mesh/kind", "expected \"uniform\" or \"graded\"");
        }
        if (m.contains("grading")) {
            cfg.grading = number(m["grading"], "/mesh/grading");
            if (!(cfg.grading >= 1.0)) throw ConfigError("/mesh/grading", "grading must be at least 1");
        }
    }
    validate_N(cfg.N);

    if (root.contains("corrector")) {
        const auto c = string(root["corrector"], "/corrector");
        if (c == "newton") cfg.corrector = Corrector::Newton;
        else if (c == "fixed-point") cfg.corrector = Corrector::FixedPoint;
        else throw ConfigError("/corrector", "expected \"newton\" or \"fixed-point\"");
    }
    if (root.contains("seed")) {
        if (!root["seed"].is_number_unsigned()) throw ConfigError("/seed", "expected a nonnegative integer");
        cfg.seed = root["seed"].get<std::uint64_t>();
    }
    if (root.contains("output")) {
        const json& o = root["output"];
        only_keys(o, "/output", {"format", "path"});
        if (o.contains("format")) {
            const auto f = string(o["format"], "/output/format");
            if (f == "csv") cfg.format = OutputFormat::Csv;
            else if (f == "json") cfg.format = OutputFormat::Json;
            else throw ConfigError("/output/format", "expected \"csv\" or \"json\"");
        }
        if (o.contains("path")) cfg.output_path = string(o["path"], "/output/path");
    }
    cfg.canonical = root.dump();
    return cfg;
}

ProblemConfig load_problem(const std::filesystem::path& path) { return parse_problem(read_file(path)); }

PiecewiseLinear parse_piecewise(std::string_view json_text) { return piecewise(parse_json(json_text), ""); }

double effective_grading(const ProblemConfig& cfg) {
    if (cfg.mesh_kind == MeshKind::Uniform) return 1.0;
    return cfg.grading > 0.0 ? cfg.grading : 2.0 / cfg.alpha;
}

Problem make_problem(const ProblemConfig& cfg) {
    return Problem(Order(cfg.alpha), cfg.T, ScalarField::from_expression(cfg.f), cfg.growth_gamma);
}

HistoryData make_history(const ProblemConfig& cfg) {
    if (cfg.t == 0.0) return HistoryData::point(cfg.w0);
    return HistoryData(cfg.t, cfg.w0, cfg.lw);
}

Mesh make_mesh(const ProblemConfig& cfg) {
    validate_N(cfg.N);
    if (cfg.mesh_kind == MeshKind::Uniform) return Mesh::uniform(cfg.N);
    return Mesh::graded(cfg.N, effective_grading(cfg));
}

SolverOptions make_solver_options(const ProblemConfig& cfg) {
    SolverOptions o;
    o.corrector = cfg.corrector;
    return o;
}

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace fracsens::config
