#include "collapse/config.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace collapse {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw std::invalid_argument("config: " + where + ": " + what);
}

Scalar parse_number(const std::string& raw, const std::string& where) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(raw.c_str(), &end);
    if (end != raw.c_str() + raw.size() || raw.empty() || errno == ERANGE)
        fail(where, "expected a number, got '" + raw + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& raw, const std::string& where) {
    if (raw.empty() || raw[0] == '-') fail(where, "expected a nonnegative integer, got '" + raw + "'");
    if (raw.find_first_of(".eE") != std::string::npos)
        fail(where, "expected an integer, got '" + raw + "'");
    errno = 0;
    char* end = nullptr;
    const std::uint64_t v = std::strtoull(raw.c_str(), &end, 10);
    if (end != raw.c_str() + raw.size() || errno == ERANGE)
        fail(where, "expected a nonnegative integer, got '" + raw + "'");
    return v;
}

std::string parse_string(const std::string& raw, const std::string& where) {
    if (raw.size() < 2 || raw.front() != '"' || raw.back() != '"')
        fail(where, "expected a quoted string, got '" + raw + "'");
    return raw.substr(1, raw.size() - 2);
}

std::vector<std::string> parse_array_items(const std::string& raw, const std::string& where) {
    if (raw.size() < 2 || raw.front() != '[' || raw.back() != ']')
        fail(where, "expected an array, got '" + raw + "'");
    std::vector<std::string> items;
    std::string body = raw.substr(1, raw.size() - 2);
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

Vec parse_number_array(const std::string& raw, const std::string& where) {
    const auto items = parse_array_items(raw, where);
    Vec v(static_cast<Index>(items.size()));
    for (std::size_t i = 0; i < items.size(); ++i)
        v[static_cast<Index>(i)] = parse_number(items[i], where);
    return v;
}

std::vector<Index> parse_index_array(const std::string& raw, const std::string& where) {
    const auto items = parse_array_items(raw, where);
    std::vector<Index> v(items.size());
    for (std::size_t i = 0; i < items.size(); ++i)
        v[i] = static_cast<Index>(parse_u64(items[i], where));
    return v;
}

// Strips a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_string = !in_string;
        else if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

void apply_key(RunConfig& cfg, const std::string& key, const std::string& raw) {
    const std::string& w = key;
    if (key == "run.model") cfg.model = model_from_string(parse_string(raw, w));
    else if (key == "run.trials") cfg.trials = parse_u64(raw, w);
    else if (key == "run.seed") cfg.seed = parse_u64(raw, w);
    else if (key == "run.ci_level") cfg.ci_level = parse_number(raw, w);
    else if (key == "dynamics.h") cfg.h = parse_number(raw, w);
    else if (key == "dynamics.t_max") cfg.t_max = parse_number(raw, w);
    else if (key == "dynamics.collapse_eps") cfg.collapse_eps = parse_number(raw, w);
    else if (key == "noise.sigma0") cfg.sigma0 = parse_number(raw, w);
    else if (key == "noise.sigma") cfg.sigma = parse_number(raw, w);
    else if (key == "potential.family") {
        const std::string v = parse_string(raw, w);
        if (v == "quartic_vertex_well") cfg.family = PotentialFamily::quartic_vertex_well;
        else if (v == "weighted_quartic") cfg.family = PotentialFamily::weighted_quartic;
        else fail(w, "unknown potential family '" + v + "'");
    } else if (key == "potential.weights") cfg.weights = parse_number_array(raw, w);
    else if (key == "transverse.kind") {
        const std::string v = parse_string(raw, w);
        if (v == "none") cfg.transverse_kind = TransverseKind::none;
        else if (v == "tangent_rotation") cfg.transverse_kind = TransverseKind::tangent_rotation;
        else fail(w, "unknown transverse kind '" + v + "'");
    } else if (key == "transverse.axis_pair") {
        const auto axes = parse_index_array(raw, w);
        if (axes.size() != 2) fail(w, "axis_pair must have exactly two indices");
        cfg.axis_i = axes[0];
        cfg.axis_j = axes[1];
    } else if (key == "transverse.strength") cfg.strength = parse_number(raw, w);
    else if (key == "init.moduli") cfg.moduli = parse_number_array(raw, w);
    else if (key == "init.phases") cfg.phases = parse_number_array(raw, w);
    else if (key == "init.bpoint") cfg.bpoint = parse_number_array(raw, w);
    else if (key == "init.simplex") cfg.simplex = parse_number_array(raw, w);
    else if (key == "scan.grid") {
        const Vec g = parse_number_array(raw, w);
        cfg.grid.assign(g.begin(), g.end());
    } else if (key == "scan.trials_per_point") cfg.trials_per_point = parse_u64(raw, w);
    else if (key == "gradcheck.samples") cfg.gradcheck_samples = parse_u64(raw, w);
    else if (key == "gradcheck.dims") cfg.gradcheck_dims = parse_index_array(raw, w);
    else fail(w, "unknown key");
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::stringstream ss(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(lineno);
        if (line.front() == '[') {
            if (line.back() != ']') fail(where, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) fail(where, "empty section name");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) fail(where, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string raw = trim(line.substr(eq + 1));
        if (key.empty()) fail(where, "empty key");
        if (section.empty()) fail(where, "key outside of a [section]");
        apply_key(cfg, section + "." + key, raw);
    }
    return cfg;
}

RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides) {
    RunConfig cfg;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
        std::stringstream buffer;
        buffer << in.rdbuf();
        cfg = parse_config_text(buffer.str());
    }
    for (const std::string& ov : overrides) {
        const std::size_t eq = ov.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("override '" + ov + "': expected key=value");
        const std::string key = trim(ov.substr(0, eq));
        const std::string raw = trim(ov.substr(eq + 1));
        if (key.find('.') == std::string::npos)
            throw std::invalid_argument("override '" + ov + "': key must be section.key");
        apply_key(cfg, key, raw);
    }
    return cfg;
}

Index RunConfig::dimension() const {
    if (moduli) return moduli->size();
    if (bpoint) return bpoint->size();
    if (simplex) return simplex->size();
    if (weights) return weights->size();
    throw std::invalid_argument("config: dimension is undetermined (no init state or weights)");
}

AmplitudeVector RunConfig::initial_amplitudes() const {
    if (!moduli) throw std::invalid_argument("config: no amplitude (moduli/phases) init given");
    const Vec ph = phases ? *phases : Vec::Zero(moduli->size());
    return AmplitudeVector::from_modulus_phase(*moduli, ph);
}

BPoint RunConfig::initial_bpoint() const {
    if (moduli) return amplitudes_to_bpoint(initial_amplitudes());
    if (bpoint) return BPoint(*bpoint);
    if (simplex) return project_to_sphere(SimplexPoint(*simplex).vec().cwiseSqrt());
    throw std::invalid_argument("config: an initial state ([init] section) is required");
}

SimplexPoint RunConfig::initial_simplex() const {
    if (simplex) return SimplexPoint(*simplex);
    Vec p = bpoint_to_probabilities(initial_bpoint());
    p /= p.sum();
    return SimplexPoint::unchecked(std::move(p));
}

Potential RunConfig::make_potential(Index n) const {
    if (weights && weights->size() != n)
        throw std::invalid_argument("config: potential.weights length does not match the state dimension");
    if (family == PotentialFamily::weighted_quartic)
        return Potential::weighted_quartic(weights ? *weights : Vec::Ones(n));
    if (weights && (*weights - Vec::Ones(n)).cwiseAbs().maxCoeff() > 0.0)
        throw std::invalid_argument(
            "config: quartic_vertex_well has unit weights; use family \"weighted_quartic\"");
    return Potential::quartic_vertex_well(n);
}

DynamicsConfig RunConfig::make_dynamics(Index n) const {
    DynamicsConfig dyn(make_potential(n));
    dyn.h = h;
    dyn.t_max = t_max;
    dyn.collapse_eps = collapse_eps;
    dyn.noise.sigma0 = sigma0;
    dyn.noise.sigma = sigma;
    if (transverse_kind == TransverseKind::tangent_rotation)
        dyn.transverse = TransverseFieldSpec::tangent_rotation(axis_i, axis_j, strength);
    dyn.validate();
    return dyn;
}

void RunConfig::validate() const {
    const int forms = (moduli ? 1 : 0) + (bpoint ? 1 : 0) + (simplex ? 1 : 0);
    if (forms > 1)
        throw std::invalid_argument(
            "config: give exactly one initial-state form (init.moduli, init.bpoint or init.simplex)");
    if (phases && !moduli)
        throw std::invalid_argument("config: init.phases requires init.moduli");
    if (phases && phases->size() != moduli->size())
        throw std::invalid_argument("config: init.moduli and init.phases must have equal length");
    if (!(ci_level > 0.0 && ci_level < 1.0))
        throw std::invalid_argument("config: run.ci_level must be in (0, 1)");
    if (has_init() && weights && weights->size() != dimension())
        throw std::invalid_argument("config: potential.weights length does not match the init state");
}

std::string to_string(PotentialFamily family) {
    return family == PotentialFamily::quartic_vertex_well ? "quartic_vertex_well"
                                                          : "weighted_quartic";
}

std::string to_string(TransverseKind kind) {
    return kind == TransverseKind::none ? "none" : "tangent_rotation";
}

}  // namespace collapse
