#include "collapse/output.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace collapse {

std::string format_number(Scalar v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void JsonWriter::separator() {
    if (first_.empty()) return;
    if (first_.back()) first_.back() = false;
    else out_ += ',';
}

void JsonWriter::write_key(const std::string& key) {
    separator();
    out_ += '"';
    out_ += escape(key);
    out_ += "\":";
}

std::string JsonWriter::escape(const std::string& s) {
    std::string r;
    r.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '"': r += "\\\""; break;
            case '\\': r += "\\\\"; break;
            case '\n': r += "\\n"; break;
            case '\t': r += "\\t"; break;
            default: r += c;
        }
    }
    return r;
}

void JsonWriter::begin_object() {
    separator();
    out_ += '{';
    first_.push_back(true);
}

void JsonWriter::begin_object(const std::string& key) {
    write_key(key);
    out_ += '{';
    first_.push_back(true);
}

void JsonWriter::end_object() {
    out_ += '}';
    first_.pop_back();
}

void JsonWriter::begin_array(const std::string& key) {
    write_key(key);
    out_ += '[';
    first_.push_back(true);
}

void JsonWriter::end_array() {
    out_ += ']';
    first_.pop_back();
}

void JsonWriter::field(const std::string& key, Scalar v) {
    write_key(key);
    out_ += format_number(v);
}

void JsonWriter::field(const std::string& key, std::uint64_t v) {
    write_key(key);
    out_ += std::to_string(v);
}

void JsonWriter::field(const std::string& key, int v) {
    write_key(key);
    out_ += std::to_string(v);
}

void JsonWriter::field(const std::string& key, const std::string& v) {
    write_key(key);
    out_ += '"';
    out_ += escape(v);
    out_ += '"';
}

void JsonWriter::field(const std::string& key, const Vec& v) {
    begin_array(key);
    for (Index i = 0; i < v.size(); ++i) element(v[i]);
    end_array();
}

void JsonWriter::field(const std::string& key, const std::vector<std::uint64_t>& v) {
    begin_array(key);
    for (std::uint64_t x : v) element(x);
    end_array();
}

void JsonWriter::element(Scalar v) {
    separator();
    out_ += format_number(v);
}

void JsonWriter::element(std::uint64_t v) {
    separator();
    out_ += std::to_string(v);
}

namespace {

void write_config_echo(JsonWriter& w, const RunConfig& cfg) {
    w.begin_object("config");
    w.begin_object("run");
    w.field("model", to_string(cfg.model));
    w.field("trials", cfg.trials);
    w.field("seed", cfg.seed);
    w.field("ci_level", cfg.ci_level);
    w.end_object();
    w.begin_object("dynamics");
    w.field("h", cfg.h);
    w.field("t_max", cfg.t_max);
    w.field("collapse_eps", cfg.collapse_eps);
    w.end_object();
    w.begin_object("noise");
    w.field("sigma0", cfg.sigma0);
    w.field("sigma", cfg.sigma);
    w.end_object();
    w.begin_object("potential");
    w.field("family", to_string(cfg.family));
    if (cfg.weights) w.field("weights", *cfg.weights);
    else if (cfg.has_init()) w.field("weights", Vec::Ones(cfg.dimension()));
    w.end_object();
    w.begin_object("transverse");
    w.field("kind", to_string(cfg.transverse_kind));
    w.begin_array("axis_pair");
    w.element(static_cast<std::uint64_t>(cfg.axis_i));
    w.element(static_cast<std::uint64_t>(cfg.axis_j));
    w.end_array();
    w.field("strength", cfg.strength);
    w.end_object();
    w.begin_object("init");
    if (cfg.moduli) {
        w.field("kind", std::string("amplitudes"));
        w.field("moduli", *cfg.moduli);
        w.field("phases", cfg.phases ? *cfg.phases : Vec::Zero(cfg.moduli->size()));
    } else if (cfg.bpoint) {
        w.field("kind", std::string("bpoint"));
        w.field("bpoint", *cfg.bpoint);
    } else if (cfg.simplex) {
        w.field("kind", std::string("simplex"));
        w.field("simplex", *cfg.simplex);
    } else {
        w.field("kind", std::string("none"));
    }
    w.end_object();
    w.end_object();
}

}  // namespace

std::string ensemble_json(const RunConfig& cfg, const CollapseStats& stats) {
    JsonWriter w;
    w.begin_object();
    write_config_echo(w, cfg);
    w.field("model", to_string(cfg.model));
    w.field("trials", stats.trials);
    w.field("counts", stats.counts);
    w.field("censored", stats.censored);
    w.field("failed", stats.failed);
    w.field("frequencies", stats.frequencies);
    w.field("ci_level", stats.ci_level);
    w.field("ci_low", stats.ci_low);
    w.field("ci_high", stats.ci_high);
    w.field("born", stats.born);
    w.field("chi_square", stats.chi_square);
    w.field("dof", stats.chi_square_dof);
    w.field("p_value", stats.p_value);
    w.field("seed", cfg.seed);
    w.field("version", std::string(kVersion));
    w.end_object();
    std::string out = w.str();
    out += '\n';
    return out;
}

std::string trajectory_csv(const Trajectory& traj) {
    std::string out = "t";
    const Index n = traj.points.empty() ? 0 : traj.points.front().size();
    for (Index i = 0; i < n; ++i) out += ",b_" + std::to_string(i);
    out += ",f\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        out += format_number(traj.times[k]);
        for (Index i = 0; i < n; ++i) {
            out += ',';
            out += format_number(traj.points[k][i]);
        }
        out += ',';
        out += format_number(traj.f_values[k]);
        out += '\n';
    }
    return out;
}

std::string scan_csv(const ScanResult& scan) {
    std::string out = "x,p1_hat,ci_low,ci_high,censored_frac\n";
    for (std::size_t i = 0; i < scan.grid.size(); ++i) {
        const CollapseStats& s = scan.per_x[i];
        const Scalar censored_frac =
            static_cast<Scalar>(s.censored) / static_cast<Scalar>(s.trials);
        out += format_number(scan.grid[i]);
        out += ',';
        out += format_number(s.frequencies[0]);
        out += ',';
        out += format_number(s.ci_low[0]);
        out += ',';
        out += format_number(s.ci_high[0]);
        out += ',';
        out += format_number(censored_frac);
        out += '\n';
    }
    return out;
}

std::string scan_residuals_csv(const ScanResult& scan) {
    std::string out = "x,partner_x,residual,bound\n";
    for (std::size_t i = 0; i < scan.grid.size(); ++i) {
        out += format_number(scan.grid[i]);
        out += ',';
        out += format_number(scan.grid[scan.partner[i]]);
        out += ',';
        out += format_number(scan.symmetry_residuals[i]);
        out += ',';
        out += format_number(scan.residual_bounds[i]);
        out += '\n';
    }
    return out;
}

std::string scan_fit_json(const ScanResult& scan) {
    JsonWriter w;
    w.begin_object();
    w.field("slope", scan.fit.slope);
    w.field("intercept", scan.fit.intercept);
    w.field("max_abs_residual", scan.fit.max_abs_residual);
    w.end_object();
    std::string out = w.str();
    out += '\n';
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace collapse
