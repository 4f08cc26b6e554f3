#pragma once

#include "collapse/config.hpp"
#include "collapse/dynamics.hpp"
#include "collapse/stats.hpp"
#include "collapse/types.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace collapse {

// Numbers in CSV/JSON are written with 17 significant digits so documents
// round-trip exactly and reruns diff byte-for-byte.
std::string format_number(Scalar v);

// Minimal ordered JSON emitter. Key order is the emission order, which
// keeps documents byte-stable across runs.
class JsonWriter {
public:
    void begin_object();
    void begin_object(const std::string& key);
    void end_object();
    void begin_array(const std::string& key);
    void end_array();
    void field(const std::string& key, Scalar v);
    void field(const std::string& key, std::uint64_t v);
    void field(const std::string& key, int v);
    void field(const std::string& key, const std::string& v);
    void field(const std::string& key, const Vec& v);
    void field(const std::string& key, const std::vector<std::uint64_t>& v);
    void element(Scalar v);
    void element(std::uint64_t v);
    const std::string& str() const { return out_; }

private:
    void separator();
    void write_key(const std::string& key);
    static std::string escape(const std::string& s);

    std::string out_;
    std::vector<bool> first_;
};

// The ensemble result document (fixed top-level schema).
std::string ensemble_json(const RunConfig& cfg, const CollapseStats& stats);

std::string trajectory_csv(const Trajectory& traj);
std::string scan_csv(const ScanResult& scan);
std::string scan_residuals_csv(const ScanResult& scan);
std::string scan_fit_json(const ScanResult& scan);

void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace collapse
