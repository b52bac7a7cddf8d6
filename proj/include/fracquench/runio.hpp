#pragma once

// Run-directory plumbing: config file parsing with strict key checking,
// CSV emission for traces / snapshots / sweeps, and the run manifest
// with a content hash over the emitted files.

#include "fracquench/quench.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace fq {

inline constexpr const char* kToolVersion = "0.3.1";

/// Resolved run configuration: the solver config plus file-level extras.
struct RunConfig {
    SolveConfig solve;
    double u0_amplitude = 0.0; // peak of a * prod_d sin(pi x_d / L_d)
    std::string out_dir;       // empty means caller chooses
};

/// Parse and validate a JSON config file. Unknown keys are rejected;
/// defaults are filled (h = 1e-3, quench_eps = 1e-3 c, modes = 128).
RunConfig parse_config(const std::filesystem::path& path);

/// Parse from an in-memory document (round-trip and test entry point).
RunConfig parse_config_text(const std::string& text);

/// Serialize the fully resolved config; parse_config_text of the result
/// reproduces an identical RunConfig.
std::string config_echo(const RunConfig& cfg);

/// Initial-state coefficients for the configured amplitude bump.
Eigen::ArrayXd u0_from_amplitude(double amplitude, const BasisPtr& basis);

/// Format with 17 significant digits, '.' separator, shortest round-trip
/// not required; used for all CSV payloads.
std::string csv_number(double v);

/// trace.csv (t,max_u,l2,hs,h_used) plus snapshot_XXXX.csv grid files
/// every snapshot_every accepted steps (none when zero). Returns the
/// file names written, in emission order. Deterministic byte output.
std::vector<std::string> emit_plotdata(const Trajectory& traj,
                                       const std::filesystem::path& out_dir,
                                       int snapshot_every);

/// phase.csv payload for a sweep.
std::string sweep_csv(const std::vector<SweepCell>& cells);

/// report.json payload: status, quench bracket and points, echoed config.
std::string report_document(const RunConfig& cfg, const Trajectory& traj,
                            const QuenchReport& rep);

struct RunManifest {
    std::string tool_version = kToolVersion;
    std::string config_echo;
    std::string started;
    std::string finished;
    std::string output_hash; // SHA-256 over the emitted files, name order
    std::string status;
    long seed = 0;
};

std::string sha256_hex(const std::string& bytes);

/// Hash of every regular file in the directory except manifest.json,
/// in sorted name order (name then contents fed to one SHA-256 stream).
std::string hash_run_outputs(const std::filesystem::path& dir);

void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest);

/// Recompute the output hash and compare with the stored manifest.
bool verify_manifest(const std::filesystem::path& dir);

std::string timestamp_now();

} // namespace fq
