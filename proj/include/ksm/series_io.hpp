#pragma once

/// @file series_io.hpp
/// @brief Trajectory directories.
///
///   <dir>/manifest.json        config echo, content hashes, run metadata
///   <dir>/diag.csv             t,mass,vinf,grad2,grad4,lap2,udev2,uL2,hm1,y,F,absorb
///   <dir>/aux.csv              t,mobility_dev2
///   <dir>/fields/<index>.field u snapshot followed by v snapshot
///
/// Numbers are written with 17 significant digits, so a write/read cycle
/// is lossless.

#include "ksm/records.hpp"
#include "ksm/run_config.hpp"

#include <filesystem>
#include <string>

namespace ksm {

inline constexpr const char* kDiagColumns = "t,mass,vinf,grad2,grad4,lap2,udev2,uL2,hm1,y,F,absorb";
inline constexpr const char* kRunFormat = "ksm-run v1";

/// Git blob hash ("blob <size>\0" + content, SHA-1) as lowercase hex.
std::string content_hash(const std::string& content);

void write_series(const std::filesystem::path& dir, const RunConfig& config, const Trajectory& traj);

struct StoredRun {
    RunConfig config;
    Trajectory trajectory;
    std::string config_hash;
    bool diag_hash_matches = true;  ///< false if diag.csv changed since it was written
};

/// Reads and validates a run directory (format version, column header,
/// row counts, monotone time, referenced snapshot files).
StoredRun read_series(const std::filesystem::path& dir);

}  // namespace ksm
