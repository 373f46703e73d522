#include "ksm/series_io.hpp"

#include "ksm/config.hpp"
#include "ksm/error.hpp"
#include "ksm/motility.hpp"
#include "text_util.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ksm {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::array<double DiagRecord::*, 12> kColumns{
    &DiagRecord::t,     &DiagRecord::mass,  &DiagRecord::vinf, &DiagRecord::grad2,
    &DiagRecord::grad4, &DiagRecord::lap2,  &DiagRecord::udev2, &DiagRecord::uL2,
    &DiagRecord::hm1,   &DiagRecord::y,     &DiagRecord::F,    &DiagRecord::absorb,
};

std::string frame_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%06d.field", index);
    return buf;
}

std::string read_file(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    if (!is) throw ValidationError("cannot open " + p.string());
    std::stringstream buf;
    buf << is.rdbuf();
    return buf.str();
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw ValidationError("cannot open " + p.string() + " for writing");
    os << content;
    if (!os) throw ValidationError("failed writing " + p.string());
}

std::string diag_csv(const std::vector<DiagRecord>& recs) {
    std::string out = kDiagColumns;
    out += '\n';
    for (const DiagRecord& r : recs) {
        for (std::size_t c = 0; c < kColumns.size(); ++c) {
            if (c) out += ',';
            out += detail::format_double(r.*kColumns[c]);
        }
        out += '\n';
    }
    return out;
}

std::string aux_csv(const std::vector<DiagRecord>& recs, const std::vector<double>& mobility_dev2) {
    std::string out = "t,mobility_dev2\n";
    for (std::size_t k = 0; k < recs.size(); ++k) {
        out += detail::format_double(recs[k].t) + ',' + detail::format_double(mobility_dev2.at(k)) + '\n';
    }
    return out;
}

/// Splits CSV text into rows of numbers after checking the header line.
std::vector<std::vector<double>> parse_csv(const std::string& text, const std::string& header, const std::string& what) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) throw ValidationError(what + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header) throw ValidationError(what + ": unexpected header '" + line + "'");
    const std::size_t width = detail::split(header, ',').size();
    std::vector<std::vector<double>> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto parts = detail::split(line, ',');
        if (parts.size() != width) {
            throw ValidationError(what + ": truncated row " + std::to_string(rows.size() + 1));
        }
        std::vector<double> row;
        for (const auto& p : parts) row.push_back(detail::parse_double(p));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

std::string content_hash(const std::string& content) {
    const std::string blob = "blob " + std::to_string(content.size()) + '\0' + content;
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(blob.data(), blob.size(), digest, &len, EVP_sha1(), nullptr) != 1) {
        throw NumericalError("content hash computation failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

void write_series(const fs::path& dir, const RunConfig& config, const Trajectory& traj) {
    fs::create_directories(dir / "fields");
    const std::string config_text = config_to_json(config);
    const std::string diag = diag_csv(traj.records);
    write_file(dir / "diag.csv", diag);
    write_file(dir / "aux.csv", aux_csv(traj.records, traj.mobility_dev2));

    json frames = json::array();
    for (const FieldFrame& fr : traj.frames) {
        const std::string name = frame_name(fr.index);
        std::ostringstream os;
        write_field(os, fr.u, fr.t);
        write_field(os, fr.v, fr.t);
        write_file(dir / "fields" / name, os.str());
        frames.push_back({{"index", fr.index}, {"t", fr.t}, {"file", "fields/" + name}});
    }

    const RunMeta& m = traj.meta;
    const StepMonitor& mon = traj.monitor;
    json manifest;
    manifest["format"] = kRunFormat;
    manifest["config"] = json::parse(config_text);
    manifest["config_hash"] = content_hash(config_text);
    manifest["diag_hash"] = content_hash(diag);
    manifest["meta"] = {{"eps", m.eps},
                        {"mass0", m.mass0},
                        {"ubar0", m.ubar0},
                        {"v0_sup", m.v0_sup},
                        {"weight_a", m.weight_a},
                        {"weight_b", m.weight_b},
                        {"scheme", m.scheme},
                        {"dt", m.dt},
                        {"cadence", m.cadence},
                        {"steps_per_output", m.steps_per_output},
                        {"field_stride", m.field_stride},
                        {"horizon", m.horizon},
                        {"warnings", m.warnings}};
    manifest["monitor"] = {{"steps", mon.steps},
                           {"max_mass_drift", mon.max_mass_drift},
                           {"max_vinf_increase", mon.max_vinf_increase},
                           {"min_u", mon.min_u},
                           {"min_v", mon.min_v},
                           {"max_residual", mon.max_residual}};
    manifest["complete"] = traj.complete;
    manifest["failure"] = traj.failure;
    manifest["records"] = traj.records.size();
    manifest["frames"] = frames;
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

StoredRun read_series(const fs::path& dir) {
    json manifest;
    try {
        manifest = json::parse(read_file(dir / "manifest.json"));
    } catch (const json::exception& e) {
        throw ValidationError("manifest.json: " + std::string(e.what()));
    }
    if (manifest.value("format", std::string{}) != kRunFormat) {
        throw ValidationError("manifest.json: unsupported format '" + manifest.value("format", std::string{}) + "'");
    }

    StoredRun out;
    try {
        if (manifest.at("config").at("motility").at("kind") == "custom") {
            throw ValidationError("runs with a custom motility cannot be reloaded");
        }
        const std::string config_text = manifest.at("config").dump(2);
        out.config = parse_config(config_text);
        out.config_hash = manifest.at("config_hash").get<std::string>();

        Trajectory& traj = out.trajectory;
        const json& m = manifest.at("meta");
        RunMeta& meta = traj.meta;
        meta.grid = build_grid(out.config.grid.dim, out.config.grid.extents, out.config.grid.cells);
        meta.eps = m.at("eps").get<double>();
        meta.motility = meta.eps > 0.0 ? regularize(out.config.motility, meta.eps) : limit_motility(out.config.motility);
        meta.mass0 = m.at("mass0").get<double>();
        meta.ubar0 = m.at("ubar0").get<double>();
        meta.v0_sup = m.at("v0_sup").get<double>();
        meta.weight_a = m.at("weight_a").get<double>();
        meta.weight_b = m.at("weight_b").get<double>();
        meta.scheme = m.at("scheme").get<std::string>();
        meta.dt = m.at("dt").get<double>();
        meta.cadence = m.at("cadence").get<double>();
        meta.steps_per_output = m.at("steps_per_output").get<int>();
        meta.field_stride = m.at("field_stride").get<int>();
        meta.horizon = m.at("horizon").get<double>();
        meta.warnings = m.at("warnings").get<std::vector<std::string>>();

        const json& mon = manifest.at("monitor");
        traj.monitor.steps = mon.at("steps").get<long>();
        traj.monitor.max_mass_drift = mon.at("max_mass_drift").get<double>();
        traj.monitor.max_vinf_increase = mon.at("max_vinf_increase").get<double>();
        traj.monitor.min_u = mon.at("min_u").get<double>();
        traj.monitor.min_v = mon.at("min_v").get<double>();
        traj.monitor.max_residual = mon.at("max_residual").get<double>();
        traj.complete = manifest.at("complete").get<bool>();
        traj.failure = manifest.at("failure").get<std::string>();

        const std::string diag = read_file(dir / "diag.csv");
        out.diag_hash_matches = content_hash(diag) == manifest.at("diag_hash").get<std::string>();
        const auto rows = parse_csv(diag, kDiagColumns, "diag.csv");
        const auto expected = manifest.at("records").get<std::size_t>();
        if (rows.size() != expected) {
            throw ValidationError("diag.csv: truncated (" + std::to_string(rows.size()) + " of " +
                                  std::to_string(expected) + " records)");
        }
        for (const auto& row : rows) {
            DiagRecord r;
            for (std::size_t c = 0; c < kColumns.size(); ++c) r.*kColumns[c] = row[c];
            if (!traj.records.empty() && !(r.t > traj.records.back().t)) {
                throw ValidationError("diag.csv: time column is not increasing at t=" + detail::format_double(r.t));
            }
            traj.records.push_back(r);
        }

        const auto aux = parse_csv(read_file(dir / "aux.csv"), "t,mobility_dev2", "aux.csv");
        if (aux.size() != rows.size()) throw ValidationError("aux.csv: row count does not match diag.csv");
        for (std::size_t k = 0; k < aux.size(); ++k) {
            if (aux[k][0] != traj.records[k].t) throw ValidationError("aux.csv: time column does not match diag.csv");
            traj.mobility_dev2.push_back(aux[k][1]);
        }

        for (const json& fj : manifest.at("frames")) {
            const fs::path p = dir / fj.at("file").get<std::string>();
            if (!fs::exists(p)) throw ValidationError("missing field snapshot " + p.string());
            std::istringstream is(read_file(p));
            FieldSnapshot u = read_field(is);
            FieldSnapshot v = read_field(is);
            if (!(u.field.grid() == meta.grid) || !(v.field.grid() == meta.grid)) {
                throw ValidationError(p.string() + ": grid does not match the manifest");
            }
            traj.frames.push_back({fj.at("index").get<int>(), fj.at("t").get<double>(), std::move(u.field), std::move(v.field)});
        }
    } catch (const json::exception& e) {
        throw ValidationError("manifest.json: " + std::string(e.what()));
    }
    return out;
}

}  // namespace ksm
