//==============================================================================
// io.hpp
// Output plumbing shared by the CLI: atomic file writes (temp + rename) and
// small helpers for emitting deterministic JSON documents.
//==============================================================================
#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "fgm/errors.hpp"
#include "fgm/grid.hpp"

namespace fgm {

using json = nlohmann::json;

inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw invalid_input("atomic_write: cannot open " + tmp.string());
        out << content;
        if (!out) throw invalid_input("atomic_write: short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

inline void write_json(const std::filesystem::path& path, const json& doc) {
    atomic_write(path, doc.dump(2) + "\n");
}

inline void write_field_csv(const std::filesystem::path& path, const Field& f) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    save_csv(f, tmp.string());
    fs::rename(tmp, path);
}

// columns share one x axis
inline void write_columns_csv(const std::filesystem::path& path,
                              const std::vector<std::string>& names,
                              const std::vector<double>& x,
                              const std::vector<const std::vector<double>*>& cols) {
    std::string out = "x";
    for (const auto& n : names) out += "," + n;
    out += "\n";
    char buf[64];
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", x[i]);
        out += buf;
        for (const auto* c : cols) {
            std::snprintf(buf, sizeof buf, ",%.17g", (*c)[i]);
            out += buf;
        }
        out += "\n";
    }
    atomic_write(path, out);
}

} // namespace fgm
