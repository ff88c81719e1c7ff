#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "privaudit/errors.hpp"

namespace privaudit {

enum class SourceKind { BinaryApk, DecodedDir };

struct PackageEntry {
    std::string path; // entry path inside the package
    std::vector<std::byte> data;
};

/// Immutable snapshot of an app package: the manifest, layout resources,
/// the resource table, and DEX payloads.
struct AppPackage {
    SourceKind source_kind = SourceKind::BinaryApk;
    PackageEntry manifest;
    std::vector<PackageEntry> layouts;     // res/**layout**/*.xml
    std::optional<PackageEntry> resource_table;
    std::vector<PackageEntry> dex_files;   // classes*.dex, ascending numeric order
};

/// Opens a .apk (ZIP) file or an apktool-style decoded directory.
/// Throws not_an_apk, missing_manifest, corrupt_zip_entry.
AppPackage open_package(const std::filesystem::path& path);

/// Pure entry classification: true for res/**/*.xml paths with a "layout"
/// path segment (including config-qualified "layout-*" directories).
bool is_layout_path(std::string_view entry_path);

/// classes.dex -> 1, classesN.dex -> N; nullopt for anything else.
std::optional<int> dex_sequence_number(std::string_view entry_path);

} // namespace privaudit
