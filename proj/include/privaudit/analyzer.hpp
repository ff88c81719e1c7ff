#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "privaudit/api_analysis.hpp"
#include "privaudit/datasets.hpp"
#include "privaudit/manifest_analysis.hpp"
#include "privaudit/package.hpp"
#include "privaudit/safety_compare.hpp"
#include "privaudit/ui_analysis.hpp"

namespace privaudit {

/// Everything one package analysis produces.
struct AnalysisResult {
    std::string app_path;
    std::vector<LabeledField> ui_sources;
    std::vector<ApiSourceRecord> api_sources;
    std::vector<PermissionEvidence> permissions;
    CollectionEvidence evidence;
    std::vector<std::string> warnings;
};

/// Full pipeline: container -> manifest/UI/API analyses -> aggregation.
/// Layout and per-DEX failures become warnings; container or manifest
/// failures throw.
AnalysisResult analyze_package(const std::filesystem::path& path, const DatasetBundle& bundle,
                               const AppContext& context);

} // namespace privaudit
