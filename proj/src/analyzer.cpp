#include "privaudit/analyzer.hpp"

namespace privaudit {

AnalysisResult analyze_package(const std::filesystem::path& path, const DatasetBundle& bundle,
                               const AppContext& context)
{
    AnalysisResult result;
    result.app_path = path.generic_string();

    AppPackage package = open_package(path);

    XmlDocument manifest;
    if (looks_like_binary_xml(package.manifest.data)) {
        manifest = parse_binary_xml(package.manifest.data);
    }
    else {
        std::string_view text(reinterpret_cast<const char*>(package.manifest.data.data()),
                              package.manifest.data.size());
        manifest = parse_plain_xml(text);
    }
    result.permissions = map_permissions(extract_permissions(manifest), bundle.permissions());

    UiAnalysis ui = analyze_layouts(package, bundle, context);
    result.ui_sources = std::move(ui.fields);
    result.warnings = std::move(ui.warnings);

    if (package.dex_files.empty()) {
        result.warnings.push_back("package has no DEX payloads; API analysis skipped");
    }
    else {
        ApiAnalysis api = match_api_sources(package, bundle);
        result.api_sources = std::move(api.records);
        result.warnings.insert(result.warnings.end(), api.warnings.begin(), api.warnings.end());
    }

    result.evidence = aggregate_evidence(result.ui_sources, result.api_sources,
                                         result.permissions, bundle.mapping());
    return result;
}

} // namespace privaudit
