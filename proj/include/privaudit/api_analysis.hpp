#pragma once

#include <string>
#include <vector>

#include "privaudit/datasets.hpp"
#include "privaudit/dex.hpp"
#include "privaudit/package.hpp"
#include "privaudit/taxonomy.hpp"

namespace privaudit {

/// A referenced method that matched the identifier API dataset. Evidence is
/// "referenced", not "reachable": the scan covers every entry of the
/// method_ids tables.
struct ApiSourceRecord {
    MethodRef ref;
    PrivacyLabel label;
    IdentifierTag identifier;
    int dex_index = 1; // which classes*.dex

    friend bool operator==(const ApiSourceRecord&, const ApiSourceRecord&) = default;
};

struct ApiAnalysis {
    std::vector<ApiSourceRecord> records; // de-duplicated by ref, deterministic order
    std::vector<std::string> warnings;    // per-DEX parse failures
};

/// Parses every DEX payload and matches method references against the
/// dataset. Throws no_analyzable_code only when every DEX fails to parse.
ApiAnalysis match_api_sources(const AppPackage& package, const DatasetBundle& bundle);

} // namespace privaudit
