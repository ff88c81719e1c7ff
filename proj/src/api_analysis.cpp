#include "privaudit/api_analysis.hpp"

#include <set>

namespace privaudit {

ApiAnalysis match_api_sources(const AppPackage& package, const DatasetBundle& bundle)
{
    ApiAnalysis analysis;
    std::set<MethodRef> seen;
    std::size_t parsed = 0;

    for (std::size_t i = 0; i < package.dex_files.size(); ++i) {
        const PackageEntry& entry = package.dex_files[i];
        DexFile dex;
        try {
            dex = parse_dex(entry.data);
        }
        catch (const Error& e) {
            analysis.warnings.push_back(entry.path + ": " + e.what());
            continue;
        }
        ++parsed;
        if (dex.had_invalid_mutf8) {
            analysis.warnings.push_back(entry.path + ": invalid MUTF-8 replaced with U+FFFD");
        }
        if (!dex.checksum_ok) {
            analysis.warnings.push_back(entry.path + ": header checksum mismatch");
        }

        int dex_index = dex_sequence_number(entry.path).value_or(static_cast<int>(i) + 1);
        for (MethodRef& ref : method_refs(dex)) {
            const ApiEntry* match = bundle.lookup_api(ref);
            if (!match || !seen.insert(ref).second) {
                continue;
            }
            analysis.records.push_back(
                    ApiSourceRecord{std::move(ref), match->label, match->identifier, dex_index});
        }
    }

    if (!package.dex_files.empty() && parsed == 0) {
        raise(errc::no_analyzable_code, "every DEX payload failed to parse");
    }
    return analysis;
}

} // namespace privaudit
