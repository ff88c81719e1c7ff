#pragma once

// Seed dataset text compiled in from datasets/ at build time; definitions
// live in the generated embedded_datasets.cpp.

namespace privaudit::detail {

extern const char* const kSeedKeywords;
extern const char* const kSeedApis;
extern const char* const kSeedPermissions;
extern const char* const kSeedMapping;
extern const char* const kSeedVersion;

} // namespace privaudit::detail
