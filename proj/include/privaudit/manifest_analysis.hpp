#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "privaudit/axml.hpp"
#include "privaudit/datasets.hpp"
#include "privaudit/taxonomy.hpp"

namespace privaudit {

/// A declared permission, verbatim, with the data-safety category developer
/// guidance ties to it (if any). Declared is not exercised; this is an
/// expectation, not proof of collection.
struct PermissionEvidence {
    std::string permission;
    std::optional<SafetyCategory> implied;

    friend bool operator==(const PermissionEvidence&, const PermissionEvidence&) = default;
};

/// android:name of every uses-permission / uses-permission-sdk-23 element,
/// document order, de-duplicated. Throws not_a_manifest.
std::vector<std::string> extract_permissions(const XmlDocument& manifest);

/// Pairs each permission with its implied category (exact-match rules only).
std::vector<PermissionEvidence> map_permissions(std::span<const std::string> permissions,
                                                std::span<const PermissionRule> rules);

} // namespace privaudit
