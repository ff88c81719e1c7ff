#include "privaudit/manifest_analysis.hpp"

#include <set>

namespace privaudit {

std::vector<std::string> extract_permissions(const XmlDocument& manifest)
{
    if (manifest.root.name != "manifest") {
        raise(errc::not_a_manifest, "root element is '" + manifest.root.name + "'");
    }
    std::vector<std::string> permissions;
    std::set<std::string> seen;
    for (const XmlElement& child : manifest.root.children) {
        if (child.name != "uses-permission" && child.name != "uses-permission-sdk-23") {
            continue;
        }
        const XmlAttribute* name = child.find_attribute("name");
        if (!name) {
            continue;
        }
        auto value = resolve_string(name->value, nullptr);
        if (!value || value->empty()) {
            continue;
        }
        if (seen.insert(*value).second) {
            permissions.push_back(*value);
        }
    }
    return permissions;
}

std::vector<PermissionEvidence> map_permissions(std::span<const std::string> permissions,
                                                std::span<const PermissionRule> rules)
{
    std::vector<PermissionEvidence> out;
    out.reserve(permissions.size());
    for (const std::string& permission : permissions) {
        PermissionEvidence evidence{permission, std::nullopt};
        for (const PermissionRule& rule : rules) {
            if (rule.permission == permission) {
                evidence.implied = rule.implied;
                break;
            }
        }
        out.push_back(std::move(evidence));
    }
    return out;
}

} // namespace privaudit
