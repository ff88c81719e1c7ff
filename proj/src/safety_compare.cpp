#include "privaudit/safety_compare.hpp"

#include <algorithm>
#include <fstream>

namespace privaudit {

namespace {

using nlohmann::json;

[[noreturn]] void decl_error(const std::string& reason)
{
    raise(errc::malformed_declaration, reason);
}

std::map<SafetyCategory, std::vector<DeclaredType>> parse_category_map(const json& node,
                                                                       const char* key)
{
    std::map<SafetyCategory, std::vector<DeclaredType>> out;
    if (!node.is_object()) {
        decl_error(std::string(key) + " must be an object");
    }
    for (const auto& [name, types] : node.items()) {
        auto category = safety_category_from_machine_name(name);
        if (!category) {
            decl_error(std::string(key) + ": unknown category '" + name + "'");
        }
        if (!types.is_array()) {
            decl_error(std::string(key) + "." + name + " must be an array");
        }
        std::vector<DeclaredType> list;
        for (const json& item : types) {
            if (!item.is_object() || !item.contains("type") || !item["type"].is_string()) {
                decl_error(std::string(key) + "." + name + ": each entry needs a 'type' string");
            }
            DeclaredType declared;
            declared.type = item["type"].get<std::string>();
            if (!item.contains("purposes") || !item["purposes"].is_array()
                    || item["purposes"].empty()) {
                decl_error(std::string(key) + "." + name + ": '" + declared.type
                           + "' needs a non-empty 'purposes' array");
            }
            for (const json& purpose : item["purposes"]) {
                if (!purpose.is_string()) {
                    decl_error("purposes must be strings");
                }
                auto parsed = purpose_from_machine_name(purpose.get<std::string>());
                if (!parsed) {
                    decl_error("unknown purpose '" + purpose.get<std::string>() + "'");
                }
                declared.purposes.insert(*parsed);
            }
            list.push_back(std::move(declared));
        }
        if (!list.empty()) {
            out.emplace(*category, std::move(list));
        }
    }
    return out;
}

json category_map_to_json(const std::map<SafetyCategory, std::vector<DeclaredType>>& map)
{
    json out = json::object();
    for (const auto& [category, types] : map) {
        json list = json::array();
        for (const DeclaredType& declared : types) {
            json purposes = json::array();
            for (Purpose purpose : declared.purposes) {
                purposes.push_back(std::string(machine_name(purpose)));
            }
            list.push_back(json{{"type", declared.type}, {"purposes", purposes}});
        }
        out[std::string(machine_name(category))] = std::move(list);
    }
    return out;
}

SafetyDeclaration parse_declaration(const json& doc)
{
    if (!doc.is_object()) {
        decl_error("declaration must be a JSON object");
    }
    if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer()) {
        decl_error("missing integer 'schema_version'");
    }
    if (doc["schema_version"].get<int>() != kDeclarationSchemaVersion) {
        decl_error("unsupported schema_version "
                   + std::to_string(doc["schema_version"].get<int>()));
    }

    SafetyDeclaration decl;
    if (doc.contains("collected")) {
        decl.collected = parse_category_map(doc["collected"], "collected");
    }
    if (doc.contains("shared")) {
        decl.shared = parse_category_map(doc["shared"], "shared");
    }
    if (doc.contains("security")) {
        const json& security = doc["security"];
        if (!security.is_object()) {
            decl_error("'security' must be an object");
        }
        decl.security.encrypted_in_transit = security.value("encrypted_in_transit", false);
        decl.security.deletion_requestable = security.value("deletion_requestable", false);
    }
    decl.claims_no_collection = doc.value("claims_no_collection", false);
    decl.claims_no_sharing = doc.value("claims_no_sharing", false);

    if (decl.claims_no_collection && !decl.collected.empty()) {
        decl_error("claims_no_collection is set but 'collected' is not empty");
    }
    if (decl.claims_no_sharing && !decl.shared.empty()) {
        decl_error("claims_no_sharing is set but 'shared' is not empty");
    }
    return decl;
}

} // namespace

SafetyDeclaration SafetyDeclaration::from_json(const json& doc)
{
    try {
        return parse_declaration(doc);
    }
    catch (const json::exception& e) {
        decl_error(e.what());
    }
}

SafetyDeclaration SafetyDeclaration::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        raise(errc::io_failure, "cannot read " + path.string());
    }
    json doc;
    try {
        in >> doc;
    }
    catch (const json::exception& e) {
        decl_error(path.string() + ": " + e.what());
    }
    return from_json(doc);
}

json SafetyDeclaration::to_json() const
{
    return json{{"schema_version", kDeclarationSchemaVersion},
                {"collected", category_map_to_json(collected)},
                {"shared", category_map_to_json(shared)},
                {"security",
                 json{{"encrypted_in_transit", security.encrypted_in_transit},
                      {"deletion_requestable", security.deletion_requestable}}},
                {"claims_no_collection", claims_no_collection},
                {"claims_no_sharing", claims_no_sharing}};
}

std::size_t SafetyDeclaration::total_declared_types() const
{
    std::size_t total = 0;
    for (const auto& [category, types] : collected) {
        total += types.size();
    }
    return total;
}

std::string_view evidence_kind_name(const EvidenceItem& item)
{
    if (std::holds_alternative<LabeledField>(item)) {
        return "ui";
    }
    if (std::holds_alternative<ApiSourceRecord>(item)) {
        return "api";
    }
    return "permission";
}

std::string describe_evidence(const EvidenceItem& item)
{
    if (const auto* field = std::get_if<LabeledField>(&item)) {
        std::string what = field->record.field_id.value_or(
                field->record.hint.value_or(field->record.widget));
        return "ui field '" + what + "' (" + format_label(field->label, field->identifier) + ")";
    }
    if (const auto* api = std::get_if<ApiSourceRecord>(&item)) {
        return "api " + ref_to_signature(api->ref) + " ("
                + format_label(api->label, api->identifier) + ")";
    }
    const auto& permission = std::get<PermissionEvidence>(item);
    return "permission " + permission.permission;
}

std::size_t CollectionEvidence::total_items() const
{
    std::size_t total = unmappable.size();
    for (const auto& [category, items] : per_category) {
        total += items.size();
    }
    return total;
}

CollectionEvidence aggregate_evidence(std::span<const LabeledField> fields,
                                      std::span<const ApiSourceRecord> apis,
                                      std::span<const PermissionEvidence> permissions,
                                      const CategoryMapping& mapping)
{
    CollectionEvidence evidence;

    auto route = [&](std::optional<SafetyCategory> category, EvidenceItem item) {
        if (category) {
            evidence.per_category[*category].push_back(std::move(item));
        }
        else {
            evidence.unmappable.push_back(std::move(item));
        }
    };

    for (const LabeledField& field : fields) {
        route(mapping.category_for(field.label, field.identifier), field);
    }
    for (const ApiSourceRecord& api : apis) {
        route(mapping.category_for(api.label, api.identifier), api);
    }
    for (const PermissionEvidence& permission : permissions) {
        route(permission.implied, permission);
    }
    return evidence;
}

std::string_view category_state_name(CategoryState state)
{
    switch (state) {
    case CategoryState::CollectedAndReported:
        return "collected_and_reported";
    case CategoryState::CollectedNotReported:
        return "collected_not_reported";
    case CategoryState::ReportedNotCollected:
        return "reported_not_collected";
    case CategoryState::Absent:
        return "absent";
    }
    return "unknown";
}

std::string_view category_state_symbol(CategoryState state)
{
    switch (state) {
    case CategoryState::CollectedAndReported:
        return "⊛"; // ⊛
    case CategoryState::CollectedNotReported:
        return "★"; // ★
    case CategoryState::ReportedNotCollected:
        return "○"; // ○
    case CategoryState::Absent:
        return " ";
    }
    return "?";
}

std::string_view verdict_name(Verdict verdict)
{
    switch (verdict) {
    case Verdict::OverReporting:
        return "over_reporting";
    case Verdict::UnderReporting:
        return "under_reporting";
    case Verdict::InconsistentReporting:
        return "inconsistent_reporting";
    }
    return "unknown";
}

std::set<Verdict> declaration_verdict(const SafetyDeclaration& decl)
{
    std::set<Verdict> verdicts;

    bool all_categories = decl.collected.size() == kSafetyCategoryCount;
    std::size_t total_types = decl.total_declared_types();
    std::size_t heavy_types = 0;
    for (const auto& [category, types] : decl.collected) {
        for (const DeclaredType& declared : types) {
            if (declared.purposes.size() >= 6) {
                ++heavy_types;
            }
        }
    }
    // "Most data types" is fixed at strictly more than half.
    bool purpose_heavy = total_types > 0 && heavy_types * 2 > total_types;
    if (all_categories || purpose_heavy) {
        verdicts.insert(Verdict::OverReporting);
    }
    if (decl.claims_no_collection || total_types == 1) {
        verdicts.insert(Verdict::UnderReporting);
    }
    if (verdicts.size() == 2) {
        verdicts.insert(Verdict::InconsistentReporting);
    }
    return verdicts;
}

std::vector<std::string> consistency_checks(const SafetyDeclaration& decl)
{
    std::vector<std::string> flags;
    for (const auto& [category, types] : decl.shared) {
        if (decl.claims_no_collection || !decl.collected.contains(category)) {
            flags.push_back("shared_without_collected: "
                            + std::string(machine_name(category)));
        }
    }
    if (decl.claims_no_collection && decl.claims_no_sharing
            && decl.security.encrypted_in_transit) {
        flags.push_back("security_claims_without_data");
    }
    if (!decl.collected.empty() && !decl.security.deletion_requestable) {
        flags.push_back("no_deletion_with_data (informational)");
    }
    return flags;
}

ComparisonReport compare(const SafetyDeclaration& decl, const CollectionEvidence& evidence)
{
    ComparisonReport report;

    for (SafetyCategory category : all_safety_categories()) {
        bool collected_evidence = false;
        std::vector<std::string> kinds;
        auto it = evidence.per_category.find(category);
        if (it != evidence.per_category.end() && !it->second.empty()) {
            collected_evidence = true;
            for (const EvidenceItem& item : it->second) {
                std::string kind(evidence_kind_name(item));
                if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) {
                    kinds.push_back(std::move(kind));
                }
            }
        }
        bool declared = decl.collected.contains(category);

        CategoryStatus status;
        status.category = category;
        if (collected_evidence && declared) {
            status.state = CategoryState::CollectedAndReported;
        }
        else if (collected_evidence) {
            status.state = CategoryState::CollectedNotReported;
        }
        else if (declared) {
            status.state = CategoryState::ReportedNotCollected;
        }
        else {
            status.state = CategoryState::Absent;
        }
        status.evidence_kinds = std::move(kinds);
        report.statuses.push_back(std::move(status));
    }

    report.verdicts = declaration_verdict(decl);
    report.inconsistencies = consistency_checks(decl);
    bool non_informational = std::any_of(
            report.inconsistencies.begin(), report.inconsistencies.end(),
            [](const std::string& flag) { return flag.find("(informational)") == std::string::npos; });
    if (non_informational) {
        report.verdicts.insert(Verdict::InconsistentReporting);
    }

    for (const EvidenceItem& item : evidence.unmappable) {
        report.unmappable_notes.push_back(describe_evidence(item)
                                          + ": no data-safety category can express it");
    }
    return report;
}

} // namespace privaudit
